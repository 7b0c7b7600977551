use kkgreen::green_free::{free_dyadic_g0, radial, scalar_g, WaveNumbers};
use kkgreen::integral_solver::{reciprocity_check, DomainGrid, GreenSolver, SolverConfig, SolverMethod, BORN_CAP, DENSE_CAP};
use kkgreen::permittivity::{DispersionModel, OscillatorSign, PermittivityModel, Region, Shape, SpatialProfile};
use kkgreen::{Complex64, Error, Units};
use std::f64::consts::PI;

fn weak_ball(omega_p: f64, mollify: f64) -> PermittivityModel {
    let osc = DispersionModel::new(1.0, omega_p, 0.1, OscillatorSign::Absorbing).unwrap();
    let region = Region::new(Shape::Ball { center: [0.0; 3], radius: 0.25 }, vec![0]);
    PermittivityModel::new(vec![osc], SpatialProfile::new(Vec::new(), vec![region], mollify)).unwrap()
}

fn w(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn scalar_green_function_closed_form() {
    let q = Complex64::new(2.0, 0.3);
    let g = scalar_g(0.7, q).unwrap();
    let want = (Complex64::i() * q * 0.7).exp() / (4.0 * PI * 0.7);
    assert!((g - want).norm() < 1e-15);
    assert!(matches!(scalar_g(0.0, q), Err(Error::CoincidentPoints)));
    // (d²/dρ² + (2/ρ) d/dρ + q²) g = 0 away from the origin.
    let r = radial(0.9, q);
    assert!((r.d2g + 2.0 / 0.9 * r.dg + q * q * r.g).norm() < 1e-13);
}

#[test]
fn vacuum_solution_is_the_free_tensor() {
    let model = PermittivityModel::vacuum();
    let grid = DomainGrid::new([0.0; 3], 1.0, 4).unwrap();
    let s = grid.place_source([0.3, -0.2, 0.1]);
    let solver = GreenSolver::new(&model, &grid, w(1.5), SolverConfig::natural(), s).unwrap();
    let (field, _) = solver.solve_g(s).unwrap();
    let wn = WaveNumbers::new(w(1.5), w(1.0), Units::NATURAL);
    for (a, v) in field.values.iter().enumerate() {
        let want = free_dyadic_g0(&model, grid.point(a), s, &wn).unwrap().value;
        assert!((*v - want).max_abs() <= 1e-12 * want.max_abs());
    }
}

#[test]
fn born_and_direct_agree_on_weak_contrast() {
    let model = weak_ball(0.1, 0.4);
    let grid = DomainGrid::new([0.0; 3], 1.0, 5).unwrap();
    let s = grid.place_source([0.45, 0.4, -0.42]);
    for omega in [0.5, 1.0, 2.0] {
        let born = GreenSolver::new(&model, &grid, w(omega), SolverConfig::natural().with_method(SolverMethod::Born), s).unwrap();
        let direct = GreenSolver::new(&model, &grid, w(omega), SolverConfig::natural().with_method(SolverMethod::Direct), s).unwrap();
        let (a, ra) = born.solve_g(s).unwrap();
        let (b, rb) = direct.solve_g(s).unwrap();
        assert_eq!(ra.method, "born");
        assert_eq!(rb.method, "direct");
        assert!(a.relative_difference(&b) <= 1e-8, "omega {omega}: {}", a.relative_difference(&b));
    }
}

#[test]
fn negative_frequency_gives_the_conjugate() {
    let model = weak_ball(0.2, 0.4);
    let grid = DomainGrid::new([0.0; 3], 1.0, 5).unwrap();
    let s = grid.place_source([0.1, 0.2, -0.3]);
    let pos = GreenSolver::new(&model, &grid, w(0.9), SolverConfig::natural(), s).unwrap().solve_g(s).unwrap().0;
    let neg = GreenSolver::new(&model, &grid, w(-0.9), SolverConfig::natural(), s).unwrap().solve_g(s).unwrap().0;
    let scale = pos.max_abs();
    for (a, b) in pos.values.iter().zip(&neg.values) {
        assert!((*a - b.conj()).max_abs() <= 1e-12 * scale);
    }
}

#[test]
fn exterior_reciprocity_improves_under_refinement() {
    let model = weak_ball(0.1, 1.0 / 3.0);
    let (p1, p2) = ([0.45, 0.4, -0.42], [-0.41, -0.44, 0.43]);
    let mut errs = Vec::new();
    for n in [6, 9] {
        let grid = DomainGrid::new([0.0; 3], 1.0, n).unwrap();
        let solver = GreenSolver::new(&model, &grid, w(1.0), SolverConfig::natural(), p1).unwrap();
        let (a, b) = (grid.place_source(p1), grid.place_source(p2));
        let f = solver.solve_g_many(&[a, b]).unwrap();
        let g12 = solver.interpolate_g(&f[1], a).unwrap();
        let g21 = solver.interpolate_g(&f[0], b).unwrap();
        errs.push(reciprocity_check(&g12, &g21));
    }
    assert!(errs[1] < errs[0] / 2.0, "reciprocity {errs:?}");
}

#[test]
fn resolution_caps_are_enforced() {
    let model = weak_ball(0.1, 0.4);
    let s = [0.31, 0.22, 0.13];
    let big = DomainGrid::new([0.0; 3], 1.0, DENSE_CAP + 1).unwrap();
    let direct = GreenSolver::new(&model, &big, w(1.0), SolverConfig::natural().with_method(SolverMethod::Direct), s);
    assert!(matches!(direct.and_then(|g| g.solve_g(s)), Err(Error::ResolutionCap { .. })));
    let huge = DomainGrid::new([0.0; 3], 1.0, BORN_CAP + 1).unwrap();
    let born = GreenSolver::new(&model, &huge, w(1.0), SolverConfig::natural().with_method(SolverMethod::Born), s);
    assert!(matches!(born.and_then(|g| g.solve_g(s)), Err(Error::ResolutionCap { .. })));
}

#[test]
fn sharp_interfaces_are_rejected() {
    let model = weak_ball(0.1, 0.1);
    let grid = DomainGrid::new([0.0; 3], 1.0, 6).unwrap();
    let s = [0.41, 0.43, 0.45];
    let res = GreenSolver::new(&model, &grid, w(1.0), SolverConfig::natural(), s).and_then(|g| g.solve_g(s));
    assert!(matches!(res, Err(Error::UnderResolvedInterface { .. })));
}

#[test]
fn strong_contrast_stops_the_born_series() {
    let model = weak_ball(3.0, 0.4);
    let grid = DomainGrid::new([0.0; 3], 1.0, 6).unwrap();
    let s = [0.41, 0.43, 0.45];
    let res = GreenSolver::new(&model, &grid, w(1.0), SolverConfig::natural().with_method(SolverMethod::Born), s).and_then(|g| g.solve_g(s));
    assert!(matches!(res, Err(Error::BornDivergent { .. } | Error::BornStalled { .. })), "{res:?}");
}

#[test]
fn lower_half_plane_frequency_is_rejected() {
    let model = weak_ball(0.1, 0.4);
    let grid = DomainGrid::new([0.0; 3], 1.0, 4).unwrap();
    let res = GreenSolver::new(&model, &grid, Complex64::new(1.0, -0.1), SolverConfig::natural(), [0.4; 3]).and_then(|g| g.solve_g([0.4; 3]));
    assert!(matches!(res, Err(Error::LowerHalfPlane { .. })));
}
