use super::born::{born_solve, BornOptions, SolveReport};
use super::direct::Factorization;
use super::grid::DomainGrid;
use super::near::box_moments;
use super::residual::helmholtz_residual_at;
use super::operator::{KernelOperator, DENSE_CAP};
use crate::constants::Units;
use crate::error::{Error, Result};
use crate::geometry::{add, norm, scale, sub, unit, Tensor3, Vec3};
use crate::green_free::{free_dyadic_g0, free_g1_0, free_gamma_0, radial, ReferenceMedium, WaveNumbers};
use crate::permittivity::PermittivityModel;
use faer::{c64, Mat};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Gauss points per direction for voxels next to an interpolation point.
const NEAR_ORDER: usize = 6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    /// Direct up to the dense cap, Born above it.
    #[default]
    Auto,
    Born,
    Direct,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverConfig {
    pub method: SolverMethod,
    pub reference: ReferenceMedium,
    pub units: Units,
    pub born: BornOptions,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { method: SolverMethod::Auto, reference: ReferenceMedium::Background, units: Units::default(), born: BornOptions::default() }
    }
}

impl SolverConfig {
    pub fn with_method(mut self, method: SolverMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_units(mut self, units: Units) -> Self {
        self.units = units;
        self
    }

    pub fn natural() -> Self {
        Self::default().with_units(Units::NATURAL)
    }

    pub fn with_reference(mut self, reference: ReferenceMedium) -> Self {
        self.reference = reference;
        self
    }
}

/// Tensor values of a Green function at every collocation node.
#[derive(Clone, Debug)]
pub struct GreenField {
    pub grid: DomainGrid,
    pub omega: Complex64,
    pub source: Vec3,
    pub values: Vec<Tensor3>,
}

/// Vector values (the `Γ` part) at every collocation node.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub grid: DomainGrid,
    pub omega: Complex64,
    pub source: Vec3,
    pub values: Vec<[Complex64; 3]>,
}

impl GreenField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(Tensor3::max_abs).fold(0.0, f64::max)
    }

    /// Largest entrywise difference divided by the larger max norm.
    pub fn relative_difference(&self, other: &GreenField) -> f64 {
        let diff = self.values.iter().zip(&other.values).map(|(a, b)| (*a - *b).max_abs()).fold(0.0, f64::max);
        diff / self.max_abs().max(other.max_abs()).max(f64::MIN_POSITIVE)
    }
}

/// Kernel operator at one frequency together with everything needed to
/// solve for `G`, `G1` and `Γ` with one (lazily built) factorization.
pub struct GreenSolver<'m> {
    pub model: &'m PermittivityModel,
    pub grid: DomainGrid,
    pub config: SolverConfig,
    pub wavenumbers: WaveNumbers,
    pub operator: KernelOperator,
    factorization: OnceLock<std::result::Result<Factorization, String>>,
}

impl<'m> GreenSolver<'m> {
    /// `reference_point` fixes the reference permittivity when it follows
    /// the source; all solves of this solver share that reference.
    pub fn new(model: &'m PermittivityModel, grid: &DomainGrid, omega: Complex64, config: SolverConfig, reference_point: Vec3) -> Result<Self> {
        if omega.norm() == 0.0 {
            return Err(Error::ZeroFrequency);
        }
        let method = config.method;
        if method == SolverMethod::Direct && grid.n > DENSE_CAP {
            return Err(Error::ResolutionCap { n: grid.n, cap: DENSE_CAP, method: "direct" });
        }
        let wn = config.reference.resolve(model, Some(grid), reference_point, omega, &config.units)?;
        let operator = KernelOperator::discretize(model, grid, &wn)?;
        Ok(Self { model, grid: grid.clone(), config, wavenumbers: wn, operator, factorization: OnceLock::new() })
    }

    pub fn omega(&self) -> Complex64 {
        self.wavenumbers.omega
    }

    fn effective_method(&self) -> SolverMethod {
        match self.config.method {
            SolverMethod::Auto if self.grid.n <= DENSE_CAP => SolverMethod::Direct,
            SolverMethod::Auto => SolverMethod::Born,
            m => m,
        }
    }

    pub fn factorization(&self) -> Result<&Factorization> {
        match self.factorization.get_or_init(|| Factorization::new(&self.operator).map_err(|e| e.to_string())) {
            Ok(f) => Ok(f),
            Err(msg) => Err(if msg.contains("singular") { Error::Singular } else { Error::InvalidArgument(msg.clone()) }),
        }
    }

    /// Solve `(I − K) X = rhs` for a block of right-hand sides.
    pub fn solve_block(&self, rhs: &Mat<c64>) -> Result<(Mat<c64>, SolveReport)> {
        match self.effective_method() {
            SolverMethod::Born => born_solve(&self.operator, rhs, &self.config.born),
            _ => {
                let f = self.factorization()?;
                let x = f.solve(rhs)?;
                Ok((
                    x,
                    SolveReport {
                        method: "direct".into(),
                        condition_estimate: Some(f.condition_estimate),
                        near_resonance: f.near_resonance,
                        ..Default::default()
                    },
                ))
            }
        }
    }

    fn tensor_rhs(&self, f: impl Fn(Vec3) -> Result<Tensor3>) -> Result<Mat<c64>> {
        let n = self.grid.len();
        let mut m = Mat::<c64>::zeros(3 * n, 3);
        for a in 0..n {
            let t = f(self.grid.point(a))?;
            for i in 0..3 {
                for j in 0..3 {
                    m[(3 * a + i, j)] = t[(i, j)];
                }
            }
        }
        Ok(m)
    }

    fn to_field(&self, x: &Mat<c64>, col0: usize, source: Vec3) -> GreenField {
        let values = (0..self.grid.len())
            .map(|a| Tensor3::from_fn(|i, j| x[(3 * a + i, col0 + j)]))
            .collect();
        GreenField { grid: self.grid.clone(), omega: self.omega(), source, values }
    }

    fn check_source(&self, s: Vec3) -> Result<()> {
        if self.grid.distance_to_nodes(s) < 1e-9 * self.grid.spacing() {
            return Err(Error::CoincidentPoints);
        }
        Ok(())
    }

    /// Full Green tensor for source `s`.
    pub fn solve_g(&self, s: Vec3) -> Result<(GreenField, SolveReport)> {
        self.check_source(s)?;
        let rhs = self.tensor_rhs(|r| Ok(free_dyadic_g0(self.model, r, s, &self.wavenumbers)?.value))?;
        let (x, rep) = self.solve_block(&rhs)?;
        Ok((self.to_field(&x, 0, s), rep))
    }

    /// Noise-current response part `G1`.
    pub fn solve_g1(&self, s: Vec3) -> Result<(GreenField, SolveReport)> {
        self.check_source(s)?;
        let rhs = self.tensor_rhs(|r| Ok(free_g1_0(r, s, &self.wavenumbers)?.value))?;
        let (x, rep) = self.solve_block(&rhs)?;
        Ok((self.to_field(&x, 0, s), rep))
    }

    /// `Γ` for several sources at once (one column per source).
    pub fn solve_gamma_many(&self, sources: &[Vec3]) -> Result<(Vec<VectorField>, SolveReport)> {
        let n = self.grid.len();
        let mut rhs = Mat::<c64>::zeros(3 * n, sources.len());
        for (c, &s) in sources.iter().enumerate() {
            self.check_source(s)?;
            for a in 0..n {
                let v = free_gamma_0(self.model, self.grid.point(a), s, &self.wavenumbers)?;
                for i in 0..3 {
                    rhs[(3 * a + i, c)] = v[i];
                }
            }
        }
        let (x, rep) = self.solve_block(&rhs)?;
        let fields = sources
            .iter()
            .enumerate()
            .map(|(c, &s)| VectorField {
                grid: self.grid.clone(),
                omega: self.omega(),
                source: s,
                values: (0..n).map(|a| [x[(3 * a, c)], x[(3 * a + 1, c)], x[(3 * a + 2, c)]]).collect(),
            })
            .collect();
        Ok((fields, rep))
    }

    pub fn solve_gamma(&self, s: Vec3) -> Result<(VectorField, SolveReport)> {
        let (mut v, rep) = self.solve_gamma_many(&[s])?;
        Ok((v.remove(0), rep))
    }

    /// `G1` for several sources in one block solve.
    pub fn solve_g1_many(&self, sources: &[Vec3]) -> Result<Vec<GreenField>> {
        self.solve_tensor_many(sources, |r, s| Ok(free_g1_0(r, s, &self.wavenumbers)?.value))
    }

    /// `G` for several sources in one block solve.
    pub fn solve_g_many(&self, sources: &[Vec3]) -> Result<Vec<GreenField>> {
        self.solve_tensor_many(sources, |r, s| Ok(free_dyadic_g0(self.model, r, s, &self.wavenumbers)?.value))
    }

    fn solve_tensor_many(&self, sources: &[Vec3], f: impl Fn(Vec3, Vec3) -> Result<Tensor3>) -> Result<Vec<GreenField>> {
        let n = self.grid.len();
        let mut rhs = Mat::<c64>::zeros(3 * n, 3 * sources.len());
        for (c, &s) in sources.iter().enumerate() {
            self.check_source(s)?;
            for a in 0..n {
                let t = f(self.grid.point(a), s)?;
                for i in 0..3 {
                    for j in 0..3 {
                        rhs[(3 * a + i, 3 * c + j)] = t[(i, j)];
                    }
                }
            }
        }
        let (x, _) = self.solve_block(&rhs)?;
        Ok(sources.iter().enumerate().map(|(c, &s)| self.to_field(&x, 3 * c, s)).collect())
    }

    /// `G2 = ∂ⱼˢ Γ` by central differences over source shifts `±(h/2) eⱼ`.
    pub fn solve_g2(&self, s: Vec3) -> Result<GreenField> {
        let step = 0.5 * self.grid.spacing();
        let sources: Vec<Vec3> = (0..3).flat_map(|j| [add(s, scale(unit(j), step)), sub(s, scale(unit(j), step))]).collect();
        let (gam, _) = self.solve_gamma_many(&sources)?;
        let values = (0..self.grid.len())
            .map(|a| Tensor3::from_fn(|i, j| (gam[2 * j].values[a][i] - gam[2 * j + 1].values[a][i]) / (2.0 * step)))
            .collect();
        Ok(GreenField { grid: self.grid.clone(), omega: self.omega(), source: s, values })
    }

    /// `Σ_b Σ_k ∫_{voxel b} K_ik(r, v) dv x_{b,k}` at a point `r` that is not a
    /// collocation node. Voxels within `1.5h` of `r` are integrated with
    /// the pyramid rule of [`box_moments`]; the rest use the point rule.
    fn kernel_sum(&self, r: Vec3, column: impl Fn(usize, usize) -> Complex64) -> [Complex64; 3] {
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = [zero; 3];
        if self.operator.is_zero() {
            return acc;
        }
        let h = self.grid.spacing();
        let w = self.grid.weight();
        for b in 0..self.grid.len() {
            let gl = self.operator.log_gradient[b];
            let ct = self.operator.contrast[b];
            if ct == zero && gl.iter().all(|x| *x == zero) {
                continue;
            }
            let v = self.grid.point(b);
            let x = sub(r, v);
            let rho = norm(x);
            let (ig, igx) = if rho < 1.5 * h {
                let half = [0.5 * h; 3];
                box_moments(r, sub(v, half), add(v, half), self.wavenumbers.q0, NEAR_ORDER)
            } else {
                let rad = radial(rho, self.wavenumbers.q0);
                (rad.g * w, [rad.dg * (x[0] / rho * w), rad.dg * (x[1] / rho * w), rad.dg * (x[2] / rho * w)])
            };
            let dot: Complex64 = (0..3).map(|k| gl[k] * column(b, k)).sum();
            for i in 0..3 {
                acc[i] += igx[i] * dot + ct * ig * column(b, i);
            }
        }
        acc
    }

    fn node_at(&self, r: Vec3) -> Option<usize> {
        let a = self.grid.nearest_node(r);
        (norm(sub(r, self.grid.point(a))) < 1e-12 * self.grid.spacing()).then_some(a)
    }

    /// Nyström interpolation of a solved tensor field at `r`, given the
    /// inhomogeneous term that produced it.
    pub fn interpolate(&self, field: &GreenField, r: Vec3, rhs: impl Fn(Vec3) -> Result<Tensor3>) -> Result<Tensor3> {
        if let Some(a) = self.node_at(r) {
            return Ok(field.values[a]);
        }
        let mut t = rhs(r)?;
        for j in 0..3 {
            let k = self.kernel_sum(r, |b, k| field.values[b][(k, j)]);
            for i in 0..3 {
                t[(i, j)] += k[i];
            }
        }
        Ok(t)
    }

    /// `G(r, s)` at an arbitrary field point.
    pub fn interpolate_g(&self, field: &GreenField, r: Vec3) -> Result<Tensor3> {
        self.interpolate(field, r, |p| Ok(free_dyadic_g0(self.model, p, field.source, &self.wavenumbers)?.value))
    }

    /// `G1(r, s)` at an arbitrary field point.
    pub fn interpolate_g1(&self, field: &GreenField, r: Vec3) -> Result<Tensor3> {
        self.interpolate(field, r, |p| Ok(free_g1_0(p, field.source, &self.wavenumbers)?.value))
    }

    /// Helmholtz residual of the Nyström extension of `field` at fixed
    /// physical points, with the stencil spacing of this solver's grid.
    pub fn helmholtz_residual_at(&self, field: &GreenField, points: &[Vec3], exclusion: f64) -> Result<f64> {
        let omega = self.omega();
        helmholtz_residual_at(points, self.grid.spacing(), field.source, exclusion, |p| self.interpolate_g(field, p), |r| {
            Ok(omega * omega * self.model.eval(r, omega)? / self.wavenumbers.units.c2())
        })
    }

    /// `Γ(r, s)` at an arbitrary field point.
    pub fn interpolate_gamma(&self, field: &VectorField, r: Vec3) -> Result<[Complex64; 3]> {
        if let Some(a) = self.node_at(r) {
            return Ok(field.values[a]);
        }
        let mut v = free_gamma_0(self.model, r, field.source, &self.wavenumbers)?;
        let k = self.kernel_sum(r, |b, k| field.values[b][k]);
        for i in 0..3 {
            v[i] += k[i];
        }
        Ok(v)
    }
}

/// Solve for `G` with the inhomogeneous term built at source `s`.
pub fn solve_g(model: &PermittivityModel, omega: Complex64, grid: &DomainGrid, s: Vec3, config: SolverConfig) -> Result<(GreenField, SolveReport)> {
    GreenSolver::new(model, grid, omega, config, s)?.solve_g(s)
}

pub fn solve_g1(model: &PermittivityModel, omega: Complex64, grid: &DomainGrid, s: Vec3, config: SolverConfig) -> Result<(GreenField, SolveReport)> {
    GreenSolver::new(model, grid, omega, config, s)?.solve_g1(s)
}

pub fn solve_gamma(model: &PermittivityModel, omega: Complex64, grid: &DomainGrid, s: Vec3, config: SolverConfig) -> Result<(VectorField, SolveReport)> {
    GreenSolver::new(model, grid, omega, config, s)?.solve_gamma(s)
}
