use crate::error::{Error, Result};
use crate::geometry::{add, norm, scale, sub, unit, Tensor3, Vec3};
use crate::integral_solver::{DomainGrid, GreenSolver, SolverConfig};
use crate::permittivity::PermittivityModel;
use num_complex::Complex64;
use serde::Serialize;

// Levi-Civita symbol.
fn levi(k: usize, m: usize, j: usize) -> f64 {
    match (k, m, j) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `C_ik = Σ ε_kmj D_m X_ij` with `D_m` the central difference of step `h`
/// in the source argument around `s`.
pub fn discrete_curl(x: impl Fn(Vec3) -> Result<Tensor3>, s: Vec3, h: f64) -> Result<Tensor3> {
    let mut d = Vec::with_capacity(3);
    for m in 0..3 {
        let p = x(add(s, scale(unit(m), h)))?;
        let q = x(sub(s, scale(unit(m), h)))?;
        d.push((p - q) * (1.0 / (2.0 * h)));
    }
    Ok(curl_from_derivatives(&d))
}

fn curl_from_derivatives(d: &[Tensor3]) -> Tensor3 {
    Tensor3::from_fn(|i, k| {
        let mut v = Complex64::new(0.0, 0.0);
        for m in 0..3 {
            for j in 0..3 {
                let e = levi(k, m, j);
                if e != 0.0 {
                    v += d[m][(i, j)] * e;
                }
            }
        }
        v
    })
}

// Offsets of the 36 Γ samples: source ± h eₘ ± (h/2) eⱼ.
fn gradient_stencil(s: Vec3, h: f64) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(36);
    for m in 0..3 {
        for sm in [1.0, -1.0] {
            for j in 0..3 {
                for sj in [1.0, -1.0] {
                    out.push(add(add(s, scale(unit(m), sm * h)), scale(unit(j), sj * 0.5 * h)));
                }
            }
        }
    }
    out
}

fn curl_of_gradient_from_samples(samples: &[[Complex64; 3]], h: f64) -> Tensor3 {
    let at = |m: usize, sm: usize, j: usize, sj: usize| samples[((m * 2 + sm) * 3 + j) * 2 + sj];
    // D_m of G2_ij = (Γ_i(+m+j) − Γ_i(+m−j) − Γ_i(−m+j) + Γ_i(−m−j)) / (2h · h)
    let d: Vec<Tensor3> = (0..3)
        .map(|m| Tensor3::from_fn(|i, j| (at(m, 0, j, 0)[i] - at(m, 0, j, 1)[i] - at(m, 1, j, 0)[i] + at(m, 1, j, 1)[i]) / (2.0 * h * h)))
        .collect();
    curl_from_derivatives(&d)
}

/// Discrete curl, step `h`, of the discrete source gradient, step `h/2`, of
/// a vector field `Γ(s)`. Vanishes identically in the continuum.
pub fn discrete_curl_of_gradient(gamma: impl Fn(Vec3) -> Result<[Complex64; 3]>, s: Vec3, h: f64) -> Result<Tensor3> {
    let samples: Vec<[Complex64; 3]> = gradient_stencil(s, h).into_iter().map(gamma).collect::<Result<_>>()?;
    Ok(curl_of_gradient_from_samples(&samples, h))
}

/// Source-side curls of the solved `G`, `G1` and `G2 = ∂ⱼˢ Γ` at one field point.
#[derive(Clone, Debug, Serialize)]
pub struct CurlReport {
    pub h: f64,
    /// `max |curl G2|`: the discretization residual of a curl of a gradient.
    pub g2_curl: f64,
    pub g1_curl: f64,
    pub g_curl: f64,
    /// `max |curl G − curl G1|`, the curl of the solver's own `G − G1`.
    pub g_minus_g1_curl: f64,
    /// `g2_curl / g1_curl`.
    pub ratio: f64,
}

/// Apply the source-side curl to `G`, `G1` and `G2` solved on `grid`, at
/// field point `r` and source `r′`, with stencil step `h` equal to the grid
/// spacing. `r′` must lie where the medium is locally homogeneous over the
/// stencil so the source-side fields are smooth there.
pub fn curl_elimination_check(model: &PermittivityModel, grid: &DomainGrid, omega: Complex64, r: Vec3, r_prime: Vec3, config: SolverConfig) -> Result<CurlReport> {
    let h = grid.spacing();
    if norm(sub(r, r_prime)) < 3.0 * h {
        return Err(Error::InvalidArgument("field and source points must be at least 3h apart".into()));
    }
    if grid.distance_to_nodes(r_prime) < 0.25 * h {
        return Err(Error::InvalidArgument("the curl source point sits on a collocation node".into()));
    }
    let solver = GreenSolver::new(model, grid, omega, config, r_prime)?;
    let shifts: Vec<Vec3> = (0..3).flat_map(|m| [add(r_prime, scale(unit(m), h)), sub(r_prime, scale(unit(m), h))]).collect();
    let g1 = solver.solve_g1_many(&shifts)?;
    let g = solver.solve_g_many(&shifts)?;
    let derivative = |fields: &[crate::integral_solver::GreenField], interp: &dyn Fn(&crate::integral_solver::GreenField) -> Result<Tensor3>| -> Result<Vec<Tensor3>> {
        (0..3).map(|m| Ok((interp(&fields[2 * m])? - interp(&fields[2 * m + 1])?) * (1.0 / (2.0 * h)))).collect()
    };
    let c_g1 = curl_from_derivatives(&derivative(&g1, &|f| solver.interpolate_g1(f, r))?);
    let c_g = curl_from_derivatives(&derivative(&g, &|f| solver.interpolate_g(f, r))?);
    let (gammas, _) = solver.solve_gamma_many(&gradient_stencil(r_prime, h))?;
    let samples: Vec<[Complex64; 3]> = gammas.iter().map(|f| solver.interpolate_gamma(f, r)).collect::<Result<_>>()?;
    let c_g2 = curl_of_gradient_from_samples(&samples, h);
    let g1_curl = c_g1.max_abs();
    let g2_curl = c_g2.max_abs();
    Ok(CurlReport {
        h,
        g2_curl,
        g1_curl,
        g_curl: c_g.max_abs(),
        g_minus_g1_curl: (c_g - c_g1).max_abs(),
        ratio: if g1_curl > 0.0 { g2_curl / g1_curl } else { f64::INFINITY },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curl_of_polynomial_gradient_is_exact() {
        // Γ = ∇φ of a cubic: the step mismatch cancels to rounding.
        let phi_grad = |p: Vec3| -> Result<[Complex64; 3]> {
            Ok([
                Complex64::new(2.0 * p[0] * p[1] + p[2], 0.0),
                Complex64::new(p[0] * p[0], 0.0),
                Complex64::new(p[0], 0.0),
            ])
        };
        let c = discrete_curl_of_gradient(phi_grad, [0.3, -0.2, 0.1], 0.1).unwrap();
        assert!(c.max_abs() < 1e-12, "{}", c.max_abs());
    }
}
