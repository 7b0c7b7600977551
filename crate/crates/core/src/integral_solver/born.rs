use super::operator::KernelOperator;
use crate::error::{Error, Result};
use faer::{c64, Mat};
use serde::Serialize;

/// Convergence record of a solve.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SolveReport {
    pub method: String,
    pub iterations: usize,
    /// Relative increment norm after each Born step.
    pub born_residuals: Vec<f64>,
    pub spectral_radius: Option<f64>,
    /// 1-norm condition estimate of `I − K` for direct solves.
    pub condition_estimate: Option<f64>,
    pub near_resonance: bool,
    /// Finite-difference residual of the governing equation, when computed.
    pub pde_residual: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct BornOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub power_iterations: usize,
}

impl Default for BornOptions {
    fn default() -> Self {
        Self { max_iter: 400, tol: 1e-13, power_iterations: 40 }
    }
}

fn max_abs(m: &Mat<c64>) -> f64 {
    let mut v = 0.0_f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            v = v.max(m[(i, j)].norm());
        }
    }
    v
}

/// Neumann series `Σ Kⁿ rhs`, stopped when the increment falls below
/// `tol` relative to the running sum (max norm).
pub fn born_solve(op: &KernelOperator, rhs: &Mat<c64>, opts: &BornOptions) -> Result<(Mat<c64>, SolveReport)> {
    let mut report = SolveReport { method: "born".into(), ..Default::default() };
    if op.is_zero() {
        report.spectral_radius = Some(0.0);
        return Ok((rhs.clone(), report));
    }
    let rho = op.spectral_radius(opts.power_iterations);
    report.spectral_radius = Some(rho);
    if !(rho < 1.0) {
        return Err(Error::BornDivergent { spectral_radius: rho });
    }
    let mut x = rhs.clone();
    let mut d = rhs.clone();
    for it in 1..=opts.max_iter {
        d = op.apply(&d);
        x = &x + &d;
        let rel = max_abs(&d) / max_abs(&x).max(f64::MIN_POSITIVE);
        report.born_residuals.push(rel);
        report.iterations = it;
        if !rel.is_finite() {
            return Err(Error::BornDivergent { spectral_radius: rho });
        }
        if rel < opts.tol {
            return Ok((x, report));
        }
    }
    Err(Error::BornStalled { iterations: opts.max_iter, tolerance: opts.tol })
}
