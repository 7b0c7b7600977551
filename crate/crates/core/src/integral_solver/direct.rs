use super::born::SolveReport;
use super::operator::{KernelOperator, DENSE_CAP};
use crate::error::{Error, Result};
use faer::linalg::solvers::PartialPivLu;
use faer::prelude::*;
use faer::{c64, Mat};

/// Condition estimates above this flag a near-resonant system.
pub const CONDITION_WARNING: f64 = 1e8;

/// Pivoted LU of `I − K`, reusable across right-hand sides.
pub struct Factorization {
    lu: Option<PartialPivLu<c64>>,
    dim: usize,
    pub condition_estimate: f64,
    pub near_resonance: bool,
}

impl Factorization {
    pub fn new(op: &KernelOperator) -> Result<Self> {
        let dim = op.dim();
        if op.is_zero() {
            return Ok(Self { lu: None, dim, condition_estimate: 1.0, near_resonance: false });
        }
        let Some(k) = op.dense() else {
            return Err(Error::ResolutionCap { n: op.grid.n, cap: DENSE_CAP, method: "direct" });
        };
        let a = Mat::<c64>::from_fn(dim, dim, |i, j| if i == j { c64::new(1.0, 0.0) - k[(i, j)] } else { -k[(i, j)] });
        let norm_a = (0..dim).map(|j| (0..dim).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
        let lu = a.partial_piv_lu();
        drop(a);
        let u = lu.U();
        if (0..dim).any(|i| {
            let p = u[(i, i)];
            p.norm() == 0.0 || !p.re.is_finite() || !p.im.is_finite()
        }) {
            return Err(Error::Singular);
        }
        let mut f = Self { lu: Some(lu), dim, condition_estimate: f64::NAN, near_resonance: false };
        let inv_norm = f.inverse_norm_estimate();
        let cond = norm_a * inv_norm;
        if !cond.is_finite() {
            return Err(Error::Singular);
        }
        f.condition_estimate = cond;
        if cond > CONDITION_WARNING {
            f.near_resonance = true;
            log::warn!("I - K is ill-conditioned (estimate {cond:.3e}); the frequency is close to a resonance");
        }
        Ok(f)
    }

    pub fn solve(&self, rhs: &Mat<c64>) -> Result<Mat<c64>> {
        let x = match &self.lu {
            None => rhs.clone(),
            Some(lu) => lu.solve(rhs),
        };
        for j in 0..x.ncols() {
            for i in 0..x.nrows() {
                let v = x[(i, j)];
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Singular);
                }
            }
        }
        Ok(x)
    }

    /// Hager-Higham estimate of `‖(I − K)⁻¹‖₁`.
    fn inverse_norm_estimate(&self) -> f64 {
        let lu = self.lu.as_ref().expect("nontrivial factorization");
        let n = self.dim;
        let one_norm = |m: &Mat<c64>| (0..n).map(|i| m[(i, 0)].norm()).sum::<f64>();
        let mut x = Mat::<c64>::from_fn(n, 1, |_, _| c64::new(1.0 / n as f64, 0.0));
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = lu.solve(&x);
            est = one_norm(&y);
            let xi = Mat::<c64>::from_fn(n, 1, |i, _| {
                let v = y[(i, 0)];
                if v.norm() == 0.0 {
                    c64::new(1.0, 0.0)
                } else {
                    v / v.norm()
                }
            });
            let z = lu.solve_adjoint(&xi);
            let (j, zmax) = (0..n).map(|i| (i, z[(i, 0)].norm())).fold((0, 0.0), |acc, v| if v.1 > acc.1 { v } else { acc });
            let ztx: f64 = (0..n).map(|i| (z[(i, 0)].conj() * x[(i, 0)]).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = Mat::<c64>::zeros(n, 1);
            x[(j, 0)] = c64::new(1.0, 0.0);
        }
        let alt = Mat::<c64>::from_fn(n, 1, |i, _| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            c64::new(s * (1.0 + i as f64 / (n.max(2) - 1) as f64), 0.0)
        });
        let y = lu.solve(&alt);
        est.max(2.0 * one_norm(&y) / (3.0 * n as f64))
    }
}

/// Solve `(I − K) x = rhs` by pivoted LU.
pub fn direct_solve(op: &KernelOperator, rhs: &Mat<c64>) -> Result<(Mat<c64>, SolveReport)> {
    let f = Factorization::new(op)?;
    let x = f.solve(rhs)?;
    let report = SolveReport {
        method: "direct".into(),
        condition_estimate: Some(f.condition_estimate),
        near_resonance: f.near_resonance,
        ..Default::default()
    };
    Ok((x, report))
}
