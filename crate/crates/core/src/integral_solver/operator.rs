use super::grid::DomainGrid;
use crate::error::{Error, Result};
use crate::green_free::{radial, WaveNumbers};
use crate::permittivity::PermittivityModel;
use faer::{c64, Mat};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Largest resolution stored as a dense matrix (and admitted by the direct solver).
pub const DENSE_CAP: usize = 12;
/// Largest resolution admitted by the Born iteration (matrix-free above the dense cap).
pub const BORN_CAP: usize = 20;

/// How the self-voxel was integrated.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SelfTerm {
    /// Radius of the sphere with the voxel's volume.
    pub equivalent_radius: f64,
    /// `∫ g dV` over that sphere; multiplies the local contrast on the diagonal.
    pub contrast_integral: Complex64,
    /// The gradient part integrates to zero by symmetry.
    pub gradient_integral: f64,
}

/// `∫_{|x|<a} e^{iqρ}/(4πρ) dV = ∫₀ᵃ ρ e^{iqρ} dρ`.
pub fn sphere_integral_g(a: f64, q: Complex64) -> Complex64 {
    let iq = Complex64::new(0.0, 1.0) * q;
    if (q * a).norm() < 0.5 {
        // Σ (iq)^n a^{n+2} / (n! (n+2))
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(a * a, 0.0);
        for n in 0..40 {
            sum += term / (n as f64 + 2.0);
            term = term * iq * a / (n as f64 + 1.0);
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        let e = (iq * a).exp();
        (e * (1.0 - iq * a) - 1.0) / (q * q)
    }
}

/// Discretized kernel: `(K x)_{a,i} = Σ_b Σ_k K_ik(r_a, v_b) h³ x_{b,k}` with a
/// regularized diagonal. Stored densely up to [`DENSE_CAP`], applied
/// matrix-free beyond.
pub struct KernelOperator {
    pub omega: Complex64,
    pub grid: DomainGrid,
    pub wavenumbers: WaveNumbers,
    pub self_term: SelfTerm,
    /// `q²(v_b) − q₀²` at every node.
    pub contrast: Vec<Complex64>,
    /// `∇ ln q²(v_b)` at every node.
    pub log_gradient: Vec<[Complex64; 3]>,
    ijk: Vec<[i64; 3]>,
    table_g: Vec<Complex64>,
    table_dg: Vec<Complex64>,
    dense: Option<Mat<c64>>,
    zero: bool,
}

impl KernelOperator {
    /// Assemble the collocation operator. Requires the mollification width
    /// to span at least two grid spacings when the model has interfaces.
    pub fn discretize(model: &PermittivityModel, grid: &DomainGrid, wn: &WaveNumbers) -> Result<Self> {
        Self::build(model, grid, wn, grid.n <= DENSE_CAP)
    }

    /// Same as [`discretize`](Self::discretize) but never stores the matrix.
    pub fn discretize_matrix_free(model: &PermittivityModel, grid: &DomainGrid, wn: &WaveNumbers) -> Result<Self> {
        Self::build(model, grid, wn, false)
    }

    fn build(model: &PermittivityModel, grid: &DomainGrid, wn: &WaveNumbers, dense: bool) -> Result<Self> {
        let h = grid.spacing();
        if !model.is_homogeneous() && model.profile.mollify < 2.0 * h {
            return Err(Error::UnderResolvedInterface { width: model.profile.mollify, min: 2.0 * h });
        }
        if grid.n > BORN_CAP {
            return Err(Error::ResolutionCap { n: grid.n, cap: BORN_CAP, method: "born" });
        }
        let omega = wn.omega;
        let n_pts = grid.len();
        let chi = model.susceptibilities(omega);
        let mut contrast = Vec::with_capacity(n_pts);
        let mut log_gradient = Vec::with_capacity(n_pts);
        let zero_c = Complex64::new(0.0, 0.0);
        for a in 0..n_pts {
            if model.vacuum {
                contrast.push(wn.q_sq(Complex64::new(1.0, 0.0)) - wn.q0_sq);
                log_gradient.push([zero_c; 3]);
                continue;
            }
            let c = model.coefficients(grid.point(a));
            let eps = model.eps_from(&c.value, &chi);
            let mut g = [zero_c; 3];
            for (cg, x) in c.gradient.iter().zip(&chi) {
                for d in 0..3 {
                    g[d] += *x * cg[d];
                }
            }
            contrast.push(wn.q_sq(eps) - wn.q0_sq);
            log_gradient.push([g[0] / eps, g[1] / eps, g[2] / eps]);
        }
        let zero = contrast.iter().all(|c| *c == zero_c) && log_gradient.iter().all(|g| g.iter().all(|x| *x == zero_c));

        let n = grid.n as i64;
        let span = (2 * n - 1) as usize;
        let mut table_g = vec![zero_c; span * span * span];
        let mut table_dg = vec![zero_c; span * span * span];
        if !zero {
            for di in -(n - 1)..n {
                for dj in -(n - 1)..n {
                    for dk in -(n - 1)..n {
                        if di == 0 && dj == 0 && dk == 0 {
                            continue;
                        }
                        let rho = h * ((di * di + dj * dj + dk * dk) as f64).sqrt();
                        let rad = radial(rho, wn.q0);
                        let t = (((di + n - 1) as usize * span) + (dj + n - 1) as usize) * span + (dk + n - 1) as usize;
                        table_g[t] = rad.g;
                        table_dg[t] = rad.dg / rho;
                    }
                }
            }
        }
        let a_eq = (3.0 / (4.0 * std::f64::consts::PI)).cbrt() * h;
        let self_term = SelfTerm { equivalent_radius: a_eq, contrast_integral: sphere_integral_g(a_eq, wn.q0), gradient_integral: 0.0 };
        let ijk = (0..n_pts).map(|a| {
            let [i, j, k] = grid.ijk(a);
            [i as i64, j as i64, k as i64]
        }).collect();
        let mut op = Self {
            omega,
            grid: grid.clone(),
            wavenumbers: *wn,
            self_term,
            contrast,
            log_gradient,
            ijk,
            table_g,
            table_dg,
            dense: None,
            zero,
        };
        if dense && !zero {
            let dim = 3 * n_pts;
            let m = Mat::<c64>::from_fn(dim, dim, |row, col| op.entry(row / 3, row % 3, col / 3, col % 3));
            op.dense = Some(m);
        }
        Ok(op)
    }

    #[inline]
    fn table_index(&self, a: usize, b: usize) -> (usize, [i64; 3]) {
        let n = self.grid.n as i64;
        let span = (2 * n - 1) as usize;
        let (p, q) = (self.ijk[a], self.ijk[b]);
        let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
        ((((d[0] + n - 1) as usize * span) + (d[1] + n - 1) as usize) * span + (d[2] + n - 1) as usize, d)
    }

    /// Matrix entry for row `(a, i)` and column `(b, k)`.
    pub fn entry(&self, a: usize, i: usize, b: usize, k: usize) -> Complex64 {
        let w = self.grid.weight();
        if a == b {
            return if i == k { self.contrast[a] * self.self_term.contrast_integral } else { Complex64::new(0.0, 0.0) };
        }
        let (t, d) = self.table_index(a, b);
        let h = self.grid.spacing();
        let mut v = self.log_gradient[b][k] * self.table_dg[t] * (d[i] as f64 * h);
        if i == k {
            v += self.contrast[b] * self.table_g[t];
        }
        v * w
    }

    pub fn dim(&self) -> usize {
        3 * self.grid.len()
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn dense(&self) -> Option<&Mat<c64>> {
        self.dense.as_ref()
    }

    /// Largest absolute row sum of the discretized kernel.
    pub fn max_row_sum(&self) -> f64 {
        let dim = self.dim();
        (0..dim)
            .into_par_iter()
            .map(|row| (0..dim).map(|col| self.entry(row / 3, row % 3, col / 3, col % 3).norm()).sum::<f64>())
            .reduce(|| 0.0, f64::max)
    }

    /// `y = K x` for every column of `x`.
    pub fn apply(&self, x: &Mat<c64>) -> Mat<c64> {
        if self.zero {
            return Mat::zeros(x.nrows(), x.ncols());
        }
        if let Some(m) = &self.dense {
            return m * x;
        }
        let n_pts = self.grid.len();
        let w = self.grid.weight();
        let h = self.grid.spacing();
        let zero = Complex64::new(0.0, 0.0);
        let mut out = Mat::<c64>::zeros(x.nrows(), x.ncols());
        for col in 0..x.ncols() {
            // Per source voxel: scalar ∇ln q² · x and contrast · x.
            let u: Vec<Complex64> = (0..n_pts)
                .map(|b| (0..3).map(|k| self.log_gradient[b][k] * x[(3 * b + k, col)]).sum::<Complex64>() * w)
                .collect();
            let t: Vec<[Complex64; 3]> = (0..n_pts)
                .map(|b| {
                    let c = self.contrast[b] * w;
                    [c * x[(3 * b, col)], c * x[(3 * b + 1, col)], c * x[(3 * b + 2, col)]]
                })
                .collect();
            let rows: Vec<[Complex64; 3]> = (0..n_pts)
                .into_par_iter()
                .map(|a| {
                    let mut acc = [zero; 3];
                    for b in 0..n_pts {
                        if a == b {
                            let s = self.contrast[a] * self.self_term.contrast_integral;
                            for i in 0..3 {
                                acc[i] += s * x[(3 * a + i, col)];
                            }
                            continue;
                        }
                        let (ti, d) = self.table_index(a, b);
                        let gd = self.table_dg[ti] * u[b] * h;
                        let g = self.table_g[ti];
                        for i in 0..3 {
                            acc[i] += gd * d[i] as f64 + g * t[b][i];
                        }
                    }
                    acc
                })
                .collect();
            for (a, v) in rows.iter().enumerate() {
                for i in 0..3 {
                    out[(3 * a + i, col)] = v[i];
                }
            }
        }
        out
    }

    /// Power-iteration estimate of the spectral radius.
    pub fn spectral_radius(&self, iterations: usize) -> f64 {
        if self.zero {
            return 0.0;
        }
        let dim = self.dim();
        let mut v = Mat::<c64>::from_fn(dim, 1, |k, _| {
            let t = k as f64;
            c64::new(1.0 + 0.5 * (0.7 * t).sin(), 0.3 * (1.3 * t).cos())
        });
        let mut ratios = Vec::with_capacity(iterations);
        let mut norm = v.norm_l2();
        for _ in 0..iterations {
            v = &v * faer::Scale(c64::new(1.0 / norm, 0.0));
            let y = self.apply(&v);
            let ny = y.norm_l2();
            if ny == 0.0 || !ny.is_finite() {
                return if ny == 0.0 { 0.0 } else { f64::INFINITY };
            }
            ratios.push(ny);
            v = y;
            norm = ny;
        }
        let tail = &ratios[ratios.len().saturating_sub(8)..];
        (tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_integral_series_matches_closed_form() {
        let a = 0.3;
        for q in [Complex64::new(1.6, 0.1), Complex64::new(1.7, 0.0), Complex64::new(0.2, 1.7)] {
            let closed = {
                let iq = Complex64::new(0.0, 1.0) * q;
                ((iq * a).exp() * (1.0 - iq * a) - 1.0) / (q * q)
            };
            let s = sphere_integral_g(a, q);
            assert!((s - closed).norm() < 1e-14, "{q}: {s} vs {closed}");
        }
        assert!((sphere_integral_g(a, Complex64::new(0.0, 0.0)) - Complex64::new(a * a / 2.0, 0.0)).norm() < 1e-16);
    }
}
