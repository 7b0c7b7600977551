use super::PermittivityModel;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::quadrature::gauss_legendre_on;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest tolerated disagreement (relative to `max |ε_R − 1|`) between the
/// transform on the full grid and on every other node.
pub const KK_SELF_ESTIMATE_LIMIT: f64 = 0.05;

/// `n` logarithmically spaced frequencies on `[a, b]`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                a
            } else if k + 1 == n {
                b
            } else {
                (la + (lb - la) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Principal-value transform `(2/π) P∫₀^∞ ω' f(ω') / (ω'² − ω²) dω'` of the
/// samples `f` on `grid`, evaluated at the interior nodes `1..len-1`.
///
/// Below the grid `f` is continued linearly to zero, above it as `ω'^{-3}`.
pub fn hilbert_transform(grid: &[f64], f: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let a = grid[0];
    let b = grid[n - 1];
    let (fa, fb) = (f[0], f[n - 1]);
    let (head_x, head_w) = gauss_legendre_on(24, 0.0, a);
    (1..n - 1)
        .map(|j| {
            let w = grid[j];
            let fj = f[j];
            let h1 = w - grid[j - 1];
            let h2 = grid[j + 1] - w;
            let deriv = -h2 / (h1 * (h1 + h2)) * f[j - 1] + (h2 - h1) / (h1 * h2) * fj + h1 / (h2 * (h1 + h2)) * f[j + 1];
            let phi = |k: usize| {
                if k == j {
                    0.5 * deriv
                } else {
                    let x = grid[k];
                    x * (f[k] - fj) / ((x - w) * (x + w))
                }
            };
            let mut body = 0.0;
            let mut prev = phi(0);
            for k in 1..n {
                let cur = phi(k);
                body += 0.5 * (grid[k] - grid[k - 1]) * (prev + cur);
                prev = cur;
            }
            let subtraction = fj * 0.5 * ((b * b - w * w) / (w * w - a * a)).ln();
            let head = head_term(a, fa, w, &head_x, &head_w);
            let tail = tail_term(b, fb, w);
            2.0 / PI * (body + subtraction + head + tail)
        })
        .collect()
}

fn head_term(a: f64, fa: f64, w: f64, xs: &[f64], ws: &[f64]) -> f64 {
    if fa == 0.0 {
        return 0.0;
    }
    let x = a / w;
    if x < 0.1 {
        // -(fa) Σ_{k≥1} x^{2k} / (2k+1)
        let x2 = x * x;
        let mut term = x2;
        let mut sum = 0.0;
        for k in 1..40 {
            sum += term / (2 * k + 1) as f64;
            term *= x2;
            if term < 1e-18 {
                break;
            }
        }
        -fa * sum
    } else {
        xs.iter().zip(ws).map(|(&u, &wt)| wt * u * (fa * u / a) / (u * u - w * w)).sum()
    }
}

fn tail_term(b: f64, fb: f64, w: f64) -> f64 {
    if fb == 0.0 {
        return 0.0;
    }
    let x = w / b;
    if x < 0.1 {
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..40 {
            sum += term / (2 * k + 1) as f64;
            term *= x2;
            if term < 1e-18 {
                break;
            }
        }
        fb * sum
    } else {
        fb * b * b * b / (w * w) * ((b + w) / (b - w)).ln() / (2.0 * w) - fb * b * b / (w * w)
    }
}

/// Kramers-Kronig residual `max |ε_R − 1 − H[ε_I]| / max |ε_R − 1|` over the
/// interior nodes of `grid`.
///
/// The transform is recomputed on every other node; if the two disagree by
/// more than [`KK_SELF_ESTIMATE_LIMIT`] the grid is reported as too coarse.
pub fn kk_residual(model: &PermittivityModel, r: Vec3, grid: &[f64]) -> Result<f64> {
    if grid.len() < 5 {
        return Err(Error::InvalidArgument("frequency grid needs at least five nodes".into()));
    }
    if !(grid[0] > 0.0) || grid.windows(2).any(|p| !(p[1] > p[0])) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("frequency grid must be positive and strictly increasing".into()));
    }
    let eps: Vec<Complex64> = grid.iter().map(|&w| model.eval(r, Complex64::new(w, 0.0))).collect::<Result<_>>()?;
    let re: Vec<f64> = eps.iter().map(|e| e.re - 1.0).collect();
    let im: Vec<f64> = eps.iter().map(|e| e.im).collect();
    let scale = re.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(if im.iter().all(|&x| x == 0.0) { 0.0 } else { f64::INFINITY });
    }
    let h = hilbert_transform(grid, &im);

    let half_grid: Vec<f64> = grid.iter().step_by(2).copied().collect();
    let half_im: Vec<f64> = im.iter().step_by(2).copied().collect();
    if half_grid.len() >= 3 {
        let hh = hilbert_transform(&half_grid, &half_im);
        // half-grid interior node m sits at full-grid node 2m.
        let discrepancy = hh
            .iter()
            .enumerate()
            .filter_map(|(m, v)| {
                let full = 2 * (m + 1);
                (full < grid.len() - 1).then(|| (v - h[full - 1]).abs())
            })
            .fold(0.0_f64, f64::max)
            / scale;
        if discrepancy > KK_SELF_ESTIMATE_LIMIT {
            return Err(Error::GridTooCoarse { discrepancy, limit: KK_SELF_ESTIMATE_LIMIT });
        }
    }
    let worst = (1..grid.len() - 1).map(|j| (re[j] - h[j - 1]).abs()).fold(0.0_f64, f64::max);
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_series_matches_closed_form_at_switch() {
        let b = 10.0;
        let direct = |w: f64| b * b * b / (w * w) * ((b + w) / (b - w)).ln() / (2.0 * w) - b * b / (w * w);
        let w = 0.0999 * b;
        assert!((tail_term(b, 1.0, w) - direct(w)).abs() < 1e-9);
        let w = 0.1001 * b;
        let series_like = tail_term(b, 1.0, 0.0999 * b);
        assert!((tail_term(b, 1.0, w) - series_like).abs() < 1e-4);
    }

    #[test]
    fn transform_of_lorentzian_line() {
        // f(ω) = γω / ((1-ω²)² + γ²ω²) has transform (1-ω²) / ((1-ω²)² + γ²ω²).
        let grid = log_grid(1e-3, 1e3, 3000);
        let g = 0.2;
        let f: Vec<f64> = grid.iter().map(|w| g * w / ((1.0 - w * w).powi(2) + g * g * w * w)).collect();
        let h = hilbert_transform(&grid, &f);
        let worst = (1..grid.len() - 1)
            .map(|j| {
                let w = grid[j];
                ((1.0 - w * w) / ((1.0 - w * w).powi(2) + g * g * w * w) - h[j - 1]).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst < 2e-2, "worst {worst}");
    }
}
