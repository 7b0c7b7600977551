use super::response::FrequencyResponse;
use crate::error::Result;
use crate::permittivity::{Contour, ContourRule, Rectangle};
use num_complex::Complex64;
use rayon::prelude::*;

/// Normalized `max_ij |∮ ω F_ij dω| / (L · max |ω F|)` of channel 0 around
/// a rectangle in the upper half-plane, with Gauss-Legendre edges.
pub fn analyticity_sweep(response: &dyn FrequencyResponse, rect: &Rectangle, n_points: usize) -> Result<f64> {
    analyticity_sweep_with(response, rect, n_points, ContourRule::GaussLegendre)
}

pub fn analyticity_sweep_with(response: &dyn FrequencyResponse, rect: &Rectangle, n_points: usize, rule: ContourRule) -> Result<f64> {
    let c = Contour::new(rect, n_points, rule)?;
    let samples: Vec<_> = c.nodes.par_iter().map(|z| Ok(response.at(*z)?[0] * *z)).collect::<Result<Vec<_>>>()?;
    let mut peak = 0.0_f64;
    let mut worst = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let mut sum = Complex64::new(0.0, 0.0);
            for (s, w) in samples.iter().zip(&c.weights) {
                sum += s[(i, j)] * w;
                peak = peak.max(s[(i, j)].norm());
            }
            worst = worst.max(sum.norm());
        }
    }
    Ok(if peak == 0.0 { 0.0 } else { worst / (c.length * peak) })
}

/// `max |ω F|` of channel 0 over `n` points of the rectangle's top edge.
pub fn far_edge_max(response: &dyn FrequencyResponse, rect: &Rectangle, n: usize) -> Result<f64> {
    rect.validate()?;
    let n = n.max(2);
    let pts: Vec<Complex64> = (0..n).map(|k| Complex64::new(rect.re.0 + (rect.re.1 - rect.re.0) * k as f64 / (n - 1) as f64, rect.im.1)).collect();
    let vals: Vec<f64> = pts.par_iter().map(|z| Ok((response.at(*z)?[0] * *z).max_abs())).collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}
