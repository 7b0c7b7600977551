use super::ladder::fold_real_axis;
use super::response::FrequencyResponse;
use crate::constants::Units;
use crate::error::{Error, Result};
use crate::geometry::Tensor3;
use crate::quadrature::gauss_legendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Gaussian-regulated kernels `∫ dω (ω/c²) F(ω) cos(ωτ) e^{−ω²/(2σ²)}`.
#[derive(Clone, Debug, Serialize)]
pub struct UnequalTimeKernel {
    pub sigma: f64,
    pub taus: Vec<f64>,
    /// `values[channel][tau]`.
    pub values: Vec<Vec<Tensor3>>,
    pub frequency_nodes: usize,
}

const POINTS_PER_PANEL: usize = 16;

/// The Gaussian is cut at `8σ`; panels hold at most one period of the
/// fastest oscillation, `|τ| + T`, and at most `σ/2`.
fn panels(sigma: f64, tau_max: f64, time_scale: f64, budget: usize) -> Result<Vec<(f64, f64)>> {
    let top = 8.0 * sigma;
    let width = (2.0 * PI / (tau_max + time_scale).max(1e-300)).min(0.5 * sigma);
    let count = (top / width).ceil() as usize;
    if count * POINTS_PER_PANEL > budget {
        return Err(Error::InvalidArgument(format!(
            "regulator width {sigma:e} needs {} frequency nodes to resolve the oscillation, budget is {budget}",
            count * POINTS_PER_PANEL
        )));
    }
    Ok((0..count).map(|k| (top * k as f64 / count as f64, top * (k + 1) as f64 / count as f64)).collect())
}

/// Kernels at several delays from one set of frequency samples.
pub fn unequal_time_kernels(response: &dyn FrequencyResponse, taus: &[f64], sigma: f64, budget: usize, units: &Units) -> Result<UnequalTimeKernel> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument("regulator width must be positive".into()));
    }
    if taus.is_empty() {
        return Err(Error::InvalidArgument("no delays requested".into()));
    }
    let tau_max = taus.iter().fold(0.0_f64, |a, t| a.max(t.abs()));
    let (x, w) = gauss_legendre(POINTS_PER_PANEL);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (a, b) in panels(sigma, tau_max, response.time_scale(), budget)? {
        for (t, wt) in x.iter().zip(&w) {
            nodes.push(0.5 * (a + b) + 0.5 * (b - a) * t);
            weights.push(0.5 * (b - a) * wt);
        }
    }
    let samples: Vec<Vec<Tensor3>> = nodes.par_iter().map(|&om| response.at(Complex64::new(om, 0.0))).collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(response.channels());
    for c in 0..response.channels() {
        let f: Vec<Tensor3> = samples.iter().map(|s| s[c]).collect();
        let folded = fold_real_axis(&nodes, &f, units);
        let per_tau = taus
            .iter()
            .map(|&tau| {
                let mut acc = Tensor3::zero();
                for ((v, &om), &wt) in folded.iter().zip(&nodes).zip(&weights) {
                    acc += *v * (wt * (om * tau).cos() * (-0.5 * om * om / (sigma * sigma)).exp());
                }
                acc
            })
            .collect();
        values.push(per_tau);
    }
    Ok(UnequalTimeKernel { sigma, taus: taus.to_vec(), values, frequency_nodes: nodes.len() })
}

/// Kernel of every channel at one delay.
pub fn unequal_time_kernel(response: &dyn FrequencyResponse, tau: f64, sigma: f64, budget: usize, units: &Units) -> Result<Vec<Tensor3>> {
    Ok(unequal_time_kernels(response, &[tau], sigma, budget, units)?.values.into_iter().map(|mut v| v.remove(0)).collect())
}

/// Spacelike suppression of a regulated kernel at separation `d`.
#[derive(Clone, Debug, Serialize)]
pub struct CausalityReport {
    pub distance: f64,
    pub sigma: f64,
    pub light_time: f64,
    /// Largest `max |U|` over the light-cone window `|τ − d/c| ≤ 3/σ`.
    /// The regulated vacuum kernel has a node exactly at `τ = d/c`, so the
    /// window peak is the meaningful light-cone magnitude.
    pub light_cone_peak: f64,
    pub light_cone_tau: f64,
    pub spacelike_tau: f64,
    pub spacelike_value: f64,
    /// `light_cone_peak / spacelike_value`.
    pub suppression: f64,
    /// `max |U(τ) − U(−τ)|` over the sampled delays, relative to the peak.
    pub evenness_error: f64,
    /// `(τ, max |U(τ)|)` for `τ ≥ 0`, sorted by `τ`.
    pub curve: Vec<(f64, f64)>,
    pub frequency_nodes: usize,
}

/// Compare channel 0 at `τ = d/(2c)` with its peak near the light cone.
pub fn regulated_causality(response: &dyn FrequencyResponse, distance: f64, sigma: f64, budget: usize, units: &Units) -> Result<CausalityReport> {
    let t = distance / units.c;
    let window = 3.0 / sigma;
    let mut taus: Vec<f64> = (0..=60).map(|k| t - window + 2.0 * window * k as f64 / 60.0).collect();
    taus.push(0.5 * t);
    let light_points = taus.len();
    taus.extend((0..=40).map(|k| 2.0 * t * k as f64 / 40.0));
    let n = taus.len();
    let mirrored: Vec<f64> = taus.iter().map(|x| -x).collect();
    taus.extend(mirrored);
    let k = unequal_time_kernels(response, &taus, sigma, budget, units)?;
    let v = &k.values[0];
    let (mut peak, mut peak_tau) = (0.0_f64, t);
    for idx in 0..light_points - 1 {
        let m = v[idx].max_abs();
        if m > peak {
            peak = m;
            peak_tau = taus[idx];
        }
    }
    let spacelike = v[light_points - 1].max_abs();
    let mut curve: Vec<(f64, f64)> = (0..n).filter(|&i| taus[i] >= 0.0).map(|i| (taus[i], v[i].max_abs())).collect();
    curve.sort_by(|a, b| a.0.total_cmp(&b.0));
    curve.dedup_by(|a, b| a.0 == b.0);
    let odd = (0..n).map(|i| (v[i] - v[n + i]).max_abs()).fold(0.0, f64::max);
    Ok(CausalityReport {
        distance,
        sigma,
        light_time: t,
        light_cone_peak: peak,
        light_cone_tau: peak_tau,
        spacelike_tau: 0.5 * t,
        spacelike_value: spacelike,
        suppression: if spacelike > 0.0 { peak / spacelike } else { f64::INFINITY },
        evenness_error: if peak > 0.0 { odd / peak } else { odd },
        curve,
        frequency_nodes: k.frequency_nodes,
    })
}
