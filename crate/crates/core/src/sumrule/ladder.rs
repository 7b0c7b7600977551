//! Regulated frequency integrals `I(Ω) = ∫ dω (ω/c²) F(ω) W_Ω(ω)` and their
//! behaviour along a ladder of cutoffs.

use super::response::FrequencyResponse;
use crate::constants::Units;
use crate::error::{Error, Result};
use crate::geometry::Tensor3;
use crate::quadrature::gauss_legendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Cutoff window applied to the frequency integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Regulator {
    /// `W = 1` for `|ω| < Ω`, zero outside.
    Sharp,
    /// `W = (Ω² / (ω² + Ω²))^order`: even, real on the real axis, with its
    /// only upper-half-plane singularity a pole at `iΩ`.
    AbelPoisson { order: u32 },
}

impl Default for Regulator {
    fn default() -> Self {
        Regulator::AbelPoisson { order: 2 }
    }
}

impl Regulator {
    pub fn weight(&self, omega: f64, cutoff: f64) -> f64 {
        match self {
            Regulator::Sharp => {
                if omega.abs() < cutoff {
                    1.0
                } else {
                    0.0
                }
            }
            Regulator::AbelPoisson { order } => {
                let c2 = cutoff * cutoff;
                (c2 / (omega * omega + c2)).powi(*order as i32)
            }
        }
    }
}

/// How `I(Ω)` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Route {
    /// Folded real-axis quadrature on composite Gauss panels.
    RealAxis { max_nodes: usize },
    /// Residue of the regulated integrand at `ω = iΩ`, from `nodes` points
    /// on a small circle around the pole (Abel-Poisson regulators only).
    Residue { nodes: usize },
}

impl Default for Route {
    fn default() -> Self {
        Route::Residue { nodes: 12 }
    }
}

/// Composite Gauss-Legendre rule on `(0, ω_max)`: a head panel `[0, ω_min]`,
/// log-spaced panels up to `ω_max`, each split further when wider than
/// `max_panel_width`, plus an optional power-law tail bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyQuadrature {
    pub omega_min: f64,
    pub omega_max: f64,
    pub panels: usize,
    pub points_per_panel: usize,
    pub max_panel_width: f64,
    /// Exponent `p` of the assumed `ω^{-p}` decay beyond `ω_max`.
    pub tail_exponent: Option<f64>,
}

impl FrequencyQuadrature {
    pub fn new(omega_min: f64, omega_max: f64, panels: usize) -> Result<Self> {
        if !(omega_min > 0.0 && omega_max > omega_min && panels > 0) {
            return Err(Error::InvalidArgument("need 0 < omega_min < omega_max and at least one panel".into()));
        }
        Ok(Self { omega_min, omega_max, panels, points_per_panel: 16, max_panel_width: f64::INFINITY, tail_exponent: None })
    }

    pub fn with_max_panel_width(mut self, w: f64) -> Self {
        self.max_panel_width = w;
        self
    }

    pub fn with_tail(mut self, p: f64) -> Self {
        self.tail_exponent = Some(p);
        self
    }

    fn boundaries(&self) -> Vec<f64> {
        let mut b = vec![0.0, self.omega_min];
        let (la, lb) = (self.omega_min.ln(), self.omega_max.ln());
        for k in 1..=self.panels {
            b.push((la + (lb - la) * k as f64 / self.panels as f64).exp());
        }
        *b.last_mut().unwrap() = self.omega_max;
        let mut out = vec![0.0];
        for w in b.windows(2) {
            let pieces = ((w[1] - w[0]) / self.max_panel_width).ceil().max(1.0) as usize;
            for k in 1..=pieces {
                out.push(w[0] + (w[1] - w[0]) * k as f64 / pieces as f64);
            }
        }
        out
    }

    /// Nodes and weights, in increasing order.
    pub fn nodes(&self) -> (Vec<f64>, Vec<f64>) {
        let (x, w) = gauss_legendre(self.points_per_panel);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in self.boundaries().windows(2) {
            let half = 0.5 * (p[1] - p[0]);
            let mid = 0.5 * (p[1] + p[0]);
            for (t, wt) in x.iter().zip(&w) {
                nodes.push(mid + half * t);
                weights.push(half * wt);
            }
        }
        (nodes, weights)
    }

    pub fn node_count(&self) -> usize {
        (self.boundaries().len() - 1) * self.points_per_panel
    }

    /// Bound on `|∫_{ω_max}^∞ f|` from the last node value and the tail exponent.
    pub fn tail_bound(&self, last_node: f64, last_value: f64) -> f64 {
        match self.tail_exponent {
            Some(p) if p > 1.0 => last_value.abs() * last_node.powf(p) * self.omega_max.powf(1.0 - p) / (p - 1.0),
            _ => 0.0,
        }
    }
}

/// Integrand on `ω > 0` whose half-axis integral equals the full-axis
/// integral of `(ω/c²) F(ω)`: `2i (ω/c²) Im F(ω)`, using `F(−ω) = F(ω)*`.
pub fn fold_real_axis(omegas: &[f64], samples: &[Tensor3], units: &Units) -> Vec<Tensor3> {
    omegas
        .iter()
        .zip(samples)
        .map(|(&w, f)| Tensor3::from_fn(|i, j| I * 2.0 * (w / units.c2()) * f[(i, j)].im))
        .collect()
}

/// Cutoffs `Ω` at which the regulated integral is evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffLadder {
    pub cutoffs: Vec<f64>,
}

impl CutoffLadder {
    pub fn new(cutoffs: Vec<f64>) -> Result<Self> {
        if cutoffs.len() < 4 {
            return Err(Error::InvalidArgument("a cutoff ladder needs at least four rungs".into()));
        }
        if cutoffs.windows(2).any(|w| !(w[1] > w[0])) || !(cutoffs[0] > 0.0) {
            return Err(Error::InvalidArgument("cutoffs must be positive and increasing".into()));
        }
        if cutoffs[cutoffs.len() - 1] < 10.0 * cutoffs[0] * (1.0 - 1e-12) {
            return Err(Error::InvalidArgument("the ladder must span at least one decade".into()));
        }
        Ok(Self { cutoffs })
    }

    /// `{1, 2, 5, 10} × base`.
    pub fn decade(base: f64) -> Self {
        Self { cutoffs: vec![base, 2.0 * base, 5.0 * base, 10.0 * base] }
    }
}

/// Pass criteria for a ladder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderSettings {
    pub regulator: Regulator,
    pub route: Route,
    /// Largest admissible `|I_∞| / |I(Ω₁)|`.
    pub tolerance: f64,
    /// Smallest admissible fitted decay exponent.
    pub min_exponent: f64,
    /// Real-axis route: integrate to `ω_max = span · Ω`.
    pub span: f64,
}

impl Default for LadderSettings {
    fn default() -> Self {
        Self { regulator: Regulator::default(), route: Route::default(), tolerance: 1e-3, min_exponent: 0.5, span: 200.0 }
    }
}

/// Residuals of a frequency-integral identity along a cutoff ladder.
#[derive(Clone, Debug, Serialize)]
pub struct SumRuleReport {
    pub name: String,
    pub regulator: Regulator,
    pub route: Route,
    pub cutoffs: Vec<f64>,
    /// `max_ij |I_ij(Ω)|` per rung.
    pub residuals: Vec<f64>,
    /// Full tensor value per rung.
    pub values: Vec<Tensor3>,
    /// Decay exponent `p` of a least-squares fit `|I| ∝ Ω^{-p}`;
    /// `None` when every rung is exactly zero.
    pub fitted_exponent: Option<f64>,
    /// `max_ij |I_ij(∞)|` from Richardson extrapolation of the last two rungs.
    pub extrapolated_limit: f64,
    /// First-rung residual the limit is compared against.
    pub scale: f64,
    pub tolerance: f64,
    pub min_exponent: f64,
    /// Rungs (after the first) whose residual exceeds the previous one.
    pub rises: usize,
    pub frequency_nodes: usize,
    /// Real-axis nodes moved to `ω + iη` near resonances.
    pub shifted_nodes: usize,
    pub tail_bound: f64,
    pub passed: bool,
}

impl SumRuleReport {
    /// Analyse residual tensors along the ladder.
    pub fn from_values(name: &str, settings: &LadderSettings, cutoffs: &[f64], values: Vec<Tensor3>, frequency_nodes: usize) -> Self {
        let residuals: Vec<f64> = values.iter().map(Tensor3::max_abs).collect();
        let all_zero = residuals.iter().all(|&r| r == 0.0);
        let fitted_exponent = if all_zero { None } else { Some(fit_exponent(cutoffs, &residuals)) };
        let n = cutoffs.len();
        let extrapolated_limit = match fitted_exponent {
            None => 0.0,
            Some(p) if p > 0.0 => {
                let t = (cutoffs[n - 2] / cutoffs[n - 1]).powf(p);
                ((values[n - 1] - values[n - 2] * t) * (1.0 / (1.0 - t))).max_abs()
            }
            Some(_) => residuals[n - 1],
        };
        let scale = residuals[0];
        let rises = residuals.windows(2).skip(1).filter(|w| w[1] > w[0]).count();
        let passed = match fitted_exponent {
            None => true,
            Some(p) => p >= settings.min_exponent && extrapolated_limit <= settings.tolerance * scale,
        };
        Self {
            name: name.to_string(),
            regulator: settings.regulator,
            route: settings.route,
            cutoffs: cutoffs.to_vec(),
            residuals,
            values,
            fitted_exponent,
            extrapolated_limit,
            scale,
            tolerance: settings.tolerance,
            min_exponent: settings.min_exponent,
            rises,
            frequency_nodes,
            shifted_nodes: 0,
            tail_bound: 0.0,
            passed,
        }
    }

    /// Residuals never rise after the first rung, allowing one oscillation.
    pub fn is_monotone(&self) -> bool {
        self.rises <= 1
    }

    /// Two-column `cutoff,abs_residual` CSV.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("cutoff,abs_residual\n");
        for (c, r) in self.cutoffs.iter().zip(&self.residuals) {
            s.push_str(&format!("{c:e},{r:e}\n"));
        }
        s
    }
}

/// Least-squares slope of `ln |I|` against `ln Ω`, negated. Exact zeros are
/// floored at `1e-300`.
pub fn fit_exponent(cutoffs: &[f64], residuals: &[f64]) -> f64 {
    let xs: Vec<f64> = cutoffs.iter().map(|c| c.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

/// `I(Ω)` for every channel of `response` at one cutoff.
pub fn regulated_integral(response: &dyn FrequencyResponse, cutoff: f64, settings: &LadderSettings, units: &Units) -> Result<(Vec<Tensor3>, usize, f64)> {
    match settings.route {
        Route::Residue { nodes } => {
            let Regulator::AbelPoisson { order } = settings.regulator else {
                return Err(Error::InvalidArgument("the residue route needs an Abel-Poisson regulator".into()));
            };
            Ok((residue_integral(response, cutoff, order, nodes, units)?, nodes, 0.0))
        }
        Route::RealAxis { max_nodes } => real_axis_integral(response, cutoff, settings, max_nodes, units),
    }
}

fn real_axis_quadrature(response: &dyn FrequencyResponse, cutoff: f64, settings: &LadderSettings) -> Result<FrequencyQuadrature> {
    let t = response.time_scale().max(1e-300);
    let top = match settings.regulator {
        Regulator::Sharp => cutoff,
        Regulator::AbelPoisson { .. } => settings.span * cutoff,
    };
    let width = (10.0 / t).min(0.25 * cutoff);
    let q = FrequencyQuadrature::new(0.02 * cutoff, top, 8)?.with_max_panel_width(width);
    Ok(match settings.regulator {
        Regulator::Sharp => q,
        Regulator::AbelPoisson { order } => q.with_tail(2.0 * order as f64 - 1.0),
    })
}

fn real_axis_integral(response: &dyn FrequencyResponse, cutoff: f64, settings: &LadderSettings, max_nodes: usize, units: &Units) -> Result<(Vec<Tensor3>, usize, f64)> {
    let quad = real_axis_quadrature(response, cutoff, settings)?;
    let count = quad.node_count();
    if count > max_nodes {
        return Err(Error::InvalidArgument(format!(
            "real-axis quadrature needs {count} nodes at cutoff {cutoff:e}, budget is {max_nodes}"
        )));
    }
    let (nodes, weights) = quad.nodes();
    let samples: Vec<Vec<Tensor3>> = nodes.par_iter().map(|&w| response.at(Complex64::new(w, 0.0))).collect::<Result<_>>()?;
    let ch = response.channels();
    let mut out = vec![Tensor3::zero(); ch];
    let mut last = 0.0_f64;
    for c in 0..ch {
        let f: Vec<Tensor3> = samples.iter().map(|s| s[c]).collect();
        let folded = fold_real_axis(&nodes, &f, units);
        for (k, (v, w)) in folded.iter().zip(&weights).enumerate() {
            let reg = settings.regulator.weight(nodes[k], cutoff);
            out[c] += *v * (w * reg);
        }
        let k = nodes.len() - 1;
        last = last.max(folded[k].max_abs() * settings.regulator.weight(nodes[k], cutoff));
    }
    let tail = quad.tail_bound(nodes[nodes.len() - 1], last);
    Ok((out, count, tail))
}

/// `2πi Res_{ω=iΩ} [(ω/c²) F(ω) W_Ω(ω)]` from a trapezoid rule on a circle
/// around the pole. The radius stays below `Ω/2` and below `1/T` so the
/// rule converges geometrically.
fn residue_integral(response: &dyn FrequencyResponse, cutoff: f64, order: u32, nodes: usize, units: &Units) -> Result<Vec<Tensor3>> {
    if nodes < 4 {
        return Err(Error::InvalidArgument("the residue route needs at least four nodes".into()));
    }
    let center = Complex64::new(0.0, cutoff);
    let t = response.time_scale();
    let radius = if t > 0.0 { (0.5 * cutoff).min(1.0 / t) } else { 0.5 * cutoff };
    let m = order as i32;
    let points: Vec<(Complex64, Complex64)> = (0..nodes)
        .map(|k| {
            let theta = 2.0 * PI * (k as f64 + 0.5) / nodes as f64;
            let e = Complex64::from_polar(1.0, theta);
            (center + e * radius, e)
        })
        .collect();
    let samples: Vec<Vec<Tensor3>> = points.par_iter().map(|(z, _)| response.at(*z)).collect::<Result<_>>()?;
    let ch = response.channels();
    let mut out = vec![Tensor3::zero(); ch];
    let omega_pow = cutoff.powi(2 * m);
    for ((z, e), s) in points.iter().zip(&samples) {
        // φ(z) = (z/c²) Ω^{2m} / (z + iΩ)^m; residue of φ F / (z − iΩ)^m
        // is the (m−1)-th Taylor coefficient of φ F at iΩ.
        let phi = *z / units.c2() * omega_pow / (*z + center).powi(m);
        let kernel = phi / (e * radius).powi(m - 1) / nodes as f64;
        for c in 0..ch {
            out[c] += s[c] * (kernel * 2.0 * PI * I);
        }
    }
    Ok(out)
}

/// Evaluate the regulated integral on every rung and analyse the ladder.
pub fn run_ladder(response: &dyn FrequencyResponse, names: &[String], ladder: &CutoffLadder, settings: &LadderSettings, units: &Units) -> Result<Vec<SumRuleReport>> {
    if names.len() != response.channels() {
        return Err(Error::InvalidArgument("one name per channel required".into()));
    }
    let mut per_channel: Vec<Vec<Tensor3>> = vec![Vec::new(); names.len()];
    let mut nodes = 0;
    let mut tail = 0.0_f64;
    for &c in &ladder.cutoffs {
        let (vals, count, t) = regulated_integral(response, c, settings, units)?;
        nodes += count;
        tail = tail.max(t);
        for (k, v) in vals.into_iter().enumerate() {
            per_channel[k].push(v);
        }
    }
    Ok(names
        .iter()
        .zip(per_channel)
        .map(|(n, v)| {
            let mut r = SumRuleReport::from_values(n, settings, &ladder.cutoffs, v, nodes);
            r.tail_bound = tail;
            r
        })
        .collect())
}
