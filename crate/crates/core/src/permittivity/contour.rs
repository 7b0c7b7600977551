use super::PermittivityModel;
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::quadrature::gauss_legendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Closed axis-aligned rectangle in the complex frequency plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rectangle {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        let r = Self { re, im };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.re.0 < self.re.1 && self.im.0 < self.im.1) {
            return Err(Error::InvalidArgument("rectangle corners must be ordered".into()));
        }
        if !(self.im.0 > 0.0) {
            return Err(Error::LowerHalfPlane { re: self.re.0, im: self.im.0 });
        }
        Ok(())
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * ((self.re.1 - self.re.0) + (self.im.1 - self.im.0))
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re.0, self.im.0),
            Complex64::new(self.re.1, self.im.0),
            Complex64::new(self.re.1, self.im.1),
            Complex64::new(self.re.0, self.im.1),
        ]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourRule {
    /// Gauss-Legendre on each edge.
    #[default]
    GaussLegendre,
    /// Composite trapezoid around the closed loop (second order at corners).
    Trapezoid,
}

/// Nodes and complex weights `dω` of a counter-clockwise rectangle contour.
#[derive(Clone, Debug)]
pub struct Contour {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub length: f64,
}

impl Contour {
    pub fn new(rect: &Rectangle, n_points: usize, rule: ContourRule) -> Result<Self> {
        rect.validate()?;
        if n_points < 8 {
            return Err(Error::InvalidArgument("contour needs at least eight nodes".into()));
        }
        let corners = rect.corners();
        let lengths: Vec<f64> = (0..4).map(|e| (corners[(e + 1) % 4] - corners[e]).norm()).collect();
        let total: f64 = lengths.iter().sum();
        // Split nodes by edge length, at least two per edge.
        let mut counts: Vec<usize> = lengths.iter().map(|l| ((l / total) * n_points as f64).floor().max(2.0) as usize).collect();
        while counts.iter().sum::<usize>() < n_points {
            let e = (0..4)
                .max_by(|&a, &b| (lengths[a] / counts[a] as f64).total_cmp(&(lengths[b] / counts[b] as f64)))
                .unwrap();
            counts[e] += 1;
        }
        while counts.iter().sum::<usize>() > n_points {
            let e = (0..4).filter(|&e| counts[e] > 2).min_by(|&a, &b| (lengths[a] / counts[a] as f64).total_cmp(&(lengths[b] / counts[b] as f64))).unwrap();
            counts[e] -= 1;
        }
        let mut nodes = Vec::with_capacity(n_points);
        let mut weights = Vec::with_capacity(n_points);
        match rule {
            ContourRule::GaussLegendre => {
                for e in 0..4 {
                    let (a, b) = (corners[e], corners[(e + 1) % 4]);
                    let (x, w) = gauss_legendre(counts[e]);
                    let half = (b - a) * 0.5;
                    let mid = (a + b) * 0.5;
                    for (t, wt) in x.iter().zip(&w) {
                        nodes.push(mid + half * *t);
                        weights.push(half * *wt);
                    }
                }
            }
            ContourRule::Trapezoid => {
                for e in 0..4 {
                    let (a, b) = (corners[e], corners[(e + 1) % 4]);
                    let step = (b - a) / counts[e] as f64;
                    let prev = (corners[e] - corners[(e + 3) % 4]) / counts[(e + 3) % 4] as f64;
                    for k in 0..counts[e] {
                        nodes.push(a + step * k as f64);
                        weights.push(if k == 0 { (step + prev) * 0.5 } else { step });
                    }
                }
            }
        }
        Ok(Self { nodes, weights, length: total })
    }
}

/// Normalized `|∮ (ε − 1) dω| / (L · max |ε − 1|)` on a rectangle, with
/// Gauss-Legendre edges.
pub fn analyticity_check(model: &PermittivityModel, r: Vec3, rect: &Rectangle, n_points: usize) -> Result<f64> {
    analyticity_check_with(model, r, rect, n_points, ContourRule::GaussLegendre)
}

pub fn analyticity_check_with(model: &PermittivityModel, r: Vec3, rect: &Rectangle, n_points: usize, rule: ContourRule) -> Result<f64> {
    let c = Contour::new(rect, n_points, rule)?;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut peak = 0.0_f64;
    for (z, w) in c.nodes.iter().zip(&c.weights) {
        let f = model.eval_unchecked(r, *z) - 1.0;
        peak = peak.max(f.norm());
        sum += f * w;
    }
    if peak == 0.0 {
        return Ok(0.0);
    }
    Ok(sum.norm() / (c.length * peak))
}
