//! Space-dependent, causal permittivity models.
//!
//! A model is a set of Lorentz oscillators (each possibly sign-flipped to
//! describe gain) and a [`SpatialProfile`] saying which oscillators are
//! active where. Interfaces are mollified with a cubic smoothstep so that
//! `ε(r, ω)` and its gradient are ordinary functions of `r`.

mod contour;
mod kk;
mod profile;

pub use contour::{analyticity_check, analyticity_check_with, Contour, ContourRule, Rectangle};
pub use kk::{hilbert_transform, kk_residual, log_grid, KK_SELF_ESTIMATE_LIMIT};
pub use profile::{smoothstep, Region, Shape, SpatialProfile};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::integral_solver::DomainGrid;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// +1 for an absorbing oscillator, -1 for an amplifying one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OscillatorSign {
    Absorbing,
    Amplifying,
}

impl OscillatorSign {
    pub fn value(self) -> f64 {
        match self {
            OscillatorSign::Absorbing => 1.0,
            OscillatorSign::Amplifying => -1.0,
        }
    }

    pub fn from_int(s: i32) -> Result<Self> {
        match s {
            1 => Ok(OscillatorSign::Absorbing),
            -1 => Ok(OscillatorSign::Amplifying),
            _ => Err(Error::InvalidModel(format!("oscillator sign must be +1 or -1, got {s}"))),
        }
    }
}

/// Single Lorentz oscillator `χ(ω) = s ω_p² / (ω_T² − ω² − iγω)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionModel {
    pub omega_t: f64,
    pub omega_p: f64,
    pub gamma: f64,
    pub sign: OscillatorSign,
}

impl DispersionModel {
    pub fn new(omega_t: f64, omega_p: f64, gamma: f64, sign: OscillatorSign) -> Result<Self> {
        if !(omega_t > 0.0 && omega_t.is_finite()) {
            return Err(Error::InvalidModel(format!("omega_T must be positive, got {omega_t}")));
        }
        if !(omega_p >= 0.0 && omega_p.is_finite()) {
            return Err(Error::InvalidModel(format!("omega_p must be non-negative, got {omega_p}")));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "gamma must be positive for a causal response, got {gamma}"
            )));
        }
        Ok(Self { omega_t, omega_p, gamma, sign })
    }

    /// Skips the `γ > 0` check. Only meant for negative controls: with
    /// `γ < 0` the poles move into the upper half-plane.
    pub fn new_unchecked(omega_t: f64, omega_p: f64, gamma: f64, sign: OscillatorSign) -> Self {
        Self { omega_t, omega_p, gamma, sign }
    }

    pub fn is_causal(&self) -> bool {
        self.gamma > 0.0
    }

    /// Susceptibility contribution at complex frequency.
    #[inline]
    pub fn chi(&self, omega: Complex64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        let den = Complex64::new(self.omega_t * self.omega_t, 0.0) - omega * omega - i * self.gamma * omega;
        Complex64::new(self.sign.value() * self.omega_p * self.omega_p, 0.0) / den
    }

    /// The two poles `ω = −iγ/2 ± sqrt(ω_T² − γ²/4)`.
    pub fn poles(&self) -> [Complex64; 2] {
        let disc = Complex64::new(self.omega_t * self.omega_t - 0.25 * self.gamma * self.gamma, 0.0).sqrt();
        let c = Complex64::new(0.0, -0.5 * self.gamma);
        [c + disc, c - disc]
    }
}

/// Permittivity `ε(r, ω) = 1 + Σ_m c_m(r) χ_m(ω)`.
#[derive(Clone, Debug)]
pub struct PermittivityModel {
    pub models: Vec<DispersionModel>,
    pub profile: SpatialProfile,
    pub vacuum: bool,
}

/// Blend coefficients of every oscillator at one point, with gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub value: Vec<f64>,
    pub gradient: Vec<Vec3>,
}

impl PermittivityModel {
    pub fn vacuum() -> Self {
        Self { models: Vec::new(), profile: SpatialProfile::empty(1.0), vacuum: true }
    }

    /// The whole space filled with one medium.
    pub fn homogeneous(models: Vec<DispersionModel>) -> Result<Self> {
        let background = (0..models.len()).collect();
        Self::new(models, SpatialProfile::new(background, Vec::new(), 1.0))
    }

    pub fn new(models: Vec<DispersionModel>, profile: SpatialProfile) -> Result<Self> {
        let m = Self { models, profile, vacuum: false };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let n = self.models.len();
        self.profile.validate(n)?;
        for &k in &self.profile.background {
            if self.models[k].sign == OscillatorSign::Amplifying {
                return Err(Error::InvalidModel(
                    "the background medium must be absorbing or vacuum".into(),
                ));
            }
        }
        for (idx, region) in self.profile.regions.iter().enumerate() {
            let has_gain = region.model_indices().iter().any(|&k| self.models[k].sign == OscillatorSign::Amplifying);
            if has_gain && !region.shape.is_bounded() {
                return Err(Error::InvalidModel(format!(
                    "region {idx}: amplifying media are only allowed in bounded regions"
                )));
            }
        }
        Ok(())
    }

    /// True when the permittivity does not depend on position.
    pub fn is_homogeneous(&self) -> bool {
        self.vacuum || self.profile.regions.is_empty()
    }

    pub fn coefficients(&self, r: Vec3) -> Coefficients {
        self.profile.coefficients(r, self.models.len())
    }

    fn check_frequency(omega: Complex64) -> Result<()> {
        if omega.im < 0.0 {
            return Err(Error::LowerHalfPlane { re: omega.re, im: omega.im });
        }
        Ok(())
    }

    /// `ε(r, ω)` for `Im ω ≥ 0`.
    pub fn eval(&self, r: Vec3, omega: Complex64) -> Result<Complex64> {
        Self::check_frequency(omega)?;
        Ok(self.eval_unchecked(r, omega))
    }

    /// Same as [`eval`](Self::eval) without the half-plane check. Used by
    /// contour code that deliberately probes invalid models.
    pub fn eval_unchecked(&self, r: Vec3, omega: Complex64) -> Complex64 {
        if self.vacuum {
            return Complex64::new(1.0, 0.0);
        }
        let c = self.coefficients(r);
        self.eps_from(&c.value, &self.susceptibilities(omega))
    }

    /// `(ε, ∇ε)` at `r`.
    pub fn eval_with_gradient(&self, r: Vec3, omega: Complex64) -> Result<(Complex64, [Complex64; 3])> {
        Self::check_frequency(omega)?;
        let zero = Complex64::new(0.0, 0.0);
        if self.vacuum {
            return Ok((Complex64::new(1.0, 0.0), [zero; 3]));
        }
        let c = self.coefficients(r);
        let chi = self.susceptibilities(omega);
        let mut grad = [zero; 3];
        for (g, x) in c.gradient.iter().zip(&chi) {
            for d in 0..3 {
                grad[d] += *x * g[d];
            }
        }
        Ok((self.eps_from(&c.value, &chi), grad))
    }

    /// Per-oscillator susceptibilities at `ω`.
    pub fn susceptibilities(&self, omega: Complex64) -> Vec<Complex64> {
        self.models.iter().map(|m| m.chi(omega)).collect()
    }

    pub fn eps_from(&self, coeff: &[f64], chi: &[Complex64]) -> Complex64 {
        if self.vacuum {
            return Complex64::new(1.0, 0.0);
        }
        let mut eps = Complex64::new(1.0, 0.0);
        for (c, x) in coeff.iter().zip(chi) {
            if *c != 0.0 {
                eps += *x * *c;
            }
        }
        eps
    }

    /// Same model with every region mirrored through the plane `x_axis = at`.
    pub fn mirrored(&self, axis: usize, at: f64) -> Self {
        Self {
            models: self.models.clone(),
            profile: self.profile.mirrored(axis, at),
            vacuum: self.vacuum,
        }
    }
}

/// Equal-weight voxel average of `ε` over the computational domain.
pub fn reference_permittivity(model: &PermittivityModel, grid: &DomainGrid, omega: Complex64) -> Result<Complex64> {
    PermittivityModel::check_frequency(omega)?;
    let n = grid.len();
    if n == 0 {
        return Err(Error::InvalidGrid("empty domain".into()));
    }
    if model.vacuum {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let chi = model.susceptibilities(omega);
    let sum: Complex64 = (0..n).map(|a| model.eps_from(&model.coefficients(grid.point(a)).value, &chi)).sum();
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lorentz(sign: OscillatorSign) -> DispersionModel {
        DispersionModel::new(1.0, 0.5, 0.1, sign).unwrap()
    }

    #[test]
    fn vacuum_is_exactly_one() {
        let m = PermittivityModel::vacuum();
        let e = m.eval([0.3, -1.0, 2.0], Complex64::new(3.0, 0.5)).unwrap();
        assert_eq!(e, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn static_and_resonant_limits() {
        let m = PermittivityModel::homogeneous(vec![lorentz(OscillatorSign::Absorbing)]).unwrap();
        let e0 = m.eval([0.0; 3], Complex64::new(0.0, 0.0)).unwrap();
        assert!((e0 - Complex64::new(1.25, 0.0)).norm() < 1e-15);
        let e1 = m.eval([0.0; 3], Complex64::new(1.0, 0.0)).unwrap();
        assert!((e1 - Complex64::new(1.0, 0.25 / 0.1)).norm() < 1e-12);
        let g = PermittivityModel { models: vec![lorentz(OscillatorSign::Amplifying)], ..m.clone() };
        assert!(g.eval([0.0; 3], Complex64::new(1.0, 0.0)).unwrap().im < 0.0);
    }

    #[test]
    fn lower_half_plane_rejected() {
        let m = PermittivityModel::vacuum();
        assert!(matches!(m.eval([0.0; 3], Complex64::new(1.0, -1e-3)), Err(Error::LowerHalfPlane { .. })));
    }

    #[test]
    fn non_causal_damping_rejected() {
        assert!(DispersionModel::new(1.0, 0.5, -0.1, OscillatorSign::Absorbing).is_err());
        assert!(DispersionModel::new(0.0, 0.5, 0.1, OscillatorSign::Absorbing).is_err());
    }

    #[test]
    fn gain_background_rejected() {
        let p = SpatialProfile::new(vec![0], Vec::new(), 0.1);
        assert!(PermittivityModel::new(vec![lorentz(OscillatorSign::Amplifying)], p).is_err());
    }

    #[test]
    fn gain_half_space_rejected() {
        let region = Region::new(Shape::Slab { axis: 2, lower: f64::NEG_INFINITY, upper: 0.0 }, vec![0]);
        let p = SpatialProfile::new(Vec::new(), vec![region], 0.1);
        assert!(PermittivityModel::new(vec![lorentz(OscillatorSign::Amplifying)], p).is_err());
    }

    #[test]
    fn poles_are_zeros_of_the_denominator() {
        let d = lorentz(OscillatorSign::Absorbing);
        for p in d.poles() {
            let den = Complex64::new(1.0, 0.0) - p * p - Complex64::new(0.0, 0.1) * p;
            assert!(den.norm() < 1e-14);
            assert!(p.im < 0.0);
        }
    }
}
