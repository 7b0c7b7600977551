use crate::constants::Units;
use crate::error::{Error, Result};
use crate::geometry::{add, scale, sub, unit, Vec3};
use crate::permittivity::PermittivityModel;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Whether the noise current at a point is carried by the destruction or
/// the creation operator of its bosonic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorRole {
    Destruction,
    Creation,
}

impl OperatorRole {
    /// Sign of `[ĵ, ĵ†]` per unit amplitude: `[f, f†] = 1`, `[f†, f] = −1`.
    pub fn commutator_sign(self) -> f64 {
        match self {
            OperatorRole::Destruction => 1.0,
            OperatorRole::Creation => -1.0,
        }
    }
}

/// Second moments of the noise current at one point and frequency.
#[derive(Clone, Debug, Serialize)]
pub struct NoiseSpectrum {
    pub position: Vec3,
    pub omega: f64,
    pub eps_imag: f64,
    /// `ω² (ħε₀/π) ε_I`, signed.
    pub commutator_density: f64,
    /// `ω² (ħε₀/π) |ε_I|`.
    pub symmetrized_density: f64,
    /// `ε_I < 0`.
    pub gain: bool,
    pub role: OperatorRole,
}

impl NoiseSpectrum {
    /// Current amplitude `√(ω² ħε₀ |ε_I| / π)`.
    pub fn amplitude(&self) -> f64 {
        self.symmetrized_density.sqrt()
    }

    /// `[ĵ, ĵ†]` rebuilt from the amplitude and the operator role.
    pub fn mapped_commutator(&self) -> f64 {
        self.amplitude().powi(2) * self.role.commutator_sign()
    }

    /// Gain flag, negative commutator density and negative `ε_I` coincide,
    /// the symmetrized density is nonnegative and the role mapping
    /// reproduces the signed density.
    pub fn is_sign_coherent(&self) -> bool {
        let neg = self.eps_imag < 0.0;
        let scale = self.symmetrized_density.max(f64::MIN_POSITIVE);
        self.symmetrized_density >= 0.0
            && self.gain == neg
            && (self.commutator_density < 0.0) == neg
            && (self.mapped_commutator() - self.commutator_density).abs() <= 1e-12 * scale
    }
}

/// Noise-current densities at `r` for real `ω > 0`.
pub fn noise_spectrum(model: &PermittivityModel, r: Vec3, omega: f64, units: &Units) -> Result<NoiseSpectrum> {
    if !(omega > 0.0) {
        return Err(Error::InvalidArgument("noise spectra need a positive frequency".into()));
    }
    let eps_imag = model.eval(r, Complex64::new(omega, 0.0))?.im;
    let pref = omega * omega * units.hbar * units.eps0 / PI;
    let gain = eps_imag < 0.0;
    Ok(NoiseSpectrum {
        position: r,
        omega,
        eps_imag,
        commutator_density: pref * eps_imag,
        symmetrized_density: pref * eps_imag.abs(),
        gain,
        role: if gain { OperatorRole::Creation } else { OperatorRole::Destruction },
    })
}

/// Charge amplitude `ρ = ∇·ĵ / (iω)` of the current `ĵ = n̂ A(r)`, with the
/// derivative taken by a central difference of step `h` along `n̂`.
pub fn charge_from_current(amplitude: impl Fn(Vec3) -> Result<f64>, r: Vec3, omega: f64, h: f64, direction: Vec3) -> Result<Complex64> {
    if omega == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("stencil step must be positive".into()));
    }
    let mut div = 0.0;
    for (d, &n) in direction.iter().enumerate() {
        if n != 0.0 {
            let e = scale(unit(d), h);
            div += n * (amplitude(add(r, e))? - amplitude(sub(r, e))?) / (2.0 * h);
        }
    }
    Ok(Complex64::new(div, 0.0) / Complex64::new(0.0, omega))
}

/// Charge amplitude of a noise current polarized along `direction` whose
/// spatial profile is `√|ε_I(r, ω)|`.
pub fn noise_charge_spectrum(model: &PermittivityModel, r: Vec3, omega: f64, h: f64, direction: Vec3) -> Result<Complex64> {
    if omega == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let w = Complex64::new(omega.abs(), 0.0);
    charge_from_current(|p| Ok(model.eval(p, w)?.im.abs().sqrt()), r, omega, h, direction)
}
