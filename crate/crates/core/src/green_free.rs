//! Closed-form Green functions of the homogeneous reference medium and the
//! kernel of the volume integral equation.
//!
//! Conventions: `g(ρ) = e^{iq₀ρ}/(4πρ)`, the dyadic Green tensor solves
//! `[∂ᵢ∂ₖ − δᵢₖ(Δ + q²)] G_kj = δᵢⱼ δ(r − s)` with `q² = ω² ε / c²`.

use crate::constants::Units;
use crate::error::{Error, Result};
use crate::geometry::{norm, sub, Tensor3, Vec3};
use crate::integral_solver::DomainGrid;
use crate::permittivity::{reference_permittivity, PermittivityModel};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Wavenumber `(ω/c)√ε` on the branch with `Im q ≥ 0`.
pub fn wavenumber(omega: Complex64, eps: Complex64, units: &Units) -> Complex64 {
    let q = omega * eps.sqrt() / units.c;
    if q.im < 0.0 {
        -q
    } else {
        q
    }
}

/// Which homogeneous medium the integral equation is built around.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceMedium {
    /// The background medium of the profile. Exact on a truncated domain
    /// when all inhomogeneity sits inside it.
    #[default]
    Background,
    /// Equal-weight voxel average of `ε` over the domain.
    DomainAverage,
    /// `ε₀ = ε(s)`, i.e. a reference that follows the source point.
    Local,
    /// A fixed value.
    Fixed { re: f64, im: f64 },
}

impl ReferenceMedium {
    /// True when the reference does not move with the source point.
    pub fn is_source_independent(&self) -> bool {
        !matches!(self, ReferenceMedium::Local)
    }

    pub fn resolve(
        &self,
        model: &PermittivityModel,
        grid: Option<&DomainGrid>,
        source: Vec3,
        omega: Complex64,
        units: &Units,
    ) -> Result<WaveNumbers> {
        if omega.im < 0.0 {
            return Err(Error::LowerHalfPlane { re: omega.re, im: omega.im });
        }
        let eps0 = match self {
            ReferenceMedium::Background => {
                if model.vacuum {
                    Complex64::new(1.0, 0.0)
                } else {
                    let chi = model.susceptibilities(omega);
                    Complex64::new(1.0, 0.0) + model.profile.background.iter().map(|&k| chi[k]).sum::<Complex64>()
                }
            }
            ReferenceMedium::DomainAverage => {
                let grid = grid.ok_or_else(|| Error::InvalidArgument("domain average needs a grid".into()))?;
                reference_permittivity(model, grid, omega)?
            }
            ReferenceMedium::Local => model.eval(source, omega)?,
            ReferenceMedium::Fixed { re, im } => Complex64::new(*re, *im),
        };
        Ok(WaveNumbers::new(omega, eps0, *units))
    }
}

/// Reference wavenumber data at one frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveNumbers {
    pub omega: Complex64,
    pub eps0: Complex64,
    /// `q₀` with `Im q₀ ≥ 0`.
    pub q0: Complex64,
    pub q0_sq: Complex64,
    pub units: Units,
}

impl WaveNumbers {
    pub fn new(omega: Complex64, eps0: Complex64, units: Units) -> Self {
        let q0 = wavenumber(omega, eps0, &units);
        Self { omega, eps0, q0, q0_sq: omega * omega * eps0 / units.c2(), units }
    }

    /// `q² = ω² ε / c²` for a local permittivity.
    pub fn q_sq(&self, eps: Complex64) -> Complex64 {
        self.omega * self.omega * eps / self.units.c2()
    }
}

/// A Green-tensor value tagged with where and when it was evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicSample {
    pub r: Vec3,
    pub s: Vec3,
    pub omega: Complex64,
    pub value: Tensor3,
}

/// `e^{iq₀d}/(4πd)`.
pub fn scalar_g(distance: f64, q0: Complex64) -> Result<Complex64> {
    if !(distance > 0.0) {
        return Err(Error::CoincidentPoints);
    }
    Ok((I * q0 * distance).exp() / (4.0 * PI * distance))
}

/// `g`, `g'` and `g''` with respect to the distance.
#[derive(Clone, Copy, Debug)]
pub struct Radial {
    pub g: Complex64,
    pub dg: Complex64,
    pub d2g: Complex64,
}

#[inline]
pub fn radial(rho: f64, q0: Complex64) -> Radial {
    let g = (I * q0 * rho).exp() / (4.0 * PI * rho);
    let a = I * q0 - 1.0 / rho;
    Radial { g, dg: g * a, d2g: g * (a * a + 1.0 / (rho * rho)) }
}

fn separation(r: Vec3, s: Vec3) -> Result<(Vec3, f64)> {
    let x = sub(r, s);
    let rho = norm(x);
    if !(rho > 0.0) {
        return Err(Error::CoincidentPoints);
    }
    Ok(([x[0] / rho, x[1] / rho, x[2] / rho], rho))
}

/// `∂ᵢ∂ⱼ g(|r − s|)` with respect to `r`.
pub fn hessian_g(r: Vec3, s: Vec3, q0: Complex64) -> Result<Tensor3> {
    let (u, rho) = separation(r, s)?;
    let rad = radial(rho, q0);
    let t = rad.dg / rho;
    Ok(Tensor3::from_fn(|i, j| {
        let uu = u[i] * u[j];
        rad.d2g * uu + t * (if i == j { 1.0 - uu } else { -uu })
    }))
}

fn local_log_gradient(model: &PermittivityModel, s: Vec3, omega: Complex64) -> Result<(Complex64, [Complex64; 3])> {
    let (eps, grad) = model.eval_with_gradient(s, omega)?;
    Ok((eps, [grad[0] / eps, grad[1] / eps, grad[2] / eps]))
}

/// Inhomogeneous term `[δᵢⱼ − ∂ᵢʳ ∂ⱼˢ q⁻²(s)] g(|r − s|)` of the integral
/// equation, with the local `q(s)` of the model and `g` built on the
/// reference `q₀`.
///
/// For a source-following reference the wavenumber inside `g` is held fixed
/// while differentiating in `s`; this equals the full `s`-derivative plus
/// [`reference_cross_term`].
pub fn free_dyadic_g0(model: &PermittivityModel, r: Vec3, s: Vec3, wn: &WaveNumbers) -> Result<DyadicSample> {
    if wn.omega.norm() == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let (u, rho) = separation(r, s)?;
    let rad = radial(rho, wn.q0);
    let (eps_s, dln) = local_log_gradient(model, s, wn.omega)?;
    let inv_q2 = 1.0 / wn.q_sq(eps_s);
    let h = hessian_g(r, s, wn.q0)?;
    let value = Tensor3::from_fn(|i, j| {
        let delta = if i == j { rad.g } else { Complex64::new(0.0, 0.0) };
        delta + inv_q2 * (h[(i, j)] + dln[j] * rad.dg * u[i])
    });
    Ok(DyadicSample { r, s, omega: wn.omega, value })
}

/// Extra term `∂ᵢʳ[q⁻²(s) (∂g/∂q₀) ∂ⱼq₀(s)]` that appears when the reference
/// wavenumber follows the source point (`ε₀ = ε(s)`).
pub fn reference_cross_term(model: &PermittivityModel, r: Vec3, s: Vec3, omega: Complex64, units: &Units) -> Result<Tensor3> {
    if omega.norm() == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let (u, rho) = separation(r, s)?;
    let (eps_s, dln) = local_log_gradient(model, s, omega)?;
    let wn = WaveNumbers::new(omega, eps_s, *units);
    let rad = radial(rho, wn.q0);
    let inv_q2 = 1.0 / wn.q_sq(eps_s);
    // ∂ⱼ q₀(s) = q₀ ∂ⱼ ln ε / 2, ∂ᵢʳ (iρ g) = i x̂ᵢ (g + ρ g').
    Ok(Tensor3::from_fn(|i, j| inv_q2 * I * u[i] * (rad.g + rho * rad.dg) * (0.5 * wn.q0 * dln[j])))
}

/// Integral-equation kernel
/// `K_ik(r, v) = ∂ₖ ln q²(v) ∂ᵢʳ g(|r − v|) + (q²(v) − q₀²) g(|r − v|) δᵢₖ`.
pub fn kernel_k(model: &PermittivityModel, r: Vec3, v: Vec3, wn: &WaveNumbers) -> Result<Tensor3> {
    let (u, rho) = separation(r, v)?;
    let rad = radial(rho, wn.q0);
    let (eps_v, dln) = local_log_gradient(model, v, wn.omega)?;
    let contrast = wn.q_sq(eps_v) - wn.q0_sq;
    Ok(Tensor3::from_fn(|i, k| {
        let diag = if i == k { contrast * rad.g } else { Complex64::new(0.0, 0.0) };
        dln[k] * rad.dg * u[i] + diag
    }))
}

/// `G1⁰ = δᵢⱼ g(|r − s|)`.
pub fn free_g1_0(r: Vec3, s: Vec3, wn: &WaveNumbers) -> Result<DyadicSample> {
    let (_, rho) = separation(r, s)?;
    let g = radial(rho, wn.q0).g;
    Ok(DyadicSample { r, s, omega: wn.omega, value: Tensor3::identity_scaled(g) })
}

/// `Γ⁰ᵢ = −∂ᵢʳ [q⁻²(s) g(|r − s|)]`.
pub fn free_gamma_0(model: &PermittivityModel, r: Vec3, s: Vec3, wn: &WaveNumbers) -> Result<[Complex64; 3]> {
    if wn.omega.norm() == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let (u, rho) = separation(r, s)?;
    let rad = radial(rho, wn.q0);
    let eps_s = model.eval(s, wn.omega)?;
    let f = -rad.dg / wn.q_sq(eps_s);
    Ok([f * u[0], f * u[1], f * u[2]])
}
