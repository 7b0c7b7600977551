//! Dyadic Green tensors of inhomogeneous, dispersive and absorbing (or
//! amplifying) linear dielectrics, together with numerical checks of the
//! causality and frequency sum-rule structure that the electromagnetic field
//! quantization in such media relies on.
//!
//! The crate is organised bottom-up:
//!
//! * [`permittivity`] builds `ε(r, ω)` from Lorentz oscillators blended over
//!   mollified regions and checks its Kramers-Kronig / analyticity properties.
//! * [`green_free`] holds the closed-form reference Green functions and the
//!   integral-equation kernel.
//! * [`integral_solver`] discretizes the second-kind volume integral equation
//!   and solves it (Born series or dense LU).
//! * [`sumrule`] evaluates frequency-integrated Green-function identities,
//!   noise spectra and the unequal-time commutator kernel.
//! * [`scenario`] drives everything from a JSON scenario file.

pub mod constants;
pub mod error;
pub mod geometry;
pub mod green_free;
pub mod integral_solver;
pub mod permittivity;
pub mod quadrature;
pub mod scenario;
pub mod sumrule;

pub use constants::Units;
pub use error::{Error, Result};
pub use geometry::{Tensor3, Vec3};
pub use num_complex::Complex64;
