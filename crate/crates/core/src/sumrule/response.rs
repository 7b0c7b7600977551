//! Frequency-dependent tensor kernels consumed by the sum-rule machinery.

use crate::constants::Units;
use crate::error::{Error, Result};
use crate::geometry::{norm, sub, Tensor3, Vec3};
use crate::green_free::{radial, wavenumber};
use crate::integral_solver::{DomainGrid, GreenSolver, SolverConfig};
use crate::permittivity::PermittivityModel;
use num_complex::Complex64;
use std::sync::atomic::{AtomicUsize, Ordering};

/// A set of tensor-valued functions of complex frequency, holomorphic in
/// the upper half-plane and obeying `F(−ω*) = F(ω)*`.
pub trait FrequencyResponse: Sync {
    fn channels(&self) -> usize;
    fn at(&self, omega: Complex64) -> Result<Vec<Tensor3>>;
    /// Longest propagation delay the kernels contain; sets frequency resolution.
    fn time_scale(&self) -> f64;
}

/// `G1⁰ = δᵢⱼ g(d)` of a homogeneous medium at fixed distance.
pub struct HomogeneousG1 {
    pub medium: PermittivityModel,
    pub distance: f64,
    pub units: Units,
}

impl HomogeneousG1 {
    pub fn new(medium: PermittivityModel, distance: f64, units: Units) -> Result<Self> {
        if !(distance > 0.0) {
            return Err(Error::CoincidentPoints);
        }
        if !medium.is_homogeneous() {
            return Err(Error::InvalidArgument("bulk kernels need a homogeneous medium".into()));
        }
        Ok(Self { medium, distance, units })
    }

    pub fn vacuum(distance: f64, units: Units) -> Result<Self> {
        Self::new(PermittivityModel::vacuum(), distance, units)
    }

    pub fn scalar(&self, omega: Complex64) -> Result<Complex64> {
        let eps = self.medium.eval([0.0; 3], omega)?;
        Ok(radial(self.distance, wavenumber(omega, eps, &self.units)).g)
    }
}

impl FrequencyResponse for HomogeneousG1 {
    fn channels(&self) -> usize {
        1
    }

    fn at(&self, omega: Complex64) -> Result<Vec<Tensor3>> {
        Ok(vec![Tensor3::identity_scaled(self.scalar(omega)?)])
    }

    fn time_scale(&self) -> f64 {
        self.distance / self.units.c
    }
}

/// Which solver-derived quantity a channel reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum G1Part {
    /// `G1(r, r')`.
    Full,
    /// `∫ d³v K(r, v) G1(v, r') = G1 − G1⁰`.
    KernelTerm,
}

/// `G1` obtained from the integral-equation solver, one channel per
/// `(pair, part)` combination, all from a single solve per frequency.
pub struct SolverG1 <'m> {
    pub model: &'m PermittivityModel,
    pub grid: DomainGrid,
    pub config: SolverConfig,
    pub pairs: Vec<(Vec3, Vec3)>,
    pub parts: Vec<G1Part>,
    /// Imaginary shift applied on the real axis when the system is near-singular.
    pub eta: f64,
    /// Longest `r → v → r′` path through an inhomogeneous node, times the
    /// largest static refractive index, over `c`.
    pub delay: f64,
    shifted: AtomicUsize,
}

impl<'m> SolverG1<'m> {
    /// Source points are moved off the collocation nodes by the grid's
    /// placement rule; field points are used as given.
    pub fn new(model: &'m PermittivityModel, grid: &DomainGrid, config: SolverConfig, pairs: &[(Vec3, Vec3)], parts: &[G1Part]) -> Result<Self> {
        let h = grid.spacing();
        let mut placed = Vec::with_capacity(pairs.len());
        for &(r, rp) in pairs {
            let s = grid.place_source(rp);
            if norm(sub(r, s)) < 3.0 * h * (1.0 - 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "field and source points must be at least 3h = {:.4} apart",
                    3.0 * h
                )));
            }
            placed.push((r, s));
        }
        if !config.reference.is_source_independent() {
            return Err(Error::InvalidArgument("sum-rule solves need a source-independent reference medium".into()));
        }
        let omega_t = model.models.iter().map(|m| m.omega_t).fold(f64::INFINITY, f64::min);
        let eta = if omega_t.is_finite() { 1e-3 * omega_t } else { 0.0 };
        let mut background = vec![0.0; model.models.len()];
        for &k in &model.profile.background {
            background[k] = 1.0;
        }
        let active: Vec<Vec3> = grid
            .points()
            .into_iter()
            .filter(|&v| {
                let c = model.coefficients(v);
                let uniform = c.gradient.iter().all(|g| g.iter().all(|x| *x == 0.0));
                !(uniform && c.value == background)
            })
            .collect();
        let mut path = placed.iter().map(|(r, s)| norm(sub(*r, *s))).fold(0.0, f64::max);
        for (r, s) in &placed {
            for v in &active {
                path = path.max(norm(sub(*r, *v)) + norm(sub(*v, *s)));
            }
        }
        let n_max = model
            .models
            .iter()
            .map(|m| 1.0 + m.omega_p * m.omega_p / (m.omega_t * m.omega_t))
            .fold(1.0_f64, f64::max)
            .sqrt();
        let delay = path * n_max / config.units.c;
        Ok(Self { model, grid: grid.clone(), config, pairs: placed, parts: parts.to_vec(), eta, delay, shifted: AtomicUsize::new(0) })
    }

    /// Number of real-axis nodes that were moved to `ω + iη`.
    pub fn shifted_nodes(&self) -> usize {
        self.shifted.load(Ordering::Relaxed)
    }

    fn solver(&self, omega: Complex64) -> Result<GreenSolver<'m>> {
        let anchor = self.pairs[0].1;
        let solver = GreenSolver::new(self.model, &self.grid, omega, self.config, anchor)?;
        if omega.im == 0.0 && self.eta > 0.0 {
            let near = solver.factorization().map(|f| f.near_resonance).unwrap_or(true);
            if near {
                self.shifted.fetch_add(1, Ordering::Relaxed);
                return GreenSolver::new(self.model, &self.grid, omega + Complex64::new(0.0, self.eta), self.config, anchor);
            }
        }
        Ok(solver)
    }
}

impl FrequencyResponse for SolverG1<'_> {
    fn channels(&self) -> usize {
        self.pairs.len() * self.parts.len()
    }

    fn at(&self, omega: Complex64) -> Result<Vec<Tensor3>> {
        let solver = self.solver(omega)?;
        let sources: Vec<Vec3> = self.pairs.iter().map(|p| p.1).collect();
        let fields = solver.solve_g1_many(&sources)?;
        let mut out = Vec::with_capacity(self.channels());
        for ((r, s), field) in self.pairs.iter().zip(&fields) {
            let g1 = solver.interpolate_g1(field, *r)?;
            for part in &self.parts {
                out.push(match part {
                    G1Part::Full => g1,
                    G1Part::KernelTerm => g1 - crate::green_free::free_g1_0(*r, *s, &solver.wavenumbers)?.value,
                });
            }
        }
        Ok(out)
    }

    fn time_scale(&self) -> f64 {
        self.delay
    }
}
