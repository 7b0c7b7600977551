use super::grid::DomainGrid;
use super::solve::GreenField;
use crate::constants::Units;
use crate::error::{Error, Result};
use crate::geometry::{norm, sub, Tensor3, Vec3};
use crate::permittivity::PermittivityModel;
use num_complex::Complex64;

/// Max norm of `[∂ᵢ∂ₖ − δᵢₖ(Δ + q²)] G_kj` by second-order finite differences
/// at interior nodes at least `exclusion` away from the source.
pub fn helmholtz_residual(field: &GreenField, model: &PermittivityModel, units: &Units, exclusion: f64) -> Result<f64> {
    let grid = &field.grid;
    helmholtz_residual_with(grid, field.source, exclusion, |ijk| field.values[grid.index(ijk[0], ijk[1], ijk[2])], |r| {
        Ok(field.omega * field.omega * model.eval(r, field.omega)? / units.c2())
    })
}

/// Same stencil applied to any sampled tensor field on the nodes of `grid`;
/// `q2(r)` supplies the local `q²`.
pub fn helmholtz_residual_with(
    grid: &DomainGrid,
    source: Vec3,
    exclusion: f64,
    sample: impl Fn([usize; 3]) -> Tensor3,
    q2: impl Fn(Vec3) -> Result<Complex64>,
) -> Result<f64> {
    let n = grid.n;
    if n < 3 {
        return Err(Error::InvalidGrid("the residual stencil needs at least three nodes per axis".into()));
    }
    check_exclusion(exclusion, grid.spacing())?;
    let h = grid.spacing();
    let mut worst = 0.0_f64;
    let mut count = 0usize;
    for i in 1..n - 1 {
        for j in 1..n - 1 {
            for k in 1..n - 1 {
                let c = [i, j, k];
                let r = grid.point_ijk(c);
                if norm(sub(r, source)) < exclusion {
                    continue;
                }
                count += 1;
                let at = |d: [i64; 3]| -> Result<Tensor3> {
                    Ok(sample([(c[0] as i64 + d[0]) as usize, (c[1] as i64 + d[1]) as usize, (c[2] as i64 + d[2]) as usize]))
                };
                worst = worst.max(stencil(at, h, q2(r)?)?);
            }
        }
    }
    if count == 0 {
        return Err(Error::InvalidGrid("no interior node lies outside the exclusion radius".into()));
    }
    Ok(worst)
}

/// The stencil with spacing `h` centred on arbitrary points, sampling a
/// continuous field. Comparing two spacings at the same points isolates the
/// `O(h²)` truncation from the drift of the nearest node.
pub fn helmholtz_residual_at(
    points: &[Vec3],
    h: f64,
    source: Vec3,
    exclusion: f64,
    sample: impl Fn(Vec3) -> Result<Tensor3>,
    q2: impl Fn(Vec3) -> Result<Complex64>,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("stencil spacing must be positive".into()));
    }
    check_exclusion(exclusion, h)?;
    let mut worst = 0.0_f64;
    let mut count = 0usize;
    for &r in points {
        if norm(sub(r, source)) < exclusion {
            continue;
        }
        count += 1;
        let at = |d: [i64; 3]| sample([r[0] + d[0] as f64 * h, r[1] + d[1] as f64 * h, r[2] + d[2] as f64 * h]);
        worst = worst.max(stencil(at, h, q2(r)?)?);
    }
    if count == 0 {
        return Err(Error::InvalidArgument("no evaluation point lies outside the exclusion radius".into()));
    }
    Ok(worst)
}

fn check_exclusion(exclusion: f64, h: f64) -> Result<()> {
    if exclusion < 3.0 * h * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument("exclusion radius must be at least three grid spacings".into()));
    }
    Ok(())
}

// max_ab |[∂ₐ∂ₖ − δₐₖ(Δ + q²)] G_kb| at the stencil centre.
fn stencil(at: impl Fn([i64; 3]) -> Result<Tensor3>, h: f64, q2: Complex64) -> Result<f64> {
    let h2 = h * h;
    let g0 = at([0, 0, 0])?;
    // Hessian D[p][q] of every tensor entry.
    let mut hess = [[Tensor3::zero(); 3]; 3];
    for p in 0..3 {
        let mut e = [0i64; 3];
        e[p] = 1;
        let ep = at(e)?;
        e[p] = -1;
        let em = at(e)?;
        hess[p][p] = (ep + em - g0 * 2.0) * (1.0 / h2);
        for q in (p + 1)..3 {
            let mut d = [0i64; 3];
            d[p] = 1;
            d[q] = 1;
            let pp = at(d)?;
            d[q] = -1;
            let pm = at(d)?;
            d[p] = -1;
            let mm = at(d)?;
            d[q] = 1;
            let mp = at(d)?;
            let v = (pp - pm - mp + mm) * (1.0 / (4.0 * h2));
            hess[p][q] = v;
            hess[q][p] = v;
        }
    }
    let mut worst = 0.0_f64;
    for a in 0..3 {
        for b in 0..3 {
            let mut v = Complex64::new(0.0, 0.0);
            for kk in 0..3 {
                v += hess[a][kk][(kk, b)];
                v -= hess[kk][kk][(a, b)];
            }
            v -= q2 * g0[(a, b)];
            worst = worst.max(v.norm());
        }
    }
    Ok(worst)
}

/// `max_ij |G_ij(r, s) − G_ji(s, r)| / max |G|`.
pub fn reciprocity_check(g_rs: &Tensor3, g_sr: &Tensor3) -> f64 {
    let diff = (*g_rs - g_sr.transpose()).max_abs();
    let scale = g_rs.max_abs().max(g_sr.max_abs());
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}
