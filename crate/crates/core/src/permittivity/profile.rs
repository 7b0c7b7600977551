use crate::error::{Error, Result};
use crate::geometry::{norm, sub, Vec3};
use serde::{Deserialize, Serialize};

/// Cubic smoothstep ramp of total width `delta` centred at `u = 0`.
/// Returns `(H(u), H'(u))`, with `H = 0` for `u ≤ −δ/2` and `H = 1` for `u ≥ δ/2`.
#[inline]
pub fn smoothstep(u: f64, delta: f64) -> (f64, f64) {
    let t = u / delta + 0.5;
    if t <= 0.0 {
        (0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0)
    } else {
        (t * t * (3.0 - 2.0 * t), 6.0 * t * (1.0 - t) / delta)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Ball { center: Vec3, radius: f64 },
    /// `lower < x_axis < upper`; infinite bounds give half-spaces.
    Slab { axis: usize, lower: f64, upper: f64 },
    /// Cubic cells starting at `origin`; cell `(i, j, k)` is stored at
    /// `(i * dims[1] + j) * dims[2] + k`. Each cell names one oscillator or
    /// leaves the underlying medium untouched.
    VoxelMap { origin: Vec3, cell: f64, dims: [usize; 3], cells: Vec<Option<usize>> },
}

impl Shape {
    pub fn is_bounded(&self) -> bool {
        !matches!(self, Shape::Slab { .. })
    }
}

/// A shaped region and the oscillators active inside it.
/// For voxel maps the per-cell indices are used and `medium` is ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub shape: Shape,
    pub medium: Vec<usize>,
}

impl Region {
    pub fn new(shape: Shape, medium: Vec<usize>) -> Self {
        Self { shape, medium }
    }

    pub fn model_indices(&self) -> Vec<usize> {
        match &self.shape {
            Shape::VoxelMap { cells, .. } => cells.iter().flatten().copied().collect(),
            _ => self.medium.clone(),
        }
    }
}

/// Background medium plus regions blended in order; later regions win.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialProfile {
    pub background: Vec<usize>,
    pub regions: Vec<Region>,
    /// Interface mollification width.
    pub mollify: f64,
}

impl SpatialProfile {
    pub fn new(background: Vec<usize>, regions: Vec<Region>, mollify: f64) -> Self {
        Self { background, regions, mollify }
    }

    pub fn empty(mollify: f64) -> Self {
        Self::new(Vec::new(), Vec::new(), mollify)
    }

    pub(crate) fn validate(&self, n_models: usize) -> Result<()> {
        let d = self.mollify;
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidModel(format!("mollification width must be positive, got {d}")));
        }
        let check_idx = |k: usize| {
            if k >= n_models {
                Err(Error::InvalidModel(format!("oscillator index {k} out of range ({n_models} defined)")))
            } else {
                Ok(())
            }
        };
        for &k in &self.background {
            check_idx(k)?;
        }
        for (idx, r) in self.regions.iter().enumerate() {
            for k in r.model_indices() {
                check_idx(k)?;
            }
            match &r.shape {
                Shape::Ball { radius, .. } => {
                    if !(*radius > 0.5 * d) {
                        return Err(Error::InvalidModel(format!(
                            "region {idx}: ball radius {radius} must exceed half the mollification width {}",
                            0.5 * d
                        )));
                    }
                }
                Shape::Slab { axis, lower, upper } => {
                    if *axis > 2 {
                        return Err(Error::InvalidModel(format!("region {idx}: slab axis must be 0, 1 or 2")));
                    }
                    if lower.is_nan() || upper.is_nan() || lower >= upper {
                        return Err(Error::InvalidModel(format!("region {idx}: slab needs lower < upper")));
                    }
                    if lower.is_finite() && upper.is_finite() && upper - lower <= d {
                        return Err(Error::InvalidModel(format!(
                            "region {idx}: slab thickness must exceed the mollification width"
                        )));
                    }
                }
                Shape::VoxelMap { cell, dims, cells, .. } => {
                    if !(*cell > d) {
                        return Err(Error::InvalidModel(format!(
                            "region {idx}: voxel cell {cell} must exceed the mollification width"
                        )));
                    }
                    if cells.len() != dims[0] * dims[1] * dims[2] {
                        return Err(Error::InvalidModel(format!(
                            "region {idx}: voxel map has {} cells, dims imply {}",
                            cells.len(),
                            dims[0] * dims[1] * dims[2]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Blend coefficients `c_m(r)` and their gradients.
    pub fn coefficients(&self, r: Vec3, n_models: usize) -> super::Coefficients {
        let mut c = vec![0.0; n_models];
        let mut g = vec![[0.0; 3]; n_models];
        for &k in &self.background {
            c[k] += 1.0;
        }
        let d = self.mollify;
        for region in &self.regions {
            match &region.shape {
                Shape::Ball { center, radius } => {
                    let x = sub(r, *center);
                    let rho = norm(x);
                    let (h, dh) = smoothstep(rho - radius, d);
                    let w = 1.0 - h;
                    let gw = if dh == 0.0 || rho == 0.0 { [0.0; 3] } else { [-dh * x[0] / rho, -dh * x[1] / rho, -dh * x[2] / rho] };
                    blend(&mut c, &mut g, w, gw, &region.medium);
                }
                Shape::Slab { axis, lower, upper } => {
                    let x = r[*axis];
                    let (h1, d1) = if lower.is_finite() { smoothstep(x - lower, d) } else { (1.0, 0.0) };
                    let (h2, d2) = if upper.is_finite() { smoothstep(x - upper, d) } else { (0.0, 0.0) };
                    let mut gw = [0.0; 3];
                    gw[*axis] = d1 - d2;
                    blend(&mut c, &mut g, h1 - h2, gw, &region.medium);
                }
                Shape::VoxelMap { origin, cell, dims, cells } => {
                    voxel_blend(&mut c, &mut g, r, *origin, *cell, *dims, cells, d);
                }
            }
        }
        super::Coefficients { value: c, gradient: g }
    }

    pub fn mirrored(&self, axis: usize, at: f64) -> Self {
        let regions = self
            .regions
            .iter()
            .map(|reg| {
                let shape = match &reg.shape {
                    Shape::Ball { center, radius } => {
                        let mut c = *center;
                        c[axis] = 2.0 * at - c[axis];
                        Shape::Ball { center: c, radius: *radius }
                    }
                    Shape::Slab { axis: a, lower, upper } if *a == axis => {
                        Shape::Slab { axis: *a, lower: 2.0 * at - upper, upper: 2.0 * at - lower }
                    }
                    Shape::Slab { .. } => reg.shape.clone(),
                    Shape::VoxelMap { origin, cell, dims, cells } => {
                        let mut o = *origin;
                        o[axis] = 2.0 * at - (origin[axis] + dims[axis] as f64 * cell);
                        let mut out = cells.clone();
                        for i in 0..dims[0] {
                            for j in 0..dims[1] {
                                for k in 0..dims[2] {
                                    let mut m = [i, j, k];
                                    m[axis] = dims[axis] - 1 - m[axis];
                                    out[(m[0] * dims[1] + m[1]) * dims[2] + m[2]] = cells[(i * dims[1] + j) * dims[2] + k];
                                }
                            }
                        }
                        Shape::VoxelMap { origin: o, cell: *cell, dims: *dims, cells: out }
                    }
                };
                Region { shape, medium: reg.medium.clone() }
            })
            .collect();
        Self { background: self.background.clone(), regions, mollify: self.mollify }
    }
}

fn blend(c: &mut [f64], g: &mut [Vec3], w: f64, gw: Vec3, medium: &[usize]) {
    if w == 0.0 && gw == [0.0; 3] {
        return;
    }
    let mut target = vec![0.0; c.len()];
    for &k in medium {
        target[k] += 1.0;
    }
    for m in 0..c.len() {
        let diff = target[m] - c[m];
        for d in 0..3 {
            g[m][d] = (1.0 - w) * g[m][d] + gw[d] * diff;
        }
        c[m] += w * diff;
    }
}

#[allow(clippy::too_many_arguments)]
fn voxel_blend(
    c: &mut [f64],
    g: &mut [Vec3],
    r: Vec3,
    origin: Vec3,
    cell: f64,
    dims: [usize; 3],
    cells: &[Option<usize>],
    d: f64,
) {
    // 1D windows along each axis: at most two cells per axis are touched.
    let mut axis_windows: [Vec<(usize, f64, f64)>; 3] = Default::default();
    for a in 0..3 {
        let x = r[a] - origin[a];
        let lo = ((x - 0.5 * d) / cell).floor().max(0.0) as i64;
        let hi = ((x + 0.5 * d) / cell).floor() as i64;
        for i in lo..=hi {
            if i < 0 || i as usize >= dims[a] {
                continue;
            }
            let left = i as f64 * cell;
            let (h1, d1) = smoothstep(x - left, d);
            let (h2, d2) = smoothstep(x - left - cell, d);
            let w = h1 - h2;
            if w != 0.0 || d1 != d2 {
                axis_windows[a].push((i as usize, w, d1 - d2));
            }
        }
        if axis_windows[a].is_empty() {
            return;
        }
    }
    let n = c.len();
    let old = c.to_vec();
    let mut total_w = 0.0;
    let mut total_gw = [0.0; 3];
    let mut add = vec![0.0; n];
    let mut add_g = vec![[0.0; 3]; n];
    for &(i, wx, dx) in &axis_windows[0] {
        for &(j, wy, dy) in &axis_windows[1] {
            for &(k, wz, dz) in &axis_windows[2] {
                let Some(m) = cells[(i * dims[1] + j) * dims[2] + k] else { continue };
                let w = wx * wy * wz;
                let gw = [dx * wy * wz, wx * dy * wz, wx * wy * dz];
                total_w += w;
                add[m] += w;
                for a in 0..3 {
                    total_gw[a] += gw[a];
                    add_g[m][a] += gw[a];
                }
            }
        }
    }
    for m in 0..n {
        for a in 0..3 {
            g[m][a] = (1.0 - total_w) * g[m][a] - total_gw[a] * old[m] + add_g[m][a];
        }
        c[m] = (1.0 - total_w) * old[m] + add[m];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &SpatialProfile, n: usize, r: Vec3) {
        let h = 1e-6;
        let base = p.coefficients(r, n);
        for a in 0..3 {
            let mut rp = r;
            let mut rm = r;
            rp[a] += h;
            rm[a] -= h;
            let cp = p.coefficients(rp, n).value;
            let cm = p.coefficients(rm, n).value;
            for m in 0..n {
                let fd = (cp[m] - cm[m]) / (2.0 * h);
                assert!((fd - base.gradient[m][a]).abs() < 1e-6, "axis {a} model {m}: fd {fd} vs {}", base.gradient[m][a]);
            }
        }
    }

    #[test]
    fn smoothstep_endpoints_and_derivative() {
        assert_eq!(smoothstep(-1.0, 1.0), (0.0, 0.0));
        assert_eq!(smoothstep(1.0, 1.0), (1.0, 0.0));
        let (h, dh) = smoothstep(0.0, 2.0);
        assert!((h - 0.5).abs() < 1e-15);
        assert!((dh - 0.75).abs() < 1e-15);
    }

    #[test]
    fn ball_gradient_matches_finite_differences() {
        let p = SpatialProfile::new(vec![0], vec![Region::new(Shape::Ball { center: [0.1, 0.0, -0.2], radius: 0.5 }, vec![1])], 0.3);
        for r in [[0.5, 0.1, 0.0], [0.0, 0.55, -0.2], [0.3, 0.3, 0.1]] {
            fd_check(&p, 2, r);
        }
        let c = p.coefficients([0.1, 0.0, -0.2], 2);
        assert_eq!(c.value, vec![0.0, 1.0]);
        let far = p.coefficients([2.0, 0.0, 0.0], 2);
        assert_eq!(far.value, vec![1.0, 0.0]);
    }

    #[test]
    fn slab_and_voxel_gradients_match_finite_differences() {
        let cells = vec![Some(1), None, Some(2), Some(1), None, None, Some(2), Some(2)];
        let p = SpatialProfile::new(
            vec![0],
            vec![
                Region::new(Shape::Slab { axis: 2, lower: f64::NEG_INFINITY, upper: 0.0 }, vec![1]),
                Region::new(Shape::VoxelMap { origin: [-0.5; 3], cell: 0.5, dims: [2, 2, 2], cells }, vec![]),
            ],
            0.2,
        );
        for r in [[0.01, 0.02, 0.03], [-0.48, 0.05, 0.37], [0.2, -0.13, -0.05], [0.45, 0.47, 0.52]] {
            fd_check(&p, 3, r);
            let c = p.coefficients(r, 3);
            let s: f64 = c.value.iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "coefficients are a partition of unity, got {s}");
        }
    }

    #[test]
    fn mirrored_slab_swaps_sides() {
        let p = SpatialProfile::new(vec![0], vec![Region::new(Shape::Slab { axis: 2, lower: f64::NEG_INFINITY, upper: 0.0 }, vec![1])], 0.2);
        let q = p.mirrored(2, 0.0);
        for z in [-0.7, -0.05, 0.0, 0.03, 0.4] {
            let a = p.coefficients([0.0, 0.0, z], 2).value;
            let b = q.coefficients([0.0, 0.0, -z], 2).value;
            assert!((a[1] - b[1]).abs() < 1e-15);
        }
    }
}
