//! Integrals of `g` and `g′ x̂` over a voxel as seen from a nearby point,
//! for Nyström interpolation off the collocation nodes.

use crate::geometry::{norm, sub, Vec3};
use crate::green_free::radial;
use crate::quadrature::gauss_legendre;
use num_complex::Complex64;

/// `(∫ g(|r−v|) dv, ∫ g′(|r−v|) x̂ dv)` over the box `[lo, hi]`, with
/// `x = r − v`. The box is split at the coordinates of `r` and every piece
/// is written as a sum of pyramids with apex `r`, whose `u²` Jacobian
/// cancels the singularity. `m` Gauss points per direction.
pub fn box_moments(r: Vec3, lo: Vec3, hi: Vec3, q0: Complex64, m: usize) -> (Complex64, [Complex64; 3]) {
    let (x, w) = gauss_legendre(m);
    let zero = Complex64::new(0.0, 0.0);
    let mut i0 = zero;
    let mut i1 = [zero; 3];
    let cuts: Vec<Vec<f64>> = (0..3)
        .map(|d| {
            let mut c = vec![lo[d]];
            if r[d] > lo[d] && r[d] < hi[d] {
                c.push(r[d]);
            }
            c.push(hi[d]);
            c
        })
        .collect();
    for a in cuts[0].windows(2) {
        for b in cuts[1].windows(2) {
            for c in cuts[2].windows(2) {
                let sl = [a[0], b[0], c[0]];
                let sh = [a[1], b[1], c[1]];
                for d in 0..3 {
                    for (plane, normal) in [(sh[d], 1.0), (sl[d], -1.0)] {
                        let t = normal * (plane - r[d]);
                        if t.abs() < 1e-14 * (sh[d] - sl[d]) {
                            continue;
                        }
                        let (e1, e2) = ((d + 1) % 3, (d + 2) % 3);
                        let (h1, h2) = (sh[e1] - sl[e1], sh[e2] - sl[e2]);
                        for (xi, wi) in x.iter().zip(&w) {
                            let s1 = sl[e1] + 0.5 * (xi + 1.0) * h1;
                            for (xj, wj) in x.iter().zip(&w) {
                                let s2 = sl[e2] + 0.5 * (xj + 1.0) * h2;
                                let mut q = [0.0; 3];
                                q[d] = plane;
                                q[e1] = s1;
                                q[e2] = s2;
                                let dq = sub(q, r);
                                let len = norm(dq);
                                let unit = [-dq[0] / len, -dq[1] / len, -dq[2] / len];
                                let face_w = 0.25 * wi * wj * h1 * h2 * t;
                                for (xu, wu) in x.iter().zip(&w) {
                                    let u = 0.5 * (xu + 1.0);
                                    let rad = radial(u * len, q0);
                                    let jw = face_w * 0.5 * wu * u * u;
                                    i0 += rad.g * jw;
                                    for k in 0..3 {
                                        i1[k] += rad.dg * (unit[k] * jw);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (i0, i1)
}
