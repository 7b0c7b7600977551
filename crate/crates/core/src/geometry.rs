//! Small fixed-size vector and tensor helpers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Sub};

pub type Vec3 = [f64; 3];

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn unit(axis: usize) -> Vec3 {
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    e
}

/// Complex 3x3 tensor, row index first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Tensor3(pub [[Complex64; 3]; 3]);

impl Tensor3 {
    pub fn zero() -> Self {
        Tensor3([[Complex64::new(0.0, 0.0); 3]; 3])
    }

    pub fn identity_scaled(s: Complex64) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            t.0[i][i] = s;
        }
        t
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut t = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = f(i, j);
            }
        }
        t
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for Tensor3 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for Tensor3 {
    type Output = Tensor3;
    fn add(self, o: Tensor3) -> Tensor3 {
        Tensor3::from_fn(|i, j| self.0[i][j] + o.0[i][j])
    }
}

impl AddAssign for Tensor3 {
    fn add_assign(&mut self, o: Tensor3) {
        *self = *self + o;
    }
}

impl Sub for Tensor3 {
    type Output = Tensor3;
    fn sub(self, o: Tensor3) -> Tensor3 {
        Tensor3::from_fn(|i, j| self.0[i][j] - o.0[i][j])
    }
}

impl Mul<Complex64> for Tensor3 {
    type Output = Tensor3;
    fn mul(self, s: Complex64) -> Tensor3 {
        self.scale(s)
    }
}

impl Mul<f64> for Tensor3 {
    type Output = Tensor3;
    fn mul(self, s: f64) -> Tensor3 {
        self.scale(Complex64::new(s, 0.0))
    }
}
