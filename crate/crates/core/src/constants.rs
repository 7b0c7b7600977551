//! Physical constants. Everything in the crate takes a [`Units`] value so the
//! same code runs in SI or in natural units (`c = ħ = ε₀ = 1`).

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Units {
    /// Speed of light in vacuum.
    pub c: f64,
    /// Reduced Planck constant.
    pub hbar: f64,
    /// Vacuum permittivity.
    pub eps0: f64,
}

impl Units {
    pub const SI: Units = Units {
        c: 299_792_458.0,
        hbar: 1.054_571_817e-34,
        eps0: 8.854_187_812_8e-12,
    };

    pub const NATURAL: Units = Units { c: 1.0, hbar: 1.0, eps0: 1.0 };

    pub fn c2(&self) -> f64 {
        self.c * self.c
    }
}

impl Default for Units {
    fn default() -> Self {
        Units::SI
    }
}
