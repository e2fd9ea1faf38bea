//! Smooth compactly supported test fields that are mutually infinitesimally
//! equivalent by construction.
//!
//! `mu_i = B q + (B z s_i)_zbar` with the bump `B = (1 - |z|^2/rho^2)^4`.
//! Each `B z s_i` vanishes at 0 and outside the disk of radius `rho`, so
//! `P(mu_i) - P(mu_j)` vanishes outside that disk.

use serde::{Deserialize, Serialize};

use crate::algebra::{Complex, Polynomial};
use crate::error::{Error, Result};
use crate::transforms::plane::{PlaneField, PlaneGrid};

pub const BUMP_RADIUS: f64 = 0.9;

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct EquivalentFields {
    /// Holomorphic part of the common density `q`.
    pub base_holo: Vec<Complex>,
    /// Antiholomorphic part of `q`, as coefficients of powers of `zbar`.
    pub base_anti: Vec<Complex>,
    /// One polynomial `s_i` per coordinate.
    pub shifts: Vec<Vec<Complex>>,
}

fn bump(z: Complex) -> (f64, Complex) {
    let rho2 = BUMP_RADIUS * BUMP_RADIUS;
    let s = 1.0 - z.norm_sqr() / rho2;
    if s <= 0.0 {
        return (0.0, Complex::new(0.0, 0.0));
    }
    // B_zbar = 4 s^3 (-z / rho^2)
    (s.powi(4), z * (-4.0 * s.powi(3) / rho2))
}

impl EquivalentFields {
    pub fn n(&self) -> usize {
        self.shifts.len()
    }

    /// Field `i` at `z`.
    pub fn eval(&self, i: usize, z: Complex) -> Complex {
        let (b, bzb) = bump(z);
        if b == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        let q = Polynomial::new(self.base_holo.clone()).eval(z) + Polynomial::new(self.base_anti.clone()).eval(z.conj());
        let s = Polynomial::new(self.shifts[i].clone()).eval(z);
        q * b + bzb * z * s
    }

    pub fn sample(&self, grid: PlaneGrid) -> Result<Vec<PlaneField>> {
        if self.shifts.is_empty() {
            return Err(Error::Domain("need at least one coordinate".into()));
        }
        Ok((0..self.n()).map(|i| grid.sample(|z| self.eval(i, z))).collect())
    }

    /// Scale every coefficient by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let sc = |v: &Vec<Complex>| v.iter().map(|c| c * s).collect::<Vec<_>>();
        Self {
            base_holo: sc(&self.base_holo),
            base_anti: sc(&self.base_anti),
            shifts: self.shifts.iter().map(sc).collect(),
        }
    }
}
