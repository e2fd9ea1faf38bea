//! Direct kernel quadratures for `P` and `T` at single points.
//!
//! Slow, but independent of the Fourier-multiplier route. Integrals are taken
//! in polar coordinates centred at the evaluation point, so the Cauchy kernel
//! becomes bounded and the principal value of the Beurling kernel reduces to
//! `int e^{-2i psi} [ int_0^R (h(z + rho e^{i psi}) - h(z)) / rho d rho + h(z) ln R(psi) ] d psi`,
//! the `ln eps` term having zero angular mean.

use std::f64::consts::PI;

use crate::algebra::Complex;
use crate::transforms::quadrature::{gauss_legendre_interval, DiskGrid};

/// Distance from interior point `z` to the unit circle along `e^{i psi}`.
fn ray_length(z: Complex, dir: Complex) -> f64 {
    let b = (z.conj() * dir).re;
    -b + (b * b + 1.0 - z.norm_sqr()).sqrt()
}

#[derive(Clone, Copy, Debug)]
pub struct OracleResolution {
    pub n_rho: usize,
    pub n_psi: usize,
}

impl Default for OracleResolution {
    fn default() -> Self {
        Self { n_rho: 48, n_psi: 256 }
    }
}

/// `T(h)(z)` for `h` supported in the closed unit disk and `|z| < 1`.
pub fn beurling_pv(h: impl Fn(Complex) -> Complex, z: Complex, res: OracleResolution) -> Complex {
    assert!(z.norm() < 1.0, "PV oracle needs an interior point");
    let hz = h(z);
    let dpsi = 2.0 * PI / res.n_psi as f64;
    let mut acc = Complex::new(0.0, 0.0);
    for k in 0..res.n_psi {
        let psi = (k as f64 + 0.5) * dpsi;
        let dir = Complex::from_polar(1.0, psi);
        let big_r = ray_length(z, dir);
        let inner: Complex = gauss_legendre_interval(res.n_rho, 0.0, big_r)
            .into_iter()
            .map(|(rho, w)| (h(z + dir * rho) - hz) * (w / rho))
            .sum();
        acc += (inner + hz * big_r.ln()) * dir.conj() * dir.conj();
    }
    -acc * dpsi / PI
}

/// Free-space Cauchy transform `C(h)(z) = -1/pi int h(w)/(w - z) dA(w)`.
pub fn cauchy_transform(h: impl Fn(Complex) -> Complex, z: Complex, res: OracleResolution) -> Complex {
    if z.norm() >= 1.0 {
        let grid = DiskGrid::new(res.n_rho, res.n_psi);
        return -grid.integrate_complex(|w| h(w) / (w - z)) / PI;
    }
    let dpsi = 2.0 * PI / res.n_psi as f64;
    let mut acc = Complex::new(0.0, 0.0);
    for k in 0..res.n_psi {
        let psi = (k as f64 + 0.5) * dpsi;
        let dir = Complex::from_polar(1.0, psi);
        let big_r = ray_length(z, dir);
        let inner: Complex = gauss_legendre_interval(res.n_rho, 0.0, big_r)
            .into_iter()
            .map(|(rho, w)| h(z + dir * rho) * w)
            .sum();
        acc += inner * dir.conj();
    }
    -acc * dpsi / PI
}

/// `P(h)(z) = C(h)(z) - C(h)(0)`.
pub fn cauchy_p_oracle(h: impl Fn(Complex) -> Complex, z: Complex, res: OracleResolution) -> Complex {
    cauchy_transform(&h, z, res) - cauchy_transform(&h, Complex::new(0.0, 0.0), res)
}
