//! Schwarz's criterion: if the Gauss image of a disk lies in a spherical cap
//! whose first Dirichlet eigenvalue is below 2, the disk is unstable.

use std::f64::consts::PI;

use serde::Serialize;

use crate::algebra::{min_modulus_on_circle, Complex, Polynomial, I};
use crate::error::{Error, Result};
use crate::weierstrass::WeierstrassData;

/// Default step of the shooting integrator.
pub const SHOOTING_STEP: f64 = 1e-4;
/// End of the series start near the pole of the cap.
const SERIES_END: f64 = 0.01;

/// Stereographic Gauss map `g = p_3 / (p_1 - i p_2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussMap {
    pub numerator: Polynomial,
    pub denominator: Polynomial,
}

impl GaussMap {
    pub fn eval(&self, z: Complex) -> Complex {
        self.numerator.eval(z) / self.denominator.eval(z)
    }

    /// `Some((c, k))` when `g(z) = c z^k` with `k >= 1`.
    pub fn as_monomial(&self) -> Option<(Complex, usize)> {
        if self.denominator.degree() != Some(0) {
            return None;
        }
        let k = self.numerator.degree()?;
        let nonzero = self.numerator.coeffs().iter().filter(|a| a.norm() > 0.0).count();
        (k >= 1 && nonzero == 1).then(|| (self.numerator.coeff(k as i64) / self.denominator.coeff(0), k))
    }

    pub fn is_scaled_identity(&self) -> bool {
        matches!(self.as_monomial(), Some((_, 1)))
    }
}

pub fn gauss_map_polys(polys: &[Polynomial]) -> Result<GaussMap> {
    if polys.len() != 3 {
        return Err(Error::Unsupported(format!("Gauss map needs n = 3, got n = {}", polys.len())));
    }
    let denominator = &polys[0] - &polys[1].scale(I);
    if denominator.is_zero() {
        return Err(Error::Unsupported(
            "p1 - i p2 vanishes identically; the Gauss map is the point at infinity".into(),
        ));
    }
    Ok(GaussMap {
        numerator: polys[2].clone(),
        denominator,
    })
}

pub fn gauss_map_stereographic(w: &WeierstrassData) -> Result<GaussMap> {
    gauss_map_polys(w.polys())
}

/// Spherical cap of geodesic radius `theta0` about a pole.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CapSpec {
    theta0: f64,
}

impl CapSpec {
    pub fn new(theta0: f64) -> Result<Self> {
        if !(theta0 > 0.0 && theta0 < PI) {
            return Err(Error::Domain(format!("cap radius must lie in (0, pi), got {theta0}")));
        }
        Ok(Self { theta0 })
    }

    /// Cap bounded by the image of the circle `|w| = rho` under inverse
    /// stereographic projection.
    pub fn from_plane_radius(rho: f64) -> Result<Self> {
        Self::new(2.0 * rho.atan())
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }
}

/// Cap image of the disk of radius `r` under `g`, with `rho = max |g|` and a
/// flag telling whether the cap is only an enclosure of the image.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CapImage {
    pub rho: f64,
    pub cap: CapSpec,
    pub enclosure: bool,
}

pub fn cap_of_disk_image(g: &GaussMap, r: f64) -> Result<CapImage> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if let Some((c, k)) = g.as_monomial() {
        let rho = c.norm() * r.powi(k as i32);
        return Ok(CapImage {
            rho,
            cap: CapSpec::from_plane_radius(rho)?,
            enclosure: false,
        });
    }
    let den = g.denominator.reparam_scale(r)?;
    let num = g.numerator.reparam_scale(r)?;
    let deg = den.degree().unwrap_or(0).max(num.degree().unwrap_or(0));
    let samples = 4096.max(64 * (deg + 1));
    let m = min_modulus_on_circle(&den, samples);
    if m.certified_lower_bound <= 0.0 || den.zeros_in_unit_disk(samples) > 0 {
        return Err(Error::Unsupported(format!(
            "Gauss map has a pole in the closed disk of radius {r}"
        )));
    }
    let rho = (0..samples)
        .map(|k| {
            let z = Complex::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64);
            (num.eval(z) / den.eval(z)).norm()
        })
        .fold(0.0, f64::max);
    Ok(CapImage {
        rho,
        cap: CapSpec::from_plane_radius(rho)?,
        enclosure: true,
    })
}

/// `u(theta0)` sign test: does the regular solution of
/// `u'' + cot(theta) u' + lambda u = 0`, `u(0) = 1`, vanish in `(0, theta0]`?
fn has_zero(lambda: f64, theta0: f64, step: f64) -> bool {
    let s = SERIES_END.min(0.5 * theta0);
    let a = -lambda / 4.0;
    let b = lambda * (lambda - 2.0 / 3.0) / 64.0;
    let mut u = 1.0 + a * s * s + b * s.powi(4);
    let mut du = 2.0 * a * s + 4.0 * b * s.powi(3);
    if u <= 0.0 {
        return true;
    }
    let rhs = |t: f64, u: f64, du: f64| (du, -du / t.tan() - lambda * u);
    let n = ((theta0 - s) / step).ceil().max(1.0) as usize;
    let h = (theta0 - s) / n as f64;
    let mut t = s;
    for _ in 0..n {
        let (k1u, k1v) = rhs(t, u, du);
        let (k2u, k2v) = rhs(t + 0.5 * h, u + 0.5 * h * k1u, du + 0.5 * h * k1v);
        let (k3u, k3v) = rhs(t + 0.5 * h, u + 0.5 * h * k2u, du + 0.5 * h * k2v);
        let (k4u, k4v) = rhs(t + h, u + h * k3u, du + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t += h;
        if u <= 0.0 {
            return true;
        }
    }
    false
}

/// First Dirichlet eigenvalue of the cap by shooting and bisection.
pub fn lambda1_cap(cap: CapSpec, tolerance: f64) -> Result<f64> {
    lambda1_cap_with_step(cap, tolerance, SHOOTING_STEP)
}

pub fn lambda1_cap_with_step(cap: CapSpec, tolerance: f64, step: f64) -> Result<f64> {
    if !(tolerance > 0.0 && step > 0.0) {
        return Err(Error::Domain("tolerance and step must be positive".into()));
    }
    let th = cap.theta0;
    let (mut lo, mut hi) = (0.1_f64, 200.0_f64);
    while has_zero(lo, th, step) {
        lo *= 0.5;
        if lo < 1e-12 {
            return Err(Error::Convergence("no lower bracket for the first eigenvalue".into()));
        }
    }
    while !has_zero(hi, th, step) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Convergence("no upper bracket for the first eigenvalue".into()));
        }
    }
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if has_zero(mid, th, step) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SchwarzVerdict {
    pub rho: f64,
    pub theta0: f64,
    pub lambda1: f64,
    pub unstable: bool,
    pub inconclusive: bool,
    /// The cap only encloses the Gauss image; `unstable = false` is then not evidence of stability.
    pub enclosure: bool,
}

/// Verdict for the disk of radius `r` of the surface with data `polys`.
pub fn schwarz_verdict_polys(polys: &[Polynomial], r: f64, tolerance: f64) -> Result<SchwarzVerdict> {
    let g = gauss_map_polys(polys)?;
    let img = cap_of_disk_image(&g, r)?;
    let lambda1 = lambda1_cap(img.cap, 0.1 * tolerance)?;
    let inconclusive = (lambda1 - 2.0).abs() <= tolerance;
    Ok(SchwarzVerdict {
        rho: img.rho,
        theta0: img.cap.theta0(),
        lambda1,
        unstable: lambda1 < 2.0 - tolerance,
        inconclusive,
        enclosure: img.enclosure,
    })
}

pub fn schwarz_verdict(w: &WeierstrassData, r: f64, tolerance: f64) -> Result<SchwarzVerdict> {
    schwarz_verdict_polys(w.polys(), r, tolerance)
}
