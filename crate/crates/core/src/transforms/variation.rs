//! Mutually infinitesimally equivalent Beltrami fields built from a boundary
//! variation `phi`, and the infinitesimal inequality evaluated on them.
//!
//! For each coordinate, `g_i = W_i v_i / p_i` where `v_i` is the harmonic
//! extension of `p_i phi`. The factor `W_i = 1 - sum_c U_c` removes the poles
//! at the zeros `c` of `p_i` (and forces `g_i(0) = 0`), with
//!
//! ```text
//! U_c = 1                              |z - c| < r_in
//!       ln(R / rho) / ln(R / r_in)     r_in <= rho <= R
//!       0                              rho > R
//! ```
//!
//! Then `mu_i = (g_i)_zbar` and `T(mu_i) = (g_i)_z` on the disk, and every
//! `P(mu_i)` agrees outside the disk because `g_i = phi` on the circle and
//! `g_i(0) = 0`. The cutoff costs `O(1 / ln(R / r_in))` in the energy, so a
//! negative `F_alpha(phi)` survives once the cutoffs are deep enough.
//!
//! The integrands carry `1/rho` structure near each centre, so the integrals
//! use a composite rule: polar Gauss–Legendre in `ln rho` around each centre,
//! blended into a global disk rule by a smooth partition of unity.

use std::f64::consts::PI;

use serde::Serialize;

use crate::algebra::{boundary_fourier, Complex, LaurentTail, Polynomial};
use crate::error::{Error, Result};
use crate::spectral::{f_alpha, HarmonicField};
use crate::transforms::checks::holds_tolerance;
use crate::transforms::quadrature::{gauss_legendre_interval, DiskGrid, Quadrature};
use crate::weierstrass::WeierstrassData;

/// Roots of `p` by Durand–Kerner, with exact zeros at the origin split off first.
pub fn polynomial_roots(p: &Polynomial) -> Vec<Complex> {
    let c = p.coeffs();
    let lead = c.iter().position(|a| a.norm() > 0.0).unwrap_or(c.len());
    let mut roots = vec![Complex::new(0.0, 0.0); lead.min(c.len().saturating_sub(1))];
    if c.len() <= lead + 1 {
        return roots;
    }
    let q: Vec<Complex> = c[lead..].iter().map(|a| a / c[c.len() - 1]).collect();
    let d = q.len() - 1;
    let eval = |z: Complex| q.iter().rev().fold(Complex::new(0.0, 0.0), |acc, a| acc * z + a);
    let bound = 1.0 + q[..d].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let seed = Complex::from_polar(0.4 * bound, 0.9);
    let mut z: Vec<Complex> = (0..d).map(|k| seed * Complex::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)).collect();
    for _ in 0..2000 {
        let mut change = 0.0_f64;
        for k in 0..d {
            let mut den = Complex::new(1.0, 0.0);
            for j in 0..d {
                if j != k {
                    den *= z[k] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex::new(1e-300, 0.0);
            }
            let step = eval(z[k]) / den;
            z[k] -= step;
            change = change.max(step.norm());
        }
        if change < 1e-15 * bound {
            break;
        }
    }
    roots.extend(z);
    roots
}

/// Merge roots closer than `tol`, returning cluster means.
fn cluster(points: &[Complex], tol: f64) -> Vec<Complex> {
    let mut groups: Vec<Vec<Complex>> = Vec::new();
    for &p in points {
        match groups.iter_mut().find(|g| g.iter().any(|q| (q - p).norm() < tol)) {
            Some(g) => g.push(p),
            None => groups.push(vec![p]),
        }
    }
    groups
        .into_iter()
        .map(|g| g.iter().sum::<Complex>() / g.len() as f64)
        .collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CutoffOptions {
    /// Upper bound for the cutoff radius `R`.
    pub max_radius: f64,
    /// `ln(R / r_in)`.
    pub depth: f64,
    pub global_nr: usize,
    pub global_ntheta: usize,
    /// Gauss–Legendre nodes in `ln rho` on `[r_in, R]`.
    pub local_log: usize,
    /// Gauss–Legendre nodes in `rho` on the blending ring `[R, 2R]`.
    pub local_ring: usize,
    pub local_angles: usize,
}

impl Default for CutoffOptions {
    fn default() -> Self {
        Self {
            max_radius: 0.3,
            depth: 1e10_f64.ln(),
            global_nr: 128,
            global_ntheta: 512,
            local_log: 48,
            local_ring: 32,
            local_angles: 96,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cutoff {
    pub center: Complex,
    pub radius: f64,
    pub inner_radius: f64,
}

impl Cutoff {
    /// `(U, U_z, U_zbar)`.
    fn eval(&self, z: Complex) -> (f64, Complex, Complex) {
        let d = z - self.center;
        let rho = d.norm();
        let zero = Complex::new(0.0, 0.0);
        if rho >= self.radius {
            return (0.0, zero, zero);
        }
        if rho <= self.inner_radius {
            return (1.0, zero, zero);
        }
        let depth = (self.radius / self.inner_radius).ln();
        let u = (self.radius / rho).ln() / depth;
        let du = -1.0 / (rho * depth);
        (u, d.conj() * (du / (2.0 * rho)), d * (du / (2.0 * rho)))
    }

    /// Smooth partition weight: 1 on `rho <= R`, 0 on `rho >= 2R`.
    fn blend(&self, z: Complex) -> f64 {
        let t = ((z - self.center).norm() - self.radius) / self.radius;
        if t <= 0.0 {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            smooth_step(1.0 - t)
        }
    }
}

fn smooth_step(x: f64) -> f64 {
    let f = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
    let (a, b) = (f(x), f(1.0 - x));
    a / (a + b)
}

#[derive(Clone, Debug)]
struct Coordinate {
    p: Polynomial,
    dp: Polynomial,
    v: HarmonicField,
    cutoffs: Vec<Cutoff>,
}

impl Coordinate {
    /// `(W, W_z, W_zbar)`.
    fn weight(&self, z: Complex) -> (f64, Complex, Complex) {
        self.cutoffs.iter().fold((1.0, Complex::new(0.0, 0.0), Complex::new(0.0, 0.0)), |(w, wz, wzb), c| {
            let (u, uz, uzb) = c.eval(z);
            (w - u, wz - uz, wzb - uzb)
        })
    }

    /// `g`, `p g_z` and `p g_zbar`; the products stay bounded at zeros of `p`.
    fn eval(&self, z: Complex) -> (Complex, Complex, Complex) {
        let (w, wz, wzb) = self.weight(z);
        let zero = Complex::new(0.0, 0.0);
        if w == 0.0 && wz == zero && wzb == zero {
            return (zero, zero, zero);
        }
        let p = self.p.eval(z);
        let v = self.v.eval(z);
        let pg_zbar = wzb * v + self.v.dzbar(z) * w;
        let pg_z = wz * v + (self.v.dz(z) - v * self.dp.eval(z) / p) * w;
        (v * w / p, pg_z, pg_zbar)
    }
}

/// The construction for every coordinate of `w`.
#[derive(Clone, Debug)]
pub struct CutoffVariation {
    phi: LaurentTail,
    coords: Vec<Coordinate>,
    opts: CutoffOptions,
}

impl CutoffVariation {
    pub fn new(w: &WeierstrassData, phi: &LaurentTail, opts: CutoffOptions) -> Result<Self> {
        if phi.is_zero() {
            return Err(Error::Domain("variation phi is zero".into()));
        }
        if !(opts.depth > 0.0 && opts.max_radius > 0.0) {
            return Err(Error::Domain("cutoff depth and radius must be positive".into()));
        }
        let mut coords = Vec::with_capacity(w.n());
        for p in w.polys() {
            let v = boundary_fourier(p, phi);
            let scale = p.max_coeff_norm().max(1e-300);
            let mut centers: Vec<Complex> = cluster(
                &polynomial_roots(p).into_iter().filter(|z| z.norm() < 1.0).collect::<Vec<_>>(),
                1e-6,
            );
            let origin = Complex::new(0.0, 0.0);
            let covers_origin = centers.iter().any(|c| c.norm() < 1e-8);
            if !covers_origin && v.eval(origin).norm() > 1e-14 * scale {
                centers.push(origin);
            }
            let mut cutoffs = Vec::with_capacity(centers.len());
            for (k, &c) in centers.iter().enumerate() {
                let nearest = centers
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, d)| (d - c).norm())
                    .fold(f64::INFINITY, f64::min);
                let radius = opts.max_radius.min((1.0 - c.norm()) / 2.5).min(nearest / 4.5);
                if radius < 1e-3 {
                    return Err(Error::Unsupported(format!(
                        "zero at {c} is too close to the circle or to another zero for a cutoff"
                    )));
                }
                cutoffs.push(Cutoff {
                    center: c,
                    radius,
                    inner_radius: radius * (-opts.depth).exp(),
                });
            }
            coords.push(Coordinate {
                p: p.clone(),
                dp: p.derivative(),
                v,
                cutoffs,
            });
        }
        Ok(Self {
            phi: phi.clone(),
            coords,
            opts,
        })
    }

    pub fn cutoffs(&self, i: usize) -> &[Cutoff] {
        &self.coords[i].cutoffs
    }

    /// `g_i(z)`.
    pub fn g(&self, i: usize, z: Complex) -> Complex {
        self.coords[i].eval(z).0
    }

    /// Composite rule on the unit disk adapted to coordinate `i`.
    pub fn quadrature(&self, i: usize) -> Quadrature {
        let cuts = &self.coords[i].cutoffs;
        let o = &self.opts;
        let mut quad = Quadrature::default();
        for (z, wt) in DiskGrid::new(o.global_nr, o.global_ntheta).nodes() {
            let b: f64 = cuts.iter().map(|c| c.blend(z)).sum();
            if b < 1.0 {
                quad.points.push(z);
                quad.weights.push(wt * (1.0 - b));
            }
        }
        let dpsi = 2.0 * PI / o.local_angles as f64;
        for c in cuts {
            let mut radial: Vec<(f64, f64)> = gauss_legendre_interval(o.local_log, c.inner_radius.ln(), c.radius.ln())
                .into_iter()
                .map(|(s, ws)| (s.exp(), ws * s.exp() * s.exp()))
                .collect();
            radial.extend(
                gauss_legendre_interval(o.local_ring, c.radius, 2.0 * c.radius)
                    .into_iter()
                    .map(|(rho, wr)| (rho, wr * rho)),
            );
            for (rho, wr) in radial {
                for k in 0..o.local_angles {
                    let z = c.center + Complex::from_polar(rho, (k as f64 + 0.5) * dpsi);
                    let wt = wr * dpsi * c.blend(z);
                    if wt > 0.0 {
                        quad.points.push(z);
                        quad.weights.push(wt);
                    }
                }
            }
        }
        quad
    }

    /// Evaluate the infinitesimal inequality on the construction.
    pub fn check(&self, w: &WeierstrassData) -> Result<CutoffReport> {
        if w.n() != self.coords.len() {
            return Err(Error::Domain("surface does not match the construction".into()));
        }
        let (mut lhs, mut rhs, mut energy) = (0.0, 0.0, 0.0);
        let mut cost = 0.0;
        for (i, co) in self.coords.iter().enumerate() {
            for (z, wt) in self.quadrature(i).nodes() {
                let (_, pgz, pgzb) = co.eval(z);
                // phi_i mu_i T(mu_i) = (p g_zbar)(p g_z)
                lhs -= wt * (pgzb * pgz).re;
                rhs += wt * pgzb.norm_sqr();
                // F(W v) with (W v)_z = W_z v + W v_z
                let (wv, wvz, wvzb) = co.weight(z);
                let v = co.v.eval(z);
                let fz = wvz * v + co.v.dz(z) * wv;
                let fzb = wvzb * v + co.v.dzbar(z) * wv;
                energy += wt * ((fz * fzb).re + fzb.norm_sqr());
            }
            for c in &co.cutoffs {
                cost += co.v.eval(c.center).re.powi(2) * PI / (c.radius / c.inner_radius).ln();
            }
        }
        let equivalence_residual = self.equivalence_residual(1024);
        Ok(CutoffReport {
            lhs,
            rhs,
            holds: lhs <= rhs + holds_tolerance(lhs, rhs),
            equivalence_residual,
            energy,
            identity_residual: ((rhs - lhs) - energy).abs(),
            f_alpha: f_alpha(w, &self.phi),
            cutoff_cost_estimate: cost,
        })
    }

    /// Largest deviation of `g_i` from `phi` on the circle, together with the
    /// spread of `g_i(0)`; both vanish exactly for equivalent fields.
    pub fn equivalence_residual(&self, samples: usize) -> f64 {
        let mut res = 0.0_f64;
        for i in 0..self.coords.len() {
            for k in 0..samples {
                let z = Complex::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64);
                res = res.max((self.g(i, z) - self.phi.eval(z)).norm());
            }
        }
        let origin = Complex::new(0.0, 0.0);
        for i in 0..self.coords.len() {
            for j in (i + 1)..self.coords.len() {
                res = res.max((self.g(i, origin) - self.g(j, origin)).norm());
            }
        }
        res
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CutoffReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub equivalence_residual: f64,
    /// `sum_i F(p_i g_i)` by the same quadrature.
    pub energy: f64,
    /// `|(rhs - lhs) - energy|`.
    pub identity_residual: f64,
    /// `sum_i F` of the harmonic extensions, without cutoffs.
    pub f_alpha: f64,
    /// Leading-order energy added by the cutoffs.
    pub cutoff_cost_estimate: f64,
}

/// Build the construction for `phi` and evaluate the infinitesimal inequality.
pub fn destabilizing_check(w: &WeierstrassData, phi: &LaurentTail, opts: CutoffOptions) -> Result<CutoffReport> {
    CutoffVariation::new(w, phi, opts)?.check(w)
}
