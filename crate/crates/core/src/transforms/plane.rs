//! Periodic square grid and the Fourier-multiplier versions of the Cauchy
//! operator `P` and the Beurling transform `T`.
//!
//! The periodic inverse of `d/dzbar` needs a mean-free right-hand side. The
//! total mass of the input is therefore carried by a Gaussian whose Cauchy
//! transform is known in closed form:
//! `dzbar [ zbar E(|z|^2/s^2) ] = exp(-|z|^2/s^2)` with `E(x) = (1 - e^{-x})/x`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::algebra::Complex;
use crate::error::{Error, Result};
use crate::transforms::quadrature::Quadrature;

/// Width of the Gaussian that absorbs the mass of a field.
pub const MASS_GAUSSIAN_WIDTH: f64 = 0.5;
/// Largest `sup |mu|` accepted by the Neumann series.
pub const NEUMANN_MAX_SUP: f64 = 0.3;
pub const NEUMANN_MAX_ORDER: usize = 6;

/// `N x N` periodic grid on `[-L/2, L/2)^2`, row-major in `y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneGrid {
    side: f64,
    n: usize,
}

impl Default for PlaneGrid {
    fn default() -> Self {
        Self { side: 8.0, n: 256 }
    }
}

impl PlaneGrid {
    pub fn new(side: f64, n: usize) -> Result<Self> {
        if !(side >= 8.0) || n < 8 || n % 2 != 0 {
            return Err(Error::Domain(format!(
                "plane grid needs side >= 8 and even n >= 8, got side {side}, n {n}"
            )));
        }
        Ok(Self { side, n })
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.side / self.n as f64
    }

    pub fn coord(&self, j: usize) -> f64 {
        -0.5 * self.side + j as f64 * self.dx()
    }

    pub fn point(&self, idx: usize) -> Complex {
        Complex::new(self.coord(idx % self.n), self.coord(idx / self.n))
    }

    pub fn points(&self) -> impl Iterator<Item = Complex> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Index of the node at the origin.
    pub fn origin_index(&self) -> usize {
        (self.n / 2) * self.n + self.n / 2
    }

    /// Angular wavenumber for FFT bin `k`; zero at the Nyquist bin.
    fn wavenumber(&self, k: usize) -> f64 {
        let n = self.n as i64;
        let kk = k as i64;
        if kk == n / 2 {
            return 0.0;
        }
        let signed = if kk < n / 2 { kk } else { kk - n };
        2.0 * PI * signed as f64 / self.side
    }

    fn is_nyquist(&self, k: usize) -> bool {
        k == self.n / 2
    }

    /// Trapezoid rule restricted to nodes strictly inside the unit disk,
    /// together with the grid indices of those nodes.
    pub fn disk_quadrature(&self) -> (Quadrature, Vec<usize>) {
        let w = self.dx() * self.dx();
        let mut quad = Quadrature::default();
        let mut idx = Vec::new();
        for i in 0..self.len() {
            let z = self.point(i);
            if z.norm_sqr() < 1.0 {
                quad.points.push(z);
                quad.weights.push(w);
                idx.push(i);
            }
        }
        (quad, idx)
    }

    pub fn sample(&self, f: impl Fn(Complex) -> Complex) -> PlaneField {
        PlaneField {
            grid: *self,
            values: self.points().map(f).collect(),
        }
    }

    /// Samples `f` on the unit disk and zero elsewhere.
    pub fn sample_disk(&self, f: impl Fn(Complex) -> Complex) -> PlaneField {
        self.sample(|z| if z.norm_sqr() < 1.0 { f(z) } else { Complex::new(0.0, 0.0) })
    }

    pub fn zeros(&self) -> PlaneField {
        PlaneField {
            grid: *self,
            values: vec![Complex::new(0.0, 0.0); self.len()],
        }
    }
}

/// Complex samples on a [`PlaneGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneField {
    pub grid: PlaneGrid,
    pub values: Vec<Complex>,
}

impl PlaneField {
    pub fn new(grid: PlaneGrid, values: Vec<Complex>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "field has {} samples, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus at nodes with `|z| > 1`.
    pub fn sup_outside_disk(&self) -> f64 {
        self.grid
            .points()
            .zip(&self.values)
            .filter(|(z, _)| z.norm_sqr() > 1.0)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn mass(&self) -> Complex {
        let w = self.grid.dx() * self.grid.dx();
        self.values.iter().sum::<Complex>() * w
    }

    pub fn zip_map(&self, other: &PlaneField, f: impl Fn(Complex, Complex) -> Complex) -> PlaneField {
        PlaneField {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex) -> Complex) -> PlaneField {
        PlaneField {
            grid: self.grid,
            values: self.values.iter().map(|&a| f(a)).collect(),
        }
    }

    pub fn at_origin(&self) -> Complex {
        self.values[self.grid.origin_index()]
    }

    fn require_disk_support(&self) -> Result<()> {
        let outside = self.sup_outside_disk();
        if outside > 1e-12 * self.sup_norm().max(1e-300) && outside > 0.0 {
            return Err(Error::Domain(format!(
                "field must vanish outside the unit disk (sup outside = {outside:e})"
            )));
        }
        Ok(())
    }
}

struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    fn run(&self, data: &mut [Complex], inverse: bool) {
        let n = self.n;
        let plan = if inverse { &self.inv } else { &self.fwd };
        for row in data.chunks_mut(n) {
            plan.process(row);
        }
        let mut col = vec![Complex::new(0.0, 0.0); n];
        for x in 0..n {
            for y in 0..n {
                col[y] = data[y * n + x];
            }
            plan.process(&mut col);
            for y in 0..n {
                data[y * n + x] = col[y];
            }
        }
        if inverse {
            let s = 1.0 / (n * n) as f64;
            for v in data.iter_mut() {
                *v *= s;
            }
        }
    }

    fn forward(&self, values: &[Complex]) -> Vec<Complex> {
        let mut d = values.to_vec();
        self.run(&mut d, false);
        d
    }

    fn inverse(&self, mut hat: Vec<Complex>) -> Vec<Complex> {
        self.run(&mut hat, true);
        hat
    }
}

fn expm1_ratio(x: f64) -> f64 {
    // (1 - e^{-x}) / x
    if x < 1e-8 {
        1.0 - 0.5 * x
    } else {
        -(-x).exp_m1() / x
    }
}

fn expm1_ratio_prime(x: f64) -> f64 {
    if x < 1e-3 {
        -0.5 + x / 3.0 - x * x / 8.0 + x * x * x / 30.0
    } else {
        (x * (-x).exp() + (-x).exp_m1()) / (x * x)
    }
}

/// Gaussian `exp(-|z|^2/s^2)`, its free-space Cauchy transform and that
/// transform's `z`-derivative (which is also its Beurling transform).
fn gaussian_parts(z: Complex, s: f64) -> (Complex, Complex, Complex) {
    let x = z.norm_sqr() / (s * s);
    let g = Complex::new((-x).exp(), 0.0);
    let zb = z.conj();
    let u = zb * expm1_ratio(x);
    let uz = zb * zb * expm1_ratio_prime(x) / (s * s);
    (g, u, uz)
}

/// `P(h)` on a plane grid: periodic spectral part plus the closed-form
/// Gaussian part, shifted so that the value at the origin is zero.
#[derive(Clone)]
pub struct CauchyPotential {
    grid: PlaneGrid,
    hat: Vec<Complex>,
    gauss_coeff: Complex,
    offset: Complex,
}

impl CauchyPotential {
    pub fn grid(&self) -> PlaneGrid {
        self.grid
    }

    fn spectral(&self, fft: &Fft2, mult: impl Fn(f64, f64) -> Complex) -> Vec<Complex> {
        let n = self.grid.n;
        let mut hat = self.hat.clone();
        for ky in 0..n {
            let eta = self.grid.wavenumber(ky);
            for kx in 0..n {
                let xi = self.grid.wavenumber(kx);
                let m = if self.grid.is_nyquist(kx) || self.grid.is_nyquist(ky) {
                    Complex::new(0.0, 0.0)
                } else {
                    mult(xi, eta)
                };
                hat[ky * n + kx] *= m;
            }
        }
        fft.inverse(hat)
    }

    fn with_gaussian(&self, base: Vec<Complex>, part: impl Fn((Complex, Complex, Complex)) -> Complex) -> PlaneField {
        let values = base
            .into_iter()
            .enumerate()
            .map(|(i, v)| v + self.gauss_coeff * part(gaussian_parts(self.grid.point(i), MASS_GAUSSIAN_WIDTH)))
            .collect();
        PlaneField { grid: self.grid, values }
    }

    pub fn values(&self) -> PlaneField {
        let fft = Fft2::new(self.grid.n);
        let base = fft.inverse(self.hat.clone());
        let mut f = self.with_gaussian(base, |(_, u, _)| u);
        for v in &mut f.values {
            *v -= self.offset;
        }
        f
    }

    /// `d/dzbar P(h)`, spectrally.
    pub fn dzbar(&self) -> PlaneField {
        let fft = Fft2::new(self.grid.n);
        let base = self.spectral(&fft, |xi, eta| Complex::new(-eta, xi) * 0.5);
        self.with_gaussian(base, |(g, _, _)| g)
    }

    /// `d/dz P(h)`, spectrally; this is `T(h)`.
    pub fn dz(&self) -> PlaneField {
        let fft = Fft2::new(self.grid.n);
        let base = self.spectral(&fft, |xi, eta| Complex::new(eta, xi) * 0.5);
        self.with_gaussian(base, |(_, _, uz)| uz)
    }
}

fn split_mass(h: &PlaneField) -> (Vec<Complex>, Complex) {
    let s = MASS_GAUSSIAN_WIDTH;
    let coeff = h.mass() / (PI * s * s);
    let reduced = h
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| v - coeff * gaussian_parts(h.grid.point(i), s).0)
        .collect();
    (reduced, coeff)
}

/// The Cauchy operator `P(h)(z) = -1/pi int h(w) (1/(w-z) - 1/w) dA(w)`.
///
/// `h` must vanish outside the unit disk.
pub fn cauchy_p(h: &PlaneField) -> Result<CauchyPotential> {
    h.require_disk_support()?;
    Ok(cauchy_p_unchecked(h))
}

fn cauchy_p_unchecked(h: &PlaneField) -> CauchyPotential {
    let grid = h.grid;
    let n = grid.n;
    let fft = Fft2::new(n);
    let (reduced, gauss_coeff) = split_mass(h);
    let mut hat = fft.forward(&reduced);
    for ky in 0..n {
        let eta = grid.wavenumber(ky);
        for kx in 0..n {
            let xi = grid.wavenumber(kx);
            let i = ky * n + kx;
            if (kx == 0 && ky == 0) || grid.is_nyquist(kx) || grid.is_nyquist(ky) {
                hat[i] = Complex::new(0.0, 0.0);
            } else {
                hat[i] /= Complex::new(-eta, xi) * 0.5;
            }
        }
    }
    let mut pot = CauchyPotential {
        grid,
        hat,
        gauss_coeff,
        offset: Complex::new(0.0, 0.0),
    };
    let raw = fft.inverse(pot.hat.clone());
    // the Gaussian part vanishes at the origin
    pot.offset = raw[grid.origin_index()];
    pot
}

/// `T(h) = d/dz P(h)`.
pub fn beurling_t(h: &PlaneField) -> Result<PlaneField> {
    Ok(cauchy_p(h)?.dz())
}

/// `T(h)` through the unimodular multiplier `(xi - i eta)/(xi + i eta)`,
/// without forming `P(h)`.
pub fn beurling_t_multiplier(h: &PlaneField) -> Result<PlaneField> {
    h.require_disk_support()?;
    let grid = h.grid;
    let n = grid.n;
    let fft = Fft2::new(n);
    let (reduced, coeff) = split_mass(h);
    let mut hat = fft.forward(&reduced);
    for ky in 0..n {
        let eta = grid.wavenumber(ky);
        for kx in 0..n {
            let xi = grid.wavenumber(kx);
            let i = ky * n + kx;
            if (kx == 0 && ky == 0) || grid.is_nyquist(kx) || grid.is_nyquist(ky) {
                hat[i] = Complex::new(0.0, 0.0);
            } else {
                hat[i] *= Complex::new(xi, -eta) / Complex::new(xi, eta);
            }
        }
    }
    let base = fft.inverse(hat);
    let values = base
        .into_iter()
        .enumerate()
        .map(|(i, v)| v + coeff * gaussian_parts(grid.point(i), MASS_GAUSSIAN_WIDTH).2)
        .collect();
    Ok(PlaneField { grid, values })
}

/// Spectral `d/dzbar` of a periodic field (no mass handling).
pub fn spectral_dzbar(f: &PlaneField) -> PlaneField {
    spectral_derivative(f, |xi, eta| Complex::new(-eta, xi) * 0.5)
}

/// Spectral `d/dz` of a periodic field (no mass handling).
pub fn spectral_dz(f: &PlaneField) -> PlaneField {
    spectral_derivative(f, |xi, eta| Complex::new(eta, xi) * 0.5)
}

fn spectral_derivative(f: &PlaneField, mult: impl Fn(f64, f64) -> Complex) -> PlaneField {
    let grid = f.grid;
    let n = grid.n;
    let fft = Fft2::new(n);
    let mut hat = fft.forward(&f.values);
    for ky in 0..n {
        let eta = grid.wavenumber(ky);
        for kx in 0..n {
            let xi = grid.wavenumber(kx);
            let m = if grid.is_nyquist(kx) || grid.is_nyquist(ky) {
                Complex::new(0.0, 0.0)
            } else {
                mult(xi, eta)
            };
            hat[ky * n + kx] *= m;
        }
    }
    PlaneField {
        grid,
        values: fft.inverse(hat),
    }
}

/// Truncated Neumann series for the normal solution of `f_zbar = mu f_z`.
#[derive(Clone, Debug)]
pub struct NormalSolution {
    pub f: PlaneField,
    pub f_z: PlaneField,
    pub f_zbar: PlaneField,
    pub order: usize,
    /// `sup |f_zbar - mu f_z|` over the grid.
    pub beltrami_residual: f64,
}

/// `f = z + P(s_1) + ... + P(s_order)`, `s_1 = mu`, `s_{k+1} = mu T(s_k)`.
pub fn normal_solution_neumann(mu: &PlaneField, order: usize) -> Result<NormalSolution> {
    let sup = mu.sup_norm();
    if sup > NEUMANN_MAX_SUP {
        return Err(Error::SeriesDivergenceRisk {
            sup,
            limit: NEUMANN_MAX_SUP,
        });
    }
    if order > NEUMANN_MAX_ORDER {
        return Err(Error::Domain(format!("Neumann order {order} exceeds {NEUMANN_MAX_ORDER}")));
    }
    mu.require_disk_support()?;
    let grid = mu.grid;
    let mut f = grid.sample(|z| z);
    let mut f_z = grid.sample(|_| Complex::new(1.0, 0.0));
    let mut f_zbar = grid.zeros();
    let mut term = mu.clone();
    for _ in 0..order {
        let pot = cauchy_p_unchecked(&term);
        let (v, dz, dzb) = (pot.values(), pot.dz(), pot.dzbar());
        for i in 0..grid.len() {
            f.values[i] += v.values[i];
            f_z.values[i] += dz.values[i];
            f_zbar.values[i] += dzb.values[i];
        }
        term = mu.zip_map(&dz, |m, t| m * t);
    }
    let beltrami_residual = (0..grid.len())
        .map(|i| (f_zbar.values[i] - mu.values[i] * f_z.values[i]).norm())
        .fold(0.0, f64::max);
    Ok(NormalSolution {
        f,
        f_z,
        f_zbar,
        order,
        beltrami_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(z: Complex) -> f64 {
        let s = z.norm_sqr() / 0.81;
        if s < 1.0 {
            (1.0 - s).powi(4)
        } else {
            0.0
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let g = PlaneGrid::new(8.0, 64).unwrap();
        let p = cauchy_p(&g.zeros()).unwrap();
        assert!(p.values().sup_norm() == 0.0);
        assert!(beurling_t(&g.zeros()).unwrap().sup_norm() == 0.0);
    }

    #[test]
    fn rejects_support_outside_disk() {
        let g = PlaneGrid::new(8.0, 64).unwrap();
        let h = g.sample(|_| Complex::new(1.0, 0.0));
        assert!(matches!(cauchy_p(&h), Err(Error::Domain(_))));
    }

    #[test]
    fn gaussian_parts_consistent() {
        let s = MASS_GAUSSIAN_WIDTH;
        let z = Complex::new(0.3, -0.2);
        let e = 1e-6;
        let (g, _, uz) = gaussian_parts(z, s);
        let u = |w: Complex| gaussian_parts(w, s).1;
        let ux = (u(z + e) - u(z - e)) / (2.0 * e);
        let uy = (u(z + Complex::new(0.0, e)) - u(z - Complex::new(0.0, e))) / (2.0 * e);
        let dzb = (ux + Complex::new(0.0, 1.0) * uy) * 0.5;
        let dz = (ux - Complex::new(0.0, 1.0) * uy) * 0.5;
        assert!((dzb - g).norm() < 1e-8);
        assert!((dz - uz).norm() < 1e-8);
        assert_eq!(gaussian_parts(Complex::new(0.0, 0.0), s).1, Complex::new(0.0, 0.0));
    }

    #[test]
    fn p_inverts_dzbar_with_mass() {
        let g = PlaneGrid::new(8.0, 128).unwrap();
        let h = g.sample_disk(|z| (Complex::new(1.0, 0.5) + z) * (-z.norm_sqr() / 0.04).exp());
        let pot = cauchy_p(&h).unwrap();
        let res = pot.dzbar().zip_map(&h, |a, b| a - b).sup_norm();
        assert!(res < 1e-10, "residual {res}");
        assert!(pot.values().at_origin().norm() < 1e-14);
    }

    #[test]
    fn neumann_identity_for_zero() {
        let g = PlaneGrid::new(8.0, 32).unwrap();
        let sol = normal_solution_neumann(&g.zeros(), 3).unwrap();
        for (z, f) in g.points().zip(&sol.f.values) {
            assert_eq!(*f, z);
        }
        assert_eq!(sol.beltrami_residual, 0.0);
    }

    #[test]
    fn neumann_rejects_large_mu() {
        let g = PlaneGrid::new(8.0, 32).unwrap();
        let mu = g.sample(|z| Complex::new(0.5 * bump(z), 0.0));
        assert!(matches!(normal_solution_neumann(&mu, 2), Err(Error::SeriesDivergenceRisk { .. })));
    }
}
