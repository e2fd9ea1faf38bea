//! Gauss–Legendre rules and the polar quadrature grid on the unit disk.

use std::f64::consts::PI;

use crate::algebra::Complex;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// `P_n` from the Chebyshev initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        dp = if d != 0.0 { d } else { dp };
        x[i] = -t;
        x[n - 1 - i] = t;
        let wt = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| (a + half * (xi + 1.0), wi * half))
        .collect()
}

/// Plain list of nodes and area weights.
#[derive(Clone, Debug, Default)]
pub struct Quadrature {
    pub points: Vec<Complex>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (Complex, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(Complex) -> f64) -> f64 {
        self.nodes().map(|(z, w)| w * f(z)).sum()
    }

    pub fn integrate_complex(&self, f: impl Fn(Complex) -> Complex) -> Complex {
        self.nodes().map(|(z, w)| f(z) * w).sum()
    }

    pub fn sample(&self, f: impl Fn(Complex) -> Complex) -> Vec<Complex> {
        self.points.iter().map(|&z| f(z)).collect()
    }

    pub fn extend(&mut self, other: Quadrature) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }
}

/// Polar grid: Gauss–Legendre in the radius (with the `rho` Jacobian folded
/// into the weights) times the uniform rule in angle.
///
/// Integrates `z^a zbar^b` exactly when `a + b + 1 <= 2 n_r - 1` and
/// `a - b` is not a nonzero multiple of `n_theta`.
#[derive(Clone, Debug)]
pub struct DiskGrid {
    n_r: usize,
    n_theta: usize,
    radius: f64,
    center: Complex,
    quad: Quadrature,
}

impl DiskGrid {
    pub fn new(n_r: usize, n_theta: usize) -> Self {
        Self::annulus(n_r, n_theta, 0.0, 1.0)
    }

    /// Rule for `{r0 <= |z| <= r1}`.
    pub fn annulus(n_r: usize, n_theta: usize, r0: f64, r1: f64) -> Self {
        assert!(n_r >= 1 && n_theta >= 1 && r1 > r0 && r0 >= 0.0);
        let mut quad = Quadrature::default();
        let dtheta = 2.0 * PI / n_theta as f64;
        for (rho, wr) in gauss_legendre_interval(n_r, r0, r1) {
            for k in 0..n_theta {
                quad.points.push(Complex::from_polar(rho, k as f64 * dtheta));
                quad.weights.push(wr * rho * dtheta);
            }
        }
        Self {
            n_r,
            n_theta,
            radius: r1,
            center: Complex::new(0.0, 0.0),
            quad,
        }
    }

    /// The same rule on the disk of radius `r`.
    pub fn scaled(mut self, r: f64) -> Self {
        for p in &mut self.quad.points {
            *p *= r;
        }
        for w in &mut self.quad.weights {
            *w *= r * r;
        }
        self.radius *= r;
        self
    }

    pub fn translated(mut self, c: Complex) -> Self {
        for p in &mut self.quad.points {
            *p += c;
        }
        self.center += c;
        self
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> Complex {
        self.center
    }

    pub fn len(&self) -> usize {
        self.quad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quad.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (Complex, f64)> + '_ {
        self.quad.nodes()
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    pub fn integrate(&self, f: impl Fn(Complex) -> f64) -> f64 {
        self.quad.integrate(f)
    }

    pub fn integrate_complex(&self, f: impl Fn(Complex) -> Complex) -> Complex {
        self.quad.integrate_complex(f)
    }

    pub fn sample(&self, f: impl Fn(Complex) -> Complex) -> Vec<Complex> {
        self.quad.sample(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        for deg in 0..=13 {
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "deg {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn disk_area_is_pi() {
        for (nr, nt) in [(1, 1), (8, 16), (64, 256)] {
            let g = DiskGrid::new(nr, nt);
            assert_relative_eq!(g.integrate(|_| 1.0), PI, max_relative = 1e-12);
        }
    }

    #[test]
    fn monomial_exactness() {
        let g = DiskGrid::new(6, 16);
        for a in 0..6i32 {
            for b in 0..6i32 {
                if a + b + 1 > 11 {
                    continue;
                }
                let q = g.integrate_complex(|z| z.powi(a) * z.conj().powi(b));
                let exact = if a == b { PI / (a as f64 + 1.0) } else { 0.0 };
                assert!((q - Complex::new(exact, 0.0)).norm() < 1e-12, "{a},{b}");
            }
        }
    }

    #[test]
    fn aliasing_rule() {
        // a - b = n_theta aliases onto the constant mode
        let g = DiskGrid::new(8, 4);
        let q = g.integrate_complex(|z| z.powi(4));
        assert!(q.norm() > 0.1);
    }
}
