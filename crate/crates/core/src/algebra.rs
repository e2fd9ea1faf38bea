//! Complex polynomials and finite Laurent tails.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spectral::HarmonicField;

pub type Complex = num_complex::Complex64;

pub const I: Complex = Complex::new(0.0, 1.0);

fn trim(coeffs: &mut Vec<Complex>) {
    while matches!(coeffs.last(), Some(c) if *c == Complex::new(0.0, 0.0)) {
        coeffs.pop();
    }
}

/// `p(z) = sum_j a_j z^j`, stored lowest degree first with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Self {
        trim(&mut coeffs);
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    /// The single term `c z^k`.
    pub fn monomial(c: Complex, k: usize) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Coefficient `a_j`, zero outside `0..=deg`.
    pub fn coeff(&self, j: i64) -> Complex {
        if j < 0 {
            return Complex::new(0.0, 0.0);
        }
        self.coeffs.get(j as usize).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * s).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &a)| a * j as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at the origin.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex::new(0.0, 0.0));
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(j, &a)| a / (j as f64 + 1.0)),
        );
        Self::new(coeffs)
    }

    /// `q(z) = r p(r z)`, i.e. `q_j = r^{j+1} a_j`.
    pub fn reparam_scale(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("reparametrization radius must be positive, got {r}")));
        }
        let mut pow = r;
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| {
                let c = a * pow;
                pow *= r;
                c
            })
            .collect();
        Ok(Self::new(coeffs))
    }

    /// Upper bound for `|p'|` on the unit circle: `sum_j j |a_j|`.
    pub fn circle_derivative_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, a)| j as f64 * a.norm())
            .sum()
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Number of zeros in the open unit disk, by the winding number of
    /// `p(e^{i theta})`. Requires `p` to be zero-free on the circle.
    pub fn zeros_in_unit_disk(&self, samples: usize) -> usize {
        if self.is_zero() {
            return 0;
        }
        let n = samples.max(16 * (self.coeffs.len() + 1));
        let mut total = 0.0;
        let mut prev = self.eval(Complex::new(1.0, 0.0)).arg();
        for s in 1..=n {
            let theta = 2.0 * PI * s as f64 / n as f64;
            let cur = self.eval(Complex::from_polar(1.0, theta)).arg();
            let mut d = cur - prev;
            if d > PI {
                d -= 2.0 * PI;
            } else if d < -PI {
                d += 2.0 * PI;
            }
            total += d;
            prev = cur;
        }
        (total / (2.0 * PI)).round().max(0.0) as usize
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", a.re, a.im)?;
            match j {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{j}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new(
            (0..n as i64)
                .map(|j| self.coeff(j) + rhs.coeff(j))
                .collect(),
        )
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(Complex::new(-1.0, 0.0))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Polynomials travel as JSON arrays of `[re, im]` pairs, lowest degree first.
impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        if pairs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(serde::de::Error::custom("non-finite polynomial coefficient"));
        }
        Ok(Polynomial::new(
            pairs.into_iter().map(|[re, im]| Complex::new(re, im)).collect(),
        ))
    }
}

/// Result of sampling `|p|` on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleModulus {
    /// Smallest sampled modulus.
    pub sampled_min: f64,
    /// Angle at which the smallest sample occurs.
    pub argmin: f64,
    /// Guaranteed lower bound for the true minimum (may be negative).
    pub certified_lower_bound: f64,
    pub samples: usize,
}

/// Minimum of `|p(e^{i theta})|` over `samples` equally spaced angles plus a
/// Lipschitz-certified lower bound for the continuous minimum.
///
/// Fewer than `4 (deg + 1)` samples are silently raised to that floor.
pub fn min_modulus_on_circle(p: &Polynomial, samples: usize) -> CircleModulus {
    let floor = 4 * (p.degree().unwrap_or(0) + 1);
    let n = samples.max(floor);
    let (mut best, mut argmin) = (f64::INFINITY, 0.0);
    for s in 0..n {
        let theta = 2.0 * PI * s as f64 / n as f64;
        let m = p.eval(Complex::from_polar(1.0, theta)).norm();
        if m < best {
            best = m;
            argmin = theta;
        }
    }
    // every angle lies within half a step (in arc length) of a sample
    let slack = p.circle_derivative_bound() * PI / n as f64;
    CircleModulus {
        sampled_min: best,
        argmin,
        certified_lower_bound: best - slack,
        samples: n,
    }
}

/// Finite Laurent tail `phi(z) = sum_{m>=1} gamma_m z^{-m}`; `gammas[0]` is `gamma_1`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LaurentTail {
    gammas: Vec<Complex>,
}

impl LaurentTail {
    pub fn new(mut gammas: Vec<Complex>) -> Self {
        trim(&mut gammas);
        Self { gammas }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `gamma z^{-m}`, `m >= 1`.
    pub fn monomial(gamma: Complex, m: usize) -> Self {
        assert!(m >= 1, "Laurent tail exponents start at 1");
        let mut gammas = vec![Complex::new(0.0, 0.0); m];
        gammas[m - 1] = gamma;
        Self::new(gammas)
    }

    pub fn gammas(&self) -> &[Complex] {
        &self.gammas
    }

    /// `gamma_m`, zero outside the stored range.
    pub fn gamma(&self, m: usize) -> Complex {
        if m == 0 {
            return Complex::new(0.0, 0.0);
        }
        self.gammas.get(m - 1).copied().unwrap_or_default()
    }

    /// Largest exponent `M` with `gamma_M != 0`; 0 for the zero tail.
    pub fn order(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_zero(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn eval(&self, z: Complex) -> Complex {
        let w = z.inv();
        self.gammas
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &g| (acc + g) * w)
    }

    pub fn derivative_at(&self, z: Complex) -> Complex {
        self.gammas
            .iter()
            .enumerate()
            .map(|(idx, &g)| -g * (idx as f64 + 1.0) * z.powi(-(idx as i32) - 2))
            .sum()
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.gammas.iter().map(|&g| g * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().max(other.order());
        Self::new((1..=n).map(|m| self.gamma(m) + other.gamma(m)).collect())
    }
}

/// Fourier coefficients of `theta -> p(e^{i theta}) phi(e^{i theta})`,
/// returned as the harmonic extension to the disk.
///
/// `c_k = sum_m gamma_m a_{k+m}` for `k` in `[-M, deg p - 1]`.
pub fn boundary_fourier(p: &Polynomial, phi: &LaurentTail) -> HarmonicField {
    let m_max = phi.order() as i64;
    let deg = p.degree().map(|d| d as i64).unwrap_or(0);
    if m_max == 0 || p.is_zero() {
        return HarmonicField::zero();
    }
    let lo = -m_max;
    let hi = deg - 1;
    let coeffs = (lo..=hi)
        .map(|k| {
            (1..=m_max)
                .map(|m| phi.gamma(m as usize) * p.coeff(k + m))
                .sum()
        })
        .collect();
    HarmonicField::new(lo, coeffs)
}
