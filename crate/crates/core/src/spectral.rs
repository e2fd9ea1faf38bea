//! Closed-form second-variation functionals on harmonic extensions.
//!
//! For a harmonic field `f = sum_{k>=0} c_k z^k + sum_{k<0} c_k zbar^{-k}`
//! the functional `F(f) = Re int f_z f_zbar + int |f_zbar|^2` over the unit
//! disk reduces, by orthogonality of `z^a zbar^b` on circles, to
//! `pi sum_{k>=1} k [Re(c_k c_{-k}) + |c_{-k}|^2]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::algebra::{boundary_fourier, Complex, LaurentTail, Polynomial, I};
use crate::weierstrass::WeierstrassData;

/// Harmonic function on the disk stored by its boundary Fourier coefficients
/// `c_k`, `k in [lo, lo + len)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct HarmonicField {
    lo: i64,
    coeffs: Vec<Complex>,
}

impl HarmonicField {
    pub fn new(lo: i64, coeffs: Vec<Complex>) -> Self {
        Self { lo, coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: i64) -> Complex {
        let idx = k - self.lo;
        if idx < 0 {
            return Complex::new(0.0, 0.0);
        }
        self.coeffs.get(idx as usize).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    fn terms(&self) -> impl Iterator<Item = (i64, Complex)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.lo + i as i64, c))
    }

    pub fn eval(&self, z: Complex) -> Complex {
        let zb = z.conj();
        self.terms()
            .map(|(k, c)| {
                if k >= 0 {
                    c * z.powi(k as i32)
                } else {
                    c * zb.powi((-k) as i32)
                }
            })
            .sum()
    }

    /// `df/dz`, from the holomorphic part only.
    pub fn dz(&self, z: Complex) -> Complex {
        self.terms()
            .filter(|&(k, _)| k >= 1)
            .map(|(k, c)| c * k as f64 * z.powi(k as i32 - 1))
            .sum()
    }

    /// `df/dzbar`, from the antiholomorphic part only.
    pub fn dzbar(&self, z: Complex) -> Complex {
        let zb = z.conj();
        self.terms()
            .filter(|&(k, _)| k <= -1)
            .map(|(k, c)| c * (-k) as f64 * zb.powi((-k) as i32 - 1))
            .sum()
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.lo, self.coeffs.iter().map(|&c| c * s).collect())
    }
}

/// `F(f)` in closed form.
pub fn f_spectral(f: &HarmonicField) -> f64 {
    let top = f.hi().max(-f.lo());
    PI * (1..=top)
        .map(|k| {
            let cp = f.coeff(k);
            let cm = f.coeff(-k);
            k as f64 * ((cp * cm).re + cm.norm_sqr())
        })
        .sum::<f64>()
}

/// The destabilization coefficient exactly as displayed in the source
/// literature, with weight `1/(m-j)`.
///
/// For `m = 1` this equals [`c_canonical`]; for `m >= 2` the two differ and
/// only the canonical value is `F` of the harmonic extension.
pub fn c_printed(p: &Polynomial, gamma: Complex, m: usize) -> f64 {
    let m = m as i64;
    PI * (0..m)
        .map(|j| {
            let aj = p.coeff(j);
            let num = (gamma * gamma * aj * p.coeff(2 * m - j)).re + gamma.norm_sqr() * aj.norm_sqr();
            num / (m - j) as f64
        })
        .sum::<f64>()
}

/// `F` of the harmonic extension of `p * gamma z^{-m}` on the circle.
pub fn c_canonical(p: &Polynomial, gamma: Complex, m: usize) -> f64 {
    assert!(m >= 1, "c_canonical requires m >= 1");
    f_spectral(&boundary_fourier(p, &LaurentTail::monomial(gamma, m)))
}

/// `sum_i F(v_i)` where `v_i` extends `p_i phi` harmonically. A negative value
/// certifies that `phi` destabilizes the surface.
pub fn f_alpha(w: &WeierstrassData, phi: &LaurentTail) -> f64 {
    w.polys().iter().map(|p| f_spectral(&boundary_fourier(p, phi))).sum()
}

/// Outcome of minimizing `F_alpha(gamma z^{-m})` over unit `gamma`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SingleModeSearch {
    pub m: usize,
    /// Smaller eigenvalue of the 2x2 real form in `(Re gamma, Im gamma)`.
    pub min_eig: f64,
    pub max_eig: f64,
    /// Unit minimizer.
    pub gamma_star: [f64; 2],
}

impl SingleModeSearch {
    pub fn gamma(&self) -> Complex {
        Complex::new(self.gamma_star[0], self.gamma_star[1])
    }

    pub fn destabilizing(&self, tol: f64) -> bool {
        self.min_eig < -tol
    }
}

pub fn destab_search_single_m(w: &WeierstrassData, m: usize) -> SingleModeSearch {
    assert!(m >= 1, "search requires m >= 1");
    let l = |g: Complex| f_alpha(w, &LaurentTail::monomial(g, m));
    let a = l(Complex::new(1.0, 0.0));
    let c = l(I);
    let d = l(Complex::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2));
    // F(x+iy) = a x^2 + 2 b x y + c y^2, and F((1+i)/sqrt2) = (a + 2b + c)/2
    let b = d - 0.5 * (a + c);
    let half_trace = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (lo, hi) = (half_trace - disc, half_trace + disc);
    // eigenvector for `lo`
    // of the two candidate eigenvectors keep the better conditioned one
    let (u, v) = ((b, lo - a), (lo - c, b));
    let (x, y) = if u.0.hypot(u.1) >= v.0.hypot(v.1) { u } else { v };
    let (x, y) = if x.hypot(y) > 0.0 {
        (x, y)
    } else if a <= c {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let n = (x * x + y * y).sqrt();
    SingleModeSearch {
        m,
        min_eig: lo,
        max_eig: hi,
        gamma_star: [x / n, y / n],
    }
}

/// Gram matrix, spectrum and index of the self-maps quadratic form on a
/// truncated basis of Laurent monomials.
#[derive(Clone, Debug, Serialize)]
pub struct QuadraticFormReport {
    pub basis: Vec<String>,
    /// Row-major.
    pub gram: Vec<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub index: usize,
    /// Absolute threshold: eigenvalues below `-tolerance` count as negative.
    pub tolerance: f64,
}

impl QuadraticFormReport {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.dim() + j]
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max)
    }
}

/// The basis element with index `b`: `z^{-m}` for even `b`, `i z^{-m}` for odd,
/// `m = b/2 + 1`.
pub fn gram_basis_element(b: usize) -> LaurentTail {
    let m = b / 2 + 1;
    let g = if b % 2 == 0 { Complex::new(1.0, 0.0) } else { I };
    LaurentTail::monomial(g, m)
}

/// Assemble the `2M x 2M` Gram matrix of `L_h` by polarization and count the
/// eigenvalues below `-rel_tolerance * spectral_radius`.
pub fn gram_index(w: &WeierstrassData, max_m: usize, rel_tolerance: f64) -> QuadraticFormReport {
    assert!((1..=64).contains(&max_m), "basis size M must lie in 1..=64");
    let dim = 2 * max_m;
    let elems: Vec<LaurentTail> = (0..dim).map(gram_basis_element).collect();
    let diag: Vec<f64> = elems.iter().map(|e| f_alpha(w, e)).collect();
    let mut gram = DMatrix::<f64>::zeros(dim, dim);
    for a in 0..dim {
        gram[(a, a)] = diag[a];
        for b in (a + 1)..dim {
            let both = f_alpha(w, &elems[a].add(&elems[b]));
            let v = 0.5 * (both - diag[a] - diag[b]);
            gram[(a, b)] = v;
            gram[(b, a)] = v;
        }
    }
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(gram.clone()).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|x, y| x.total_cmp(y));
    let radius = eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let tolerance = if radius > 0.0 { rel_tolerance * radius } else { rel_tolerance };
    let index = eigenvalues.iter().filter(|&&e| e < -tolerance).count();
    let basis = (0..dim)
        .map(|b| {
            let m = b / 2 + 1;
            if b % 2 == 0 {
                format!("z^-{m}")
            } else {
                format!("i*z^-{m}")
            }
        })
        .collect();
    let gram = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .map(|(i, j)| gram[(i, j)])
        .collect();
    QuadraticFormReport {
        basis,
        gram,
        eigenvalues,
        index,
        tolerance,
    }
}
