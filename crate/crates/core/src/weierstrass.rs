//! Validated Weierstrass–Enneper data and the surfaces it describes.
//!
//! Coordinates are reconstructed as `h_i = 2 Re A_i` with `A_i' = p_i`,
//! `A_i(0) = 0`, so that `dh_i/dz = p_i` holds exactly.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::{min_modulus_on_circle, Complex, Polynomial, I};
use crate::error::{Error, Result};
use crate::transforms::DiskGrid;

/// Relative tolerance on the coefficients of `sum_i p_i^2`.
pub const MINIMALITY_TOL: f64 = 1e-12;
/// Certified boundary modulus below which a coordinate counts as vanishing on the circle.
pub const BOUNDARY_ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct WeierstrassData {
    polys: Vec<Polynomial>,
    primitives: Vec<Polynomial>,
    label: String,
}

impl WeierstrassData {
    /// Check minimality (`sum p_i^2 = 0`) and admissibility (each `p_i`
    /// zero-free on the unit circle).
    pub fn validate(polys: Vec<Polynomial>, label: impl Into<String>) -> Result<Self> {
        if polys.len() < 2 {
            return Err(Error::Domain(format!("need at least 2 coordinates, got {}", polys.len())));
        }
        if polys.iter().all(Polynomial::is_zero) {
            return Err(Error::Domain("all coordinates vanish identically".into()));
        }
        let scale = polys.iter().map(Polynomial::max_coeff_norm).fold(1.0, f64::max);
        let tol = MINIMALITY_TOL * scale * scale;
        let sum = polys.iter().fold(Polynomial::zero(), |acc, p| &acc + &(p * p));
        if let Some((j, a)) = sum
            .coeffs()
            .iter()
            .enumerate()
            .find(|(_, a)| a.norm() > tol)
        {
            return Err(Error::MinimalityViolation {
                coefficient: j,
                residual: a.norm(),
            });
        }
        for (i, p) in polys.iter().enumerate() {
            let samples = 2048.max(64 * (p.degree().unwrap_or(0) + 1));
            let m = min_modulus_on_circle(p, samples);
            if m.certified_lower_bound <= BOUNDARY_ZERO_TOL {
                return Err(Error::AdmissibilityViolation {
                    index: i,
                    bound: m.certified_lower_bound,
                });
            }
        }
        let primitives = polys.iter().map(Polynomial::antiderivative).collect();
        Ok(Self {
            polys,
            primitives,
            label: label.into(),
        })
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn n(&self) -> usize {
        self.polys.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `h(z)` in `R^n`.
    pub fn surface_eval(&self, z: Complex) -> Vec<f64> {
        self.primitives.iter().map(|a| 2.0 * a.eval(z).re).collect()
    }

    /// `dh_i/dz = p_i(z)`.
    pub fn dz(&self, z: Complex) -> Vec<Complex> {
        self.polys.iter().map(|p| p.eval(z)).collect()
    }

    /// Hopf differential coefficients `phi_i = p_i^2` at `z`.
    pub fn hopf(&self, z: Complex) -> Vec<Complex> {
        self.polys.iter().map(|p| {
            let v = p.eval(z);
            v * v
        }).collect()
    }

    /// Same surface on the disk of radius `r`, pulled back to the unit disk.
    pub fn restrict_to_radius(&self, r: f64) -> Result<Self> {
        let polys = self
            .polys
            .iter()
            .map(|p| p.reparam_scale(r))
            .collect::<Result<Vec<_>>>()?;
        Self::validate(polys, format!("{}|r={r}", self.label))
    }

    pub fn descriptor(&self) -> SurfaceDescriptor {
        SurfaceDescriptor {
            label: self.label.clone(),
            n: self.n(),
            polys: self.polys.clone(),
            r: 1.0,
        }
    }
}

/// JSON surface description `{label, n, polys, r}`; `r` rescales to the disk of that radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceDescriptor {
    pub label: String,
    pub n: usize,
    pub polys: Vec<Polynomial>,
    #[serde(default = "one")]
    pub r: f64,
}

fn one() -> f64 {
    1.0
}

impl SurfaceDescriptor {
    pub fn into_data(self) -> Result<WeierstrassData> {
        if self.n != self.polys.len() {
            return Err(Error::Domain(format!(
                "descriptor declares n = {} but lists {} polynomials",
                self.n,
                self.polys.len()
            )));
        }
        let polys = self
            .polys
            .iter()
            .map(|p| p.reparam_scale(self.r))
            .collect::<Result<Vec<_>>>()?;
        WeierstrassData::validate(polys, self.label)
    }
}

/// Enneper-type data `(1/2 (1 - z^{2k}), i/2 (1 + z^{2k}), z^k)` rescaled to radius `r`.
pub fn enneper_family(k: usize, r: f64) -> Result<WeierstrassData> {
    let polys = enneper_polys(k)?
        .iter()
        .map(|p| p.reparam_scale(r))
        .collect::<Result<Vec<_>>>()?;
    WeierstrassData::validate(polys, format!("enneper(k={k},r={r})"))
}

/// Unscaled Enneper-type polynomials (not validated; `k = 1` vanishes on the circle).
pub fn enneper_polys(k: usize) -> Result<[Polynomial; 3]> {
    if k == 0 {
        return Err(Error::Domain("Enneper family needs k >= 1".into()));
    }
    let half = Complex::new(0.5, 0.0);
    let z2k = Polynomial::monomial(Complex::new(1.0, 0.0), 2 * k);
    let one = Polynomial::constant(Complex::new(1.0, 0.0));
    Ok([
        (&one - &z2k).scale(half),
        (&one + &z2k).scale(half * I),
        Polynomial::monomial(Complex::new(1.0, 0.0), k),
    ])
}

/// Conformal pair `(p, i p)` with `p(z) = 1 + z^k / 2`, rescaled to radius `r`.
pub fn conformal_pair(k: usize, r: f64) -> Result<WeierstrassData> {
    let base = &Polynomial::constant(Complex::new(1.0, 0.0))
        + &Polynomial::monomial(Complex::new(0.5, 0.0), k);
    let p = base.reparam_scale(r)?;
    let q = p.scale(I);
    WeierstrassData::validate(vec![p, q], format!("pair(k={k},r={r})"))
}

/// Closed-form and quadrature values of energy and area over the disk of radius `r`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergyArea {
    pub energy: f64,
    pub area: f64,
    pub quadrature_energy: f64,
    pub quadrature_area: f64,
}

/// `int_{D_r} |p|^2 dA = pi sum_j |a_j|^2 r^{2j+2} / (j+1)`.
pub fn disk_l2_norm_sq(p: &Polynomial, r: f64) -> f64 {
    PI * p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, a)| a.norm_sqr() * r.powi(2 * j as i32 + 2) / (j as f64 + 1.0))
        .sum::<f64>()
}

pub fn energy_and_area(w: &WeierstrassData, r: f64) -> Result<EnergyArea> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("radius must lie in (0, 1], got {r}")));
    }
    let energy = 2.0 * w.polys().iter().map(|p| disk_l2_norm_sq(p, r)).sum::<f64>();
    let deg = w.polys().iter().filter_map(Polynomial::degree).max().unwrap_or(0);
    let grid = DiskGrid::new(deg + 4, 4 * deg + 8).scaled(r);
    let (mut qe, mut qa) = (0.0, 0.0);
    for (z, wt) in grid.nodes() {
        let (hx, hy) = tangent_vectors(w, z);
        let xx: f64 = hx.iter().map(|v| v * v).sum();
        let yy: f64 = hy.iter().map(|v| v * v).sum();
        let xy: f64 = hx.iter().zip(&hy).map(|(a, b)| a * b).sum();
        qe += wt * 0.5 * (xx + yy);
        qa += wt * (xx * yy - xy * xy).max(0.0).sqrt();
    }
    Ok(EnergyArea {
        energy,
        area: energy,
        quadrature_energy: qe,
        quadrature_area: qa,
    })
}

/// `(h_x, h_y)` at `z`: `h_x = 2 Re p`, `h_y = -2 Im p`.
pub fn tangent_vectors(w: &WeierstrassData, z: Complex) -> (Vec<f64>, Vec<f64>) {
    let d = w.dz(z);
    (
        d.iter().map(|p| 2.0 * p.re).collect(),
        d.iter().map(|p| -2.0 * p.im).collect(),
    )
}

/// Polar-grid sample of the surface: the origin followed by `nr` rings of
/// `ntheta` points at radii `j / nr`.
#[derive(Clone, Debug, Serialize)]
pub struct SurfaceSample {
    pub nr: usize,
    pub ntheta: usize,
    pub params: Vec<[f64; 2]>,
    pub points: Vec<Vec<f64>>,
    /// `dh_i/dz` per sample, as `[re, im]`.
    pub jacobian: Vec<Vec<[f64; 2]>>,
    pub triangles: Vec<[usize; 3]>,
    pub warnings: Vec<String>,
}

pub fn mesh_export(w: &WeierstrassData, nr: usize, ntheta: usize) -> Result<SurfaceSample> {
    if nr == 0 || ntheta < 3 {
        return Err(Error::Domain(format!("mesh needs nr >= 1 and ntheta >= 3, got {nr} x {ntheta}")));
    }
    let mut params = vec![Complex::new(0.0, 0.0)];
    for j in 1..=nr {
        let rho = j as f64 / nr as f64;
        for t in 0..ntheta {
            params.push(Complex::from_polar(rho, 2.0 * PI * t as f64 / ntheta as f64));
        }
    }
    let ring = |j: usize, t: usize| 1 + (j - 1) * ntheta + (t % ntheta);
    let mut triangles = Vec::with_capacity(ntheta * (2 * nr - 1));
    for t in 0..ntheta {
        triangles.push([0, ring(1, t), ring(1, t + 1)]);
    }
    for j in 1..nr {
        for t in 0..ntheta {
            let (a, b) = (ring(j, t), ring(j, t + 1));
            let (c, d) = (ring(j + 1, t), ring(j + 1, t + 1));
            triangles.push([a, c, d]);
            triangles.push([a, d, b]);
        }
    }
    let mut warnings = Vec::new();
    if w.n() != 3 {
        warnings.push(format!(
            "surface lives in R^{}; OBJ output uses the first three coordinates (zero-padded)",
            w.n()
        ));
    }
    Ok(SurfaceSample {
        nr,
        ntheta,
        points: params.iter().map(|&z| w.surface_eval(z)).collect(),
        jacobian: params
            .iter()
            .map(|&z| w.dz(z).iter().map(|c| [c.re, c.im]).collect())
            .collect(),
        params: params.iter().map(|z| [z.re, z.im]).collect(),
        triangles,
        warnings,
    })
}

impl SurfaceSample {
    /// ASCII OBJ with vertices in sample order (1-based faces).
    pub fn to_obj(&self, label: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {label}");
        let _ = writeln!(out, "# {} vertices, {} faces", self.points.len(), self.triangles.len());
        for p in &self.points {
            let c = |i: usize| p.get(i).copied().unwrap_or(0.0);
            let _ = writeln!(out, "v {:.12e} {:.12e} {:.12e}", c(0), c(1), c(2));
        }
        for t in &self.triangles {
            let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn raw_enneper_is_not_admissible() {
        let polys = enneper_polys(1).unwrap().to_vec();
        assert!(matches!(
            WeierstrassData::validate(polys, "e"),
            Err(Error::AdmissibilityViolation { index: 0, .. })
        ));
        assert!(matches!(enneper_family(1, 1.0), Err(Error::AdmissibilityViolation { .. })));
    }

    #[test]
    fn rescaled_enneper_is_valid() {
        let w = enneper_family(1, 1.2).unwrap();
        assert_relative_eq!(w.polys()[2].coeff(1).re, 1.44, max_relative = 1e-15);
        let w = enneper_family(2, 1.1).unwrap();
        let s = w.polys().iter().fold(Polynomial::zero(), |acc, p| &acc + &(p * p));
        assert!(s.coeffs().iter().all(|c| c.norm() < 1e-12));
    }

    #[test]
    fn pair_is_valid_and_minimality_is_checked() {
        let p = Polynomial::from_real(&[2.0, 0.3, -0.1]);
        assert!(WeierstrassData::validate(vec![p.clone(), p.scale(I)], "pair").is_ok());
        assert!(matches!(
            WeierstrassData::validate(vec![p.clone(), p.clone()], "bad"),
            Err(Error::MinimalityViolation { .. })
        ));
        assert!(WeierstrassData::validate(vec![p], "short").is_err());
    }

    #[test]
    fn surface_values() {
        let w = enneper_family(1, 1.2).unwrap();
        assert!(w.surface_eval(Complex::new(0.0, 0.0)).iter().all(|&x| x == 0.0));
        for t in [0.1, 0.5, -0.9] {
            let h = w.surface_eval(Complex::new(t, 0.0));
            assert_relative_eq!(h[2], 1.44 * t * t, max_relative = 1e-14);
        }
    }

    #[test]
    fn coordinates_are_harmonic() {
        let w = enneper_family(2, 1.05).unwrap();
        let z0 = Complex::new(0.2, -0.3);
        let mut prev = f64::INFINITY;
        for h in [1e-2, 5e-3, 2.5e-3] {
            let lap = |i: usize| {
                let f = |dz: Complex| w.surface_eval(z0 + dz)[i];
                (f(Complex::new(h, 0.0)) + f(Complex::new(-h, 0.0)) + f(Complex::new(0.0, h))
                    + f(Complex::new(0.0, -h))
                    - 4.0 * f(Complex::new(0.0, 0.0)))
                    / (h * h)
            };
            let res = (0..3).map(lap).fold(0.0_f64, |a, b| a.max(b.abs()));
            // five-point stencil error is O(h^2)
            assert!(res < 2.0 * h * h, "laplacian residual {res} at h = {h}");
            assert!(res <= prev);
            prev = res;
        }
    }

    #[test]
    fn constant_energy() {
        let p = Polynomial::constant(Complex::new(0.0, 2.0));
        assert_relative_eq!(disk_l2_norm_sq(&p, 1.0), 4.0 * PI, max_relative = 1e-15);
    }

    #[test]
    fn energy_closed_form_matches_quadrature() {
        let raw = WeierstrassData {
            polys: enneper_polys(1).unwrap().to_vec(),
            primitives: enneper_polys(1).unwrap().iter().map(Polynomial::antiderivative).collect(),
            label: "raw".into(),
        };
        let e = energy_and_area(&raw, 1.0).unwrap();
        assert_relative_eq!(e.energy, e.quadrature_energy, max_relative = 1e-8);
        assert_relative_eq!(e.energy, e.quadrature_area, max_relative = 1e-8);
        assert!(energy_and_area(&raw, 0.0).is_err());
    }

    #[test]
    fn mesh_counts() {
        let w = enneper_family(1, 1.2).unwrap();
        let m = mesh_export(&w, 2, 4).unwrap();
        assert_eq!(m.points.len(), 9);
        assert_eq!(m.triangles.len(), 12);
        assert!(m.points[0].iter().all(|&x| x == 0.0));
        assert!(m.points.iter().flatten().all(|x| x.is_finite()));
        let obj = m.to_obj("t");
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 9);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 12);
        let m = mesh_export(&conformal_pair(1, 1.0).unwrap(), 2, 4).unwrap();
        assert_eq!(m.warnings.len(), 1);
    }

    #[test]
    fn descriptor_roundtrip() {
        let d = SurfaceDescriptor {
            label: "e".into(),
            n: 3,
            polys: enneper_polys(1).unwrap().to_vec(),
            r: 1.2,
        };
        let s = serde_json::to_string(&d).unwrap();
        let back: SurfaceDescriptor = serde_json::from_str(&s).unwrap();
        let w = back.into_data().unwrap();
        assert_relative_eq!(w.polys()[2].coeff(1).re, 1.44, max_relative = 1e-15);
    }
}
