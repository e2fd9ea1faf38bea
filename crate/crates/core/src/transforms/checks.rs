//! Quadrature of the second-variation functional, energy change under
//! precomposition, and numerical checks of the main inequality for tuples of self-maps.

use serde::Serialize;

use crate::algebra::Complex;
use crate::error::{Error, Result};
use crate::spectral::HarmonicField;
use crate::transforms::plane::{beurling_t_multiplier, cauchy_p, NormalSolution, PlaneField};
use crate::transforms::quadrature::{DiskGrid, Quadrature};
use crate::weierstrass::{tangent_vectors, WeierstrassData};

/// Tolerance used by every `holds` decision.
pub fn holds_tolerance(lhs: f64, rhs: f64) -> f64 {
    1e-7 * (1.0 + lhs.abs() + rhs.abs())
}

/// `Re sum w f_z f_zbar + sum w |f_zbar|^2` over supplied derivative samples.
pub fn f_quadrature(quad: &Quadrature, f_z: &[Complex], f_zbar: &[Complex]) -> f64 {
    quad.weights
        .iter()
        .zip(f_z.iter().zip(f_zbar))
        .map(|(w, (a, b))| w * ((a * b).re + b.norm_sqr()))
        .sum()
}

/// `F(f)` of a harmonic field by quadrature on `grid`, derivatives taken term by term.
pub fn f_quadrature_field(grid: &DiskGrid, f: &HarmonicField) -> f64 {
    let q = grid.quadrature();
    let fz = q.sample(|z| f.dz(z));
    let fzb = q.sample(|z| f.dzbar(z));
    f_quadrature(q, &fz, &fzb)
}

fn check_qc(mu: &[Complex]) -> Result<()> {
    let sup = mu.iter().map(|m| m.norm()).fold(0.0, f64::max);
    if !(sup < 1.0) {
        return Err(Error::NotQuasiconformal { sup });
    }
    Ok(())
}

/// Energy change of a harmonic function with Hopf coefficient `phi` under
/// precomposition by the inverse of a map with Beltrami coefficient `mu`:
/// `-4 Re int phi mu/(1-|mu|^2) + 4 int |phi| |mu|^2/(1-|mu|^2)`.
pub fn reich_strebel_delta_phi(quad: &Quadrature, phi: &[Complex], mu: &[Complex]) -> Result<f64> {
    check_qc(mu)?;
    Ok(quad
        .weights
        .iter()
        .zip(phi.iter().zip(mu))
        .map(|(w, (p, m))| {
            let d = 1.0 - m.norm_sqr();
            w * (-4.0 * (p * m).re + 4.0 * p.norm() * m.norm_sqr()) / d
        })
        .sum())
}

/// [`reich_strebel_delta_phi`] for coordinate `i`, with `phi_i = p_i^2`.
pub fn reich_strebel_delta(w: &WeierstrassData, i: usize, quad: &Quadrature, mu: &[Complex]) -> Result<f64> {
    let p = &w.polys()[i];
    let phi = quad.sample(|z| {
        let v = p.eval(z);
        v * v
    });
    reich_strebel_delta_phi(quad, &phi, mu)
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs + holds_tolerance(lhs, rhs),
        }
    }
}

/// `Re sum int phi_i mu_i/(1-|mu_i|^2) <= sum int |phi_i| |mu_i|^2/(1-|mu_i|^2)`.
pub fn nmi_finite_check(w: &WeierstrassData, quad: &Quadrature, mus: &[Vec<Complex>]) -> Result<InequalityReport> {
    if mus.len() != w.n() {
        return Err(Error::Domain(format!("expected {} Beltrami fields, got {}", w.n(), mus.len())));
    }
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for (p, mu) in w.polys().iter().zip(mus) {
        check_qc(mu)?;
        for ((z, wt), m) in quad.nodes().zip(mu) {
            let v = p.eval(z);
            let phi = v * v;
            let d = 1.0 - m.norm_sqr();
            lhs += wt * (phi * m).re / d;
            rhs += wt * phi.norm() * m.norm_sqr() / d;
        }
    }
    Ok(InequalityReport::new(lhs, rhs))
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct InfinitesimalReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Largest `|P(mu_i) - P(mu_j)|` sampled outside the unit disk.
    pub equivalence_residual: f64,
}

fn hopf_on(w: &WeierstrassData, quad: &Quadrature) -> Vec<Vec<Complex>> {
    w.polys()
        .iter()
        .map(|p| {
            quad.sample(|z| {
                let v = p.eval(z);
                v * v
            })
        })
        .collect()
}

fn restrict(f: &PlaneField, idx: &[usize]) -> Vec<Complex> {
    idx.iter().map(|&i| f.values[i]).collect()
}

fn check_fields(w: &WeierstrassData, mudots: &[PlaneField]) -> Result<()> {
    if mudots.len() != w.n() {
        return Err(Error::Domain(format!("expected {} fields, got {}", w.n(), mudots.len())));
    }
    if mudots.windows(2).any(|p| p[0].grid != p[1].grid) {
        return Err(Error::Domain("fields live on different grids".into()));
    }
    Ok(())
}

/// Infinitesimal inequality
/// `-Re sum int phi_i mu_i T(mu_i) <= sum int |phi_i| |mu_i|^2`
/// for grid fields supported in the unit disk.
pub fn nmi_infinitesimal_check(w: &WeierstrassData, mudots: &[PlaneField]) -> Result<InfinitesimalReport> {
    check_fields(w, mudots)?;
    let grid = mudots[0].grid;
    let (quad, idx) = grid.disk_quadrature();
    let hopf = hopf_on(w, &quad);
    let (mut lhs, mut rhs) = (0.0, 0.0);
    let mut potentials = Vec::with_capacity(mudots.len());
    for (mu, phi) in mudots.iter().zip(&hopf) {
        let pot = cauchy_p(mu)?;
        let t = restrict(&pot.dz(), &idx);
        let m = restrict(mu, &idx);
        for (k, wt) in quad.weights.iter().enumerate() {
            lhs -= wt * (phi[k] * m[k] * t[k]).re;
            rhs += wt * phi[k].norm() * m[k].norm_sqr();
        }
        potentials.push(pot.values());
    }
    let mut eq = 0.0_f64;
    for a in 0..potentials.len() {
        for b in (a + 1)..potentials.len() {
            let d = potentials[a].zip_map(&potentials[b], |x, y| x - y);
            eq = eq.max(d.sup_outside_disk());
        }
    }
    let r = InequalityReport::new(lhs, rhs);
    Ok(InfinitesimalReport {
        lhs,
        rhs,
        holds: r.holds,
        equivalence_residual: eq,
    })
}

/// Residuals of the two integral identities that rewrite the second variation
/// through `alpha_i P(mu_i)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdentityResiduals {
    /// `Re sum int phi_i mu_i T(mu_i)` with `T` from the direct multiplier.
    pub beurling_side: f64,
    /// `Re sum int (alpha_i P_i)_z (alpha_i P_i)_zbar` with `P` from the inverse `d/dzbar`.
    pub cauchy_side: f64,
    pub residual1: f64,
    pub residual2: f64,
}

pub fn identity_p1_p2_check(w: &WeierstrassData, mudots: &[PlaneField]) -> Result<IdentityResiduals> {
    check_fields(w, mudots)?;
    let grid = mudots[0].grid;
    let (quad, idx) = grid.disk_quadrature();
    let (mut beurling_side, mut cauchy_side, mut l2_mu, mut l2_p) = (0.0, 0.0, 0.0, 0.0);
    for (p, mu) in w.polys().iter().zip(mudots) {
        let dp = p.derivative();
        let t = restrict(&beurling_t_multiplier(mu)?, &idx);
        let pot = cauchy_p(mu)?;
        let pv = restrict(&pot.values(), &idx);
        let pz = restrict(&pot.dz(), &idx);
        let pzb = restrict(&pot.dzbar(), &idx);
        let m = restrict(mu, &idx);
        for (k, (z, wt)) in quad.nodes().enumerate() {
            let a = p.eval(z);
            let phi = a * a;
            beurling_side += wt * (phi * m[k] * t[k]).re;
            l2_mu += wt * phi.norm() * m[k].norm_sqr();
            let dz = dp.eval(z) * pv[k] + a * pz[k];
            let dzb = a * pzb[k];
            cauchy_side += wt * (dz * dzb).re;
            l2_p += wt * dzb.norm_sqr();
        }
    }
    Ok(IdentityResiduals {
        beurling_side,
        cauchy_side,
        residual1: (beurling_side - cauchy_side).abs(),
        residual2: (l2_mu - l2_p).abs(),
    })
}

/// Second `t`-derivative at 0 of `sum_i E_i(t)` along the paths
/// `mu_i(t) = t mu_i - t^2 mu_i T(mu_i)`, which keep the normal solutions
/// equivalent to second order. Symmetric differences at `t` and `2t`
/// combined by Richardson extrapolation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SecondVariationCheck {
    pub finite_difference: f64,
    /// `8 (rhs - lhs)` from [`nmi_infinitesimal_check`].
    pub predicted: f64,
    pub relative_error: f64,
}

pub fn second_variation_fd(w: &WeierstrassData, mudots: &[PlaneField], t: f64) -> Result<SecondVariationCheck> {
    check_fields(w, mudots)?;
    let grid = mudots[0].grid;
    let (quad, idx) = grid.disk_quadrature();
    let report = nmi_infinitesimal_check(w, mudots)?;
    let mut firsts = Vec::new();
    let mut seconds = Vec::new();
    for mu in mudots {
        let t_mu = cauchy_p(mu)?.dz();
        let m = restrict(mu, &idx);
        let tm = restrict(&t_mu, &idx);
        seconds.push(m.iter().zip(&tm).map(|(a, b)| -a * b).collect::<Vec<_>>());
        firsts.push(m);
    }
    let energy = |s: f64| -> Result<f64> {
        let mut e = 0.0;
        for i in 0..w.n() {
            let path: Vec<Complex> = firsts[i]
                .iter()
                .zip(&seconds[i])
                .map(|(a, b)| a * s + b * (s * s))
                .collect();
            e += reich_strebel_delta(w, i, &quad, &path)?;
        }
        Ok(e)
    };
    let sym = |s: f64| -> Result<f64> { Ok((energy(s)? + energy(-s)?) / (s * s)) };
    let (d1, d2) = (sym(t)?, sym(2.0 * t)?);
    let finite_difference = (4.0 * d1 - d2) / 3.0;
    let predicted = 8.0 * (report.rhs - report.lhs);
    Ok(SecondVariationCheck {
        finite_difference,
        predicted,
        relative_error: (finite_difference - predicted).abs() / predicted.abs().max(1e-300),
    })
}

/// Energy of `h o f^{-1}` on `f(D)` and area of its image, both by quadrature
/// over the grid nodes inside the unit disk, for a normal solution `f`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrecomposedEnergy {
    pub energy: f64,
    pub area: f64,
    pub min_jacobian: f64,
}

pub fn precomposed_energy_area(w: &WeierstrassData, sol: &NormalSolution) -> Result<PrecomposedEnergy> {
    let (quad, idx) = sol.f.grid.disk_quadrature();
    let (mut energy, mut area, mut min_jac) = (0.0, 0.0, f64::INFINITY);
    for ((z, wt), &k) in quad.nodes().zip(&idx) {
        let (fz, fzb) = (sol.f_z.values[k], sol.f_zbar.values[k]);
        let fx = fz + fzb;
        let fy = (fz - fzb) * Complex::new(0.0, 1.0);
        // Df = [[a, b], [c, d]]
        let (a, b, c, d) = (fx.re, fy.re, fx.im, fy.im);
        let jac = a * d - b * c;
        min_jac = min_jac.min(jac);
        if !(jac > 0.0) {
            return Err(Error::Convergence(format!("precomposition is not orientation preserving at {z}")));
        }
        let (hx, hy) = tangent_vectors(w, z);
        // rows of Dh Df^{-1}: (hx*d - hy*c, -hx*b + hy*a) / jac
        let mut dens = 0.0;
        let (mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0);
        for (u, v) in hx.iter().zip(&hy) {
            let gx = (u * d - v * c) / jac;
            let gy = (-u * b + v * a) / jac;
            dens += gx * gx + gy * gy;
            xx += u * u;
            yy += v * v;
            xy += u * v;
        }
        energy += wt * 0.5 * dens * jac;
        area += wt * (xx * yy - xy * xy).max(0.0).sqrt();
    }
    Ok(PrecomposedEnergy {
        energy,
        area,
        min_jacobian: min_jac,
    })
}
