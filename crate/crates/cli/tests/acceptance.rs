//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use minvar::algebra::Polynomial;
use minvar::schwarz::{lambda1_cap, schwarz_verdict, schwarz_verdict_polys, CapSpec};
use minvar::spectral::{c_canonical, f_spectral, gram_index};
use minvar::transforms::checks::{
    f_quadrature_field, identity_p1_p2_check, nmi_finite_check, nmi_infinitesimal_check, precomposed_energy_area,
    second_variation_fd,
};
use minvar::transforms::oracle::{beurling_pv, cauchy_p_oracle, OracleResolution};
use minvar::transforms::plane::{beurling_t_multiplier, cauchy_p, normal_solution_neumann};
use minvar::weierstrass::{conformal_pair, enneper_family, enneper_polys};
use minvar::{Complex, DiskGrid, HarmonicField, PlaneGrid, WeierstrassData};
use minvar_cli::commands::{self, random_disk_mu, random_equivalent_fields, random_plane_mu};
use minvar_cli::config::{Catalog, Flags, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(20_240_601);
    r.set_stream(stream);
    r
}

fn uc(rng: &mut ChaCha8Rng) -> Complex {
    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn catalog_cfg(cat: Catalog, r: f64, m: usize) -> RunConfig {
    RunConfig::from_flags(Flags {
        catalog: Some(cat),
        r: Some(r),
        m_min: Some(m),
        m_max: Some(m),
        gamma: Some([1.0, 0.0]),
        ..Flags::default()
    })
    .expect("catalog config")
}

/// Catalog pairs `(p, i p)` used for the n = 2 properties.
fn pairs() -> Vec<WeierstrassData> {
    let mut out = Vec::new();
    for k in 1..=3 {
        for r in [0.5, 1.0, 1.5] {
            out.push(conformal_pair(k, r).expect("pair"));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0_f64;
    for r in [1.1, 1.2, 1.5] {
        let rep = commands::destab(&catalog_cfg(Catalog::Enneper, r, 1)).map_err(|e| e.to_string())?;
        let got = rep.modes[0].c_canonical_sum;
        let want = PI * r * r / 2.0 * (1.0 - r * r);
        let rel = ((got - want) / want).abs();
        worst = worst.max(rel);
        ensure(rel < 1e-10, || format!("r={r}: {got} vs {want}"))?;
        ensure(rep.unstable && rep.first_destabilizing == Some(1), || format!("r={r} not flagged"))?;
    }
    for r in [0.5, 0.8, 0.95] {
        let rep = commands::destab(&catalog_cfg(Catalog::Enneper, r, 1)).map_err(|e| e.to_string())?;
        ensure(!rep.unstable, || format!("r={r} flagged"))?;
    }
    Ok(format!("max relative error {worst:.1e}; flagged exactly for r > 1"))
}

fn criterion_2() -> Outcome {
    let mut g = rng(2);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let (a, b, c) = (uc(&mut g), uc(&mut g), uc(&mut g));
        let p = Polynomial::new(vec![c, b, a]);
        let got = c_canonical(&p, Complex::new(1.0, 0.0), 1);
        let want = PI * (c.norm_sqr() + (a * c).re);
        let err = (got - want).abs();
        worst = worst.max(err);
        ensure(err < 1e-10, || format!("{p}: {got} vs {want}"))?;
    }
    Ok(format!("100 quadratics, max abs error {worst:.1e}"))
}

fn random_harmonic(g: &mut ChaCha8Rng) -> HarmonicField {
    let k = g.gen_range(1..=12_i64);
    HarmonicField::new(-k, (0..=2 * k).map(|_| uc(g)).collect())
}

fn criterion_3() -> Outcome {
    let mut g = rng(3);
    let mut worst = 0.0_f64;
    for t in 0..100 {
        let f = random_harmonic(&mut g);
        let exact = f_spectral(&f);
        // scale: pi sum |k| |c_k|^2
        let scale: f64 = PI * (f.lo()..=f.hi()).map(|k| k.unsigned_abs() as f64 * f.coeff(k).norm_sqr()).sum::<f64>();
        let floor = 1e-13 * scale;
        let mut prev = f64::INFINITY;
        for n_r in [4, 8, 16, 32, 64] {
            let err = (f_quadrature_field(&DiskGrid::new(n_r, 4 * n_r), &f) - exact).abs();
            ensure(err <= (0.5 * prev).max(floor), || {
                format!("trial {t}: error {err:e} at N_r={n_r} did not decrease from {prev:e}")
            })?;
            prev = err;
        }
        let rel = prev / scale;
        worst = worst.max(rel);
        ensure(rel <= 1e-6, || format!("trial {t}: relative error {rel:e}"))?;
    }
    Ok(format!("100 fields, relative error {worst:.1e} at N_r=64, N_theta=256"))
}

/// `exp(-|z - c|^2 / s^2)` times a random polynomial in `z, zbar`, sampled in the disk.
fn band_limited(g: &mut ChaCha8Rng) -> impl Fn(Complex) -> Complex {
    let s = g.gen_range(0.15..0.22);
    let c = Complex::from_polar(g.gen_range(0.0..0.3), g.gen_range(0.0..2.0 * PI));
    let coeffs: Vec<(i32, i32, Complex)> = (0..=2).flat_map(|j| (0..=(2 - j)).map(move |k| (j, k))).map(|(j, k)| (j, k, uc(g))).collect();
    move |z: Complex| {
        if z.norm_sqr() >= 1.0 {
            return Complex::new(0.0, 0.0);
        }
        let w = z - c;
        let poly: Complex = coeffs.iter().map(|&(j, k, a)| a * w.powi(j) * w.conj().powi(k)).sum();
        poly * (-w.norm_sqr() / (s * s)).exp()
    }
}

fn criterion_4() -> Outcome {
    let mut g = rng(4);
    let grid = PlaneGrid::new(8.0, 256).map_err(|e| e.to_string())?;
    let (mut r_bar, mut r_t, mut r_pv) = (0.0_f64, 0.0_f64, 0.0_f64);
    let res = OracleResolution::default();
    for t in 0..20 {
        let hf = band_limited(&mut g);
        let h = grid.sample(&hf);
        let sup = h.sup_norm();
        let pot = cauchy_p(&h).map_err(|e| e.to_string())?;
        let e1 = pot.dzbar().zip_map(&h, |a, b| a - b).sup_norm() / sup;
        let e2 = pot
            .dz()
            .zip_map(&beurling_t_multiplier(&h).map_err(|e| e.to_string())?, |a, b| a - b)
            .sup_norm()
            / sup;
        r_bar = r_bar.max(e1);
        r_t = r_t.max(e2);
        ensure(e1 < 1e-6 && e2 < 1e-6, || format!("field {t}: residuals {e1:e}, {e2:e}"))?;
        if t < 5 {
            // grid T against the kernel quadrature at grid nodes inside |z| < 0.6
            let th = pot.dz();
            let values = pot.values();
            let interior: Vec<usize> = (0..grid.len()).filter(|&i| grid.point(i).norm() < 0.6).collect();
            let mut probes = 0;
            for &idx in interior.iter().step_by(interior.len() / 20).take(20) {
                let z = grid.point(idx);
                probes += 1;
                let pv = beurling_pv(&hf, z, res);
                let rel = (th.values[idx] - pv).norm() / pv.norm().max(0.05 * sup);
                r_pv = r_pv.max(rel);
                ensure(rel < 1e-3, || format!("field {t}: T at {z} grid {} vs PV {pv}", th.values[idx]))?;
                let pk = cauchy_p_oracle(&hf, z, res);
                let relp = (values.values[idx] - pk).norm() / pk.norm().max(0.05 * sup);
                ensure(relp < 1e-3, || format!("field {t}: P at {z} grid {} vs kernel {pk}", values.values[idx]))?;
            }
            ensure(probes == 20, || format!("only {probes} probe points"))?;
        }
    }
    let mut mono = 0.0_f64;
    let mut pv_rng = rng(40);
    for n in 0..=4 {
        let h = move |z: Complex| if z.norm_sqr() < 1.0 { z.conj().powi(n) } else { Complex::new(0.0, 0.0) };
        for _ in 0..20 {
            let z = Complex::from_polar(pv_rng.gen_range(0.0..0.8), pv_rng.gen_range(0.0..2.0 * PI));
            let v = beurling_pv(h, z, res).norm();
            mono = mono.max(v);
            ensure(v < 1e-4, || format!("T(zbar^{n} chi) at {z} = {v:e}"))?;
        }
    }
    Ok(format!(
        "20 fields: dzbar residual {r_bar:.1e}, dz vs multiplier {r_t:.1e}, grid vs PV {r_pv:.1e}; |T(zbar^n chi)| <= {mono:.1e} at 100 probes"
    ))
}

fn criterion_5() -> Outcome {
    let w = enneper_family(1, 1.2).map_err(|e| e.to_string())?;
    let mut g = rng(5);
    let grids: Vec<PlaneGrid> = [128, 256, 512].iter().map(|&n| PlaneGrid::new(8.0, n).unwrap()).collect();
    let (mut worst, mut worst_ratio, mut worst_fd) = (0.0_f64, 0.0_f64, 0.0_f64);
    for t in 0..20 {
        let spec = random_equivalent_fields(&mut g, 3);
        let mut res = Vec::new();
        let mut rhs = 0.0;
        for &grid in &grids {
            let fields = spec.sample(grid).map_err(|e| e.to_string())?;
            let id = identity_p1_p2_check(&w, &fields).map_err(|e| e.to_string())?;
            if grid.n() == 256 {
                rhs = nmi_infinitesimal_check(&w, &fields).map_err(|e| e.to_string())?.rhs;
                let fd = second_variation_fd(&w, &fields, 0.02).map_err(|e| e.to_string())?;
                worst_fd = worst_fd.max(fd.relative_error);
                ensure(fd.relative_error < 0.02, || {
                    format!("trial {t}: d2/dt2 {} vs 8(rhs-lhs) {}", fd.finite_difference, fd.predicted)
                })?;
            }
            res.push([id.residual1, id.residual2]);
        }
        // FFT round-off floor of the grid sums
        let floor = 2e-9 * (1.0 + rhs);
        for k in 0..2 {
            let at256 = res[1][k];
            worst = worst.max(at256);
            ensure(at256 < 1e-3, || format!("trial {t}: residual{} {at256:e} at N=256", k + 1))?;
            for pair in res.windows(2) {
                let (a, b) = (pair[0][k], pair[1][k]);
                if a > floor {
                    worst_ratio = worst_ratio.max(b / a);
                }
                ensure(b <= (0.5 * a).max(floor), || {
                    format!("trial {t}: residual{} {a:e} -> {b:e} under doubling", k + 1)
                })?;
            }
        }
    }
    Ok(format!(
        "20 trials: residuals <= {worst:.1e} at N=256, worst refinement ratio {worst_ratio:.2} above the 2e-9 floor; finite difference within {:.1e}%",
        100.0 * worst_fd
    ))
}

fn criterion_6() -> Outcome {
    let tol = 1e-9;
    let up = gram_index(&enneper_family(1, 1.2).map_err(|e| e.to_string())?, 6, tol);
    ensure(up.index >= 1, || "Enneper r=1.2 has index 0".into())?;
    let down = gram_index(&enneper_family(1, 0.8).map_err(|e| e.to_string())?, 6, tol);
    ensure(down.index == 0, || format!("Enneper r=0.8 has index {}", down.index))?;
    let ps = pairs();
    for w in &ps {
        for m in 1..=16 {
            let rep = gram_index(w, m, tol);
            ensure(rep.index == 0, || format!("{} M={m}: index {}", w.label(), rep.index))?;
        }
    }
    Ok(format!(
        "index {} at r=1.2, {} at r=0.8, 0 for {} pairs with M <= 16",
        up.index,
        down.index,
        ps.len()
    ))
}

fn criterion_7() -> Outcome {
    let ps = pairs();
    let mut g = rng(7);
    let quad = DiskGrid::new(24, 64);
    let q = quad.quadrature();
    for t in 0..1000 {
        let w = &ps[t % ps.len()];
        let mu = random_disk_mu(&mut g, &q.points, 0.95);
        let r = nmi_finite_check(w, q, &[mu.clone(), mu]).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("finite trial {t} on {}: {r:?}", w.label()))?;
    }
    let grid = PlaneGrid::new(8.0, 128).unwrap();
    let mut max_eq = 0.0_f64;
    for t in 0..500 {
        let w = &ps[t % ps.len()];
        let spec = random_equivalent_fields(&mut g, 2);
        let r = nmi_infinitesimal_check(w, &spec.sample(grid).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        max_eq = max_eq.max(r.equivalence_residual);
        ensure(r.holds, || format!("infinitesimal trial {t} on {}: {r:?}", w.label()))?;
    }
    Ok(format!("1000 finite and 500 infinitesimal trials hold (equivalence residual <= {max_eq:.1e})"))
}

fn criterion_8() -> Outcome {
    let hemi = lambda1_cap(CapSpec::new(PI / 2.0).unwrap(), 1e-9).map_err(|e| e.to_string())?;
    ensure((hemi - 2.0).abs() <= 1e-6, || format!("hemisphere eigenvalue {hemi}"))?;
    let cap = lambda1_cap(CapSpec::from_plane_radius(1.2).unwrap(), 1e-9).map_err(|e| e.to_string())?;
    ensure(cap < 2.0, || format!("r=1.2 cap eigenvalue {cap}"))?;
    for r in [0.5, 0.8, 1.1, 1.2, 1.5] {
        let w = enneper_family(1, r).map_err(|e| e.to_string())?;
        let v = schwarz_verdict(&w, 1.0, 1e-6).map_err(|e| e.to_string())?;
        let idx = gram_index(&w, 6, 1e-9).index;
        ensure(v.unstable == (idx > 0) && !v.inconclusive, || format!("r={r}: schwarz {v:?}, index {idx}"))?;
    }
    let edge = schwarz_verdict_polys(&enneper_polys(1).unwrap(), 1.0, 1e-6).map_err(|e| e.to_string())?;
    ensure(edge.inconclusive, || format!("r=1 not inconclusive: {edge:?}"))?;
    Ok(format!("lambda1(hemisphere) = {hemi:.9}, lambda1(r=1.2) = {cap:.6}; verdicts agree with the index"))
}

fn criterion_9() -> Outcome {
    let surfaces = vec![
        enneper_family(1, 1.2).unwrap(),
        enneper_family(1, 0.8).unwrap(),
        enneper_family(2, 0.9).unwrap(),
        conformal_pair(1, 1.0).unwrap(),
        conformal_pair(2, 1.5).unwrap(),
    ];
    let grid = PlaneGrid::new(8.0, 128).unwrap();
    let mut g = rng(9);
    let mut min_excess = f64::INFINITY;
    for t in 0..50 {
        let w = &surfaces[t % surfaces.len()];
        let mu = random_plane_mu(&mut g, grid, 0.2);
        let sol = normal_solution_neumann(&mu, 6).map_err(|e| e.to_string())?;
        let e = precomposed_energy_area(w, &sol).map_err(|e| e.to_string())?;
        let excess = (e.energy - e.area) / e.area;
        min_excess = min_excess.min(excess);
        ensure(excess >= -1e-6, || format!("trial {t} on {}: energy {} < area {}", w.label(), e.energy, e.area))?;
    }
    Ok(format!("50 trials, smallest relative excess {min_excess:.2e}"))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_minvar");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("report{run}.json"));
        let st = Command::new(bin)
            .args(["report", "--catalog", "enneper", "--r", "1.2", "--seed", "17", "-o"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(st.success(), || format!("report exited with {st}"))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        let out = Command::new(bin)
            .args(["report", "--catalog", "enneper", "--r", "1.2", "--seed", "17"])
            .output()
            .map_err(|e| e.to_string())?;
        outputs.push(out.stdout);
    }
    ensure(outputs.windows(2).all(|p| p[0] == p[1]), || "reports differ".into())?;
    let json: serde_json::Value = serde_json::from_slice(&outputs[0]).map_err(|e| e.to_string())?;
    ensure(json["schema"] == 1 && json["verdicts"]["consistent"] == true, || "schema or verdicts wrong".into())?;
    Ok(format!("4 runs byte-identical ({} bytes)", outputs[0].len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("1 Enneper reproduction", criterion_1, Duration::from_secs(1)),
        ("2 quadratic closed form", criterion_2, Duration::from_secs(1)),
        ("3 spectral vs quadrature", criterion_3, Duration::from_secs(30)),
        ("4 operator identities", criterion_4, Duration::from_secs(60)),
        ("5 second-variation consistency", criterion_5, Duration::from_secs(120)),
        ("6 index estimates", criterion_6, Duration::from_secs(10)),
        ("7 n=2 positivity", criterion_7, Duration::from_secs(120)),
        ("8 Schwarz cross-oracle", criterion_8, Duration::from_secs(5)),
        ("9 energy >= area", criterion_9, Duration::from_secs(120)),
        ("10 determinism", criterion_10, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (name, f, budget) in criteria {
        let start = Instant::now();
        let outcome = f();
        let dt = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if dt > budget => Err(format!("{msg}; took {dt:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name} [{dt:.2?}]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} [{dt:.2?}]: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
