//! One function per subcommand, each returning a serializable report.

use std::fs;
use std::io::BufReader;

use anyhow::{bail, Context};
use minvar::schwarz::{schwarz_verdict_polys, SchwarzVerdict};
use minvar::spectral::{c_canonical, c_printed, destab_search_single_m, gram_index};
use minvar::transforms::checks::{nmi_finite_check, nmi_infinitesimal_check, precomposed_energy_area};
use minvar::transforms::io::read_field;
use minvar::transforms::{
    destabilizing_check, normal_solution_neumann, CutoffOptions, CutoffReport, EquivalentFields,
};
use minvar::weierstrass::{energy_and_area, mesh_export, EnergyArea, SurfaceDescriptor};
use minvar::{Complex, DiskGrid, LaurentTail, PlaneField, PlaneGrid, QuadraticFormReport, WeierstrassData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{CommandName, Construction, NmiMode, RunConfig};

pub const SCHEMA: u32 = 1;

/// Tolerance of the Schwarz verdict band around 2.
const SCHWARZ_TOLERANCE: f64 = 1e-6;

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema: u32,
    pub command: CommandName,
    pub config: RunConfig,
    #[serde(flatten)]
    pub body: T,
}

#[derive(Serialize, Debug, Clone)]
pub struct ValidateReport {
    pub valid: bool,
    pub label: String,
    pub n: usize,
    pub max_degree: usize,
    pub surface: SurfaceDescriptor,
}

pub fn validate(cfg: &RunConfig) -> anyhow::Result<ValidateReport> {
    let w = cfg.surface()?.data()?;
    Ok(ValidateReport {
        valid: true,
        label: w.label().to_string(),
        n: w.n(),
        max_degree: w.polys().iter().filter_map(|p| p.degree()).max().unwrap_or(0),
        surface: w.descriptor(),
    })
}

#[derive(Serialize, Debug, Clone)]
pub struct ModeResult {
    pub m: usize,
    pub min_eig: f64,
    pub max_eig: f64,
    pub gamma_star: [f64; 2],
    pub destabilizing: bool,
    /// `sum_i C(p_i, gamma, m)` at the configured `gamma`, from the harmonic extension.
    pub c_canonical_sum: f64,
    /// The same sum with the displayed weights `1/(m-j)`.
    pub c_printed_sum: f64,
}

#[derive(Serialize, Debug, Clone)]
pub struct DestabReport {
    pub gamma: [f64; 2],
    pub modes: Vec<ModeResult>,
    pub first_destabilizing: Option<usize>,
    pub unstable: bool,
}

fn destab_on(w: &WeierstrassData, cfg: &RunConfig) -> anyhow::Result<DestabReport> {
    if cfg.m_min == 0 || cfg.m_min > cfg.m_max {
        bail!("need 1 <= m-min <= m-max, got {}..{}", cfg.m_min, cfg.m_max);
    }
    let gamma = cfg.gamma();
    let modes: Vec<ModeResult> = (cfg.m_min..=cfg.m_max)
        .map(|m| {
            let s = destab_search_single_m(w, m);
            let scale = s.min_eig.abs().max(s.max_eig.abs()).max(1.0);
            ModeResult {
                m,
                min_eig: s.min_eig,
                max_eig: s.max_eig,
                gamma_star: s.gamma_star,
                destabilizing: s.destabilizing(cfg.tolerance * scale),
                c_canonical_sum: w.polys().iter().map(|p| c_canonical(p, gamma, m)).sum(),
                c_printed_sum: w.polys().iter().map(|p| c_printed(p, gamma, m)).sum(),
            }
        })
        .collect();
    let first = modes.iter().find(|r| r.destabilizing).map(|r| r.m);
    Ok(DestabReport {
        gamma: cfg.gamma,
        first_destabilizing: first,
        unstable: first.is_some(),
        modes,
    })
}

pub fn destab(cfg: &RunConfig) -> anyhow::Result<DestabReport> {
    destab_on(&cfg.surface()?.data()?, cfg)
}

#[derive(Serialize, Debug, Clone)]
pub struct IndexReport {
    pub max_m: usize,
    pub summary: String,
    #[serde(flatten)]
    pub form: QuadraticFormReport,
}

fn index_on(w: &WeierstrassData, cfg: &RunConfig) -> anyhow::Result<IndexReport> {
    if !(1..=64).contains(&cfg.max_m) {
        bail!("--max-m must lie in 1..=64");
    }
    let form = gram_index(w, cfg.max_m, cfg.tolerance);
    let summary = format!(
        "{}: index {} on {} basis elements (smallest eigenvalue {:.6e}, tolerance {:.3e})",
        w.label(),
        form.index,
        form.dim(),
        form.eigenvalues.first().copied().unwrap_or(0.0),
        form.tolerance
    );
    Ok(IndexReport {
        max_m: cfg.max_m,
        summary,
        form,
    })
}

pub fn index(cfg: &RunConfig) -> anyhow::Result<IndexReport> {
    index_on(&cfg.surface()?.data()?, cfg)
}

#[derive(Serialize, Debug, Clone, Copy)]
pub struct TrialRecord {
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub equivalence_residual: Option<f64>,
}

#[derive(Serialize, Debug, Clone)]
pub struct NmiReport {
    pub mode: NmiMode,
    pub construction: Construction,
    pub trials: usize,
    pub all_hold: bool,
    pub failures: usize,
    /// Largest `(lhs - rhs) / (1 + |lhs| + |rhs|)` over the trials.
    pub worst_margin: f64,
    pub max_equivalence_residual: Option<f64>,
    pub records: Vec<TrialRecord>,
    pub variation: Option<VariationSpec>,
    pub destabilizing: Option<CutoffReport>,
}

#[derive(Serialize, Debug, Clone, Copy)]
pub struct VariationSpec {
    pub m: usize,
    pub gamma: [f64; 2],
}

fn uniform_c(rng: &mut ChaCha8Rng) -> Complex {
    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random Beltrami coefficient `sum a_jk z^j zbar^k` (`j + k <= 2`) on the
/// disk nodes, scaled so that `sup |mu| = bound * u` with `u ~ U(0.1, 1)`.
pub fn random_disk_mu(rng: &mut ChaCha8Rng, nodes: &[Complex], bound: f64) -> Vec<Complex> {
    let terms: Vec<(i32, i32, Complex)> = (0..=2)
        .flat_map(|j| (0..=(2 - j)).map(move |k| (j, k)))
        .map(|(j, k)| (j, k, uniform_c(rng)))
        .collect();
    let mu: Vec<Complex> = nodes
        .iter()
        .map(|z| terms.iter().map(|&(j, k, a)| a * z.powi(j) * z.conj().powi(k)).sum())
        .collect();
    let sup = mu.iter().map(|m| m.norm()).fold(0.0, f64::max).max(1e-300);
    let target = bound * rng.gen_range(0.1..1.0);
    mu.into_iter().map(|m| m * (target / sup)).collect()
}

pub fn random_equivalent_fields(rng: &mut ChaCha8Rng, n: usize) -> EquivalentFields {
    let mut draw = |len: usize| (0..len).map(|_| uniform_c(rng)).collect::<Vec<_>>();
    EquivalentFields {
        base_holo: draw(3),
        base_anti: draw(3),
        shifts: (0..n).map(|_| draw(2)).collect(),
    }
}

fn summarize(mode: NmiMode, construction: Construction, records: Vec<TrialRecord>) -> NmiReport {
    let failures = records.iter().filter(|r| !r.holds).count();
    let worst_margin = records
        .iter()
        .map(|r| (r.lhs - r.rhs) / (1.0 + r.lhs.abs() + r.rhs.abs()))
        .fold(f64::NEG_INFINITY, f64::max);
    let max_eq = records
        .iter()
        .filter_map(|r| r.equivalence_residual)
        .reduce(f64::max);
    NmiReport {
        mode,
        construction,
        trials: records.len(),
        all_hold: failures == 0,
        failures,
        worst_margin,
        max_equivalence_residual: max_eq,
        records,
        variation: None,
        destabilizing: None,
    }
}

/// `gamma z^-m` from the first destabilizing mode, or the configured one.
fn pick_variation(w: &WeierstrassData, cfg: &RunConfig) -> anyhow::Result<VariationSpec> {
    let d = destab_on(w, cfg)?;
    Ok(match d.modes.iter().find(|m| m.destabilizing) {
        Some(m) => VariationSpec {
            m: m.m,
            gamma: m.gamma_star,
        },
        None => VariationSpec {
            m: cfg.m_min,
            gamma: cfg.gamma,
        },
    })
}

fn nmi_on(w: &WeierstrassData, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> anyhow::Result<NmiReport> {
    let construction = if cfg.fields.is_empty() {
        cfg.construction
    } else {
        Construction::Random
    };
    match (cfg.mode, construction) {
        (NmiMode::Finite, Construction::Destabilizing) => {
            bail!("the destabilizing construction is infinitesimal; use --mode infinitesimal")
        }
        (NmiMode::Finite, c) => {
            if !cfg.fields.is_empty() {
                bail!("field files are only read in infinitesimal mode");
            }
            let grid = DiskGrid::new(24, 64);
            let q = grid.quadrature();
            let trials = if c == Construction::Zero { 1 } else { cfg.trials };
            let mut records = Vec::with_capacity(trials);
            for t in 0..trials {
                let mu = match c {
                    Construction::Zero => vec![Complex::new(0.0, 0.0); q.len()],
                    _ => random_disk_mu(rng, &q.points, 0.95),
                };
                let r = nmi_finite_check(w, q, &vec![mu; w.n()])?;
                records.push(TrialRecord {
                    trial: t,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    holds: r.holds,
                    equivalence_residual: None,
                });
            }
            Ok(summarize(cfg.mode, c, records))
        }
        (NmiMode::Infinitesimal, Construction::Destabilizing) => {
            let v = pick_variation(w, cfg)?;
            let phi = LaurentTail::monomial(Complex::new(v.gamma[0], v.gamma[1]), v.m);
            let r = destabilizing_check(w, &phi, CutoffOptions::default())?;
            let mut rep = summarize(
                cfg.mode,
                construction,
                vec![TrialRecord {
                    trial: 0,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    holds: r.holds,
                    equivalence_residual: Some(r.equivalence_residual),
                }],
            );
            rep.variation = Some(v);
            rep.destabilizing = Some(r);
            Ok(rep)
        }
        (NmiMode::Infinitesimal, c) => {
            let grid = PlaneGrid::new(cfg.grid_side, cfg.grid_n)?;
            let mut records = Vec::new();
            if !cfg.fields.is_empty() {
                let fields = load_fields(&cfg.fields)?;
                let r = nmi_infinitesimal_check(w, &fields)?;
                records.push(record(0, r));
            } else if c == Construction::Zero {
                let r = nmi_infinitesimal_check(w, &vec![grid.zeros(); w.n()])?;
                records.push(record(0, r));
            } else {
                for t in 0..cfg.trials {
                    let spec = random_equivalent_fields(rng, w.n());
                    let r = nmi_infinitesimal_check(w, &spec.sample(grid)?)?;
                    records.push(record(t, r));
                }
            }
            Ok(summarize(cfg.mode, c, records))
        }
    }
}

fn record(t: usize, r: minvar::transforms::InfinitesimalReport) -> TrialRecord {
    TrialRecord {
        trial: t,
        lhs: r.lhs,
        rhs: r.rhs,
        holds: r.holds,
        equivalence_residual: Some(r.equivalence_residual),
    }
}

fn load_fields(paths: &[std::path::PathBuf]) -> anyhow::Result<Vec<PlaneField>> {
    paths
        .iter()
        .map(|p| {
            let f = fs::File::open(p).with_context(|| format!("opening field {}", p.display()))?;
            read_field(BufReader::new(f)).with_context(|| format!("reading field {}", p.display()))
        })
        .collect()
}

pub fn nmi(cfg: &RunConfig) -> anyhow::Result<NmiReport> {
    let w = cfg.surface()?.data()?;
    nmi_on(&w, cfg, &mut ChaCha8Rng::seed_from_u64(cfg.seed))
}

pub fn schwarz(cfg: &RunConfig) -> anyhow::Result<SchwarzVerdict> {
    let s = cfg.surface()?;
    Ok(schwarz_verdict_polys(&s.raw, s.r, SCHWARZ_TOLERANCE)?)
}

#[derive(Serialize, Debug, Clone)]
pub struct MeshReport {
    pub output: String,
    pub vertices: usize,
    pub triangles: usize,
    pub warnings: Vec<String>,
}

/// Returns the summary and the OBJ text.
pub fn mesh(cfg: &RunConfig) -> anyhow::Result<(MeshReport, String)> {
    let w = cfg.surface()?.data()?;
    let Some(out) = &cfg.output else {
        bail!("mesh needs an output path (-o)");
    };
    let sample = mesh_export(&w, cfg.nr, cfg.ntheta)?;
    let obj = sample.to_obj(w.label());
    Ok((
        MeshReport {
            output: out.display().to_string(),
            vertices: sample.points.len(),
            triangles: sample.triangles.len(),
            warnings: sample.warnings,
        },
        obj,
    ))
}

#[derive(Serialize, Debug, Clone)]
pub struct PrecompositionSummary {
    pub trials: usize,
    pub mu_sup: f64,
    pub order: usize,
    /// Smallest `(energy - area) / area`.
    pub min_relative_excess: f64,
    pub max_beltrami_residual: f64,
    pub all_hold: bool,
}

#[derive(Serialize, Debug, Clone)]
pub struct EnergyReport {
    #[serde(flatten)]
    pub closed_form: EnergyArea,
    pub precomposition: PrecompositionSummary,
}

/// Random Beltrami coefficient supported in the disk: a bump times a random
/// quadratic polynomial in `z, zbar`, with `sup |mu| <= bound`.
pub fn random_plane_mu(rng: &mut ChaCha8Rng, grid: PlaneGrid, bound: f64) -> PlaneField {
    let spec = EquivalentFields {
        base_holo: (0..3).map(|_| uniform_c(rng)).collect(),
        base_anti: (0..3).map(|_| uniform_c(rng)).collect(),
        shifts: vec![vec![]],
    };
    let mu = spec.sample(grid).expect("one coordinate").remove(0);
    let target = bound * rng.gen_range(0.5..1.0);
    let sup = mu.sup_norm().max(1e-300);
    mu.map(|v| v * (target / sup))
}

fn energy_on(w: &WeierstrassData, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> anyhow::Result<EnergyReport> {
    let closed_form = energy_and_area(w, 1.0)?;
    let grid = PlaneGrid::new(cfg.grid_side, cfg.grid_n)?;
    let (mut min_excess, mut max_res) = (f64::INFINITY, 0.0_f64);
    let mut all_hold = true;
    for _ in 0..cfg.trials {
        let mu = random_plane_mu(rng, grid, cfg.mu_sup);
        let sol = normal_solution_neumann(&mu, cfg.order)?;
        let e = precomposed_energy_area(w, &sol)?;
        let excess = (e.energy - e.area) / e.area;
        min_excess = min_excess.min(excess);
        max_res = max_res.max(sol.beltrami_residual);
        all_hold &= excess >= -1e-6;
    }
    Ok(EnergyReport {
        closed_form,
        precomposition: PrecompositionSummary {
            trials: cfg.trials,
            mu_sup: cfg.mu_sup,
            order: cfg.order,
            min_relative_excess: min_excess,
            max_beltrami_residual: max_res,
            all_hold,
        },
    })
}

pub fn energy(cfg: &RunConfig) -> anyhow::Result<EnergyReport> {
    let w = cfg.surface()?.data()?;
    energy_on(&w, cfg, &mut ChaCha8Rng::seed_from_u64(cfg.seed))
}

#[derive(Serialize, Debug, Clone)]
pub struct Verdicts {
    pub destab_unstable: bool,
    pub index_unstable: bool,
    pub nmi_unstable: bool,
    /// `None` when the criterion does not apply or is inconclusive.
    pub schwarz_unstable: Option<bool>,
    pub consistent: bool,
}

#[derive(Serialize, Debug, Clone)]
pub struct FullReport {
    pub validate: ValidateReport,
    pub destab: DestabReport,
    pub index: IndexReport,
    pub nmi_infinitesimal: NmiReport,
    pub nmi_random: NmiReport,
    pub schwarz: Result<SchwarzVerdict, String>,
    pub energy: EnergyReport,
    pub verdicts: Verdicts,
}

pub fn report(cfg: &RunConfig) -> anyhow::Result<FullReport> {
    let s = cfg.surface()?;
    let w = s.data()?;
    let validate = validate(cfg)?;
    let destab = destab_on(&w, cfg)?;
    let index = index_on(&w, cfg)?;
    let mut inf_cfg = cfg.clone();
    inf_cfg.mode = NmiMode::Infinitesimal;
    inf_cfg.construction = Construction::Destabilizing;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let nmi_infinitesimal = nmi_on(&w, &inf_cfg, &mut rng)?;
    let mut rnd_cfg = cfg.clone();
    rnd_cfg.mode = NmiMode::Infinitesimal;
    rnd_cfg.construction = Construction::Random;
    rnd_cfg.trials = cfg.trials.min(20);
    rng.set_stream(1);
    let nmi_random = nmi_on(&w, &rnd_cfg, &mut rng)?;
    let schwarz = schwarz_verdict_polys(&s.raw, s.r, SCHWARZ_TOLERANCE).map_err(|e| e.to_string());
    let mut e_cfg = cfg.clone();
    e_cfg.trials = cfg.trials.min(10);
    rng.set_stream(2);
    let energy = energy_on(&w, &e_cfg, &mut rng)?;
    let schwarz_unstable = schwarz
        .as_ref()
        .ok()
        .filter(|v| !v.inconclusive && !(v.enclosure && !v.unstable))
        .map(|v| v.unstable);
    let destab_unstable = destab.unstable;
    let index_unstable = index.form.index > 0;
    let nmi_unstable = !nmi_infinitesimal.all_hold;
    let consistent = destab_unstable == index_unstable
        && nmi_unstable == destab_unstable
        && schwarz_unstable.map_or(true, |u| u == index_unstable);
    Ok(FullReport {
        validate,
        destab,
        index,
        nmi_infinitesimal,
        nmi_random,
        schwarz,
        energy,
        verdicts: Verdicts {
            destab_unstable,
            index_unstable,
            nmi_unstable,
            schwarz_unstable,
            consistent,
        },
    })
}
