//! Command-line flags, the JSON run configuration they override, and the
//! resolved surface source.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use minvar::weierstrass::{enneper_polys, SurfaceDescriptor};
use minvar::{Complex, Polynomial, WeierstrassData};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "minvar", version, about = "Stability of polynomial minimal surfaces via self-map variations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Validate,
    Destab,
    Index,
    Nmi,
    Schwarz,
    Mesh,
    Energy,
    Report,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check minimality and admissibility of the Weierstrass data.
    Validate(Flags),
    /// Single-mode destabilization search over a range of m.
    Destab(Flags),
    /// Index of the truncated quadratic form.
    Index(Flags),
    /// Finite or infinitesimal main-inequality checks for tuples of self-maps.
    Nmi(Flags),
    /// Spherical-cap eigenvalue criterion.
    Schwarz(Flags),
    /// Export a triangulated OBJ mesh.
    Mesh(Flags),
    /// Energy and area, with and without quasiconformal precomposition.
    Energy(Flags),
    /// Every analysis in one JSON document.
    Report(Flags),
}

impl Command {
    pub fn split(self) -> (CommandName, Flags) {
        match self {
            Command::Validate(f) => (CommandName::Validate, f),
            Command::Destab(f) => (CommandName::Destab, f),
            Command::Index(f) => (CommandName::Index, f),
            Command::Nmi(f) => (CommandName::Nmi, f),
            Command::Schwarz(f) => (CommandName::Schwarz, f),
            Command::Mesh(f) => (CommandName::Mesh, f),
            Command::Energy(f) => (CommandName::Energy, f),
            Command::Report(f) => (CommandName::Report, f),
        }
    }
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Catalog {
    /// `(1/2 (1 - z^2k), i/2 (1 + z^2k), z^k)`.
    Enneper,
    /// `(p, i p)` with `p = 1 + z^k / 2`.
    Pair,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum NmiMode {
    Finite,
    Infinitesimal,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    /// Seeded random fields (equal for finite checks, mutually equivalent otherwise).
    Random,
    /// Cutoff construction from the variation `gamma z^-m`.
    Destabilizing,
    Zero,
}

/// Every option of every subcommand. Fields left unset fall back to the
/// `--config` file and then to the defaults in [`RunConfig::resolve`].
#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields, default)]
pub struct Flags {
    /// JSON file with any of these options.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub catalog: Option<Catalog>,
    /// Surface descriptor JSON `{label, n, polys, r}`.
    #[arg(long)]
    pub surface: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub m_min: Option<usize>,
    #[arg(long)]
    pub m_max: Option<usize>,
    /// Variation coefficient as `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub gamma: Option<[f64; 2]>,
    /// Truncation order M of the Gram basis.
    #[arg(long = "max-m")]
    pub max_m: Option<usize>,
    /// Relative tolerance (index, verdicts).
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<NmiMode>,
    #[arg(long, value_enum)]
    pub construction: Option<Construction>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub grid_side: Option<f64>,
    /// Binary field files, one per coordinate.
    #[arg(long = "field")]
    pub fields: Option<Vec<PathBuf>>,
    #[arg(long)]
    pub nr: Option<usize>,
    #[arg(long)]
    pub ntheta: Option<usize>,
    /// Neumann series order.
    #[arg(long)]
    pub order: Option<usize>,
    /// Bound on `sup |mu|` for random Beltrami coefficients.
    #[arg(long)]
    pub mu_sup: Option<f64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected re or re,im, got {s:?}")),
    }
}

impl Flags {
    /// Flags set on the command line win over `other`.
    fn overlay(self, other: Flags) -> Flags {
        macro_rules! pick {
            ($($f:ident),*) => { Flags { config: self.config, $($f: self.$f.or(other.$f)),* } };
        }
        pick!(catalog, surface, k, r, m_min, m_max, gamma, max_m, tolerance, mode, construction, trials, seed, grid_n, grid_side, fields, nr, ntheta, order, mu_sup, output)
    }
}

/// Surface given by raw (unscaled) polynomials and a radius.
#[derive(Clone, Debug)]
pub struct SurfaceSource {
    pub label: String,
    pub raw: Vec<Polynomial>,
    pub r: f64,
}

impl SurfaceSource {
    /// Data rescaled to the unit disk and validated.
    pub fn data(&self) -> minvar::Result<WeierstrassData> {
        let polys = self
            .raw
            .iter()
            .map(|p| p.reparam_scale(self.r))
            .collect::<minvar::Result<Vec<_>>>()?;
        WeierstrassData::validate(polys, self.label.clone())
    }
}

/// Fully resolved configuration.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub surface: Option<SurfaceSource>,
    pub surface_label: Option<String>,
    pub m_min: usize,
    pub m_max: usize,
    pub gamma: [f64; 2],
    pub max_m: usize,
    pub tolerance: f64,
    pub mode: NmiMode,
    pub construction: Construction,
    pub trials: usize,
    pub seed: u64,
    pub grid_n: usize,
    pub grid_side: f64,
    #[serde(skip)]
    pub fields: Vec<PathBuf>,
    pub nr: usize,
    pub ntheta: usize,
    pub order: usize,
    pub mu_sup: f64,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn gamma(&self) -> Complex {
        Complex::new(self.gamma[0], self.gamma[1])
    }

    pub fn from_flags(flags: Flags) -> anyhow::Result<Self> {
        let flags = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                let file: Flags = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
                flags.overlay(file)
            }
            None => flags,
        };
        Self::resolve(flags)
    }

    fn resolve(f: Flags) -> anyhow::Result<Self> {
        let surface = match (f.catalog, &f.surface) {
            (Some(_), Some(_)) => bail!("give either --catalog or --surface, not both"),
            (Some(cat), None) => {
                let k = f.k.unwrap_or(1);
                let r = f.r.unwrap_or(1.0);
                let raw = match cat {
                    Catalog::Enneper => enneper_polys(k)?.to_vec(),
                    Catalog::Pair => {
                        let p = &Polynomial::constant(Complex::new(1.0, 0.0)) + &Polynomial::monomial(Complex::new(0.5, 0.0), k);
                        vec![p.clone(), p.scale(minvar::algebra::I)]
                    }
                };
                let name = match cat {
                    Catalog::Enneper => "enneper",
                    Catalog::Pair => "pair",
                };
                Some(SurfaceSource {
                    label: format!("{name}(k={k},r={r})"),
                    raw,
                    r,
                })
            }
            (None, Some(path)) => Some(read_descriptor(path, f.r)?),
            (None, None) => None,
        };
        let cfg = RunConfig {
            surface_label: surface.as_ref().map(|s| s.label.clone()),
            surface,
            m_min: f.m_min.unwrap_or(1),
            m_max: f.m_max.unwrap_or(4),
            gamma: f.gamma.unwrap_or([1.0, 0.0]),
            max_m: f.max_m.unwrap_or(6),
            tolerance: f.tolerance.unwrap_or(1e-9),
            mode: f.mode.unwrap_or(NmiMode::Infinitesimal),
            construction: f.construction.unwrap_or(Construction::Random),
            trials: f.trials.unwrap_or(100),
            seed: f.seed.unwrap_or(0),
            grid_n: f.grid_n.unwrap_or(128),
            grid_side: f.grid_side.unwrap_or(8.0),
            fields: f.fields.unwrap_or_default(),
            nr: f.nr.unwrap_or(64),
            ntheta: f.ntheta.unwrap_or(128),
            order: f.order.unwrap_or(6),
            mu_sup: f.mu_sup.unwrap_or(0.2),
            output: f.output,
        };
        if !(cfg.tolerance > 0.0) {
            bail!("tolerance must be positive");
        }
        if !(cfg.mu_sup > 0.0 && cfg.mu_sup < 1.0) {
            bail!("--mu-sup must lie in (0, 1)");
        }
        if !(cfg.gamma[0].is_finite() && cfg.gamma[1].is_finite()) || cfg.gamma == [0.0, 0.0] {
            bail!("--gamma must be finite and nonzero");
        }
        Ok(cfg)
    }

    pub fn surface(&self) -> anyhow::Result<&SurfaceSource> {
        self.surface
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("no surface given: use --catalog or --surface"))
    }
}

fn read_descriptor(path: &Path, r_override: Option<f64>) -> anyhow::Result<SurfaceSource> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading surface {}", path.display()))?;
    let d: SurfaceDescriptor = serde_json::from_str(&text).with_context(|| format!("parsing surface {}", path.display()))?;
    if d.n != d.polys.len() {
        bail!("descriptor declares n = {} but lists {} polynomials", d.n, d.polys.len());
    }
    Ok(SurfaceSource {
        label: d.label,
        raw: d.polys,
        r: r_override.unwrap_or(d.r),
    })
}
