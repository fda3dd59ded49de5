//! Run configuration: TOML with one section per module, strict keys.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::FractionalOrder;
use crate::grid::{SpaceGrid, TimeGrid};
use crate::hjbsolver::CostClock;
use crate::mfg::{CouplingKind, FieldFormat, GammaMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    SolveFp,
    SolveHjb,
    SolveMfg,
    Validate,
    Compare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemSection {
    pub beta: f64,
    pub nu: f64,
    pub horizon: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub n_steps: usize,
}

impl Default for ProblemSection {
    fn default() -> Self {
        Self { beta: 0.7, nu: 0.05, horizon: 1.0, x_min: -2.0, x_max: 2.0, n_cells: 128, n_steps: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Gaussian,
    Uniform,
    Csv,
}

/// Initial density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub kind: InitialKind,
    pub center: f64,
    pub width: f64,
    pub path: Option<PathBuf>,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { kind: InitialKind::Gaussian, center: -0.5, width: 0.3, path: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub n_paths: usize,
    pub x0: f64,
    /// Constant drift `b` of the time-changed SDE.
    pub drift: f64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self { n_paths: 20_000, x0: -0.5, drift: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FpSection {
    /// Constant drift field.
    pub drift: f64,
    pub clip_negative: bool,
    pub ill_posed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalKind {
    /// `amplitude * cos(2 pi (x - x_min) / L)`, one period on the domain.
    Cosine,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HjbSection {
    pub u_max: f64,
    pub d2_bound: f64,
    pub clock: CostClock,
    pub terminal: TerminalKind,
    pub amplitude: f64,
    pub terminal_path: Option<PathBuf>,
    /// Constant source `G` for stand-alone HJB solves.
    pub source: f64,
}

impl Default for HjbSection {
    fn default() -> Self {
        Self {
            u_max: crate::hjbsolver::DEFAULT_U_MAX,
            d2_bound: 1e3,
            clock: CostClock::Internal,
            terminal: TerminalKind::Cosine,
            amplitude: -0.5,
            terminal_path: None,
            source: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MfgSection {
    pub coupling: CouplingKind,
    pub kappa: f64,
    pub epsilon: Option<f64>,
    pub gamma: GammaMap,
    pub potential_path: Option<PathBuf>,
    pub damping: f64,
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for MfgSection {
    fn default() -> Self {
        Self {
            coupling: CouplingKind::SmoothedLocal,
            kappa: 0.5,
            epsilon: None,
            gamma: GammaMap::Identity,
            potential_path: None,
            damping: 0.5,
            tolerance: 1e-6,
            max_iters: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: FieldFormat,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), format: FieldFormat::Csv }
    }
}

/// Everything a run needs besides the command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub threads: Option<usize>,
    pub problem: ProblemSection,
    pub initial: InitialSection,
    pub simulate: SimulateSection,
    pub fp: FpSection,
    pub hjb: HjbSection,
    pub mfg: MfgSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            threads: None,
            problem: ProblemSection::default(),
            initial: InitialSection::default(),
            simulate: SimulateSection::default(),
            fp: FpSection::default(),
            hjb: HjbSection::default(),
            mfg: MfgSection::default(),
            output: OutputSection::default(),
        }
    }
}

/// Known keys per section, for typo suggestions.
const SECTIONS: &[(&str, &[&str])] = &[
    ("problem", &["beta", "nu", "horizon", "x_min", "x_max", "n_cells", "n_steps"]),
    ("initial", &["kind", "center", "width", "path"]),
    ("simulate", &["n_paths", "x0", "drift"]),
    ("fp", &["drift", "clip_negative", "ill_posed"]),
    ("hjb", &["u_max", "d2_bound", "clock", "terminal", "amplitude", "terminal_path", "source"]),
    ("mfg", &["coupling", "kappa", "epsilon", "gamma", "potential_path", "damping", "tolerance", "max_iters"]),
    ("output", &["dir", "format"]),
];
const TOP_LEVEL: &[&str] = &["seed", "threads"];

fn nearest<'a>(key: &str, candidates: impl Iterator<Item = &'a str>) -> Option<&'a str> {
    candidates.map(|c| (strsim::damerau_levenshtein(key, c), c)).filter(|(d, _)| *d <= 3).min().map(|(_, c)| c)
}

fn unknown_key(path: &str, key: &str, known: &[&str]) -> Error {
    let hint = nearest(key, known.iter().copied()).map(|c| format!("; did you mean `{c}`?")).unwrap_or_default();
    Error::Config(format!("unknown key `{path}{key}`{hint}"))
}

/// Reject unknown keys with a nearest-key suggestion before typed parsing.
fn check_keys(doc: &toml::Table) -> Result<()> {
    let section_names: Vec<&str> = SECTIONS.iter().map(|s| s.0).collect();
    for (key, value) in doc {
        if TOP_LEVEL.contains(&key.as_str()) {
            continue;
        }
        let Some((_, keys)) = SECTIONS.iter().find(|s| s.0 == key) else {
            let all: Vec<&str> = TOP_LEVEL.iter().chain(&section_names).copied().collect();
            return Err(unknown_key("", key, &all));
        };
        let Some(table) = value.as_table() else {
            return Err(Error::Config(format!("`{key}` must be a section")));
        };
        for inner in table.keys() {
            if !keys.contains(&inner.as_str()) {
                return Err(unknown_key(&format!("{key}."), inner, keys));
            }
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        check_keys(&doc)?;
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Check every numeric parameter against the module preconditions.
    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        FractionalOrder::new(p.beta).map_err(|e| Error::Config(format!("problem.beta: {e}")))?;
        let cfg = |name: &str, e: Error| Error::Config(format!("{name}: {e}"));
        if !(p.nu.is_finite() && p.nu > 0.0) {
            return Err(Error::Config(format!("problem.nu: must be positive, got {}", p.nu)));
        }
        TimeGrid::new(p.horizon, p.n_steps).map_err(|e| cfg("problem", e))?;
        SpaceGrid::new(p.x_min, p.x_max, p.n_cells).map_err(|e| cfg("problem", e))?;
        if self.initial.kind == InitialKind::Gaussian && !(self.initial.width > 0.0) {
            return Err(Error::Config("initial.width: must be positive".into()));
        }
        if self.initial.kind == InitialKind::Csv && self.initial.path.is_none() {
            return Err(Error::Config("initial.path: required when kind = \"csv\"".into()));
        }
        if self.simulate.n_paths == 0 {
            return Err(Error::Config("simulate.n_paths: need at least one path".into()));
        }
        if !(self.simulate.x0.is_finite() && self.simulate.drift.is_finite() && self.fp.drift.is_finite()) {
            return Err(Error::Config("simulate/fp: non-finite value".into()));
        }
        let h = &self.hjb;
        if !(h.u_max.is_finite() && h.u_max > 0.0) {
            return Err(Error::Config(format!("hjb.u_max: must be positive, got {}", h.u_max)));
        }
        if !(h.d2_bound > 0.0) {
            return Err(Error::Config("hjb.d2_bound: must be positive".into()));
        }
        if h.terminal == TerminalKind::Csv && h.terminal_path.is_none() {
            return Err(Error::Config("hjb.terminal_path: required when terminal = \"csv\"".into()));
        }
        let m = &self.mfg;
        let coupling = crate::mfg::CouplingSpec { kind: m.coupling, kappa: m.kappa, epsilon: m.epsilon, gamma: m.gamma };
        coupling.validate().map_err(|e| cfg("mfg", e))?;
        if !(m.damping > 0.0 && m.damping <= 1.0) {
            return Err(Error::Config(format!("mfg.damping: must lie in (0,1], got {}", m.damping)));
        }
        if !(m.tolerance > 0.0) {
            return Err(Error::Config("mfg.tolerance: must be positive".into()));
        }
        if m.max_iters == 0 {
            return Err(Error::Config("mfg.max_iters: need at least one iteration".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads: must be at least 1".into()));
        }
        Ok(())
    }
}
