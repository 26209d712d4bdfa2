//! Run configuration: a flat-sectioned text format with strict keys.
//!
//! A config file holds `key = value` lines grouped under bracketed section
//! headers, with `#` starting a full-line comment:
//!
//! ```text
//! [run]
//! command = fit
//! seed = 7
//!
//! [solver]
//! iterations = 50
//! eta1 = auto
//! eta2 = auto
//! ```
//!
//! Unknown sections and keys are hard errors, as are duplicate keys and
//! out-of-range values. Keys whose value the runner can derive at run time
//! (penalties, step sizes, budgets, the ridge floor) accept the literal
//! `auto`. Command-line overrides are `section.key=value` strings applied
//! after the file, last one winning.
//!
//! [`render_config`] prints a config back in a fixed section and key order
//! with every value resolved, and parsing its output reproduces the same
//! [`RunConfig`]. Run directories receive this echo so a finished run can be
//! repeated from its own output.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiments::{
    ExperimentConfig, GlassoSettings, LassoSettings, ScenarioSize, SolverSettings,
};
use crate::model::SolverConfig;
use crate::synthetic::{GraphKind, GraphSpec, DEFAULT_HUB_VALUE, DEFAULT_PD_MARGIN};

/// The supported subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Generate,
    Init,
    Fit,
    ErrorCurve,
    Scaling,
    Compare,
    Ar1Fit,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Generate,
        Command::Init,
        Command::Fit,
        Command::ErrorCurve,
        Command::Scaling,
        Command::Compare,
        Command::Ar1Fit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Init => "init",
            Command::Fit => "fit",
            Command::ErrorCurve => "error-curve",
            Command::Scaling => "scaling",
            Command::Compare => "compare",
            Command::Ar1Fit => "ar1-fit",
        }
    }

    pub fn from_name(name: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Input and output file locations, each demanded only by the commands that
/// read it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathKeys {
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
    pub w0: Option<PathBuf>,
    pub omega0: Option<PathBuf>,
    pub w_star: Option<PathBuf>,
    pub omega_star: Option<PathBuf>,
    pub prices: Option<PathBuf>,
}

/// Raw `[solver]` section. Step sizes resolve per dataset when `auto`;
/// explicit budgets `s1`/`s2` are needed by the fit commands unless ground
/// truth is available to derive them from.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverKeys {
    pub iterations: usize,
    pub budget_mult: f64,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub rel_tol: f64,
    pub backtrack_max: usize,
    pub s1: Option<usize>,
    pub s2: Option<usize>,
    pub resample: bool,
}

/// Raw `[experiment]` section: the synthetic scenario and harness knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentKeys {
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub graph: GraphKind,
    pub hub_groups: usize,
    pub hub_value: f64,
    pub pd_margin: f64,
    pub s1_star: usize,
    pub replications: usize,
    pub train_fraction: f64,
    pub noiseless: bool,
}

/// Raw `[scaling]` section: the sample sizes and support sizes to sweep.
/// Everything else about a scaling run comes from `[experiment]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingKeys {
    pub n_list: Vec<usize>,
    pub s1_list: Vec<usize>,
}

/// A fully parsed and range-checked run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub seed: u64,
    pub paths: PathKeys,
    pub lasso: LassoSettings,
    pub glasso: GlassoSettings,
    pub solver: SolverKeys,
    pub experiment: ExperimentKeys,
    pub scaling: ScalingKeys,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            seed: 1,
            paths: PathKeys::default(),
            lasso: LassoSettings { lambda1: None, max_sweeps: 1000, tol: 1e-7 },
            glasso: GlassoSettings {
                lambda2: None,
                max_sweeps: 300,
                tol: 1e-8,
                ridge_floor: None,
            },
            solver: SolverKeys {
                iterations: 100,
                budget_mult: 1.0,
                eta1: None,
                eta2: None,
                rel_tol: 0.0,
                backtrack_max: SolverConfig::DEFAULT_BACKTRACK_MAX,
                s1: None,
                s2: None,
                resample: false,
            },
            experiment: ExperimentKeys {
                n: 2000,
                d: 100,
                m: 10,
                graph: GraphKind::Band,
                hub_groups: 1,
                hub_value: DEFAULT_HUB_VALUE,
                pd_margin: DEFAULT_PD_MARGIN,
                s1_star: 20,
                replications: 10,
                train_fraction: 0.5,
                noiseless: false,
            },
            scaling: ScalingKeys {
                n_list: vec![500, 1000, 2000, 4000],
                s1_list: vec![20, 10],
            },
        }
    }
}

const SECTIONS: [&str; 7] =
    ["run", "paths", "lasso", "glasso", "solver", "experiment", "scaling"];

/// One `key = value` occurrence with enough context for a useful error.
struct Slot<'a> {
    section: &'a str,
    key: &'a str,
    value: &'a str,
    line: Option<usize>,
}

impl Slot<'_> {
    fn err(&self, what: impl fmt::Display) -> Error {
        let at = format!("{}.{}: {}", self.section, self.key, what);
        match self.line {
            Some(line) => Error::ParseError { line, context: at },
            None => Error::invalid(format!("override {at}")),
        }
    }

    fn u64(&self) -> Result<u64> {
        self.value.parse().map_err(|_| self.err("expected a nonnegative integer"))
    }

    fn usize_min(&self, min: usize) -> Result<usize> {
        let v: usize =
            self.value.parse().map_err(|_| self.err("expected a nonnegative integer"))?;
        if v < min {
            return Err(self.err(format_args!("must be at least {min}, got {v}")));
        }
        Ok(v)
    }

    fn f64_finite(&self) -> Result<f64> {
        let v: f64 = self.value.parse().map_err(|_| self.err("expected a number"))?;
        if !v.is_finite() {
            return Err(self.err(format_args!("must be finite, got {v}")));
        }
        Ok(v)
    }

    fn f64_pos(&self) -> Result<f64> {
        let v = self.f64_finite()?;
        if v <= 0.0 {
            return Err(self.err(format_args!("must be > 0, got {v}")));
        }
        Ok(v)
    }

    fn f64_nonneg(&self) -> Result<f64> {
        let v = self.f64_finite()?;
        if v < 0.0 {
            return Err(self.err(format_args!("must be >= 0, got {v}")));
        }
        Ok(v)
    }

    fn f64_min(&self, min: f64) -> Result<f64> {
        let v = self.f64_finite()?;
        if v < min {
            return Err(self.err(format_args!("must be at least {min}, got {v}")));
        }
        Ok(v)
    }

    fn fraction(&self) -> Result<f64> {
        let v = self.f64_finite()?;
        if !(v > 0.0 && v < 1.0) {
            return Err(self.err(format_args!("must lie strictly between 0 and 1, got {v}")));
        }
        Ok(v)
    }

    fn bool(&self) -> Result<bool> {
        match self.value {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(self.err(format_args!("expected true or false, got '{other}'"))),
        }
    }

    fn auto_f64_pos(&self) -> Result<Option<f64>> {
        if self.value == "auto" {
            Ok(None)
        } else {
            self.f64_pos().map(Some)
        }
    }

    fn auto_f64_nonneg(&self) -> Result<Option<f64>> {
        if self.value == "auto" {
            Ok(None)
        } else {
            self.f64_nonneg().map(Some)
        }
    }

    fn auto_usize_min(&self, min: usize) -> Result<Option<usize>> {
        if self.value == "auto" {
            Ok(None)
        } else {
            self.usize_min(min).map(Some)
        }
    }

    fn path(&self) -> Result<PathBuf> {
        if self.value.is_empty() {
            return Err(self.err("expected a file path"));
        }
        Ok(PathBuf::from(self.value))
    }

    fn command(&self) -> Result<Command> {
        Command::from_name(self.value).ok_or_else(|| {
            self.err(format_args!(
                "unknown command '{}'; expected one of generate, init, fit, error-curve, \
scaling, compare, ar1-fit",
                self.value
            ))
        })
    }

    fn graph_kind(&self) -> Result<GraphKind> {
        match self.value {
            "band" => Ok(GraphKind::Band),
            "hub" => Ok(GraphKind::Hub),
            "scale-free" => Ok(GraphKind::ScaleFree),
            other => Err(self.err(format_args!(
                "unknown graph '{other}'; expected band, hub, or scale-free"
            ))),
        }
    }

    fn usize_list_min(&self, min: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for part in self.value.split(',') {
            let part = part.trim();
            let v: usize = part
                .parse()
                .map_err(|_| self.err(format_args!("'{part}' is not a nonnegative integer")))?;
            if v < min {
                return Err(self.err(format_args!("entries must be at least {min}, got {v}")));
            }
            out.push(v);
        }
        Ok(out)
    }
}

fn apply(cfg: &mut RunConfig, slot: &Slot<'_>) -> Result<()> {
    match (slot.section, slot.key) {
        ("run", "command") => cfg.command = Some(slot.command()?),
        ("run", "seed") => cfg.seed = slot.u64()?,
        ("paths", "x") => cfg.paths.x = Some(slot.path()?),
        ("paths", "y") => cfg.paths.y = Some(slot.path()?),
        ("paths", "w0") => cfg.paths.w0 = Some(slot.path()?),
        ("paths", "omega0") => cfg.paths.omega0 = Some(slot.path()?),
        ("paths", "w_star") => cfg.paths.w_star = Some(slot.path()?),
        ("paths", "omega_star") => cfg.paths.omega_star = Some(slot.path()?),
        ("paths", "prices") => cfg.paths.prices = Some(slot.path()?),
        ("lasso", "lambda1") => cfg.lasso.lambda1 = slot.auto_f64_pos()?,
        ("lasso", "max_sweeps") => cfg.lasso.max_sweeps = slot.usize_min(1)?,
        ("lasso", "tol") => cfg.lasso.tol = slot.f64_pos()?,
        ("glasso", "lambda2") => cfg.glasso.lambda2 = slot.auto_f64_pos()?,
        ("glasso", "max_sweeps") => cfg.glasso.max_sweeps = slot.usize_min(1)?,
        ("glasso", "tol") => cfg.glasso.tol = slot.f64_pos()?,
        ("glasso", "ridge_floor") => cfg.glasso.ridge_floor = slot.auto_f64_nonneg()?,
        ("solver", "iterations") => cfg.solver.iterations = slot.usize_min(1)?,
        ("solver", "budget_mult") => cfg.solver.budget_mult = slot.f64_min(1.0)?,
        ("solver", "eta1") => cfg.solver.eta1 = slot.auto_f64_pos()?,
        ("solver", "eta2") => cfg.solver.eta2 = slot.auto_f64_pos()?,
        ("solver", "rel_tol") => cfg.solver.rel_tol = slot.f64_nonneg()?,
        ("solver", "backtrack_max") => cfg.solver.backtrack_max = slot.usize_min(0)?,
        ("solver", "s1") => cfg.solver.s1 = slot.auto_usize_min(1)?,
        ("solver", "s2") => cfg.solver.s2 = slot.auto_usize_min(1)?,
        ("solver", "resample") => cfg.solver.resample = slot.bool()?,
        ("experiment", "n") => cfg.experiment.n = slot.usize_min(2)?,
        ("experiment", "d") => cfg.experiment.d = slot.usize_min(1)?,
        ("experiment", "m") => cfg.experiment.m = slot.usize_min(1)?,
        ("experiment", "graph") => cfg.experiment.graph = slot.graph_kind()?,
        ("experiment", "hub_groups") => cfg.experiment.hub_groups = slot.usize_min(1)?,
        ("experiment", "hub_value") => cfg.experiment.hub_value = slot.f64_finite()?,
        ("experiment", "pd_margin") => cfg.experiment.pd_margin = slot.f64_pos()?,
        ("experiment", "s1_star") => cfg.experiment.s1_star = slot.usize_min(1)?,
        ("experiment", "replications") => cfg.experiment.replications = slot.usize_min(1)?,
        ("experiment", "train_fraction") => cfg.experiment.train_fraction = slot.fraction()?,
        ("experiment", "noiseless") => cfg.experiment.noiseless = slot.bool()?,
        ("scaling", "n_list") => cfg.scaling.n_list = slot.usize_list_min(2)?,
        ("scaling", "s1_list") => cfg.scaling.s1_list = slot.usize_list_min(1)?,
        _ => {
            return Err(Error::UnknownKey { key: format!("{}.{}", slot.section, slot.key) });
        }
    }
    Ok(())
}

/// Parses config text and applies `section.key=value` overrides after it.
///
/// # Errors
///
/// `ParseError` with a line number for malformed lines, unparseable or
/// out-of-range values, and duplicate keys; `UnknownKey` for unknown
/// sections, keys, or override paths; `InvalidValue` for malformed or
/// out-of-range overrides.
pub fn parse_config_text(text: &str, overrides: &[String]) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut section: Option<&str> = None;
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            section = Some(
                SECTIONS
                    .into_iter()
                    .find(|&s| s == name)
                    .ok_or_else(|| Error::UnknownKey { key: format!("[{name}]") })?,
            );
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(Error::ParseError {
                line,
                context: format!("expected 'key = value' or '[section]', got '{trimmed}'"),
            });
        };
        let Some(section) = section else {
            return Err(Error::ParseError {
                line,
                context: format!("key '{}' appears before any [section] header", key.trim()),
            });
        };
        let key = key.trim();
        if !seen.insert((section.to_string(), key.to_string())) {
            return Err(Error::ParseError {
                line,
                context: format!("duplicate key {section}.{key}"),
            });
        }
        apply(&mut cfg, &Slot { section, key, value: value.trim(), line: Some(line) })?;
    }
    for over in overrides {
        let Some((path, value)) = over.split_once('=') else {
            return Err(Error::invalid(format!(
                "override '{over}' is not of the form section.key=value"
            )));
        };
        let path = path.trim();
        let Some((section, key)) = path.split_once('.') else {
            return Err(Error::UnknownKey { key: path.to_string() });
        };
        apply(&mut cfg, &Slot { section, key, value: value.trim(), line: None })?;
    }
    Ok(cfg)
}

/// Reads and parses a config file, then applies overrides.
pub fn parse_config(path: impl AsRef<Path>, overrides: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_text(&text, overrides)
}

fn push_kv(out: &mut String, key: &str, value: impl fmt::Display) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(&value.to_string());
    out.push('\n');
}

fn push_opt_auto(out: &mut String, key: &str, value: Option<impl fmt::Display>) {
    match value {
        Some(v) => push_kv(out, key, v),
        None => push_kv(out, key, "auto"),
    }
}

fn push_opt_path(out: &mut String, key: &str, value: &Option<PathBuf>) {
    if let Some(p) = value {
        push_kv(out, key, p.display());
    }
}

/// Prints a configuration in the canonical section and key order. The output
/// parses back to an equal [`RunConfig`], and floats print with enough
/// digits to reparse to the identical bits.
pub fn render_config(cfg: &RunConfig) -> String {
    let mut out = String::from("# resolved run configuration\n[run]\n");
    if let Some(command) = cfg.command {
        push_kv(&mut out, "command", command);
    }
    push_kv(&mut out, "seed", cfg.seed);

    out.push_str("\n[paths]\n");
    push_opt_path(&mut out, "x", &cfg.paths.x);
    push_opt_path(&mut out, "y", &cfg.paths.y);
    push_opt_path(&mut out, "w0", &cfg.paths.w0);
    push_opt_path(&mut out, "omega0", &cfg.paths.omega0);
    push_opt_path(&mut out, "w_star", &cfg.paths.w_star);
    push_opt_path(&mut out, "omega_star", &cfg.paths.omega_star);
    push_opt_path(&mut out, "prices", &cfg.paths.prices);

    out.push_str("\n[lasso]\n");
    push_opt_auto(&mut out, "lambda1", cfg.lasso.lambda1);
    push_kv(&mut out, "max_sweeps", cfg.lasso.max_sweeps);
    push_kv(&mut out, "tol", cfg.lasso.tol);

    out.push_str("\n[glasso]\n");
    push_opt_auto(&mut out, "lambda2", cfg.glasso.lambda2);
    push_kv(&mut out, "max_sweeps", cfg.glasso.max_sweeps);
    push_kv(&mut out, "tol", cfg.glasso.tol);
    push_opt_auto(&mut out, "ridge_floor", cfg.glasso.ridge_floor);

    out.push_str("\n[solver]\n");
    push_kv(&mut out, "iterations", cfg.solver.iterations);
    push_kv(&mut out, "budget_mult", cfg.solver.budget_mult);
    push_opt_auto(&mut out, "eta1", cfg.solver.eta1);
    push_opt_auto(&mut out, "eta2", cfg.solver.eta2);
    push_kv(&mut out, "rel_tol", cfg.solver.rel_tol);
    push_kv(&mut out, "backtrack_max", cfg.solver.backtrack_max);
    push_opt_auto(&mut out, "s1", cfg.solver.s1);
    push_opt_auto(&mut out, "s2", cfg.solver.s2);
    push_kv(&mut out, "resample", cfg.solver.resample);

    out.push_str("\n[experiment]\n");
    push_kv(&mut out, "n", cfg.experiment.n);
    push_kv(&mut out, "d", cfg.experiment.d);
    push_kv(&mut out, "m", cfg.experiment.m);
    let graph = match cfg.experiment.graph {
        GraphKind::Band => "band",
        GraphKind::Hub => "hub",
        GraphKind::ScaleFree => "scale-free",
    };
    push_kv(&mut out, "graph", graph);
    push_kv(&mut out, "hub_groups", cfg.experiment.hub_groups);
    push_kv(&mut out, "hub_value", cfg.experiment.hub_value);
    push_kv(&mut out, "pd_margin", cfg.experiment.pd_margin);
    push_kv(&mut out, "s1_star", cfg.experiment.s1_star);
    push_kv(&mut out, "replications", cfg.experiment.replications);
    push_kv(&mut out, "train_fraction", cfg.experiment.train_fraction);
    push_kv(&mut out, "noiseless", cfg.experiment.noiseless);

    out.push_str("\n[scaling]\n");
    let join = |list: &[usize]| {
        list.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    };
    push_kv(&mut out, "n_list", join(&cfg.scaling.n_list));
    push_kv(&mut out, "s1_list", join(&cfg.scaling.s1_list));
    out
}

/// Writes the canonical echo of `cfg` to `path`.
pub fn write_config_echo(cfg: &RunConfig, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, render_config(cfg))?;
    Ok(())
}

impl RunConfig {
    /// The precision-graph description assembled from the `[experiment]`
    /// keys.
    pub fn graph_spec(&self) -> Result<GraphSpec> {
        let e = &self.experiment;
        GraphSpec::new(e.graph, e.m, e.hub_groups, e.hub_value, e.pd_margin)
    }

    /// Explicit step sizes, or `None` for the automatic pair. Setting only
    /// one of `eta1`/`eta2` is rejected.
    pub fn eta_pair(&self) -> Result<Option<(f64, f64)>> {
        match (self.solver.eta1, self.solver.eta2) {
            (None, None) => Ok(None),
            (Some(e1), Some(e2)) => Ok(Some((e1, e2))),
            _ => Err(Error::invalid(
                "solver.eta1 and solver.eta2 must both be auto or both be numbers",
            )),
        }
    }

    fn assemble(&self, sizes: Vec<ScenarioSize>, s1_star: usize) -> Result<ExperimentConfig> {
        let e = &self.experiment;
        let cfg = ExperimentConfig {
            sizes,
            graph: self.graph_spec()?,
            s1_star,
            replications: e.replications,
            master_seed: self.seed,
            train_fraction: e.train_fraction,
            noiseless: e.noiseless,
            solver: SolverSettings {
                iterations: self.solver.iterations,
                budget_mult: self.solver.budget_mult,
                eta: self.eta_pair()?,
                rel_tol: self.solver.rel_tol,
                backtrack_max: self.solver.backtrack_max,
            },
            lasso: self.lasso.clone(),
            glasso: self.glasso.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The single-scenario experiment described by `[experiment]` plus the
    /// shared solver and initializer sections.
    pub fn experiment_config(&self) -> Result<ExperimentConfig> {
        let e = &self.experiment;
        self.assemble(vec![ScenarioSize { n: e.n, d: e.d, m: e.m }], e.s1_star)
    }

    /// One experiment per `s1_list` entry, each sweeping `n_list` at the
    /// `[experiment]` dimensions.
    pub fn scaling_grid(&self) -> Result<Vec<ExperimentConfig>> {
        let e = &self.experiment;
        self.scaling
            .s1_list
            .iter()
            .map(|&s1| {
                let sizes = self
                    .scaling
                    .n_list
                    .iter()
                    .map(|&n| ScenarioSize { n, d: e.d, m: e.m })
                    .collect();
                self.assemble(sizes, s1)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> RunConfig {
        parse_config_text(text, &[]).unwrap()
    }

    #[test]
    fn empty_text_yields_the_documented_defaults() {
        let cfg = parse("");
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.solver.iterations, 100);
        assert_eq!(cfg.lasso.lambda1, None);
        assert_eq!(cfg.scaling.n_list, vec![500, 1000, 2000, 4000]);
    }

    #[test]
    fn default_experiment_config_matches_the_standard_study() {
        let cfg = parse("").experiment_config().unwrap();
        assert_eq!(cfg, ExperimentConfig::standard());
    }

    #[test]
    fn a_full_file_parses_into_every_field() {
        let text = "\
# exercise the whole schema
[run]
command = compare
seed = 42

[paths]
x = data/x.csv
prices = data/prices.csv

[lasso]
lambda1 = 0.05
max_sweeps = 500
tol = 0.000001

[glasso]
lambda2 = auto
ridge_floor = 0.5

[solver]
iterations = 30
budget_mult = 1.5
eta1 = 0.2
eta2 = 0.000001
s1 = 12
s2 = 20
resample = true

[experiment]
n = 300
d = 40
m = 6
graph = hub
hub_groups = 2
s1_star = 8
replications = 3
train_fraction = 0.75
noiseless = true

[scaling]
n_list = 300, 600
s1_list = 8
";
        let cfg = parse(text);
        assert_eq!(cfg.command, Some(Command::Compare));
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.paths.x.as_deref(), Some(Path::new("data/x.csv")));
        assert_eq!(cfg.paths.y, None);
        assert_eq!(cfg.lasso.lambda1, Some(0.05));
        assert_eq!(cfg.glasso.lambda2, None);
        assert_eq!(cfg.glasso.ridge_floor, Some(0.5));
        assert_eq!(cfg.solver.eta1, Some(0.2));
        assert_eq!(cfg.solver.s2, Some(20));
        assert!(cfg.solver.resample);
        assert_eq!(cfg.experiment.graph, GraphKind::Hub);
        assert_eq!(cfg.experiment.hub_groups, 2);
        assert!(cfg.experiment.noiseless);
        assert_eq!(cfg.scaling.n_list, vec![300, 600]);
        assert_eq!(cfg.scaling.s1_list, vec![8]);
    }

    #[test]
    fn unknown_keys_and_sections_fail_fast() {
        let err = parse_config_text("[solver]\nieterations = 5\n", &[]).unwrap_err();
        assert!(matches!(err, Error::UnknownKey { ref key } if key == "solver.ieterations"));
        let err = parse_config_text("[sovler]\n", &[]).unwrap_err();
        assert!(matches!(err, Error::UnknownKey { ref key } if key == "[sovler]"));
        let err = parse_config_text("", &["solver.ieterations=5".into()]).unwrap_err();
        assert!(matches!(err, Error::UnknownKey { ref key } if key == "solver.ieterations"));
    }

    #[test]
    fn malformed_lines_report_their_line_number() {
        let err = parse_config_text("[run]\nseed 5\n", &[]).unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 2, .. }));
        let err = parse_config_text("seed = 5\n", &[]).unwrap_err();
        assert!(matches!(err, Error::ParseError { line: 1, .. }));
        let err = parse_config_text("[run]\nseed = 1\n\nseed = 2\n", &[]).unwrap_err();
        match err {
            Error::ParseError { line, context } => {
                assert_eq!(line, 4);
                assert!(context.contains("duplicate key run.seed"));
            }
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn values_are_range_checked_at_parse_time() {
        for bad in [
            "[experiment]\ntrain_fraction = 1.5\n",
            "[experiment]\nn = 1\n",
            "[lasso]\ntol = -0.1\n",
            "[solver]\neta1 = 0\n",
            "[solver]\nbudget_mult = 0.5\n",
            "[solver]\nrel_tol = nan\n",
            "[solver]\nresample = yes\n",
            "[scaling]\nn_list = 500,1\n",
        ] {
            let err = parse_config_text(bad, &[]).unwrap_err();
            assert!(matches!(err, Error::ParseError { .. }), "{bad}: {err:?}");
        }
        let err = parse_config_text("", &["experiment.train_fraction=0".into()]).unwrap_err();
        assert!(matches!(err, Error::InvalidValue { .. }));
    }

    #[test]
    fn overrides_apply_after_the_file_and_last_one_wins() {
        let cfg = parse_config_text(
            "[solver]\niterations = 7\n",
            &["solver.iterations=5".into(), "solver.iterations=9".into()],
        )
        .unwrap();
        assert_eq!(cfg.solver.iterations, 9);
        let err = parse_config_text("", &["iterations=5".into()]).unwrap_err();
        assert!(matches!(err, Error::UnknownKey { ref key } if key == "iterations"));
        let err = parse_config_text("", &["solver.iterations".into()]).unwrap_err();
        assert!(matches!(err, Error::InvalidValue { .. }));
    }

    #[test]
    fn auto_literals_clear_back_to_derived_values() {
        let cfg = parse_config_text(
            "[lasso]\nlambda1 = 0.2\n",
            &["lasso.lambda1=auto".into(), "solver.s1=auto".into()],
        )
        .unwrap();
        assert_eq!(cfg.lasso.lambda1, None);
        assert_eq!(cfg.solver.s1, None);
    }

    #[test]
    fn render_parse_round_trip_is_the_identity() {
        let mut cfg = RunConfig::default();
        cfg.command = Some(Command::Fit);
        cfg.paths.x = Some(PathBuf::from("x.csv"));
        cfg.paths.omega_star = Some(PathBuf::from("truth/omega.csv"));
        cfg.lasso.lambda1 = Some(0.1);
        cfg.glasso.ridge_floor = Some(1.0);
        cfg.solver.eta1 = Some(2.0 / 3.0);
        cfg.solver.eta2 = Some(1e-6);
        cfg.solver.s1 = Some(17);
        cfg.experiment.train_fraction = 0.65;
        cfg.scaling.s1_list = vec![20, 10, 5];
        let text = render_config(&cfg);
        let back = parse(&text);
        assert_eq!(back, cfg);
        assert_eq!(back.solver.eta1.unwrap().to_bits(), (2.0f64 / 3.0).to_bits());
        assert_eq!(render_config(&back), text);
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(Command::from_name(c.name()), Some(c));
        }
        assert_eq!(Command::from_name("refit"), None);
    }

    #[test]
    fn eta_pair_requires_both_or_neither() {
        let cfg = parse("[solver]\neta1 = 0.1\n");
        assert!(matches!(cfg.eta_pair(), Err(Error::InvalidValue { .. })));
        let cfg = parse("[solver]\neta1 = 0.1\neta2 = 0.2\n");
        assert_eq!(cfg.eta_pair().unwrap(), Some((0.1, 0.2)));
        assert_eq!(parse("").eta_pair().unwrap(), None);
    }

    #[test]
    fn scaling_grid_sweeps_s1_by_n() {
        let cfg = parse(
            "[experiment]\nd = 30\nm = 4\nreplications = 2\n\
[scaling]\nn_list = 200,400,800,1600\ns1_list = 10,5\n",
        );
        let grid = cfg.scaling_grid().unwrap();
        assert_eq!(grid.len(), 2);
        assert_eq!(grid[0].s1_star, 10);
        assert_eq!(grid[1].s1_star, 5);
        for exp in &grid {
            assert_eq!(exp.sizes.len(), 4);
            assert!(exp.sizes.iter().all(|s| s.d == 30 && s.m == 4));
            assert_eq!(exp.sizes[3].n, 1600);
            assert_eq!(exp.replications, 2);
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = parse("# top comment\n\n[run]\n# inner\nseed = 9\n\n");
        assert_eq!(cfg.seed, 9);
    }
}
