//! Experiment configs. Every run is a pure function of its config.

use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use braess_spectral::delocalization::conc::{BernoulliSumSpec, MAX_PROJECTION_DIM};
use braess_spectral::graph::{sample_gnp, GnpSpec, Graph};
use braess_spectral::paradox::{GapSolver, ZERO_TOLERANCE};
use braess_spectral::typicality::TypicalityConfig;
use serde::{Deserialize, Serialize};

use crate::reproduce::{Scale, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;
/// Largest accepted config file.
pub const MAX_CONFIG_BYTES: usize = 1 << 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Output directory.
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Worker threads; `None` uses the environment default.
    #[serde(default)]
    pub jobs: Option<usize>,
    pub command: Command,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Sample(SampleParams),
    Perturb(PerturbParams),
    Typical(TypicalParams),
    Deloc(DelocParams),
    Conc(ConcParams),
    Reproduce(ReproduceParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::Perturb(_) => "perturb",
            Command::Typical(_) => "typical",
            Command::Deloc(_) => "deloc",
            Command::Conc(_) => "conc",
            Command::Reproduce(_) => "reproduce",
        }
    }

    /// Defaults for a subcommand invoked without `--config`.
    pub fn default_for(name: &str) -> Result<Command> {
        Ok(match name {
            "sample" => Command::Sample(SampleParams { n: 200, p: 0.5 }),
            "perturb" => Command::Perturb(PerturbParams::default()),
            "typical" => Command::Typical(TypicalParams::default()),
            "deloc" => Command::Deloc(DelocParams::default()),
            "conc" => Command::Conc(ConcParams::default()),
            "reproduce" => Command::Reproduce(ReproduceParams::default()),
            other => bail!("unknown subcommand {other}"),
        })
    }
}

/// Where the graph of an experiment comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSource {
    /// `G(n, p)` sampled once per seed.
    Gnp { n: usize, p: f64 },
    /// A fixture file; `p` is the model parameter for predicates that need one.
    Fixture { path: PathBuf, p: Option<f64> },
}

impl Default for GraphSource {
    fn default() -> Self {
        GraphSource::Gnp { n: 200, p: 0.5 }
    }
}

impl GraphSource {
    fn validate(&self) -> Result<()> {
        match self {
            GraphSource::Gnp { n, p } => GnpSpec::new(*n, *p, 0).validate()?,
            GraphSource::Fixture { p: Some(p), .. } => ensure!(*p > 0.0 && *p < 1.0, "p must lie in (0, 1)"),
            GraphSource::Fixture { .. } => {}
        }
        Ok(())
    }

    /// The graph for `seed` and its model parameter (density for fixtures without `p`).
    pub fn load(&self, seed: u64) -> Result<(Graph, f64)> {
        match self {
            GraphSource::Gnp { n, p } => Ok((sample_gnp(&GnpSpec::new(*n, *p, seed))?, *p)),
            GraphSource::Fixture { path, p } => {
                let bytes = std::fs::read(path).with_context(|| format!("reading fixture {}", path.display()))?;
                let g = Graph::from_fixture_bytes(&bytes).with_context(|| format!("parsing fixture {}", path.display()))?;
                let p = p.unwrap_or_else(|| g.density());
                Ok((g, p))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleParams {
    pub n: usize,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbations {
    Add,
    Remove,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbParams {
    pub graph: GraphSource,
    pub kind: Perturbations,
    pub sample_size: usize,
    pub solver: GapSolver,
    pub zero_tolerance: f64,
    pub combinatorial: bool,
}

impl Default for PerturbParams {
    fn default() -> Self {
        PerturbParams {
            graph: GraphSource::default(),
            kind: Perturbations::Both,
            sample_size: 2000,
            solver: GapSolver::LowRank,
            zero_tolerance: ZERO_TOLERANCE,
            combinatorial: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TypicalParams {
    pub graph: GraphSource,
    pub checks: TypicalityConfig,
}

impl Default for TypicalParams {
    fn default() -> Self {
        TypicalParams {
            graph: GraphSource::default(),
            checks: TypicalityConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelocParams {
    pub graph: GraphSource,
    /// Profiles use the cutoff `threshold_scale/√n`.
    pub threshold_scale: f64,
    /// Also profile every `v_j(A)`, `j ≥ 2`.
    pub adjacency: bool,
    /// Exponents `C` for the sweep of `1/(√n (log n)^C)`.
    pub c_grid: Vec<f64>,
    /// The sweep reports the smallest `C` reaching `1/2 − eta`.
    pub eta: f64,
    /// Exponent for the `ℓ∞` family check.
    pub linf_c: f64,
}

impl Default for DelocParams {
    fn default() -> Self {
        DelocParams {
            graph: GraphSource::default(),
            threshold_scale: 0.1,
            adjacency: false,
            c_grid: (0..=24).map(|k| k as f64 * 0.25).collect(),
            eta: 0.1,
            linf_c: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcMethodChoice {
    /// Exact when the weights are integers.
    #[default]
    Auto,
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionParams {
    pub d: usize,
    pub n: usize,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcParams {
    pub spec: BernoulliSumSpec,
    pub method: ConcMethodChoice,
    /// Radii for the `1/√m` bound comparison.
    pub radii: Vec<f64>,
    pub trials: u64,
    /// Constant used for the pass/fail column of the bound comparison.
    pub bound_constant: f64,
    pub projection: Option<ProjectionParams>,
}

impl Default for ConcParams {
    fn default() -> Self {
        ConcParams {
            spec: BernoulliSumSpec {
                weights: vec![1.0; 100],
                p: 0.5,
            },
            method: ConcMethodChoice::Auto,
            radii: vec![1.0, 2.0, 4.0, 8.0],
            trials: 100_000,
            bound_constant: 2.0,
            projection: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReproduceParams {
    pub scale: Scale,
    /// Criterion ids to run; empty runs all.
    pub criteria: Vec<u32>,
    pub tolerances: Tolerances,
}

impl Default for ReproduceParams {
    fn default() -> Self {
        ReproduceParams {
            scale: Scale::Full,
            criteria: Vec::new(),
            tolerances: Tolerances::default(),
        }
    }
}

fn finite_positive(name: &str, x: f64) -> Result<()> {
    ensure!(x.is_finite() && x > 0.0, "{name} must be finite and positive, got {x}");
    Ok(())
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            seeds: default_seeds(),
            output_path: None,
            format: Format::Json,
            jobs: None,
            command,
        }
    }

    /// Parses and validates a JSON config.
    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self> {
        ensure!(bytes.len() <= MAX_CONFIG_BYTES, "config exceeds {MAX_CONFIG_BYTES} bytes");
        let config: ExperimentConfig = serde_json::from_slice(bytes).context("malformed config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.schema_version == SCHEMA_VERSION,
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            self.schema_version
        );
        ensure!(!self.seeds.is_empty(), "seeds must not be empty");
        ensure!(self.seeds.len() <= 10_000, "at most 10000 seeds");
        if let Some(j) = self.jobs {
            ensure!(j >= 1, "jobs must be at least 1");
        }
        match &self.command {
            Command::Sample(s) => GnpSpec::new(s.n, s.p, 0).validate()?,
            Command::Perturb(s) => {
                s.graph.validate()?;
                ensure!(s.sample_size >= 1, "sample_size must be at least 1");
                ensure!(
                    s.zero_tolerance.is_finite() && s.zero_tolerance >= 0.0,
                    "zero_tolerance must be finite and non-negative"
                );
            }
            Command::Typical(s) => {
                s.graph.validate()?;
                s.checks.validate()?;
            }
            Command::Deloc(s) => {
                s.graph.validate()?;
                finite_positive("threshold_scale", s.threshold_scale)?;
                ensure!(!s.c_grid.is_empty(), "c_grid must not be empty");
                ensure!(s.c_grid.iter().all(|c| c.is_finite() && *c >= 0.0), "c_grid entries must be non-negative");
                ensure!((0.0..0.5).contains(&s.eta), "eta must lie in [0, 1/2)");
                ensure!(s.linf_c.is_finite() && s.linf_c >= 0.0, "linf_c must be non-negative");
            }
            Command::Conc(s) => {
                s.spec.validate()?;
                ensure!(!s.radii.is_empty(), "radii must not be empty");
                ensure!(s.radii.iter().all(|r| r.is_finite() && *r >= 1.0), "radii must be at least 1");
                ensure!(s.trials >= 1 && s.trials <= 100_000_000, "trials must lie in [1, 1e8]");
                finite_positive("bound_constant", s.bound_constant)?;
                if let Some(pr) = &s.projection {
                    ensure!(
                        pr.d >= 1 && pr.d < pr.n && pr.n <= MAX_PROJECTION_DIM,
                        "projection needs 1 <= d < n <= {MAX_PROJECTION_DIM}"
                    );
                    finite_positive("projection.t", pr.t)?;
                }
            }
            Command::Reproduce(s) => {
                s.tolerances.validate()?;
                ensure!(s.criteria.iter().all(|c| (1..=12).contains(c)), "criteria ids must lie in 1..=12");
            }
        }
        Ok(())
    }
}
