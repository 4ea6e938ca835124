//! Subcommands. Each returns its artifacts in memory; [`write_run`] performs
//! all file I/O afterwards.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use braess_spectral::delocalization::conc::{
    conc_1d, conc_exact_1d, conc_monte_carlo_1d, lo_bound_with, rv_projection_check, ConcEstimate, LoBoundCheck,
    ProjectionCheck, ProjectionSetup,
};
use braess_spectral::delocalization::{
    c_sweep, histogram_edges, linf_check_vectors, profiles_from, smallest_exponent, DelocalizationProfile,
    LinfCheck, MatrixKind, SweepPoint, Threshold,
};
use braess_spectral::graph::{sample_gnp, GnpSpec};
use braess_spectral::paradox::{
    estimate_add_with, estimate_remove_with, EstimateOptions, ParadoxEstimate, ParadoxRun, PerturbationKind,
};
use braess_spectral::rng::GENERATOR;
use braess_spectral::spectral::{adjacency_matrix, eig_sym, normalized_adjacency, Ordering};
use braess_spectral::typicality::{full_report, TypicalityReport};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{
    Command, ConcMethodChoice, ConcParams, DelocParams, ExperimentConfig, Format, PerturbParams, Perturbations,
    SampleParams, TypicalParams, SCHEMA_VERSION,
};
use crate::config::ReproduceParams;
use crate::reproduce::{run_suite, CriterionResult};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const ERROR: u8 = 1;
    /// A typicality refutation or a failed acceptance criterion.
    pub const REFUTED: u8 = 2;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Artifact {
            name: name.into(),
            bytes: bytes.into(),
        }
    }

    fn json(name: impl Into<String>, value: &impl Serialize) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        Artifact::new(name, text)
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub command: &'static str,
    /// In a fixed order; names are unique.
    pub artifacts: Vec<Artifact>,
    /// Human-readable lines for the terminal.
    pub lines: Vec<String>,
    pub exit_code: u8,
}

impl RunOutput {
    pub fn digests(&self) -> BTreeMap<String, String> {
        self.artifacts.iter().map(|a| (a.name.clone(), a.sha256())).collect()
    }

    /// SHA-256 over every artifact name and digest.
    pub fn result_digest(&self) -> String {
        let mut h = Sha256::new();
        for (name, digest) in self.digests() {
            h.update(name.as_bytes());
            h.update([0]);
            h.update(digest.as_bytes());
            h.update([0]);
        }
        hex::encode(h.finalize())
    }

    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub artifact_version: String,
    pub generator: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub duration_seconds: f64,
    pub exit_code: u8,
    pub digests: BTreeMap<String, String>,
    pub result_digest: String,
}

impl RunManifest {
    pub fn new(config: &ExperimentConfig, output: &RunOutput, duration: Duration) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            generator: GENERATOR.to_string(),
            command: output.command.to_string(),
            config: config.clone(),
            duration_seconds: duration.as_secs_f64(),
            exit_code: output.exit_code,
            digests: output.digests(),
            result_digest: output.result_digest(),
        }
    }
}

/// Writes every artifact plus `manifest.json` into `dir`.
pub fn write_run(dir: &Path, output: &RunOutput, manifest: &RunManifest) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let manifest = Artifact::json("manifest.json", manifest);
    for a in output.artifacts.iter().chain([&manifest]) {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Validates the config and runs its command on the current rayon pool.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    match &config.command {
        Command::Sample(p) => cmd_sample(config, p),
        Command::Perturb(p) => cmd_perturb(config, p),
        Command::Typical(p) => cmd_typical(config, p),
        Command::Deloc(p) => cmd_deloc(config, p),
        Command::Conc(p) => cmd_conc(config, p),
        Command::Reproduce(p) => cmd_reproduce(config, p),
    }
}

fn csv_line(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(command: &'static str, body: T) -> Envelope<'static, T> {
    Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        body,
    }
}

#[derive(Serialize)]
struct SampleSummary {
    seed: u64,
    n: usize,
    p: f64,
    edges: usize,
    min_degree: usize,
    max_degree: usize,
    mean_degree: f64,
}

pub fn cmd_sample(config: &ExperimentConfig, params: &SampleParams) -> Result<RunOutput> {
    let mut artifacts = Vec::new();
    let mut rows = Vec::new();
    for &seed in &config.seeds {
        let g = sample_gnp(&GnpSpec::new(params.n, params.p, seed))?;
        let mut fixture = g.to_fixture_json();
        fixture.push('\n');
        artifacts.push(Artifact::new(format!("graph_seed{seed}.json"), fixture));
        let d = g.degrees();
        rows.push(SampleSummary {
            seed,
            n: g.n(),
            p: params.p,
            edges: g.edge_count(),
            min_degree: d.iter().copied().min().unwrap_or(0),
            max_degree: d.iter().copied().max().unwrap_or(0),
            mean_degree: if g.n() == 0 { 0.0 } else { g.degree_sum() as f64 / g.n() as f64 },
        });
    }
    let lines = rows
        .iter()
        .map(|r| {
            format!(
                "seed {}: n={} edges={} degree min/mean/max = {}/{:.2}/{}",
                r.seed, r.n, r.edges, r.min_degree, r.mean_degree, r.max_degree
            )
        })
        .collect();
    artifacts.push(match config.format {
        Format::Json => Artifact::json("summary.json", &envelope("sample", BTreeMap::from([("graphs", &rows)]))),
        Format::Csv => {
            let mut s = String::new();
            csv_line(&mut s, &["seed,n,p,edges,min_degree,max_degree,mean_degree".into()]);
            for r in &rows {
                csv_line(
                    &mut s,
                    &[
                        r.seed.to_string(),
                        r.n.to_string(),
                        r.p.to_string(),
                        r.edges.to_string(),
                        r.min_degree.to_string(),
                        r.max_degree.to_string(),
                        r.mean_degree.to_string(),
                    ],
                );
            }
            Artifact::new("summary.csv", s)
        }
    });
    Ok(RunOutput {
        command: "sample",
        artifacts,
        lines,
        exit_code: exit::SUCCESS,
    })
}

fn kind_label(kind: PerturbationKind) -> &'static str {
    match kind {
        PerturbationKind::Addition => "add",
        PerturbationKind::Removal => "remove",
    }
}

fn jsonl<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).expect("serializable");
        out.push(b'\n');
    }
    out
}

pub const DELTA_HISTOGRAM_BINS: usize = 40;

/// Equal-width histogram of `gap_delta`, as `(bin_low, bin_high, count)`.
pub fn delta_histogram(run: &ParadoxRun) -> Vec<(f64, f64, usize)> {
    let deltas: Vec<f64> = run.verdicts.iter().map(|v| v.gap_delta).collect();
    let lo = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = deltas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if deltas.is_empty() {
        return Vec::new();
    }
    let width = if hi > lo { (hi - lo) / DELTA_HISTOGRAM_BINS as f64 } else { 1.0 };
    let mut counts = vec![0usize; DELTA_HISTOGRAM_BINS];
    for d in deltas {
        let k = (((d - lo) / width) as usize).min(DELTA_HISTOGRAM_BINS - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, c)| (lo + k as f64 * width, lo + (k + 1) as f64 * width, c))
        .collect()
}

#[derive(Serialize)]
struct PerturbSummary<'a> {
    estimates: &'a [ParadoxEstimate],
    mean_a_minus: Option<f64>,
    mean_r_plus: Option<f64>,
}

pub fn cmd_perturb(config: &ExperimentConfig, params: &PerturbParams) -> Result<RunOutput> {
    let kinds: &[PerturbationKind] = match params.kind {
        Perturbations::Add => &[PerturbationKind::Addition],
        Perturbations::Remove => &[PerturbationKind::Removal],
        Perturbations::Both => &[PerturbationKind::Addition, PerturbationKind::Removal],
    };
    let mut artifacts = Vec::new();
    let mut estimates = Vec::new();
    let mut histograms = Vec::new();
    for &seed in &config.seeds {
        let (g, p) = params.graph.load(seed)?;
        for &kind in kinds {
            let opts = EstimateOptions {
                solver: params.solver,
                p_model: Some(p),
                combinatorial: params.combinatorial && kind == PerturbationKind::Removal,
                zero_tolerance: params.zero_tolerance,
            };
            let run = match kind {
                PerturbationKind::Addition => estimate_add_with(&g, params.sample_size, seed, &opts),
                PerturbationKind::Removal => estimate_remove_with(&g, params.sample_size, seed, &opts),
            }
            .with_context(|| format!("seed {seed}, {}", kind_label(kind)))?;
            artifacts.push(Artifact::new(
                format!("verdicts_seed{seed}_{}.jsonl", kind_label(kind)),
                jsonl(&run.verdicts),
            ));
            histograms.push((seed, kind, delta_histogram(&run)));
            estimates.push(run.estimate);
        }
    }
    let mean = |f: &dyn Fn(&ParadoxEstimate) -> Option<f64>| {
        let xs: Vec<f64> = estimates.iter().filter_map(f).collect();
        (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
    };
    let summary = PerturbSummary {
        estimates: &estimates,
        mean_a_minus: mean(&|e| e.a_minus),
        mean_r_plus: mean(&|e| e.r_plus),
    };
    let mut lines: Vec<String> = estimates
        .iter()
        .map(|e| {
            let mut line = format!(
                "seed {} {}: {} sampled, {} decrease / {} increase / {} zero",
                e.seed,
                kind_label(e.kind),
                e.sample_count,
                e.decreases,
                e.increases,
                e.zeros
            );
            if e.combinatorial_checked > 0 {
                let _ = write!(
                    line,
                    "; combinatorial check {}/{} monotone",
                    e.combinatorial_checked - e.combinatorial_violations,
                    e.combinatorial_checked
                );
            }
            line
        })
        .collect();
    if let Some(a) = summary.mean_a_minus {
        lines.push(format!("mean a_minus = {a:.4}"));
    }
    match config.format {
        Format::Json => artifacts.push(Artifact::json("summary.json", &envelope("perturb", &summary))),
        Format::Csv => {
            let mut s = String::new();
            csv_line(
                &mut s,
                &["seed,kind,sample_count,population,decreases,increases,zeros,minus_fraction,plus_fraction,lemma_true,lemma_failures,window_true,window_decreases,combinatorial_checked,combinatorial_violations".into()],
            );
            for e in &estimates {
                let (minus, plus) = match e.kind {
                    PerturbationKind::Addition => (e.a_minus, e.a_plus),
                    PerturbationKind::Removal => (e.r_minus, e.r_plus),
                };
                csv_line(
                    &mut s,
                    &[
                        e.seed.to_string(),
                        kind_label(e.kind).into(),
                        e.sample_count.to_string(),
                        e.population.to_string(),
                        e.decreases.to_string(),
                        e.increases.to_string(),
                        e.zeros.to_string(),
                        minus.unwrap_or(f64::NAN).to_string(),
                        plus.unwrap_or(f64::NAN).to_string(),
                        e.lemma_true.to_string(),
                        e.lemma_failures.to_string(),
                        e.window_true.to_string(),
                        e.window_decreases.to_string(),
                        e.combinatorial_checked.to_string(),
                        e.combinatorial_violations.to_string(),
                    ],
                );
            }
            artifacts.push(Artifact::new("summary.csv", s));
            let mut h = String::new();
            csv_line(&mut h, &["seed,kind,bin_low,bin_high,count".into()]);
            for (seed, kind, bins) in &histograms {
                for (lo, hi, c) in bins {
                    csv_line(
                        &mut h,
                        &[seed.to_string(), kind_label(*kind).into(), lo.to_string(), hi.to_string(), c.to_string()],
                    );
                }
            }
            artifacts.push(Artifact::new("gap_delta_histogram.csv", h));
        }
    }
    Ok(RunOutput {
        command: "perturb",
        artifacts,
        lines,
        exit_code: exit::SUCCESS,
    })
}

pub fn cmd_typical(config: &ExperimentConfig, params: &TypicalParams) -> Result<RunOutput> {
    let mut artifacts = Vec::new();
    let mut reports: Vec<TypicalityReport> = Vec::new();
    for &seed in &config.seeds {
        let (g, p) = params.graph.load(seed)?;
        let report = full_report(&g, p, seed, &params.checks)?;
        artifacts.push(Artifact::json(format!("typicality_seed{seed}.json"), &report));
        reports.push(report);
    }
    let certified = reports.iter().filter(|r| r.certified).count();
    let mut lines: Vec<String> = reports
        .iter()
        .map(|r| {
            let failed: Vec<&str> = r.properties.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect();
            format!(
                "seed {}: {}{}",
                r.seed,
                if r.certified { "certified" } else { "refuted" },
                if failed.is_empty() { String::new() } else { format!(" (failing: {})", failed.join(", ")) }
            )
        })
        .collect();
    lines.push(format!("{certified}/{} certified", reports.len()));
    match config.format {
        Format::Json => {
            let summary = TypicalSummary {
                certified,
                total: reports.len(),
                seeds: reports
                    .iter()
                    .map(|r| TypicalRow {
                        seed: r.seed,
                        certified: r.certified,
                        all_hold: r.all_hold(),
                    })
                    .collect(),
            };
            artifacts.push(Artifact::json("summary.json", &envelope("typical", summary)));
        }
        Format::Csv => {
            let mut s = String::new();
            csv_line(&mut s, &["seed,property,holds,margin,bound,observed".into()]);
            for r in &reports {
                for c in &r.properties {
                    csv_line(
                        &mut s,
                        &[
                            r.seed.to_string(),
                            c.name.clone(),
                            c.holds.to_string(),
                            c.margin.to_string(),
                            c.bound.to_string(),
                            c.observed.to_string(),
                        ],
                    );
                }
            }
            artifacts.push(Artifact::new("properties.csv", s));
        }
    }
    Ok(RunOutput {
        command: "typical",
        artifacts,
        lines,
        exit_code: if certified == reports.len() { exit::SUCCESS } else { exit::REFUTED },
    })
}

#[derive(Serialize)]
struct TypicalSummary {
    certified: usize,
    total: usize,
    seeds: Vec<TypicalRow>,
}

#[derive(Serialize)]
struct TypicalRow {
    seed: u64,
    certified: bool,
    all_hold: bool,
}

#[derive(Serialize)]
struct DelocReport {
    seed: u64,
    n: usize,
    second: DelocalizationProfile,
    c_sweep: Vec<SweepPoint>,
    target_fraction: f64,
    smallest_c: Option<f64>,
    linf: LinfCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    adjacency: Option<Vec<DelocalizationProfile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adjacency_min_fraction: Option<f64>,
}

pub fn cmd_deloc(config: &ExperimentConfig, params: &DelocParams) -> Result<RunOutput> {
    let threshold = Threshold::Scaled(params.threshold_scale);
    let target = 0.5 - params.eta;
    let mut artifacts = Vec::new();
    let mut reports = Vec::new();
    for &seed in &config.seeds {
        let (g, _) = params.graph.load(seed)?;
        if g.n() < 2 {
            bail!("delocalization profiles need at least two vertices");
        }
        let hat = eig_sym(&normalized_adjacency(&g)?, Ordering::Descending)?;
        let second = profiles_from(&hat, MatrixKind::Ahat, 1..2, threshold)?.remove(0);
        let sweep = c_sweep(hat.vector(1), &params.c_grid)?;
        let adj = eig_sym(&adjacency_matrix(&g), Ordering::Descending)?;
        let linf = linf_check_vectors(adj.vectors(), g.n(), params.linf_c);
        let adjacency = if params.adjacency {
            Some(profiles_from(&adj, MatrixKind::A, 1..g.n(), threshold)?)
        } else {
            None
        };
        let report = DelocReport {
            seed,
            n: g.n(),
            smallest_c: smallest_exponent(&sweep, target),
            c_sweep: sweep,
            target_fraction: target,
            adjacency_min_fraction: adjacency
                .as_ref()
                .map(|ps| ps.iter().map(|p| p.fraction_above).fold(f64::INFINITY, f64::min)),
            second,
            linf,
            adjacency,
        };
        artifacts.push(Artifact::json(format!("deloc_seed{seed}.json"), &envelope("deloc", &report)));
        reports.push(report);
    }
    let lines = reports
        .iter()
        .map(|r| {
            let mut line = format!(
                "seed {}: v2 fraction above {:.3}/sqrt(n) = {:.4}{}; smallest C reaching {:.2}: {}",
                r.seed,
                params.threshold_scale,
                r.second.fraction_above,
                if r.second.degenerate { " (degenerate lambda_2)" } else { "" },
                r.target_fraction,
                r.smallest_c.map_or("none".to_string(), |c| c.to_string()),
            );
            if let Some(m) = r.adjacency_min_fraction {
                let _ = write!(line, "; adjacency min fraction {m:.4}");
            }
            line
        })
        .collect();
    if config.format == Format::Csv {
        let mut s = String::new();
        csv_line(&mut s, &["seed,c,threshold,fraction_above".into()]);
        for r in &reports {
            for p in &r.c_sweep {
                csv_line(&mut s, &[r.seed.to_string(), p.c.to_string(), p.threshold.to_string(), p.fraction_above.to_string()]);
            }
        }
        artifacts.push(Artifact::new("c_sweep.csv", s));
        let edges = histogram_edges();
        let mut h = String::new();
        csv_line(&mut h, &["seed,bin_low,bin_high,count".into()]);
        for r in &reports {
            for (k, c) in r.second.histogram.iter().enumerate() {
                csv_line(&mut h, &[r.seed.to_string(), edges[k].to_string(), edges[k + 1].to_string(), c.to_string()]);
            }
        }
        artifacts.push(Artifact::new("histogram.csv", h));
    }
    Ok(RunOutput {
        command: "deloc",
        artifacts,
        lines,
        exit_code: exit::SUCCESS,
    })
}

#[derive(Serialize)]
struct ConcReport {
    seed: u64,
    m: usize,
    bound_constant: f64,
    radii: Vec<LoBoundCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    projection: Option<ProjectionCheck>,
}

fn conc_estimate(params: &ConcParams, r: f64, seed: u64) -> Result<ConcEstimate> {
    Ok(match params.method {
        ConcMethodChoice::Auto => conc_1d(&params.spec, r, params.trials, seed)?,
        ConcMethodChoice::Exact => conc_exact_1d(&params.spec, r)?,
        ConcMethodChoice::MonteCarlo => conc_monte_carlo_1d(&params.spec, r, params.trials, seed)?,
    })
}

pub fn cmd_conc(config: &ExperimentConfig, params: &ConcParams) -> Result<RunOutput> {
    let mut artifacts = Vec::new();
    let mut reports = Vec::new();
    for &seed in &config.seeds {
        let radii = params
            .radii
            .iter()
            .map(|&r| Ok(lo_bound_with(&params.spec, r, conc_estimate(params, r, seed)?)?))
            .collect::<Result<Vec<_>>>()?;
        let projection = match &params.projection {
            Some(pr) => {
                let setup = ProjectionSetup::random(pr.d, pr.n, seed)?;
                Some(rv_projection_check(&setup, &params.spec, pr.t, params.trials, seed)?)
            }
            None => None,
        };
        let report = ConcReport {
            seed,
            m: params.spec.large_weight_count(),
            bound_constant: params.bound_constant,
            radii,
            projection,
        };
        artifacts.push(Artifact::json(format!("conc_seed{seed}.json"), &envelope("conc", &report)));
        reports.push(report);
    }
    let mut lines = Vec::new();
    for r in &reports {
        for c in &r.radii {
            lines.push(format!(
                "seed {}: r={} conc={:.6} implied C={:.4} ({} with C={})",
                r.seed,
                c.r,
                c.estimate.value,
                c.implied_c,
                if c.holds_with(r.bound_constant) { "holds" } else { "violated" },
                r.bound_constant
            ));
        }
        if let Some(p) = &r.projection {
            lines.push(format!(
                "seed {}: projected conc={:.6} (q={:.6}, K={}) fitted C={:.4}",
                r.seed, p.estimate.value, p.q.value, p.k, p.fitted_c
            ));
        }
    }
    if config.format == Format::Csv {
        let mut s = String::new();
        csv_line(&mut s, &["seed,r,method,estimate,standard_error,bound,implied_c,holds".into()]);
        for rep in &reports {
            for c in &rep.radii {
                let method = serde_json::to_value(c.estimate.method).expect("serializable");
                csv_line(
                    &mut s,
                    &[
                        rep.seed.to_string(),
                        c.r.to_string(),
                        method.as_str().unwrap_or_default().to_string(),
                        c.estimate.value.to_string(),
                        c.estimate.standard_error.to_string(),
                        c.bound(rep.bound_constant).to_string(),
                        c.implied_c.to_string(),
                        c.holds_with(rep.bound_constant).to_string(),
                    ],
                );
            }
        }
        artifacts.push(Artifact::new("conc.csv", s));
    }
    Ok(RunOutput {
        command: "conc",
        artifacts,
        lines,
        exit_code: exit::SUCCESS,
    })
}

pub fn cmd_reproduce(config: &ExperimentConfig, params: &ReproduceParams) -> Result<RunOutput> {
    let seed = config.seeds[0];
    let results: Vec<CriterionResult> = run_suite(seed, params.scale, &params.criteria, &params.tolerances)?;
    let all = results.iter().all(|r| r.passed);
    let lines = results
        .iter()
        .map(|r| format!("[{}] {:>2} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.id, r.name, r.detail))
        .collect();
    let mut artifacts = vec![Artifact::json(
        "criteria.json",
        &envelope(
            "reproduce",
            BTreeMap::from([("seed", serde_json::json!(seed)), ("scale", serde_json::json!(params.scale)), ("criteria", serde_json::json!(results))]),
        ),
    )];
    if config.format == Format::Csv {
        let mut s = String::new();
        csv_line(&mut s, &["id,name,passed".into()]);
        for r in &results {
            csv_line(&mut s, &[r.id.to_string(), r.name.clone(), r.passed.to_string()]);
        }
        artifacts.push(Artifact::new("criteria.csv", s));
    }
    Ok(RunOutput {
        command: "reproduce",
        artifacts,
        lines,
        exit_code: if all { exit::SUCCESS } else { exit::REFUTED },
    })
}
