use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use braess_cli::commands::exit;
use braess_cli::{run, write_run, Command, ExperimentConfig, Format, RunManifest, JOBS_ENV};
use clap::{Args, Parser, Subcommand};

/// Spectral-gap perturbation experiments on G(n, p) random graphs.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Sample G(n, p) graphs and write them as fixtures.
    Sample(Common),
    /// Classify edge additions and removals by the sign of the spectral-gap change.
    Perturb(Common),
    /// Certify typicality of graph instances (exit 2 when refuted).
    Typical(Common),
    /// Eigenvector entry-magnitude profiles and the exponent sweep.
    Deloc(Common),
    /// Small-ball concentration estimates and bound comparisons.
    Conc(Common),
    /// Run the acceptance suite and print a pass/fail table (exit 2 on any failure).
    Reproduce(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; its command must match the subcommand.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replaces the config's seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads [default: config value, else all cores].
    #[arg(long, env = JOBS_ENV)]
    jobs: Option<usize>,
}

impl Sub {
    fn split(self) -> (&'static str, Common) {
        match self {
            Sub::Sample(c) => ("sample", c),
            Sub::Perturb(c) => ("perturb", c),
            Sub::Typical(c) => ("typical", c),
            Sub::Deloc(c) => ("deloc", c),
            Sub::Conc(c) => ("conc", c),
            Sub::Reproduce(c) => ("reproduce", c),
        }
    }
}

fn load_config(name: &str, common: &Common) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => {
            let bytes = std::fs::read(path).with_context(|| format!("reading config {}", path.display()))?;
            let config = ExperimentConfig::from_json_bytes(&bytes).with_context(|| format!("config {}", path.display()))?;
            ensure!(
                config.command.name() == name,
                "config describes `{}` but the subcommand is `{name}`",
                config.command.name()
            );
            config
        }
        None => ExperimentConfig::new(Command::default_for(name)?),
    };
    if let Some(seed) = common.seed {
        config.seeds = vec![seed];
    }
    if let Some(out) = &common.out {
        config.output_path = Some(out.clone());
    }
    if let Some(format) = common.format {
        config.format = format;
    }
    if common.jobs.is_some() {
        config.jobs = common.jobs;
    }
    config.validate()?;
    Ok(config)
}

fn execute(name: &str, common: Common) -> Result<u8> {
    let config = load_config(name, &common)?;
    let jobs = config
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let start = Instant::now();
    let output = pool.install(|| run(&config))?;
    let manifest = RunManifest::new(&config, &output, start.elapsed());
    let dir = config.output_path.clone().unwrap_or_else(|| PathBuf::from("braess-out"));
    write_run(&dir, &output, &manifest)?;
    for line in &output.lines {
        println!("{line}");
    }
    println!(
        "wrote {} artifacts to {} (result digest {})",
        output.artifacts.len() + 1,
        dir.display(),
        manifest.result_digest
    );
    Ok(output.exit_code)
}

fn main() -> ExitCode {
    let (name, common) = Cli::parse().command.split();
    match execute(name, common) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::ERROR)
        }
    }
}
