//! Seeded experiment runner for `braess-spectral`.
//!
//! A run is described by an [`ExperimentConfig`] (JSON), executed in memory by
//! [`run`], and written out by [`write_run`] together with a manifest holding
//! SHA-256 digests of every artifact.

pub mod commands;
pub mod config;
pub mod reproduce;

pub use commands::{run, write_run, Artifact, RunManifest, RunOutput};
pub use config::{Command, ExperimentConfig, Format};

/// Environment variable holding the default worker count.
pub const JOBS_ENV: &str = "BRAESS_JOBS";
