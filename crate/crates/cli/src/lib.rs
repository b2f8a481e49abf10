//! Library side of the `avwiretap` command: configuration, result tables and
//! the subcommands, kept separate from argument parsing so they can be
//! tested in-process.

pub mod commands;
pub mod config;
pub mod table;

use std::path::PathBuf;

use avwiretap::{Convention, WiretapError};
use clap::{Parser, Subcommand};
use thiserror::Error;

use config::RunConfig;
use table::ResultTable;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("resource cap: {0}")]
    Resource(String),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Verify(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<WiretapError> for CliError {
    fn from(e: WiretapError) -> Self {
        match e {
            WiretapError::ResourceCap(m) => CliError::Resource(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "avwiretap", version, about = "Secrecy rates and toy-scale wiretap code experiments")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = "WIRETAP_CONFIG")]
    pub config: Option<PathBuf>,
    /// Master seed for every Monte Carlo stream.
    #[arg(long, global = true, env = "WIRETAP_SEED")]
    pub seed: Option<u64>,
    /// Output CSV path; stdout when absent.
    #[arg(long, global = true, env = "WIRETAP_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true, env = "WIRETAP_THREADS")]
    pub threads: Option<usize>,
    /// Capacity convention: full = log2(1 + x), half = 0.5 log2(1 + x).
    #[arg(long, global = true, env = "WIRETAP_CONVENTION")]
    pub convention: Option<Convention>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Secrecy rate, leakage and converse over a power grid.
    Rate,
    /// MAC or BC secrecy rate region with its convex hull.
    Region,
    /// Toy-scale codebook simulation over blocklengths.
    Simulate,
    /// Bound and invariance checks; exits 2 if any fails.
    Verify,
    /// Parameter schedule, feasibility flags and minimal lengths.
    Schedule,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Rate => "rate",
            Command::Region => "region",
            Command::Simulate => "simulate",
            Command::Verify => "verify",
            Command::Schedule => "schedule",
        }
    }
}

/// Loads the config and applies flag overrides.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.convention.is_some() {
        cfg.convention = cli.convention;
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.display().to_string());
    }
    Ok(cfg)
}

/// Runs one command and returns its table plus the verification outcome.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<(ResultTable, bool), CliError> {
    let (mut table, ok) = match command {
        Command::Rate => (commands::cmd_rate(cfg)?, true),
        Command::Region => (commands::cmd_region(cfg)?, true),
        Command::Simulate => (commands::cmd_simulate(cfg)?, true),
        Command::Verify => commands::cmd_verify(cfg)?,
        Command::Schedule => (commands::cmd_schedule(cfg)?, true),
    };
    table.meta("avwiretap", env!("CARGO_PKG_VERSION"));
    table.meta("command", command.name());
    table.meta("config_sha256", cfg.hash());
    table.meta("seed", cfg.seed.map_or("none".to_string(), |s| s.to_string()));
    table.meta("convention", format!("{:?}", cfg.convention()).to_lowercase());
    Ok((table, ok))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))?;
    }
    let cfg = effective_config(cli)?;
    let (table, ok) = execute(cli.command, &cfg)?;
    table.write(cfg.output.as_deref().map(std::path::Path::new))?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Verify("at least one check failed".into()))
    }
}
