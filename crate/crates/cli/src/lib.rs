//! Command-line driver for `frachs`.
//!
//! Each command reads an [`ExperimentConfig`], writes its result files named
//! by the config hash, and writes a manifest recording the effective
//! parameters, versions and timestamps. Result files contain no timestamps,
//! so the same config reproduces them byte for byte.

pub mod artifacts;
pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::Parser;

pub use commands::{check_scenario, execute, CheckReport, Command, Exit, Invocation};
pub use config::{ConfigError, Effective, ExperimentConfig, LambdaSpec};

#[derive(Debug, Parser)]
#[command(name = "frachs", version, about = "Variational numerics for fractional Hamiltonian systems")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML experiment config; the default preset when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Absolute lambda for solve and bvp.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Comma-separated absolute lambda ladder for sweep.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long)]
    pub domain: Option<f64>,
}

impl Cli {
    /// Loads the config and applies command-line overrides.
    pub fn invocation(&self) -> Result<Invocation, ConfigError> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::preset("default"),
        };
        if let Some(seed) = self.seed {
            config.run.seed = Some(seed);
        }
        if let Some(l) = self.lambda {
            config.run.lambda = Some(l);
            config.run.lambda_factor = None;
        }
        if let Some(ls) = &self.lambdas {
            config.run.lambdas = Some(ls.clone());
            config.run.lambda_factors = None;
        }
        if let Some(n) = self.grid_n {
            config.scenario.grid_n = Some(n);
        }
        if let Some(d) = self.domain {
            config.scenario.domain = Some(d);
        }
        let out_dir = self
            .out
            .clone()
            .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        let thread_cap = std::env::var("FRACHS_THREADS").ok().and_then(|v| v.trim().parse().ok());
        Ok(Invocation { command: self.command, config, out_dir, thread_cap })
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I) -> Exit
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Exit::Success,
                _ => Exit::Config,
            };
        }
    };
    match cli.invocation() {
        Ok(inv) => execute(&inv),
        Err(e) => {
            eprintln!("error: {e}");
            Exit::Config
        }
    }
}
