//! Command-line front end: one subcommand per experiment, TOML configuration,
//! CSV/JSON/SVG artifacts and a manifest. Exit status 0 ok, 2 configuration, 3 numerical.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

pub mod config;
pub mod output;
mod run;

pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "quasimodes",
    version,
    about = "Quasi-modes and conformal eigenvalue flow on surfaces of revolution"
)]
pub struct Cli {
    /// TOML run configuration; defaults apply when omitted
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// worker threads
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// also write SVG plots
    #[arg(long, global = true)]
    pub plot: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Oracle suite: closed forms, constant-factor scaling, Gauss-Bonnet
    Validate,
    /// Outer equator, Poincare map and classification
    Geodesic,
    /// Eigenvalues along the t-grid
    Spectrum,
    /// Gaussian beams: quasi-eigenvalues, defects, localization, capture
    Beam,
    /// Branch table, Hadamard check, monotonicity and sojourn audit
    Flow,
    /// Interval scheme, masses and bad-set audit
    Concentrate,
    /// Double-well doublets against one-well quasi-modes
    Doublewell {
        /// comma-separated values of hbar
        #[arg(long, value_delimiter = ',')]
        hbar: Vec<f64>,
    },
    /// Draw a conformal factor from the cube measure
    SampleMetric,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Geodesic => "geodesic",
            Command::Spectrum => "spectrum",
            Command::Beam => "beam",
            Command::Flow => "flow",
            Command::Concentrate => "concentrate",
            Command::Doublewell { .. } => "doublewell",
            Command::SampleMetric => "sample-metric",
        }
    }
}

/// Parse arguments, run, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let name = cli.command.name();
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("{name}: checks failed");
            3
        }
        Err(e) => {
            eprintln!("{name}: {e}");
            if e.is_config() {
                2
            } else {
                3
            }
        }
    }
}

/// Effective configuration after command-line overrides.
pub fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = jobs;
    }
    if let Some(out) = &cli.out {
        config.out = out.to_string_lossy().into_owned();
    }
    if let Command::Doublewell { hbar } = &cli.command {
        if !hbar.is_empty() {
            config.doublewell.hbar = hbar.clone();
        }
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<bool> {
    let config = effective_config(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let start = Instant::now();
    let echo = config.to_toml()?;
    let mut artifacts = output::Artifacts::new(std::path::Path::new(&config.out))?;
    let ok = pool.install(|| run::dispatch(&cli.command, &config, cli.plot, &mut artifacts))?;
    let manifest = output::Manifest {
        subcommand: cli.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        seed: config.seed,
        jobs: pool.current_num_threads(),
        config_sha256: output::sha256_hex(echo.as_bytes()),
        config: &echo,
        wall_time_s: start.elapsed().as_secs_f64(),
        files: artifacts
            .files()
            .iter()
            .map(|(name, sha256)| output::ManifestFile {
                name: name.clone(),
                sha256: sha256.clone(),
            })
            .collect(),
    };
    artifacts.json("manifest.json", &manifest)?;
    Ok(ok)
}
