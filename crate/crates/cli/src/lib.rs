//! Experiment runner for the balanced Tikhonov-TV solver.

pub mod config;
pub mod decompose;
pub mod error;
pub mod experiment;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use tiktv::admm::Mode;

pub use config::{Experiment, ExperimentConfig, ImageFormat};
pub use error::CliError;
pub use experiment::{build_cases, run_experiment, ModeResult, Report};

/// Default output root when neither `--out` nor an `output` key is given.
pub const OUT_ROOT_ENV: &str = "TIKTV_OUT";

#[derive(Debug, Parser)]
#[command(name = "tiktv", version, about = "Balanced Tikhonov-TV inversion experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Solve {
        config: PathBuf,
        /// Output directory (overrides the `output` key).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Iteration cap applied to every mode.
        #[arg(long)]
        max_iter: Option<usize>,
        /// Mode to run; repeat to run several (replaces the `modes` key).
        #[arg(long = "mode")]
        modes: Vec<String>,
    },
}

/// Where results go: `--out`, then the config's `output` key, then
/// `$TIKTV_OUT/<config stem>`, then `out/<config stem>`.
pub fn output_dir(cli_out: Option<&Path>, cfg: &ExperimentConfig, config_path: &Path) -> PathBuf {
    if let Some(p) = cli_out {
        return p.to_path_buf();
    }
    if let Some(p) = &cfg.output {
        return p.clone();
    }
    let stem = config_path
        .file_stem()
        .map(|s| s.to_os_string())
        .unwrap_or_else(|| cfg.experiment.name().into());
    let root = std::env::var_os(OUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"));
    root.join(stem)
}

pub fn execute(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::Solve { config, out, seed, max_iter, modes } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(k) = max_iter {
                if k == 0 {
                    return Err(CliError::Config("--max-iter must be at least 1".into()));
                }
                for m in Mode::ALL {
                    cfg.solver_for_mut(m).max_iter = k;
                }
            }
            if !modes.is_empty() {
                let mut parsed = Vec::new();
                for m in &modes {
                    let m: Mode = m.parse().map_err(|e: tiktv::Error| CliError::Config(e.to_string()))?;
                    if !parsed.contains(&m) {
                        parsed.push(m);
                    }
                }
                cfg.modes = parsed;
            }
            cfg.validate()?;
            let dir = output_dir(out.as_deref(), &cfg, &config);
            run_experiment(&cfg, &dir)
        }
    }
}
