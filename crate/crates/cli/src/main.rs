use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sscd_cli::{cmd_compare, cmd_phantom, cmd_radon, cmd_solve, Outcome, RunConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Sparse and TV regularized tomography with a globalized semismooth Newton solver.
///
/// Exit status: 0 when the solver converged, 2 when it stagnated or hit its
/// iteration limit, 1 for configuration and I/O errors. SSCD_THREADS sets the
/// number of worker threads.
#[derive(Parser, Debug)]
#[command(name = "sscd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reconstruct from a config file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.directory`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `problem.seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the Newton solver and FISTA on the same p = 1 problem.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a phantom as PGM and CSV.
    Phantom {
        n1: usize,
        n2: usize,
        /// shepp, blocks or spikes
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the Radon matrix (Matrix Market) and the clean sinogram of an image CSV.
    Radon {
        image: PathBuf,
        #[arg(long)]
        angles: usize,
        /// Detector bins; defaults to ceil(sqrt(2) max(n1, n2)).
        #[arg(long)]
        offsets: Option<usize>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn configure_threads() -> Result<()> {
    let Some(v) = std::env::var_os("SSCD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .to_str()
        .and_then(|s| s.trim().parse().ok())
        .filter(|n| *n > 0)
        .with_context(|| format!("SSCD_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn load(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<(RunConfig, PathBuf)> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(s) = seed {
        cfg.problem.seed = s;
    }
    let out = out.unwrap_or_else(|| cfg.output.directory.clone());
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<Option<Outcome>> {
    configure_threads()?;
    Ok(match cli.command {
        Command::Solve { config, out, seed } => {
            let (cfg, out) = load(&config, seed, out)?;
            Some(cmd_solve(&cfg, &out)?)
        }
        Command::Compare { config, out, seed } => {
            let (cfg, out) = load(&config, seed, out)?;
            Some(cmd_compare(&cfg, &out)?)
        }
        Command::Phantom { n1, n2, name, out, seed } => {
            cmd_phantom(n1, n2, &name, seed, &out)?;
            None
        }
        Command::Radon { image, angles, offsets, out } => {
            cmd_radon(&image, angles, offsets, &out)?;
            None
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(None | Some(Outcome::Converged)) => ExitCode::SUCCESS,
        Ok(Some(Outcome::Stalled(why))) => {
            eprintln!("sscd: {why}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("sscd: {e:#}");
            ExitCode::from(1)
        }
    }
}
