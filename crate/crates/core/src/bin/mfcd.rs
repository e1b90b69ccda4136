use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use mfcd::cli::{self, Outcome, RunConfig};

/// Mean-field counter-diabatic annealing experiments.
#[derive(Parser)]
#[command(name = "mfcd", version)]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// JSON run config; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps (overrides `workers`).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Replace every generator and measurement seed.
    #[arg(long, global = true)]
    seed_override: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Bloch trajectories with and without MFCD, plus fixed-point snapshots.
    Bloch,
    /// Final fidelity with and without CD over J and h seeds.
    FidelityBatch,
    /// Néel success probability versus annealing time.
    SuccessCurve,
    /// Rotating-frame annealer schedule and its linear baseline.
    ExportSchedule,
    /// Invariant suite.
    Verify,
}

fn report<S: Serialize>(outcome: mfcd::Result<Outcome<S>>) -> ExitCode {
    match outcome {
        Ok(o) => {
            match serde_json::to_string_pretty(&o.summary) {
                Ok(s) => println!("{s}"),
                Err(e) => eprintln!("cannot render summary: {e}"),
            }
            for f in &o.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::from(o.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::error_exit_code(&e) as u8)
        }
    }
}

fn resolve(args: &Args) -> mfcd::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(o) = &args.out {
        cfg.out_dir = o.clone();
    }
    if let Some(s) = args.seed_override {
        cfg.apply_seed_override(s);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match resolve(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out: &Path = &cfg.out_dir;
    match args.command {
        Command::Bloch => report(cli::cmd_bloch(&cfg, out)),
        Command::FidelityBatch => report(cli::cmd_fidelity_batch(&cfg, out)),
        Command::SuccessCurve => report(cli::cmd_success_curve(&cfg, out)),
        Command::ExportSchedule => report(cli::cmd_export_schedule(&cfg, out)),
        Command::Verify => report(cli::cmd_verify(&cfg, out)),
    }
}
