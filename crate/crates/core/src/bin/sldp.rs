use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sldp::config::{ExperimentConfig, ExperimentKind};
use sldp::experiment::{k_sweep_path, run_classify_experiment, run_demo, run_mean_experiment, run_spatial_experiment, write_rows};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Mean,
    Classify,
    Spatial,
    Demo,
}

/// Runs one experiment and writes its results as CSV.
#[derive(Debug, Parser)]
#[command(name = "sldp", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// `key = value` configuration file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated privacy budgets, `inf` disables noise.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output file, or directory for `demo`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: &Cli) -> sldp::Result<()> {
    let kind = match cli.command {
        Command::Mean => ExperimentKind::Mean,
        Command::Classify => ExperimentKind::Classify,
        Command::Spatial => ExperimentKind::Spatial,
        Command::Demo => ExperimentKind::Demo,
    };
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(kind, path)?,
        None => ExperimentConfig::defaults(kind),
    };
    for (key, value) in [("eps", &cli.eps), ("trials", &cli.trials), ("seed", &cli.seed)] {
        if let Some(v) = value {
            cfg.set_override(key, v)?;
        }
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }

    match kind {
        ExperimentKind::Mean => {
            let rows = run_mean_experiment(&cfg)?;
            write_rows(&cfg.out, &rows)?;
            eprintln!("wrote {} rows to {}", rows.len(), cfg.out.display());
        }
        ExperimentKind::Classify => {
            let res = run_classify_experiment(&cfg)?;
            let sweep = k_sweep_path(&cfg.out);
            write_rows(&cfg.out, &res.grid)?;
            write_rows(&sweep, &res.k_sweep)?;
            eprintln!("wrote {} rows to {} and {} to {}", res.grid.len(), cfg.out.display(), res.k_sweep.len(), sweep.display());
        }
        ExperimentKind::Spatial => {
            let rows = run_spatial_experiment(&cfg)?;
            write_rows(&cfg.out, &rows)?;
            eprintln!("wrote {} rows to {}", rows.len(), cfg.out.display());
        }
        ExperimentKind::Demo => {
            let demo = run_demo(&cfg)?;
            demo.write(&cfg.out)?;
            eprintln!("wrote {} cells and {} points to {}", demo.partition.len(), demo.clean.len(), cfg.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
