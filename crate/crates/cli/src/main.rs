use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use sand::experiment::{self, RunOptions};
use sand::SandError;

/// Run density-management experiments on simulated sensor networks.
#[derive(Parser)]
#[command(name = "sand", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every point and seed of a preset.
    Run {
        preset: String,
        /// Replications per sweep point.
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Scenario file whose keys override the preset's base config.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// List the available presets.
    ListPresets,
    /// Re-run every config recorded in a manifest.
    Replay {
        manifest: PathBuf,
        /// Output directory; defaults to the manifest's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the topology of a finished run after a given round.
    Snapshot {
        /// Run directory containing config.txt.
        run: PathBuf,
        #[arg(long)]
        round: u64,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error kind={} message={:?}", kind(&e), format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}

fn kind(e: &anyhow::Error) -> &'static str {
    match e.downcast_ref::<SandError>() {
        Some(SandError::Config(_)) => "config",
        Some(SandError::UnknownPreset(_)) => "unknown-preset",
        Some(SandError::Io { .. }) => "io",
        Some(SandError::Manifest(_)) => "manifest",
        None if e.downcast_ref::<std::io::Error>().is_some() => "io",
        None => "other",
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::ListPresets => {
            for p in experiment::presets() {
                println!(
                    "{:<14} {} = [{}], {} seeds: {}",
                    p.name,
                    p.axis.key(),
                    p.values.join(", "),
                    p.seeds,
                    p.description
                );
            }
        }
        Command::Run {
            preset,
            seeds,
            out,
            config,
        } => {
            let p = experiment::preset(&preset).ok_or(SandError::UnknownPreset(preset))?;
            let overrides = match config {
                Some(path) => Some(fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?),
                None => None,
            };
            let report = experiment::run_preset(&p, &RunOptions { seeds, out, overrides })?;
            println!("{} runs written to {}", report.runs, report.dir.display());
            println!("{}", experiment::summary_csv(&report.summary).trim_end());
        }
        Command::Replay { manifest, out } => {
            let report = experiment::replay(&manifest, out.as_deref())?;
            println!("{} runs written to {}", report.runs, report.dir.display());
        }
        Command::Snapshot { run, round, out } => {
            let text = experiment::snapshot_from_run(&run, round)?;
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}
