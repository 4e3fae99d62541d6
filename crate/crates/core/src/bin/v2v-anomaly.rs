use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use v2v_anomaly::pipeline::{Pipeline, RunConfig};

#[derive(Parser)]
#[command(version, about = "Ghost-location anomaly detection on simulated V2V beacons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration; defaults apply to anything left out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding `run.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding `run.out`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress progress messages.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Simulate beaconing and write the packet log.
    Simulate,
    /// Extract features and write the hold-out and the anomaly datasets.
    Inject,
    /// Train the autoencoder and the one-class SVM.
    Train,
    /// Write ROC curves, the summary and detection rates.
    Eval,
    /// Print the results table.
    Report,
    /// All of the above in order.
    Run,
}

fn execute(cli: &Cli) -> v2v_anomaly::Result<()> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.run.seed = s;
    }
    if let Some(o) = &cli.out {
        config.run.out = o.clone();
    }
    let mut p = Pipeline::new(config)?;
    p.verbose = !cli.quiet;
    match cli.command {
        Command::Simulate => p.simulate().map(drop),
        Command::Inject => p.inject().map(drop),
        Command::Train => p.train().map(drop),
        Command::Eval => p.eval().map(drop),
        Command::Report => p.report().map(|r| print!("{r}")),
        Command::Run => p.run_all().map(|r| print!("{r}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
