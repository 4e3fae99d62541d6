use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value or key failed validation.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("scenario cannot host the fleet: {0}")]
    Scenario(String),

    #[error("line {line}: cannot parse field `{field}` (column {column}): {reason}")]
    Parse {
        line: usize,
        field: &'static str,
        column: usize,
        reason: String,
    },

    #[error("reconciliation failed: {0}")]
    Reconcile(String),

    #[error("scaler dimension(s) {dims:?} are degenerate (max == min)")]
    DegenerateScaler { dims: Vec<usize> },

    #[error("band {band}: no feasible ghost location for sample {sample} after {attempts} attempts")]
    InfeasibleSample {
        band: String,
        sample: usize,
        attempts: usize,
    },

    #[error("band {band}: only {produced} of {requested} samples generated ({failures} infeasible source packets)")]
    InfeasibleBand {
        band: String,
        requested: usize,
        produced: usize,
        failures: usize,
    },

    #[error("training diverged at epoch {epoch}: loss {loss} exceeds 10x initial loss {initial}")]
    Divergence { epoch: usize, loss: f64, initial: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("missing artifact {}", .0.display())]
    MissingArtifact(PathBuf),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user-supplied configuration.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Scenario(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
