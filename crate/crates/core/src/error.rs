use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by fitting, prediction, data loading and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate bandwidth {bandwidth} (median {median}, percentage {percentage})")]
    DegenerateBandwidth {
        bandwidth: f64,
        median: f64,
        percentage: f64,
    },

    /// The normal system is numerically singular. `fallback` holds the
    /// minimum-norm least-squares coefficients so callers can still proceed.
    #[error("near-singular system (condition number {condition:e}, rank {rank}/{order})")]
    NearSingularSystem {
        condition: f64,
        rank: usize,
        order: usize,
        fallback: Vec<f64>,
    },

    #[error("pre-image denominator {value:e} fell below floor at iteration {iteration}")]
    DegenerateDenominator { value: f64, iteration: usize },

    #[error("integration produced a non-finite state at step {step}")]
    IntegrationBlowup { step: usize },

    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("non-numeric value {value:?} in column {column} at line {line}")]
    NonNumeric { line: usize, column: usize, value: String },

    #[error("no numeric values found in {}", .0.display())]
    EmptySeries(PathBuf),

    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("hyperparameter selection failed: every grid point failed on some inner frame")]
    SelectionFailed,
}

pub type Result<T> = std::result::Result<T, Error>;
