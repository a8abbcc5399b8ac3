use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to identify the
/// failing stage, window, or file without a debugger.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("non-finite input `{name}`")]
    NonFinite { name: &'static str },

    #[error("log domain violated: mean_delay/120 + cc = {argument} must be > 0")]
    LogDomain { argument: f64 },

    #[error("insufficient samples: got {got}, need at least {required}")]
    InsufficientSamples { got: usize, required: usize },

    #[error("degenerate distribution: all {count} samples equal {value}")]
    DegenerateSamples { count: usize, value: f64 },

    #[error("degenerate regressor: traffic is constant at {value}")]
    DegenerateRegressor { value: f64 },

    #[error("quadrature did not converge: order cap {order} reached, last relative delta {delta:.3e}")]
    QuadratureDivergence { order: usize, delta: f64 },

    #[error("curve fit diverged: {reason}")]
    FitDivergence { reason: String },

    #[error(
        "no sign change after {expansions} bracket doublings: \
         f({lo:.6}) = {f_lo:.6e}, f({hi:.6}) = {f_hi:.6e}"
    )]
    BracketFailure {
        expansions: usize,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("root finder exceeded {max_iterations} iterations (best residual {residual:.3e})")]
    RootIterations {
        max_iterations: usize,
        residual: f64,
    },

    #[error("equilibrium failed for window {hour:02}:00: {source}")]
    WindowSolve {
        hour: u8,
        #[source]
        source: Box<Error>,
    },

    #[error(
        "demand target unreachable: observed traffic {target}, \
         maximum achievable {max_achievable} at demand cap {cap:.1e}"
    )]
    DemandUnreachable {
        target: f64,
        max_achievable: f64,
        cap: f64,
    },

    #[error("records cover no flights for hour windows {hours:?}")]
    MissingWindows { hours: Vec<u8> },

    #[error("calibration stage `{stage}` failed: {source}")]
    CalibrationStage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("zero denominator: {name}")]
    ZeroDenominator { name: &'static str },

    #[error("empty table")]
    EmptyTable,

    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },

    #[error("invalid synthetic spec: {reason}")]
    InvalidSpec { reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: missing required column `{column}`")]
    MissingColumn { path: PathBuf, column: String },

    #[error("{path}: no usable rows after filtering")]
    EmptyInput { path: PathBuf },

    #[error("model file schema version {got} not supported (expected {expected})")]
    SchemaVersion { got: u32, expected: u32 },
}

impl Error {
    /// True for errors caused by bad user input (files, config, preconditions)
    /// rather than by a numerical procedure failing to converge. The CLI maps
    /// usage errors to exit code 2 and numerical failures to exit code 1.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::NonFinite { .. }
                | Error::InsufficientSamples { .. }
                | Error::DegenerateSamples { .. }
                | Error::DegenerateRegressor { .. }
                | Error::MissingWindows { .. }
                | Error::ZeroDenominator { .. }
                | Error::EmptyTable
                | Error::InvalidGrid { .. }
                | Error::InvalidSpec { .. }
                | Error::Io { .. }
                | Error::Parse { .. }
                | Error::MissingColumn { .. }
                | Error::EmptyInput { .. }
                | Error::SchemaVersion { .. }
        ) || match self {
            Error::WindowSolve { source, .. } | Error::CalibrationStage { source, .. } => {
                source.is_usage()
            }
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
