use std::path::PathBuf;

use thiserror::Error;

/// Every failure the solver can report. Cell and step indices are 1-based.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {axis} upper bound {high} must exceed lower bound {low}")]
    DomainOrder { axis: &'static str, low: f64, high: f64 },

    #[error("transport stencil needs at least 5 spatial cells, got n_x = {0}")]
    StencilTooSmall(usize),

    #[error("velocity grid needs at least 3 cells, got n_v = {0}")]
    TooFewVelocityCells(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("field shape {found_x}x{found_v} does not match grid {expected_x}x{expected_v}")]
    ShapeMismatch {
        expected_x: usize,
        expected_v: usize,
        found_x: usize,
        found_v: usize,
    },

    #[error("non-finite value {value} in distribution at cell ({cell}, {velocity})")]
    NonFinite { cell: usize, velocity: usize, value: f64 },

    #[error("non-positive density {value:e} in cell {cell}")]
    NonPositiveDensity { cell: usize, value: f64 },

    #[error("non-positive temperature {value:e} in cell {cell}")]
    NonPositiveTemperature { cell: usize, value: f64 },

    #[error("singular moment correction in cell {cell}: det = {det:e}, sums = {sums:?}")]
    SingularCorrection { cell: usize, det: f64, sums: [f64; 5] },

    #[error("collision sub-step needs h > 0 and epsilon > 0 (h = {h}, epsilon = {epsilon})")]
    InvalidCollision { h: f64, epsilon: f64 },

    #[error("step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }

    /// Strips any step context and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors raised by the numerics (as opposed to config or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::NonFinite { .. }
                | Error::NonPositiveDensity { .. }
                | Error::NonPositiveTemperature { .. }
                | Error::SingularCorrection { .. }
                | Error::InvalidCollision { .. }
                | Error::ShapeMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
