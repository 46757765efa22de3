use thiserror::Error;

/// Errors raised by kernel construction and the geometric operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state space must have at least 2 states, got {0}")]
    InvalidSize(usize),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid entry at ({row}, {col}): {value}")]
    InvalidEntry { row: usize, col: usize, value: f64 },

    #[error("row {row} sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("support graph is not strongly connected")]
    NotIrreducible,

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("row marginal of state {0} is degenerate")]
    DegenerateMarginal(usize),

    #[error("edge measure is invalid: {0}")]
    InvalidEdgeMeasure(String),

    #[error("kernel is not reversible (balance residual {0:e})")]
    NotReversible(f64),

    #[error("edge measure is not symmetric")]
    NotSymmetric,

    #[error("support is not symmetric")]
    AsymmetricSupport,

    #[error("E intersected with its transpose is not strongly connected")]
    IntersectionNotConnected,

    #[error("coordinates are infeasible: {0}")]
    InfeasibleCoords(String),

    #[error("cycle enumeration limited to {max} states, got {got}")]
    TooLarge { got: usize, max: usize },

    #[error("family specification is invalid: {0}")]
    InvalidFamily(String),

    #[error("Perron-Frobenius iteration did not converge after {0} iterations")]
    ConvergenceFailure(usize),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::ConvergenceFailure(_) | Error::NumericalFailure(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
