use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the crate, split so callers can
/// distinguish bad input (rejected up front) from numerical trouble
/// (well-formed input that the solvers could not handle).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("{what} {requested} exceeds limit {limit}")]
    SizeLimit {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("entry ({row},{col}) specified more than once")]
    DuplicateEntry { row: usize, col: usize },

    #[error("conflicting symmetric entries at ({row},{col}): {a} vs {b}")]
    Asymmetry { row: usize, col: usize, a: f64, b: f64 },

    #[error("matrix is not valid here: {0}")]
    Validation(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("ground-state component {index} is not strictly positive ({value:.3e})")]
    Positivity { index: usize, value: f64 },

    #[error("ground state does not match this matrix: max degree-identity violation {residual:.3e}")]
    StaleGroundState { residual: f64 },

    #[error("lowest eigenvalues are nearly degenerate (gap {gap:.3e}); the excited eigenvector direction is unreliable")]
    NearDegenerate { gap: f64 },

    #[error("degenerate cut: subset must be nonempty, proper, and capacity-feasible ({0})")]
    DegenerateCut(String),

    #[error("degenerate partition: both sides must be nonempty")]
    DegeneratePartition,

    #[error("cut family produced no feasible cut")]
    EmptyFamily,

    #[error("degenerate reduction: {0}")]
    DegenerateReduction(String),

    #[error("invalid support set: {0}")]
    Support(String),

    #[error("flow capacities span too wide a range for {0:.1} bits of integer precision")]
    FlowPrecision(f64),
}

impl Error {
    /// True for failures of a numerical process on well-formed input, as
    /// opposed to input/validation errors. The CLI maps the two classes to
    /// different exit codes.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. }
                | Error::Positivity { .. }
                | Error::StaleGroundState { .. }
                | Error::NearDegenerate { .. }
                | Error::FlowPrecision(_)
        )
    }
}
