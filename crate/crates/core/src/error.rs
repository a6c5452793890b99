use thiserror::Error;

/// Errors raised by the library. Non-convergence of heuristic optimizers is
/// not an error; it is reported through `BoundReport::converged`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },
    #[error("marginal mismatch: {0}")]
    MarginalMismatch(String),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("empty typical set: {0}")]
    EmptyTypicalSet(String),
    #[error("infeasible witness: {0}")]
    InfeasibleWitness(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err(expected: impl ToString, found: impl ToString) -> Error {
    Error::ShapeMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
