use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("conditioning set is singular (det = {det:e})")]
    SingularConditioning { det: f64 },

    #[error("numerical conditioning failure: {0}")]
    Conditioning(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("capacity exceeded: {what} needs {needed}, limit {limit}")]
    Capacity {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Local search hit its iteration cap. Carries the best set found so far.
    #[error("local search did not certify a local maximum within {iters} iterations (best value {value:e})")]
    IncompleteSearch {
        iters: usize,
        best: Vec<usize>,
        value: f64,
    },

    #[error("ratio undefined: {0}")]
    UndefinedRatio(String),

    #[error("walk trapped: up-step from {from:?} has no positive-mass superset")]
    TrappedState { from: Vec<usize> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
