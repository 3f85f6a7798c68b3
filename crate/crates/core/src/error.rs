use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Shapes of blocks, algebras or subalgebras do not line up.
    #[error("structural mismatch: {0}")]
    Structural(String),

    /// An input violated a documented contract (Hermiticity, state axioms, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A precondition of the operation does not hold for this input.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The input is a degenerate case the operation cannot handle (e.g. a zero element).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The iterative solver ran out of budget before closing its bracket.
    #[error("iteration budget exceeded after {iterations} iterations; best bracket [{lower}, {upper}]")]
    BudgetExceeded { lower: f64, upper: f64, iterations: usize },

    /// A certificate could not be produced or failed verification.
    #[error("certification failed: {0}")]
    Certification(String),

    /// Caratheodory reduction hit a rank failure.
    #[error("reduction failed: {0}")]
    Reduction(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Failure inside one trial of a property check.
    #[error("trial {index}: {source}")]
    Trial { index: usize, source: Box<Error> },
}

impl Error {
    /// The innermost error, looking through trial wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
