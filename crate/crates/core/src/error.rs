use thiserror::Error;

use crate::chordal::ChordalityWitness;
use crate::ctfp::SwapWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("expected a {expected}-way index set, got k = {actual}")]
    WrongArity { expected: usize, actual: usize },

    #[error("operation needs at least {min} axes, got k = {actual}")]
    TooFewAxes { min: usize, actual: usize },

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("swap condition fails: {0}")]
    ConditionFailed(SwapWitness),

    #[error("graph is not doubly chordal bipartite: {0}")]
    NotDoublyChordal(ChordalityWitness),

    #[error("clique poset is not a leveled tree: {0}")]
    NotTree(String),

    #[error("indicator recursion does not terminate: A_{u} and A_{v} overlap")]
    NonTerminatingRecursion { u: usize, v: usize },

    #[error("construction failed in block {block}: {reason}")]
    Construction { block: usize, reason: String },

    #[error("decomposition step {step} failed: {reason}")]
    DecompositionInvariant { step: usize, reason: String },

    #[error("zero marginal in block {block}, row {row}")]
    ZeroMarginal { block: usize, row: String },

    #[error("counts must be strictly positive on the exact path")]
    NonPositiveCounts,

    #[error("{0}")]
    Disconnected(String),

    #[error("theorem tripwire: {0}")]
    TheoremViolation(String),
}

impl Error {
    /// Whether the error reflects a failed internal verification rather than bad input.
    pub fn is_verification_failure(&self) -> bool {
        matches!(
            self,
            Error::NotTree(_)
                | Error::Construction { .. }
                | Error::DecompositionInvariant { .. }
                | Error::TheoremViolation(_)
                | Error::NonTerminatingRecursion { .. }
        )
    }
}
