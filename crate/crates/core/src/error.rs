use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A ballot of the wrong kind was handed to a rule (rankings vs. approval sets).
    #[error("ballot kind mismatch: {0}")]
    BallotKind(String),

    /// An argument lies outside the operation's domain (unknown id, malformed partition, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A construction's precondition does not hold; callers should use an exact path instead.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The control goal cannot be reached (or the covering program has no feasible point).
    #[error("no solution")]
    NoSolution,

    /// A covering integer program with `A d < b` in some row.
    #[error("covering program is infeasible")]
    Infeasible,

    /// A search exceeded its node budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
