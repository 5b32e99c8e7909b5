use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The caller handed us something malformed: unknown vertex, offset out
    /// of range, empty boundary set, and so on.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The target space does not implement the requested operation
    /// (e.g. ball intersection witnesses in the Euclidean plane).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A condition that is guaranteed by construction failed at runtime.
    /// This always indicates a defect and is never patched over.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// A game strategy produced an illegal move.
    #[error("illegal move by player {player}: {reason}")]
    StrategyFault { player: &'static str, reason: String },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
