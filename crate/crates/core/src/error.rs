//! Error type shared by all subsystems.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// One or more configuration invariants are violated; every violation is
    /// listed, not just the first.
    #[error("validation failed: {}", violations.join("; "))]
    Validation { violations: Vec<String> },

    /// The instance admits no feasible action (e.g. budget below the
    /// cheapest power level).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// No power level lies at or above the budget; callers may fall back to
    /// the largest level.
    #[error("no power level at or above the budget")]
    NoneAbove,

    /// An operation requires every user to see the full channel set.
    #[error("topology: {0}")]
    Topology(String),

    /// Mismatched vector/matrix dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A user is never served, so its long-run age is infinite.
    #[error("divergent age: user {user} has zero delivery probability")]
    Divergent { user: usize },

    /// The success matrix lacks the structure the operation requires.
    #[error("structure: {0}")]
    Structure(String),
}

impl Error {
    pub fn validation(violations: Vec<String>) -> Self {
        Error::Validation { violations }
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
}
