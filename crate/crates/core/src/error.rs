//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Syntax error in a tree spec, node id, distribution file or strategy
    /// file. `pos` is a byte offset into the offending text where that makes
    /// sense, 0 otherwise.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Structurally invalid tree (arity < 2, height < 1, alternation
    /// violation, ...).
    #[error("invalid tree shape: {0}")]
    Shape(String),

    /// A node id does not denote a node of the tree at hand.
    #[error("unknown node: {0}")]
    UnknownNode(String),

    /// A leaf assignment is missing values or has the wrong length.
    #[error("bad assignment: {0}")]
    Assignment(String),

    /// Exact and float values were mixed within one computation.
    #[error("backend mismatch: {0}")]
    Backend(String),

    /// A probability is outside [0, 1] or a parameter outside its domain.
    #[error("probability out of range: {0}")]
    Probability(String),

    /// The requested root zero-probability cannot be attained.
    #[error("infeasible root probability: {0}")]
    Infeasible(String),

    /// The tree exceeds the configured optimizer leaf budget.
    #[error("leaf budget exceeded: tree has {leaves} leaves, budget is {budget}")]
    Budget { leaves: usize, budget: usize },

    /// A distribution violates an equilibrium problem's constraint.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// A strategy is structurally unusable (references unknown leaves,
    /// policy got stuck, ...). Semantic violations are reported through
    /// [`crate::strategy::ValidationReport`] instead.
    #[error("invalid strategy: {0}")]
    Strategy(String),

    /// Invariant breakage inside the engine; never expected on valid input.
    #[error("internal error: {0}")]
    Internal(String),
}
