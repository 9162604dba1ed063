//! Expected-cost analysis of AND-OR tree evaluation under independent leaf
//! distributions.
//!
//! The crate models the two-player game in which an evaluator adaptively
//! queries Boolean leaf values of an alternating AND-OR tree until the root
//! value is logically forced, paying one unit per query. Against an
//! independent distribution on the leaves it can:
//!
//! - price any explicit query strategy exactly (rational arithmetic) or
//!   approximately (floats / Monte Carlo),
//! - compute the optimal expected cost over all deterministic strategies,
//!   over depth-first strategies, and over directional depth-first
//!   strategies, extracting witness strategies for each,
//! - build the named strategies from the literature on small uniform trees
//!   (the lexicographic depth-first solver, its subtree-swapped variant, the
//!   sixteen height-2 crossing strategies, and the deferring height-3
//!   strategy that beats every depth-first strategy on a suitable
//!   distribution),
//! - search for max-min equilibria over independent distributions, with or
//!   without a fixed root zero-probability, and measure how close the
//!   maximizer is to an identical-marginal (IID) distribution.
//!
//! Everything that feeds a verification claim runs on exact rationals; the
//! equilibrium search runs on floats and re-evaluates its answer exactly at a
//! rationalized point.

pub mod catalog;
pub mod distribution;
pub mod equilibrium;
pub mod error;
pub mod oracle;
pub mod optimal;
pub mod scalar;
pub mod strategy;
pub mod tree;
pub mod verify;

pub use distribution::{CostValue, IndependentDistribution, Prob};
pub use error::Error;
pub use strategy::Strategy;
pub use tree::{Label, NodeId, Tree};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
