//! Upper bound on the relative entropy of entanglement from an inner
//! approximation of the separable set.
//!
//! The separable set is approximated by the convex hull of a finite pool of
//! pure product states. Minimizing the relative entropy over that hull gives
//! a value that can only overestimate the true minimum. The pool is refined
//! by active learning: candidates that carry weight in the optimum are kept
//! and resampled around, the rest are replaced.

mod active;
mod config;
mod pool;
mod simplex;

pub use active::{upper_bound, IterationRecord, SupportPoint, UpperBoundReport};
pub use config::ActiveLearningConfig;
pub use pool::{resample, select_useful, CandidatePool, Origin, PoolComposition};
pub use simplex::{
    mixture, simplex_gradient, simplex_objective, solve_simplex, solve_simplex_from, SimplexSolution,
};
