//! Exact solvers for Bayesian persuasion where the receiver picks a
//! combinatorial action: an independent set of a matroid, or a source-sink
//! path when minimizing cost.
//!
//! The main entry points are [`persuasion::solve_full`],
//! [`persuasion::solve_reduced`], [`cce::solve_cce_exact`] and
//! [`cce::solve_cce_approx`]. All arithmetic is exact.

#![allow(clippy::needless_range_loop)]

pub mod arrangement;
pub mod best_response;
pub mod cce;
pub mod cli;
pub mod error;
pub mod field;
pub mod json;
pub mod lp;
pub mod matroid;
pub mod model;
pub mod persuasion;
pub mod reductions;

pub use error::{Error, Result};
pub use field::Rational;
pub use model::{ActionSet, ConstraintSpec, Instance, Posterior, Sense, SignalingScheme, UtilitySpec};
