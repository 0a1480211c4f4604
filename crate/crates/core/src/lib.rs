//! Approximating control problems for voting rules.
//!
//! Elections, winner determination and two-stage partition control live in
//! [`election`]; control instances, feasibility and measures in [`control`];
//! the covering-integer-program machinery in [`cip`] and the approximation
//! algorithms built on it in [`approx`]. [`reductions`] holds the gadget
//! constructions from classic covering problems, [`oracles`] the brute-force
//! solvers used to check everything else, and [`gen`] seeded instance
//! generators.

pub mod approx;
pub mod cip;
pub mod control;
pub mod election;
pub mod error;
pub mod gen;
pub mod oracles;
pub mod reductions;

pub use error::{Error, Result};
