//! Aggregation of quasi-pseudometrics.
//!
//! A function `F: [0, ∞)^n → [0, ∞)` combines `n` distances into one, either on
//! the product of `n` spaces or on one set carrying `n` distances. This crate
//! evaluates such functions, semidecides their algebraic properties by grid
//! and seeded random search, places them in the lattice of sixteen aggregation
//! classes, and checks the resulting topologies on finite spaces.

pub mod aggregators;
pub mod alexandrov;
pub mod classifier;
pub mod error;
mod par;
pub mod probe;
pub mod sampling;
pub mod spaces;
pub mod tuple;
pub mod verdict;

pub use error::{Error, Result};
