//! Semidecision verdicts.
//!
//! A `Falsified` verdict is conclusive and carries a witness. A
//! `ConsistentAfterBudget` verdict only records that the configured number of
//! samples found no counterexample.

use serde::{Deserialize, Serialize};

use crate::tuple::NonNegTuple;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    ConsistentAfterBudget,
    Falsified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Point {
        a: NonNegTuple,
    },
    Pair {
        a: NonNegTuple,
        b: NonNegTuple,
    },
    Triple {
        a: NonNegTuple,
        b: NonNegTuple,
        c: NonNegTuple,
    },
    /// A point inside `[0, delta)^n` where `F` stays above the continuity tolerance.
    Continuity {
        delta: f64,
        a: NonNegTuple,
        value: f64,
    },
    /// A point with `F(a) < delta` outside the radius-`radius` box neighbourhood of the zero set.
    Usc {
        radius: f64,
        delta: f64,
        a: NonNegTuple,
    },
    /// A sequence whose convergence differs between two topologies.
    Sequence {
        sequence: String,
        epsilon: f64,
        index: usize,
        converges_in_reference: bool,
        converges_aggregated: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Witness>,
    /// Random draws consumed; equals the budget when no witness was found.
    pub samples_used: u64,
    /// Deterministic grid candidates examined before random sampling.
    pub grid_checked: u64,
    pub seed: u64,
}

impl Verdict {
    pub fn consistent(budget: u64, grid_checked: u64, seed: u64) -> Self {
        Self {
            status: Status::ConsistentAfterBudget,
            witness: None,
            samples_used: budget,
            grid_checked,
            seed,
        }
    }

    pub fn falsified(witness: Witness, samples_used: u64, grid_checked: u64, seed: u64) -> Self {
        Self {
            status: Status::Falsified,
            witness: Some(witness),
            samples_used,
            grid_checked,
            seed,
        }
    }

    pub fn is_falsified(&self) -> bool {
        self.status == Status::Falsified
    }

    pub fn is_consistent(&self) -> bool {
        self.status == Status::ConsistentAfterBudget
    }
}
