//! Points of the cone `[0, ∞)^n` and triangle triplets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `[0, ∞)^n` with `n ≥ 1`.
///
/// Entries are finite and nonnegative. The arity stands in for the index set
/// of the aggregated family, so only finite index sets are representable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct NonNegTuple(Vec<f64>);

impl NonNegTuple {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidTuple("arity must be at least 1".into()));
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::Domain { index, value });
        }
        // normalise -0.0 so equality and serialisation are canonical
        Ok(Self(values.into_iter().map(|v| v + 0.0).collect()))
    }

    /// The zero element `0_n`.
    pub fn zeros(arity: usize) -> Self {
        assert!(arity >= 1, "arity must be at least 1");
        Self(vec![0.0; arity])
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    /// Componentwise sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_arity(self, other)?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// Componentwise order `self ≤ other`.
    pub fn le(&self, other: &Self) -> Result<bool> {
        check_arity(self, other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    /// Replace entry `i`, keeping the tuple valid.
    pub fn with(&self, i: usize, value: f64) -> Result<Self> {
        let mut values = self.0.clone();
        values[i] = value;
        Self::new(values)
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self(values)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for NonNegTuple {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<NonNegTuple> for Vec<f64> {
    fn from(t: NonNegTuple) -> Self {
        t.0
    }
}

impl fmt::Display for NonNegTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

fn check_arity(a: &NonNegTuple, b: &NonNegTuple) -> Result<()> {
    if a.arity() != b.arity() {
        return Err(Error::Dimension {
            expected: a.arity().to_string(),
            found: b.arity(),
        });
    }
    Ok(())
}

/// `(a, b, c)` with `a ≤ b + c`, `b ≤ a + c` and `c ≤ a + b` componentwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleTriplet {
    a: NonNegTuple,
    b: NonNegTuple,
    c: NonNegTuple,
}

impl TriangleTriplet {
    pub fn new(a: NonNegTuple, b: NonNegTuple, c: NonNegTuple) -> Result<Self> {
        if !is_triangle_triplet(&a, &b, &c)? {
            return Err(Error::InvalidTuple(format!(
                "({a}, {b}, {c}) is not a triangle triplet"
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> &NonNegTuple {
        &self.a
    }

    pub fn b(&self) -> &NonNegTuple {
        &self.b
    }

    pub fn c(&self) -> &NonNegTuple {
        &self.c
    }

    pub fn into_parts(self) -> (NonNegTuple, NonNegTuple, NonNegTuple) {
        (self.a, self.b, self.c)
    }

    pub(crate) fn from_raw(a: NonNegTuple, b: NonNegTuple, c: NonNegTuple) -> Self {
        debug_assert!(is_triangle_triplet(&a, &b, &c).unwrap_or(false));
        Self { a, b, c }
    }
}

/// Exact componentwise triangle-triplet test; no tolerance is applied.
pub fn is_triangle_triplet(a: &NonNegTuple, b: &NonNegTuple, c: &NonNegTuple) -> Result<bool> {
    check_arity(a, b)?;
    check_arity(a, c)?;
    Ok(a
        .values()
        .iter()
        .zip(b.values())
        .zip(c.values())
        .all(|((&x, &y), &z)| scalar_triplet(x, y, z)))
}

#[inline]
pub(crate) fn scalar_triplet(x: f64, y: f64, z: f64) -> bool {
    x <= y + z && y <= x + z && z <= x + y
}
