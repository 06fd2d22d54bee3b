//! Evaluable aggregation functions `F: [0, ∞)^n → [0, ∞)`.

mod parse;

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

pub use parse::parse_spec;

use crate::error::{Error, Result};
use crate::tuple::NonNegTuple;

/// Which input lengths an aggregator accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Arity {
    Fixed(usize),
    AtLeast(usize),
    Variadic,
}

impl Arity {
    pub fn accepts(self, n: usize) -> bool {
        n >= 1
            && match self {
                Arity::Fixed(k) => n == k,
                Arity::AtLeast(k) => n >= k,
                Arity::Variadic => true,
            }
    }

    /// Smallest accepted length.
    pub fn minimum(self) -> usize {
        match self {
            Arity::Fixed(k) | Arity::AtLeast(k) => k,
            Arity::Variadic => 1,
        }
    }

    /// Resolve a requested arity against this constraint, defaulting to the minimum.
    pub fn resolve(self, requested: Option<usize>) -> Result<usize> {
        let n = requested.unwrap_or(self.minimum());
        if self.accepts(n) {
            Ok(n)
        } else {
            Err(Error::Dimension {
                expected: self.to_string(),
                found: n,
            })
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Fixed(k) => write!(f, "{k}"),
            Arity::AtLeast(k) => write!(f, "at least {k}"),
            Arity::Variadic => write!(f, "any"),
        }
    }
}

pub type CustomFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A programmatic aggregator outside the built-in catalogue.
#[derive(Clone)]
pub struct Custom {
    pub name: String,
    pub func: CustomFn,
}

impl fmt::Debug for Custom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Custom").field("name", &self.name).finish()
    }
}

#[derive(Clone, Debug)]
pub enum Kind {
    Max,
    Min,
    WeightedSum(Vec<f64>),
    PNorm(f64),
    /// `Σ_{n=1..K} 2^{-n} a_n / (1 + a_n)`, the truncation of the countable series.
    Series(usize),
    /// One-based coordinate.
    Projection(usize),
    /// `x` up to the breakpoint 2, then `1 + 1/(x − 1)`; a non-monotone metric preserver.
    Dobos,
    /// 0 at 0, 1 elsewhere.
    Jump,
    /// 0 when `a_1 · a_2 = 0`, 1 otherwise.
    Indicator,
    Custom(Custom),
}

#[derive(Clone, Debug)]
pub struct AggregatorSpec {
    kind: Kind,
    arity: Arity,
}

impl AggregatorSpec {
    pub fn max() -> Self {
        Self { kind: Kind::Max, arity: Arity::Variadic }
    }

    pub fn min() -> Self {
        Self { kind: Kind::Min, arity: Arity::Variadic }
    }

    pub fn weighted_sum(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParams("weighted sum needs at least one weight".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidParams(format!("weight {w} is not a finite nonnegative number")));
        }
        let n = weights.len();
        Ok(Self { kind: Kind::WeightedSum(weights), arity: Arity::Fixed(n) })
    }

    pub fn pnorm(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidParams(format!("p-norm needs finite p >= 1, got {p}")));
        }
        Ok(Self { kind: Kind::PNorm(p), arity: Arity::Variadic })
    }

    pub fn series(truncation: usize) -> Result<Self> {
        if truncation < 1 {
            return Err(Error::InvalidParams("series truncation must be at least 1".into()));
        }
        Ok(Self { kind: Kind::Series(truncation), arity: Arity::Fixed(truncation) })
    }

    pub fn projection(coordinate: usize) -> Result<Self> {
        if coordinate < 1 {
            return Err(Error::InvalidParams("projection coordinates are one-based".into()));
        }
        Ok(Self { kind: Kind::Projection(coordinate), arity: Arity::AtLeast(coordinate) })
    }

    pub fn dobos() -> Self {
        Self { kind: Kind::Dobos, arity: Arity::Fixed(1) }
    }

    pub fn jump() -> Self {
        Self { kind: Kind::Jump, arity: Arity::Fixed(1) }
    }

    pub fn indicator() -> Self {
        Self { kind: Kind::Indicator, arity: Arity::Fixed(2) }
    }

    pub fn custom<F>(name: impl Into<String>, arity: Arity, func: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: Kind::Custom(Custom { name: name.into(), func: Arc::new(func) }),
            arity,
        }
    }

    /// Constant zero: aggregates every family into the indiscrete pseudometric.
    pub fn constant_zero() -> Self {
        Self::custom("zero", Arity::Variadic, |_| 0.0)
    }

    /// `a_1^2`; fails subadditivity and triangle-triplet preservation.
    pub fn square() -> Self {
        Self::custom("square", Arity::AtLeast(1), |a| a[0] * a[0])
    }

    /// `a_1 + 1`; does not vanish at zero.
    pub fn shift() -> Self {
        Self::custom("shift", Arity::AtLeast(1), |a| a[0] + 1.0)
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn check_arity(&self, n: usize) -> Result<()> {
        if self.arity.accepts(n) {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.arity.to_string(), found: n })
        }
    }

    /// Evaluate on a validated tuple.
    pub fn evaluate(&self, a: &NonNegTuple) -> Result<f64> {
        self.check_arity(a.arity())?;
        Ok(self.eval_unchecked(a.values()))
    }

    /// Evaluate on raw values, validating arity and domain.
    pub fn evaluate_slice(&self, a: &[f64]) -> Result<f64> {
        self.check_arity(a.len())?;
        if let Some((index, &value)) = a.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Domain { index, value });
        }
        Ok(self.eval_unchecked(a))
    }

    /// Evaluation together with the truncation bound for `Series`.
    pub fn evaluate_reported(&self, a: &NonNegTuple) -> Result<Evaluation> {
        let value = self.evaluate(a)?;
        let tail_bound = match self.kind {
            Kind::Series(k) => Some(series_tail_bound(k)),
            _ => None,
        };
        Ok(Evaluation { value, tail_bound })
    }

    /// Caller guarantees the arity is accepted and every entry is finite and nonnegative.
    pub(crate) fn eval_unchecked(&self, a: &[f64]) -> f64 {
        match &self.kind {
            Kind::Max => a.iter().copied().fold(0.0, f64::max),
            Kind::Min => a.iter().copied().fold(f64::INFINITY, f64::min),
            Kind::WeightedSum(w) => w.iter().zip(a).map(|(w, x)| w * x).sum(),
            Kind::PNorm(p) => pnorm(a, *p),
            Kind::Series(k) => a
                .iter()
                .take(*k)
                .enumerate()
                .map(|(n, &x)| 0.5f64.powi(n as i32 + 1) * (x / (1.0 + x)))
                .sum(),
            Kind::Projection(k) => a[k - 1],
            Kind::Dobos => dobos(a[0]),
            Kind::Jump => {
                if a[0] == 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            // `a_1 · a_2 = 0` tested factorwise so tiny products cannot underflow
            Kind::Indicator => {
                if a[0] == 0.0 || a[1] == 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            Kind::Custom(c) => (c.func)(a),
        }
    }
}

impl fmt::Display for AggregatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Max => write!(f, "max"),
            Kind::Min => write!(f, "min"),
            Kind::WeightedSum(w) => {
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                write!(f, "wsum({})", parts.join(","))
            }
            Kind::PNorm(p) => write!(f, "pnorm({p})"),
            Kind::Series(k) => write!(f, "series({k})"),
            Kind::Projection(k) => write!(f, "proj({k})"),
            Kind::Dobos => write!(f, "dobos"),
            Kind::Jump => write!(f, "jump"),
            Kind::Indicator => write!(f, "indicator"),
            Kind::Custom(c) => write!(f, "custom({})", c.name),
        }
    }
}

impl Serialize for AggregatorSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    /// Upper bound on the discarded series tail, when the aggregator is a truncation.
    pub tail_bound: Option<f64>,
}

/// `2^{-K}`, which bounds `Σ_{n>K} 2^{-n} a_n / (1 + a_n)` for every input.
pub fn series_tail_bound(truncation: usize) -> f64 {
    0.5f64.powi(truncation.min(i32::MAX as usize) as i32)
}

fn dobos(x: f64) -> f64 {
    if x <= 2.0 {
        x
    } else {
        1.0 + 1.0 / (x - 1.0)
    }
}

fn pnorm(a: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return a.iter().sum();
    }
    let m = a.iter().copied().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    // factor out the maximum so large p cannot overflow
    m * a.iter().map(|&x| (x / m).powf(p)).sum::<f64>().powf(1.0 / p)
}
