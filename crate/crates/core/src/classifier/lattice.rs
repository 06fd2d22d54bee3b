use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::{Evidence, PropertyKind, Propagation};
use crate::verdict::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Structure {
    QuasiPseudometric,
    QuasiMetric,
    Pseudometric,
    Metric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Products,
    Sets,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strength {
    Plain,
    Strongly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassName {
    pub strength: Strength,
    pub structure: Structure,
    pub mode: Mode,
}

impl ClassName {
    pub const fn new(strength: Strength, structure: Structure, mode: Mode) -> Self {
        Self { strength, structure, mode }
    }

    /// All sixteen classes: plain before strongly, then by structure, products before sets.
    pub fn all() -> Vec<ClassName> {
        let mut out = Vec::with_capacity(16);
        for strength in [Strength::Plain, Strength::Strongly] {
            for structure in [
                Structure::QuasiPseudometric,
                Structure::QuasiMetric,
                Structure::Pseudometric,
                Structure::Metric,
            ] {
                for mode in [Mode::Products, Mode::Sets] {
                    out.push(ClassName::new(strength, structure, mode));
                }
            }
        }
        out
    }

    fn with_mode(self, mode: Mode) -> Self {
        Self { mode, ..self }
    }
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.strength {
            Strength::Plain => "",
            Strength::Strongly => "strongly-",
        };
        let structure = match self.structure {
            Structure::QuasiPseudometric => "QPM",
            Structure::QuasiMetric => "QM",
            Structure::Pseudometric => "PM",
            Structure::Metric => "M",
        };
        let mode = match self.mode {
            Mode::Products => "products",
            Mode::Sets => "sets",
        };
        write!(f, "{prefix}{structure}-agg({mode})")
    }
}

impl Serialize for ClassName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum ClassStatus {
    /// Every sufficient condition on record survived its budget.
    ConsistentWith { basis: Vec<String> },
    /// At least one necessary condition has a witness.
    Excluded { by: Vec<String> },
    /// Neither route applies.
    Undetermined { reason: String },
}

impl ClassStatus {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ClassStatus::ConsistentWith { .. })
    }

    pub fn is_excluded(&self) -> bool {
        matches!(self, ClassStatus::Excluded { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassVerdict {
    pub class: ClassName,
    pub status: ClassStatus,
}

struct Facts<'a> {
    verdicts: &'a BTreeMap<PropertyKind, Verdict>,
    evidence: &'a BTreeMap<Evidence, Verdict>,
    propagated: &'a [Propagation],
}

impl Facts<'_> {
    /// Why `kind` is falsified, if it is.
    fn refutation(&self, kind: PropertyKind) -> Option<String> {
        if self.verdicts.get(&kind).is_some_and(Verdict::is_falsified) {
            return Some(kind.name().to_string());
        }
        self.propagated
            .iter()
            .find(|p| p.target == kind)
            .map(|p| format!("{} (derived from {})", kind.name(), p.source.name()))
    }

    fn evidence_refutation(&self, e: Evidence) -> Option<String> {
        self.evidence
            .get(&e)
            .is_some_and(Verdict::is_falsified)
            .then(|| e.name().to_string())
    }

    fn rule(&self, props: &[PropertyKind], extra: &[Evidence]) -> ClassStatus {
        let by: Vec<String> = props
            .iter()
            .filter_map(|&k| self.refutation(k))
            .chain(extra.iter().filter_map(|&e| self.evidence_refutation(e)))
            .collect();
        if by.is_empty() {
            let basis = props
                .iter()
                .map(|k| k.name().to_string())
                .chain(extra.iter().map(|e| e.name().to_string()))
                .collect();
            ClassStatus::ConsistentWith { basis }
        } else {
            ClassStatus::Excluded { by }
        }
    }
}

use PropertyKind::{
    ContinuousAtZero as C0, Monotone as Mo, Subadditive as S, TripletPreserving as T, VanishesAtZero as V,
    ZeroPreimageTrivial as ZP,
};

pub(crate) fn derive(
    arity: usize,
    verdicts: &BTreeMap<PropertyKind, Verdict>,
    evidence: &BTreeMap<Evidence, Verdict>,
    propagated: &[Propagation],
) -> Vec<ClassVerdict> {
    let facts = Facts { verdicts, evidence, propagated };
    let mut done: BTreeMap<ClassName, ClassStatus> = BTreeMap::new();
    // products classes first, so the set-mode rules can refer to them
    let order: Vec<ClassName> = {
        let all = ClassName::all();
        let (p, s): (Vec<_>, Vec<_>) = all.into_iter().partition(|c| c.mode == Mode::Products);
        p.into_iter().chain(s).collect()
    };
    for class in order {
        let status = status_of(class, arity, &facts, &done);
        done.insert(class, status);
    }
    ClassName::all()
        .into_iter()
        .map(|class| ClassVerdict { class, status: done[&class].clone() })
        .collect()
}

fn via(class: ClassName) -> ClassStatus {
    ClassStatus::ConsistentWith { basis: vec![class.to_string()] }
}

fn status_of(class: ClassName, arity: usize, facts: &Facts, done: &BTreeMap<ClassName, ClassStatus>) -> ClassStatus {
    use Mode::*;
    use Strength::*;
    use Structure::*;

    let products = class.with_mode(Products);
    // with one member, a family on a set and a family of one space coincide
    if class.mode == Sets && arity == 1 {
        return done[&products].clone();
    }
    match (class.strength, class.structure, class.mode) {
        (Plain, QuasiPseudometric, _) => facts.rule(&[V, S, Mo], &[]),
        (Plain, QuasiMetric, Products) => facts.rule(&[ZP, S, Mo], &[]),
        (Plain, QuasiMetric, Sets) => {
            if done[&products].is_consistent() {
                via(products)
            } else if let Some(r) = facts.refutation(V) {
                ClassStatus::Excluded { by: vec![r] }
            } else {
                ClassStatus::Undetermined {
                    reason: "without a trivial zero preimage, separation on sets depends on how the members separate points"
                        .into(),
                }
            }
        }
        (Plain, Pseudometric, _) => facts.rule(&[V, T], &[]),
        (Plain, Metric, Products) => facts.rule(&[ZP, T], &[]),
        (Plain, Metric, Sets) => {
            if done[&products].is_consistent() {
                via(products)
            } else {
                facts.rule(&[V], &[Evidence::PositiveConeMetric])
            }
        }
        (Strongly, QuasiPseudometric | QuasiMetric, _) => facts.rule(&[ZP, S, Mo, C0], &[]),
        (Strongly, Pseudometric, _) | (Strongly, Metric, Products) => facts.rule(&[ZP, T, C0], &[]),
        (Strongly, Metric, Sets) => {
            if done[&products].is_consistent() {
                return via(products);
            }
            let plain = ClassName::new(Plain, Metric, Sets);
            let mut by = Vec::new();
            if let ClassStatus::Excluded { by: inner } = &done[&plain] {
                by.extend(inner.iter().cloned());
            }
            by.extend(facts.evidence_refutation(Evidence::DiagonalRestrictedContinuity));
            by.extend(facts.evidence_refutation(Evidence::AxisRayUsc));
            if by.is_empty() {
                ClassStatus::Undetermined {
                    reason: "whether strongly metric aggregation on sets coincides with strongly metric aggregation on products is an open problem"
                        .into(),
                }
            } else {
                ClassStatus::Excluded { by }
            }
        }
    }
}
