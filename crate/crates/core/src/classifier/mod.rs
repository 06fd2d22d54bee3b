//! Sampled falsification of the properties that characterise each class of
//! aggregation function, and the class lattice those properties determine.
//!
//! Every checker scans a deterministic corner grid first and then the
//! configured number of seeded random draws. The first violating candidate in
//! that order becomes the witness, so parallel evaluation returns exactly what
//! a sequential scan would.

mod checks;
mod lattice;
mod shrink;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_asymmetric_triplet, check_continuity_at_zero, check_monotone, check_positive_cone_metric,
    check_property, check_subadditive, check_triplet_preservation, check_vanishes_at_zero,
    check_zero_preimage, continuity_profile, positive_cone_violation, violation, ContinuityLevel,
};
pub use lattice::{ClassName, ClassStatus, ClassVerdict, Mode, Strength, Structure};
pub use shrink::{propagate_triplet_witness, shrink_witness};

use crate::aggregators::AggregatorSpec;
use crate::error::Result;
use crate::probe;
use crate::sampling::SamplerConfig;
use crate::verdict::{Verdict, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PropertyKind {
    VanishesAtZero,
    ZeroPreimageTrivial,
    Monotone,
    Subadditive,
    TripletPreserving,
    AsymmetricTriplet,
    ContinuousAtZero,
}

impl PropertyKind {
    pub const ALL: [PropertyKind; 7] = [
        PropertyKind::VanishesAtZero,
        PropertyKind::ZeroPreimageTrivial,
        PropertyKind::Monotone,
        PropertyKind::Subadditive,
        PropertyKind::TripletPreserving,
        PropertyKind::AsymmetricTriplet,
        PropertyKind::ContinuousAtZero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::VanishesAtZero => "VanishesAtZero",
            PropertyKind::ZeroPreimageTrivial => "ZeroPreimageTrivial",
            PropertyKind::Monotone => "Monotone",
            PropertyKind::Subadditive => "Subadditive",
            PropertyKind::TripletPreserving => "TripletPreserving",
            PropertyKind::AsymmetricTriplet => "AsymmetricTriplet",
            PropertyKind::ContinuousAtZero => "ContinuousAtZero",
        }
    }
}

/// Set-mode evidence that the seven cone-wide properties cannot provide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Evidence {
    /// Separation and triangle-triplet preservation restricted to `{0} ∪ (0, ∞)^n`,
    /// the only region a family of metrics on one set can reach.
    PositiveConeMetric,
    /// Continuity at `0_n` of `F` restricted to the diagonal ray, the image of
    /// `n` copies of the Euclidean metric on the line.
    DiagonalRestrictedContinuity,
    /// Upper semicontinuity at 0 along the rays `t ↦ (1, …, t, …, 1)`, each
    /// realised by one Euclidean member and discrete members elsewhere.
    AxisRayUsc,
}

impl Evidence {
    pub fn name(self) -> &'static str {
        match self {
            Evidence::PositiveConeMetric => "PositiveConeMetric",
            Evidence::DiagonalRestrictedContinuity => "DiagonalRestrictedContinuity",
            Evidence::AxisRayUsc => "AxisRayUsc",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub zero: f64,
    pub cmp: f64,
    pub cont: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { zero: 1e-9, cmp: 1e-9, cont: 1e-6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub sampler: SamplerConfig,
    pub tol: Tolerances,
    /// Number of halvings `J` in the continuity scan `δ = scale · 2^{-j}`, `j = 0..=J`.
    pub continuity_levels: u32,
    /// 0 uses the global rayon pool, 1 runs sequentially.
    pub workers: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            sampler: SamplerConfig::default(),
            tol: Tolerances::default(),
            continuity_levels: 40,
            workers: 0,
        }
    }
}

impl ClassifierConfig {
    pub fn with_sampler(sampler: SamplerConfig) -> Self {
        Self { sampler, ..Self::default() }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.sampler.validate()?;
        let t = self.tol;
        if [t.zero, t.cmp, t.cont].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(crate::Error::Config("tolerances must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

/// A Monotone or Subadditive witness derived from a triplet violation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Propagation {
    pub source: PropertyKind,
    pub target: PropertyKind,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub function: String,
    pub arity: usize,
    pub verdicts: BTreeMap<PropertyKind, Verdict>,
    pub evidence: BTreeMap<Evidence, Verdict>,
    pub propagated: Vec<Propagation>,
    pub classes: Vec<ClassVerdict>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub budget: u64,
}

impl ClassificationReport {
    pub fn verdict(&self, kind: PropertyKind) -> &Verdict {
        &self.verdicts[&kind]
    }

    pub fn class(&self, name: ClassName) -> &ClassStatus {
        &self
            .classes
            .iter()
            .find(|c| c.class == name)
            .expect("every class is reported")
            .status
    }

    /// Falsified either directly or through a propagated triplet witness.
    pub fn effectively_falsified(&self, kind: PropertyKind) -> bool {
        self.verdicts[&kind].is_falsified() || self.propagated.iter().any(|p| p.target == kind)
    }
}

/// Run every checker on `spec` at `arity` and derive class membership.
pub fn classify(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<ClassificationReport> {
    cfg.validate()?;
    spec.check_arity(arity)?;

    let mut verdicts = BTreeMap::new();
    for kind in PropertyKind::ALL {
        verdicts.insert(kind, check_property(spec, arity, kind, cfg)?);
    }

    let grids = probe::ProbeGrids::default();
    let seed = cfg.sampler.seed;
    let mut evidence = BTreeMap::new();
    evidence.insert(Evidence::PositiveConeMetric, check_positive_cone_metric(spec, arity, cfg)?);
    evidence.insert(
        Evidence::DiagonalRestrictedContinuity,
        probe::check_restricted_continuity_at_zero(spec, &probe::StructuredImage::diagonal(arity), &grids, &cfg.tol, seed)?,
    );
    evidence.insert(
        Evidence::AxisRayUsc,
        probe::check_usc_at_zero(spec, &probe::StructuredImage::axis_rays(arity, 1.0), &grids, seed)?,
    );

    let propagated = shrink::propagate_all(spec, &verdicts, &cfg.tol)?;
    let classes = lattice::derive(arity, &verdicts, &evidence, &propagated);

    Ok(ClassificationReport {
        function: spec.to_string(),
        arity,
        verdicts,
        evidence,
        propagated,
        classes,
        tolerances: cfg.tol,
        seed: cfg.sampler.seed,
        budget: cfg.sampler.budget,
    })
}
