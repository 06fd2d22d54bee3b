//! Topologies of finite quasi-pseudometric spaces as minimal open neighbourhoods.
//!
//! The topology of `d` has the open balls `B(x, ε) = {y : d(x, y) < ε}` as a
//! base. On a finite space let `ε_x` be the smallest positive entry of row `x`
//! (or any positive number if the row has none). Then `B(x, ε) = U(x) :=
//! {y : d(x, y) = 0}` for every `0 < ε ≤ ε_x`, and every ball at `x` contains
//! `U(x)`. If `G` is open and `x ∈ G`, some ball at `x` lies in `G`, so
//! `U(x) ⊆ G`; and `U(x)` is itself a ball, hence open. So `U(x)` is the
//! smallest open set containing `x`, and the open sets are exactly the unions
//! of the `U(x)`. Two topologies on the same points are therefore ordered by
//! comparing their neighbourhoods pointwise: `𝒯_A ⊆ 𝒯_B` iff `U_B(x) ⊆ U_A(x)`
//! for every `x`. Transitivity `y ∈ U(x) ⇒ U(y) ⊆ U(x)` is the triangle
//! inequality `d(x, z) ≤ d(x, y) + d(y, z)` read at zero.

use serde::{Serialize, Serializer};

use crate::aggregators::AggregatorSpec;
use crate::error::{Error, Result};
use crate::spaces::{self, FiniteSpace, ProductIndex, SpaceFamily, DEFAULT_PRODUCT_CAP};

/// A finite Alexandrov topology: the minimal open neighbourhood of each point,
/// as sorted point indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodMap {
    points: Vec<String>,
    sets: Vec<Vec<usize>>,
}

impl NeighborhoodMap {
    /// Build from explicit neighbourhoods, checking `x ∈ U(x)` and transitivity.
    pub fn new(points: Vec<String>, sets: Vec<Vec<usize>>) -> Result<Self> {
        if points.len() != sets.len() {
            return Err(Error::Dimension { expected: format!("{} neighbourhoods", points.len()), found: sets.len() });
        }
        let n = points.len();
        let mut sets = sets;
        for (x, u) in sets.iter_mut().enumerate() {
            u.sort_unstable();
            u.dedup();
            if u.iter().any(|&y| y >= n) {
                return Err(Error::InvalidParams(format!("neighbourhood of {} names an unknown point", points[x])));
            }
            if u.binary_search(&x).is_err() {
                return Err(Error::InvalidParams(format!("{} is missing from its own neighbourhood", points[x])));
            }
        }
        let map = Self { points, sets };
        if !map.is_transitive() {
            return Err(Error::InvalidParams("neighbourhoods are not transitive".into()));
        }
        Ok(map)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn neighborhood(&self, x: usize) -> &[usize] {
        &self.sets[x]
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.sets[x].binary_search(&y).is_ok()
    }

    pub fn labels_of(&self, x: usize) -> Vec<String> {
        self.sets[x].iter().map(|&y| self.points[y].clone()).collect()
    }

    /// `y ∈ U(x) ⇒ U(y) ⊆ U(x)` for all `x, y`.
    pub fn is_transitive(&self) -> bool {
        (0..self.len()).all(|x| self.sets[x].iter().all(|&y| subset(&self.sets[y], &self.sets[x])))
    }
}

impl Serialize for NeighborhoodMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.len()))?;
        for x in 0..self.len() {
            m.serialize_entry(&self.points[x], &self.labels_of(x))?;
        }
        m.end()
    }
}

fn subset(a: &[usize], b: &[usize]) -> bool {
    // both sorted
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
    }
    true
}

/// `U(x) = {y : d(x, y) = 0}`.
pub fn minimal_neighborhoods(space: &FiniteSpace) -> NeighborhoodMap {
    let n = space.len();
    let sets = (0..n).map(|x| (0..n).filter(|&y| space.d(x, y) == 0.0).collect()).collect();
    let map = NeighborhoodMap { points: space.points().to_vec(), sets };
    debug_assert!(map.is_transitive());
    map
}

/// The product topology: `U((x_i)) = Π U_i(x_i)`.
pub fn product_neighborhoods(maps: &[NeighborhoodMap]) -> Result<NeighborhoodMap> {
    product_neighborhoods_with_cap(maps, DEFAULT_PRODUCT_CAP)
}

pub fn product_neighborhoods_with_cap(maps: &[NeighborhoodMap], cap: usize) -> Result<NeighborhoodMap> {
    if maps.is_empty() {
        return Err(Error::Precondition("a product needs at least one factor".into()));
    }
    let sizes: Vec<usize> = maps.iter().map(NeighborhoodMap::len).collect();
    let idx = ProductIndex::new(sizes.clone(), cap)?;
    let factors: Vec<&[String]> = maps.iter().map(|m| m.points()).collect();
    let flatten = |coords: &[usize]| coords.iter().zip(&sizes).fold(0, |acc, (&c, &s)| acc * s + c);
    let sets = (0..idx.len())
        .map(|p| {
            let coords = idx.coords(p);
            // lexicographic product of sorted factor sets stays sorted
            let mut out: Vec<Vec<usize>> = vec![Vec::new()];
            for (k, &c) in coords.iter().enumerate() {
                out = out
                    .into_iter()
                    .flat_map(|prefix| {
                        maps[k].sets[c].iter().map(move |&y| {
                            let mut v = prefix.clone();
                            v.push(y);
                            v
                        })
                    })
                    .collect();
            }
            out.iter().map(|v| flatten(v)).collect()
        })
        .collect();
    Ok(NeighborhoodMap { points: idx.labels(&factors), sets })
}

/// The supremum topology on a shared point set: `U(x) = ∩_i U_i(x)`.
pub fn supremum_neighborhoods(maps: &[NeighborhoodMap]) -> Result<NeighborhoodMap> {
    let first = maps
        .first()
        .ok_or_else(|| Error::Precondition("a supremum needs at least one topology".into()))?;
    if maps.iter().any(|m| m.points != first.points) {
        return Err(Error::PointMismatch);
    }
    let sets = (0..first.len())
        .map(|x| {
            first.sets[x]
                .iter()
                .copied()
                .filter(|&y| maps.iter().all(|m| m.contains(x, y)))
                .collect()
        })
        .collect();
    Ok(NeighborhoodMap { points: first.points.clone(), sets })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TopologyOrder {
    Equal,
    /// The first topology is strictly coarser than the second.
    FirstCoarserStrict,
    SecondCoarserStrict,
    Incomparable,
}

impl TopologyOrder {
    /// First ⊆ second.
    pub fn first_included(self) -> bool {
        matches!(self, TopologyOrder::Equal | TopologyOrder::FirstCoarserStrict)
    }

    /// Second ⊆ first.
    pub fn second_included(self) -> bool {
        matches!(self, TopologyOrder::Equal | TopologyOrder::SecondCoarserStrict)
    }
}

/// Order of `a` and `b` as topologies on the same points.
pub fn compare(a: &NeighborhoodMap, b: &NeighborhoodMap) -> Result<TopologyOrder> {
    Ok(compare_report(a, b)?.order)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub order: TopologyOrder,
    /// A point whose two neighbourhoods differ, if any.
    pub witness_point: Option<String>,
    #[serde(rename = "left_U")]
    pub left_u: Option<Vec<String>>,
    #[serde(rename = "right_U")]
    pub right_u: Option<Vec<String>>,
}

pub fn compare_report(a: &NeighborhoodMap, b: &NeighborhoodMap) -> Result<Comparison> {
    if a.points != b.points {
        return Err(Error::PointMismatch);
    }
    let n = a.len();
    // a ⊆ b as topologies iff every U_b(x) ⊆ U_a(x)
    let a_in_b = (0..n).all(|x| subset(&b.sets[x], &a.sets[x]));
    let b_in_a = (0..n).all(|x| subset(&a.sets[x], &b.sets[x]));
    let order = match (a_in_b, b_in_a) {
        (true, true) => TopologyOrder::Equal,
        (true, false) => TopologyOrder::FirstCoarserStrict,
        (false, true) => TopologyOrder::SecondCoarserStrict,
        (false, false) => TopologyOrder::Incomparable,
    };
    // prefer a point that breaks "first ⊆ second", the direction usually asked about
    let witness = (0..n)
        .find(|&x| !subset(&b.sets[x], &a.sets[x]))
        .or_else(|| (0..n).find(|&x| a.sets[x] != b.sets[x]));
    Ok(Comparison {
        order,
        witness_point: witness.map(|x| a.points[x].clone()),
        left_u: witness.map(|x| a.labels_of(x)),
        right_u: witness.map(|x| b.labels_of(x)),
    })
}

/// Outcome of comparing a reference topology (left) with the aggregated one (right).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionReport {
    #[serde(flatten)]
    pub comparison: Comparison,
    /// Reference ⊆ aggregated.
    pub reference_included: bool,
    /// Aggregated ⊆ reference.
    pub aggregated_included: bool,
    pub all_members_metric: bool,
    pub note: Option<String>,
}

const METRIC_NOTE: &str = "every member is a metric, so every topology here is discrete; \
equality on this family says nothing about continuity at zero";

fn report(comparison: Comparison, fam: &SpaceFamily) -> InclusionReport {
    let all_metric = fam.all_metric();
    InclusionReport {
        reference_included: comparison.order.first_included(),
        aggregated_included: comparison.order.second_included(),
        comparison,
        all_members_metric: all_metric,
        note: all_metric.then(|| METRIC_NOTE.to_string()),
    }
}

/// Product topology of the members against the topology of `F ∘ d_Π`.
pub fn check_product_inclusion(spec: &AggregatorSpec, fam: &SpaceFamily) -> Result<InclusionReport> {
    let aggregated = spaces::product_aggregate(spec, fam)?;
    let maps: Vec<NeighborhoodMap> = fam.members().iter().map(minimal_neighborhoods).collect();
    let product = product_neighborhoods(&maps)?;
    Ok(report(compare_report(&product, &minimal_neighborhoods(&aggregated))?, fam))
}

/// Supremum topology of the members against the topology of `F ∘ d_Δ`.
pub fn check_sup_inclusion(spec: &AggregatorSpec, fam: &SpaceFamily) -> Result<InclusionReport> {
    let aggregated = spaces::set_aggregate(spec, fam)?;
    let maps: Vec<NeighborhoodMap> = fam.members().iter().map(minimal_neighborhoods).collect();
    let sup = supremum_neighborhoods(&maps)?;
    Ok(report(compare_report(&sup, &minimal_neighborhoods(&aggregated))?, fam))
}
