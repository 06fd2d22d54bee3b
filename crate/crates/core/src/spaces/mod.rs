//! Finite quasi-pseudometric spaces as distance matrices, and their
//! aggregation on products and on sets.

mod builtin;

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use builtin::{
    builtin_space, discrete, euclid_points, indiscrete, lu_family, lu_grid, oneway, scaled_discrete,
    scaled_discrete_family, two_point_pq,
};

use crate::aggregators::AggregatorSpec;
use crate::error::{Error, Result};
use crate::sampling::{draw_rng, Stream};
use crate::tuple::NonNegTuple;

pub const DEFAULT_PRODUCT_CAP: usize = 4096;
/// Triangle violations reported per validation before the list is cut off.
pub const MAX_REPORTED_VIOLATIONS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxiomClass {
    QuasiPseudometric,
    QuasiMetric,
    Pseudometric,
    Metric,
}

impl AxiomClass {
    fn from_flags(symmetric: bool, separated: bool) -> Self {
        match (symmetric, separated) {
            (true, true) => AxiomClass::Metric,
            (true, false) => AxiomClass::Pseudometric,
            (false, true) => AxiomClass::QuasiMetric,
            (false, false) => AxiomClass::QuasiPseudometric,
        }
    }

    pub fn is_symmetric(self) -> bool {
        matches!(self, AxiomClass::Pseudometric | AxiomClass::Metric)
    }

    pub fn is_separated(self) -> bool {
        matches!(self, AxiomClass::QuasiMetric | AxiomClass::Metric)
    }

    /// `self` satisfies every axiom `other` does.
    pub fn at_least(self, other: AxiomClass) -> bool {
        (self.is_symmetric() || !other.is_symmetric()) && (self.is_separated() || !other.is_separated())
    }
}

impl fmt::Display for AxiomClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    /// A negative or non-finite distance.
    Domain { from: String, to: String, value: f64 },
    NonzeroDiagonal { point: String, value: f64 },
    /// `d(x, z) > d(x, y) + d(y, z)`.
    Triangle {
        x: String,
        y: String,
        z: String,
        indices: [usize; 3],
        d_xz: f64,
        d_xy: f64,
        d_yz: f64,
    },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::Domain { from, to, value } => write!(f, "d({from},{to}) = {value} is not a finite nonnegative number"),
            AxiomViolation::NonzeroDiagonal { point, value } => write!(f, "d({point},{point}) = {value} is not 0"),
            AxiomViolation::Triangle { x, y, z, d_xz, d_xy, d_yz, .. } => write!(
                f,
                "d({x},{z}) = {d_xz} > d({x},{y}) + d({y},{z}) = {}",
                d_xy + d_yz
            ),
        }
    }
}

/// A validated finite quasi-pseudometric space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceFile")]
pub struct FiniteSpace {
    points: Vec<String>,
    matrix: Vec<Vec<f64>>,
    axiom_class: AxiomClass,
}

/// The on-disk form `{"points": [...], "matrix": [[...]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
}

impl TryFrom<SpaceFile> for FiniteSpace {
    type Error = Error;

    fn try_from(f: SpaceFile) -> Result<Self> {
        validate_space(f.points, f.matrix)
    }
}

impl FiniteSpace {
    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn axiom_class(&self) -> AxiomClass {
        self.axiom_class
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn d(&self, x: usize, y: usize) -> f64 {
        self.matrix[x][y]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    /// The conjugate space `d⁻¹(x, y) = d(y, x)`.
    pub fn reversed(&self) -> FiniteSpace {
        let n = self.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| self.matrix[j][i]).collect()).collect();
        FiniteSpace { points: self.points.clone(), matrix, axiom_class: self.axiom_class }
    }

    pub fn to_file(&self) -> SpaceFile {
        SpaceFile { points: self.points.clone(), matrix: self.matrix.clone() }
    }

    pub fn from_json(text: &str) -> Result<FiniteSpace> {
        let file: SpaceFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("space file: {e}")))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("space serialises")
    }
}

/// Validate `matrix` against `points` with exact comparisons.
pub fn validate_space(points: Vec<String>, matrix: Vec<Vec<f64>>) -> Result<FiniteSpace> {
    validate_space_with_tolerance(points, matrix, 0.0)
}

/// As [`validate_space`], but triangle inequalities may fail by up to `tol`.
pub fn validate_space_with_tolerance(points: Vec<String>, matrix: Vec<Vec<f64>>, tol: f64) -> Result<FiniteSpace> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Empty("a space needs at least one point".into()));
    }
    if matrix.len() != n {
        return Err(Error::Dimension { expected: format!("{n} rows"), found: matrix.len() });
    }
    if let Some(row) = matrix.iter().find(|r| r.len() != n) {
        return Err(Error::Dimension { expected: format!("{n} columns"), found: row.len() });
    }
    let mut seen = HashSet::new();
    if let Some(dup) = points.iter().find(|p| !seen.insert(p.as_str())) {
        return Err(Error::InvalidParams(format!("duplicate point label {dup:?}")));
    }

    let mut violations = Vec::new();
    for (i, row) in matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                violations.push(AxiomViolation::Domain { from: points[i].clone(), to: points[j].clone(), value: v });
            } else if i == j && v != 0.0 {
                violations.push(AxiomViolation::NonzeroDiagonal { point: points[i].clone(), value: v });
            }
        }
    }
    if !violations.is_empty() {
        return Err(Error::Axiom(violations));
    }

    let triangles = triangle_violations(&points, &matrix, tol);
    if !triangles.is_empty() {
        return Err(Error::Axiom(triangles));
    }

    // -0.0 canonicalised so equal spaces serialise identically
    let matrix: Vec<Vec<f64>> = matrix.into_iter().map(|r| r.into_iter().map(|v| v + 0.0).collect()).collect();
    let symmetric = (0..n).all(|i| (0..i).all(|j| matrix[i][j] == matrix[j][i]));
    let separated = (0..n).all(|i| (0..i).all(|j| matrix[i][j] != 0.0 || matrix[j][i] != 0.0));
    Ok(FiniteSpace { points, matrix, axiom_class: AxiomClass::from_flags(symmetric, separated) })
}

/// The first violating triples in `(x, y, z)` lexicographic order.
fn triangle_violations(points: &[String], m: &[Vec<f64>], tol: f64) -> Vec<AxiomViolation> {
    let n = points.len();
    let per_x: Vec<Vec<[usize; 3]>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut out = Vec::new();
            'outer: for y in 0..n {
                for z in 0..n {
                    if m[x][z] > m[x][y] + m[y][z] + tol {
                        out.push([x, y, z]);
                        if out.len() == MAX_REPORTED_VIOLATIONS {
                            break 'outer;
                        }
                    }
                }
            }
            out
        })
        .collect();
    per_x
        .into_iter()
        .flatten()
        .take(MAX_REPORTED_VIOLATIONS)
        .map(|[x, y, z]| AxiomViolation::Triangle {
            x: points[x].clone(),
            y: points[y].clone(),
            z: points[z].clone(),
            indices: [x, y, z],
            d_xz: m[x][z],
            d_xy: m[x][y],
            d_yz: m[y][z],
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyMode {
    Products,
    Sets,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceFamily {
    mode: FamilyMode,
    members: Vec<FiniteSpace>,
}

impl SpaceFamily {
    pub fn new(mode: FamilyMode, members: Vec<FiniteSpace>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Precondition("a family needs at least one member".into()));
        }
        if mode == FamilyMode::Sets && members.iter().any(|m| m.points != members[0].points) {
            return Err(Error::PointMismatch);
        }
        Ok(Self { mode, members })
    }

    pub fn products(members: Vec<FiniteSpace>) -> Result<Self> {
        Self::new(FamilyMode::Products, members)
    }

    pub fn sets(members: Vec<FiniteSpace>) -> Result<Self> {
        Self::new(FamilyMode::Sets, members)
    }

    pub fn mode(&self) -> FamilyMode {
        self.mode
    }

    pub fn members(&self) -> &[FiniteSpace] {
        &self.members
    }

    pub fn arity(&self) -> usize {
        self.members.len()
    }

    pub fn all_metric(&self) -> bool {
        self.members.iter().all(|m| m.axiom_class == AxiomClass::Metric)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateOptions {
    pub product_cap: usize,
    /// Slack allowed in triangle checks of the aggregated matrix.
    pub tol_cmp: f64,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        Self { product_cap: DEFAULT_PRODUCT_CAP, tol_cmp: 1e-9 }
    }
}

/// Mixed-radix indexing of a Cartesian product, first factor most significant.
#[derive(Clone, Debug)]
pub(crate) struct ProductIndex {
    sizes: Vec<usize>,
    total: usize,
}

impl ProductIndex {
    pub(crate) fn new(sizes: Vec<usize>, cap: usize) -> Result<Self> {
        let total = sizes
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .unwrap_or(usize::MAX);
        if total > cap {
            return Err(Error::CapExceeded { cap, required: total });
        }
        Ok(Self { sizes, total })
    }

    pub(crate) fn len(&self) -> usize {
        self.total
    }

    pub(crate) fn coords(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (slot, &s) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = index % s;
            index /= s;
        }
        out
    }

    /// Labels like `(p,q)` built from the factor labels.
    pub(crate) fn labels(&self, factors: &[&[String]]) -> Vec<String> {
        (0..self.total)
            .map(|i| {
                let parts: Vec<&str> = self.coords(i).iter().zip(factors).map(|(&c, f)| f[c].as_str()).collect();
                format!("({})", parts.join(","))
            })
            .collect()
    }
}

fn aggregated(spec: &AggregatorSpec, points: Vec<String>, matrix: Vec<Vec<f64>>, tol: f64) -> Result<FiniteSpace> {
    match validate_space_with_tolerance(points, matrix, tol) {
        Err(Error::Axiom(violations)) => Err(Error::Aggregation { violations }),
        other => other.map_err(|e| match e {
            Error::Dimension { .. } => Error::Contract(format!("{spec} produced a malformed matrix")),
            e => e,
        }),
    }
}

fn check_family(spec: &AggregatorSpec, fam: &SpaceFamily, mode: FamilyMode) -> Result<()> {
    if fam.mode != mode {
        return Err(Error::Precondition(format!("expected a {mode:?} family, got {:?}", fam.mode)));
    }
    spec.check_arity(fam.arity())
}

/// `F ∘ d_Π` on the Cartesian product of the members.
pub fn product_aggregate(spec: &AggregatorSpec, fam: &SpaceFamily) -> Result<FiniteSpace> {
    product_aggregate_with(spec, fam, &AggregateOptions::default())
}

pub fn product_aggregate_with(spec: &AggregatorSpec, fam: &SpaceFamily, opts: &AggregateOptions) -> Result<FiniteSpace> {
    check_family(spec, fam, FamilyMode::Products)?;
    let idx = ProductIndex::new(fam.members.iter().map(FiniteSpace::len).collect(), opts.product_cap)?;
    let factors: Vec<&[String]> = fam.members.iter().map(|m| m.points()).collect();
    let coords: Vec<Vec<usize>> = (0..idx.len()).map(|i| idx.coords(i)).collect();
    let matrix: Vec<Vec<f64>> = coords
        .par_iter()
        .map(|x| {
            let mut buf = vec![0.0; x.len()];
            coords
                .iter()
                .map(|y| {
                    for (k, m) in fam.members.iter().enumerate() {
                        buf[k] = m.d(x[k], y[k]);
                    }
                    spec.eval_unchecked(&buf)
                })
                .collect()
        })
        .collect();
    aggregated(spec, idx.labels(&factors), matrix, opts.tol_cmp)
}

/// `F ∘ d_Δ` on the shared point set.
pub fn set_aggregate(spec: &AggregatorSpec, fam: &SpaceFamily) -> Result<FiniteSpace> {
    set_aggregate_with(spec, fam, &AggregateOptions::default())
}

pub fn set_aggregate_with(spec: &AggregatorSpec, fam: &SpaceFamily, opts: &AggregateOptions) -> Result<FiniteSpace> {
    check_family(spec, fam, FamilyMode::Sets)?;
    let n = fam.members[0].len();
    let matrix: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let a: Vec<f64> = fam.members.iter().map(|m| m.d(x, y)).collect();
                    spec.eval_unchecked(&a)
                })
                .collect()
        })
        .collect();
    aggregated(spec, fam.members[0].points.clone(), matrix, opts.tol_cmp)
}

/// `Im d_Δ(x, ·) = { (d_i(x, y))_i : y }`, in order of first appearance.
pub fn image_of_ddelta(fam: &SpaceFamily, x: &str) -> Result<Vec<NonNegTuple>> {
    if fam.mode != FamilyMode::Sets {
        return Err(Error::Precondition("the image of d_Δ needs a family on one set".into()));
    }
    let xi = fam.members[0].index_of(x)?;
    let mut out: Vec<NonNegTuple> = Vec::new();
    for y in 0..fam.members[0].len() {
        let t = NonNegTuple::from_raw(fam.members.iter().map(|m| m.d(xi, y)).collect());
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

/// A random quasi-pseudometric on `n` points: shortest-path closure of random
/// edge weights in `{0, 1, 2, 3}`, so every distance is a small integer and
/// the triangle inequality holds exactly. `symmetric` makes it a pseudometric.
pub fn random_space(seed: u64, draw: u64, n: usize, symmetric: bool) -> FiniteSpace {
    assert!(n >= 1, "a space needs at least one point");
    let mut rng = draw_rng(seed, Stream::Spaces, draw);
    let mut m = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && (!symmetric || j > i) {
                let w = f64::from(rng.random_range(0u8..4));
                m[i][j] = w;
                if symmetric {
                    m[j][i] = w;
                }
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i][k] + m[k][j];
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    validate_space(builtin::labels(n), m).expect("shortest-path closure is a quasi-pseudometric")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn discrete_is_metric() {
        let s = validate_space(labels(&["p", "q"]), vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(s.axiom_class(), AxiomClass::Metric);
    }

    #[test]
    fn one_way_zero_is_quasi_metric() {
        let s = validate_space(labels(&["p", "q"]), vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(s.axiom_class(), AxiomClass::QuasiMetric);
    }

    #[test]
    fn triangle_error_names_triple() {
        let m = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        match validate_space(labels(&["0", "1", "2"]), m) {
            Err(Error::Axiom(v)) => match &v[0] {
                AxiomViolation::Triangle { indices, .. } => assert_eq!(*indices, [0, 1, 2]),
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_entries() {
        let r = validate_space(labels(&["p", "q"]), vec![vec![1.0, 1.0], vec![-1.0, 0.0]]);
        match r {
            Err(Error::Axiom(v)) => assert_eq!(v.len(), 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(validate_space(labels(&["p"]), vec![vec![0.0, 1.0]]), Err(Error::Dimension { .. })));
        assert!(matches!(validate_space(labels(&["p", "p"]), vec![vec![0.0; 2]; 2]), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn json_round_trip() {
        let s = oneway(3).unwrap();
        let back = FiniteSpace::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(FiniteSpace::from_json(r#"{"points":["a","b"],"matrix":[[0,1],[1,1]]}"#).is_err());
    }

    #[test]
    fn max_of_discrete_squares() {
        let fam = SpaceFamily::products(vec![discrete(2).unwrap(), discrete(2).unwrap()]).unwrap();
        let s = product_aggregate(&AggregatorSpec::max(), &fam).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.points()[1], "(p,q)");
        assert_eq!(s.matrix(), discrete(4).unwrap().matrix());
    }

    #[test]
    fn square_breaks_triangle() {
        let fam = SpaceFamily::products(vec![euclid_points(&[0.0, 1.0, 2.0]).unwrap()]).unwrap();
        match product_aggregate(&AggregatorSpec::square(), &fam) {
            Err(Error::Aggregation { violations }) => match &violations[0] {
                AxiomViolation::Triangle { indices, d_xz, .. } => {
                    assert_eq!(*indices, [0, 1, 2]);
                    assert_eq!(*d_xz, 4.0);
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_family_is_precondition_error() {
        assert!(matches!(SpaceFamily::products(vec![]), Err(Error::Precondition(_))));
    }

    #[test]
    fn product_cap() {
        let opts = AggregateOptions { product_cap: 16, ..AggregateOptions::default() };
        let fam = SpaceFamily::products(vec![discrete(2).unwrap(); 4]).unwrap();
        assert_eq!(product_aggregate_with(&AggregatorSpec::max(), &fam, &opts).unwrap().len(), 16);
        let fam = SpaceFamily::products(vec![discrete(3).unwrap(); 3]).unwrap();
        let r = product_aggregate_with(&AggregatorSpec::max(), &fam, &opts);
        assert!(matches!(r, Err(Error::CapExceeded { cap: 16, required: 27 })));
    }

    #[test]
    fn set_mode_examples() {
        let fam = SpaceFamily::sets(vec![discrete(2).unwrap(), discrete(2).unwrap()]).unwrap();
        let s = set_aggregate(&AggregatorSpec::indicator(), &fam).unwrap();
        assert_eq!(s.matrix(), discrete(2).unwrap().matrix());

        let fam = SpaceFamily::sets(vec![discrete(2).unwrap(), indiscrete(2).unwrap()]).unwrap();
        let s = set_aggregate(&AggregatorSpec::projection(2).unwrap(), &fam).unwrap();
        assert_eq!(s.matrix(), indiscrete(2).unwrap().matrix());
        assert_eq!(s.axiom_class(), AxiomClass::Pseudometric);

        let one = oneway(3).unwrap();
        let fam = SpaceFamily::sets(vec![one.clone()]).unwrap();
        assert_eq!(set_aggregate(&AggregatorSpec::max(), &fam).unwrap(), one);
    }

    #[test]
    fn set_mode_needs_shared_points() {
        let r = SpaceFamily::sets(vec![discrete(2).unwrap(), discrete(3).unwrap()]);
        assert!(matches!(r, Err(Error::PointMismatch)));
    }

    #[test]
    fn images() {
        let t = |v: &[f64]| NonNegTuple::new(v.to_vec()).unwrap();
        let fam = SpaceFamily::sets(vec![discrete(2).unwrap(), discrete(2).unwrap()]).unwrap();
        assert_eq!(image_of_ddelta(&fam, "p").unwrap(), vec![t(&[0.0, 0.0]), t(&[1.0, 1.0])]);
        let fam = scaled_discrete_family(&[1.0, 2.0]).unwrap();
        assert_eq!(image_of_ddelta(&fam, "p").unwrap(), vec![t(&[0.0, 0.0]), t(&[1.0, 2.0])]);
        let fam = SpaceFamily::sets(vec![indiscrete(2).unwrap()]).unwrap();
        assert_eq!(image_of_ddelta(&fam, "p").unwrap(), vec![t(&[0.0])]);
        assert!(matches!(image_of_ddelta(&fam, "r"), Err(Error::UnknownPoint(_))));
    }

    #[test]
    fn random_spaces_validate() {
        for draw in 0..50 {
            let s = random_space(7, draw, 5, draw % 2 == 0);
            if draw % 2 == 0 {
                assert!(s.axiom_class().is_symmetric());
            }
        }
        assert_eq!(random_space(7, 3, 4, false), random_space(7, 3, 4, false));
    }

    #[test]
    fn class_order() {
        assert!(AxiomClass::Metric.at_least(AxiomClass::QuasiMetric));
        assert!(!AxiomClass::Pseudometric.at_least(AxiomClass::QuasiMetric));
        assert!(AxiomClass::QuasiMetric.at_least(AxiomClass::QuasiPseudometric));
    }
}
