use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{shrink, ClassifierConfig, PropertyKind, Tolerances};
use crate::aggregators::AggregatorSpec;
use crate::error::{Error, Result};
use crate::par;
use crate::sampling::{self, corner_points, draw_rng, sample_coordinate, sample_tuple, Stream};
use crate::tuple::{is_triangle_triplet, NonNegTuple};
use crate::verdict::{Verdict, Witness};

const PAIR_GRID_CAP: usize = 512;
const TRIPLE_GRID_CAP: usize = 64;

/// Grid levels in search order: 0, then the levels ≥ 1 ascending, then the
/// levels below 1 descending. Grid witnesses therefore use round values
/// whenever one exists.
fn search_levels(levels: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend(levels.iter().copied().filter(|&l| l >= 1.0));
    let mut small: Vec<f64> = levels.iter().copied().filter(|&l| l > 0.0 && l < 1.0).collect();
    small.reverse();
    out.extend(small);
    out
}

struct Grid {
    points: Vec<NonNegTuple>,
    values: Vec<f64>,
}

impl Grid {
    fn new(spec: &AggregatorSpec, cfg: &ClassifierConfig, arity: usize, cap: usize) -> Self {
        let points = corner_points(&search_levels(&cfg.sampler.grid_levels), arity, cap);
        let values = points.iter().map(|p| spec.eval_unchecked(p.values())).collect();
        Self { points, values }
    }

    fn len(&self) -> u64 {
        self.points.len() as u64
    }
}

fn sum(a: &NonNegTuple, b: &NonNegTuple) -> NonNegTuple {
    NonNegTuple::from_raw(a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect())
}

fn leq(a: &NonNegTuple, b: &NonNegTuple) -> bool {
    a.values().iter().zip(b.values()).all(|(x, y)| x <= y)
}

/// Largest amount by which `(x, y, z)` misses one of the scalar triplet inequalities.
pub(crate) fn triplet_excess(x: f64, y: f64, z: f64) -> f64 {
    (x - (y + z)).max(y - (x + z)).max(z - (x + y))
}

/// A nonzero point, farther than `tol_zero` from `0_n`, that `F` sends to within `tol_zero` of 0.
fn separation_fails(a: &NonNegTuple, value: f64, tol: &Tolerances) -> bool {
    a.values().iter().any(|&x| x > tol.zero) && value <= tol.zero
}

/// On the positive cone every coordinate must clear the tolerance, so that
/// `F(1, 1e-9) = 1e-9` for `proj(2)` is not mistaken for a collapse.
fn cone_separation_fails(a: &NonNegTuple, value: f64, tol: &Tolerances) -> bool {
    a.values().iter().all(|&x| x > tol.zero) && value <= tol.zero
}

/// Whether `witness` falsifies `kind` for `spec` under `tol`, re-evaluated from scratch.
pub fn violation(spec: &AggregatorSpec, kind: PropertyKind, witness: &Witness, tol: &Tolerances) -> Result<bool> {
    let f = |a: &NonNegTuple| spec.evaluate(a);
    Ok(match (kind, witness) {
        (PropertyKind::VanishesAtZero, Witness::Point { a }) => a.is_zero() && f(a)? > tol.zero,
        (PropertyKind::ZeroPreimageTrivial, Witness::Point { a }) => {
            let v = f(a)?;
            if a.is_zero() {
                v > tol.zero
            } else {
                separation_fails(a, v, tol)
            }
        }
        (PropertyKind::Monotone, Witness::Pair { a, b }) => a.le(b)? && f(a)? > f(b)? + tol.cmp,
        (PropertyKind::Subadditive, Witness::Pair { a, b }) => f(&a.add(b)?)? > f(a)? + f(b)? + tol.cmp,
        (PropertyKind::TripletPreserving, Witness::Triple { a, b, c }) => {
            is_triangle_triplet(a, b, c)? && triplet_excess(f(a)?, f(b)?, f(c)?) > tol.cmp
        }
        (PropertyKind::AsymmetricTriplet, Witness::Triple { a, b, c }) => {
            a.le(&b.add(c)?)? && f(a)? > f(b)? + f(c)? + tol.cmp
        }
        (PropertyKind::ContinuousAtZero, Witness::Continuity { delta, a, value }) => {
            let fa = f(a)?;
            *delta > 0.0 && a.values().iter().all(|x| x < delta) && fa == *value && fa > tol.cont
        }
        (kind, w) => {
            return Err(Error::Contract(format!(
                "a {} witness cannot falsify {}",
                witness_shape(w),
                kind.name()
            )))
        }
    })
}

fn witness_shape(w: &Witness) -> &'static str {
    match w {
        Witness::Point { .. } => "point",
        Witness::Pair { .. } => "pair",
        Witness::Triple { .. } => "triple",
        Witness::Continuity { .. } => "continuity",
        Witness::Usc { .. } => "usc",
        Witness::Sequence { .. } => "sequence",
    }
}

enum Hit {
    Grid(u64, Witness),
    Random(u64, Witness),
}

/// Scan `grid_count` grid candidates, then `budget` random draws, in that order.
fn two_phase<G, R>(cfg: &ClassifierConfig, grid_count: u64, grid: G, random: R) -> Option<Hit>
where
    G: Fn(u64) -> Option<Witness> + Sync + Send,
    R: Fn(u64) -> Option<Witness> + Sync + Send,
{
    if let Some((i, w)) = par::first_hit(cfg.workers, grid_count, grid) {
        return Some(Hit::Grid(i, w));
    }
    par::first_hit(cfg.workers, cfg.sampler.budget, random).map(|(i, w)| Hit::Random(i, w))
}

fn finish(
    spec: &AggregatorSpec,
    kind: PropertyKind,
    cfg: &ClassifierConfig,
    grid_count: u64,
    hit: Option<Hit>,
) -> Result<Verdict> {
    let seed = cfg.sampler.seed;
    Ok(match hit {
        None => Verdict::consistent(cfg.sampler.budget, grid_count, seed),
        Some(Hit::Grid(i, w)) => Verdict::falsified(shrink::shrink_witness(spec, kind, &w, &cfg.tol)?, 0, i + 1, seed),
        Some(Hit::Random(i, w)) => {
            Verdict::falsified(shrink::shrink_witness(spec, kind, &w, &cfg.tol)?, i + 1, grid_count, seed)
        }
    })
}

fn prepare(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<()> {
    cfg.validate()?;
    spec.check_arity(arity)
}

pub fn check_property(spec: &AggregatorSpec, arity: usize, kind: PropertyKind, cfg: &ClassifierConfig) -> Result<Verdict> {
    match kind {
        PropertyKind::VanishesAtZero => check_vanishes_at_zero(spec, arity, cfg),
        PropertyKind::ZeroPreimageTrivial => check_zero_preimage(spec, arity, cfg),
        PropertyKind::Monotone => check_monotone(spec, arity, cfg),
        PropertyKind::Subadditive => check_subadditive(spec, arity, cfg),
        PropertyKind::TripletPreserving => check_triplet_preservation(spec, arity, cfg),
        PropertyKind::AsymmetricTriplet => check_asymmetric_triplet(spec, arity, cfg),
        PropertyKind::ContinuousAtZero => check_continuity_at_zero(spec, arity, cfg),
    }
}

/// A single evaluation at `0_n`.
pub fn check_vanishes_at_zero(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<Verdict> {
    prepare(spec, arity, cfg)?;
    let zero = NonNegTuple::zeros(arity);
    let seed = cfg.sampler.seed;
    Ok(if spec.eval_unchecked(zero.values()) > cfg.tol.zero {
        Verdict::falsified(Witness::Point { a: zero }, 0, 1, seed)
    } else {
        // a single exact evaluation, recorded as the one grid point
        Verdict::consistent(cfg.sampler.budget, 1, seed)
    })
}

pub fn check_zero_preimage(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<Verdict> {
    let vanishes = check_vanishes_at_zero(spec, arity, cfg)?;
    if vanishes.is_falsified() {
        return Ok(vanishes);
    }
    let tol = cfg.tol;
    let grid = Grid::new(spec, cfg, arity, cfg.sampler.corner_cap);
    let hit = two_phase(
        cfg,
        grid.len(),
        |i| {
            let (a, v) = (&grid.points[i as usize], grid.values[i as usize]);
            separation_fails(a, v, &tol).then(|| Witness::Point { a: a.clone() })
        },
        |d| {
            let mut rng = draw_rng(cfg.sampler.seed, Stream::ZeroPreimage, d);
            let a = sample_tuple(&mut rng, cfg.sampler.scale, arity);
            separation_fails(&a, spec.eval_unchecked(a.values()), &tol).then_some(Witness::Point { a })
        },
    );
    finish(spec, PropertyKind::ZeroPreimageTrivial, cfg, grid.len(), hit)
}

/// Grid pairs `a ≤ b`, then `b = a + p` with `a, p` independent mixture draws.
pub fn check_monotone(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<Verdict> {
    prepare(spec, arity, cfg)?;
    let cmp = cfg.tol.cmp;
    let grid = Grid::new(spec, cfg, arity, PAIR_GRID_CAP);
    let m = grid.len();
    let hit = two_phase(
        cfg,
        m * m,
        |i| {
            let (x, y) = ((i / m) as usize, (i % m) as usize);
            let (a, b) = (&grid.points[x], &grid.points[y]);
            (grid.values[x] > grid.values[y] + cmp && leq(a, b))
                .then(|| Witness::Pair { a: a.clone(), b: b.clone() })
        },
        |d| {
            let mut rng = draw_rng(cfg.sampler.seed, Stream::Monotone, d);
            let a = sample_tuple(&mut rng, cfg.sampler.scale, arity);
            let p = sample_tuple(&mut rng, cfg.sampler.scale, arity);
            let b = sum(&a, &p);
            (spec.eval_unchecked(a.values()) > spec.eval_unchecked(b.values()) + cmp)
                .then_some(Witness::Pair { a, b })
        },
    );
    finish(spec, PropertyKind::Monotone, cfg, m * m, hit)
}

pub fn check_subadditive(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<Verdict> {
    prepare(spec, arity, cfg)?;
    let cmp = cfg.tol.cmp;
    let grid = Grid::new(spec, cfg, arity, PAIR_GRID_CAP);
    let m = grid.len();
    let hit = two_phase(
        cfg,
        m * m,
        |i| {
            let (x, y) = ((i / m) as usize, (i % m) as usize);
            let (a, b) = (&grid.points[x], &grid.points[y]);
            (spec.eval_unchecked(sum(a, b).values()) > grid.values[x] + grid.values[y] + cmp)
                .then(|| Witness::Pair { a: a.clone(), b: b.clone() })
        },
        |d| {
            let mut rng = draw_rng(cfg.sampler.seed, Stream::Subadditive, d);
            let a = sample_tuple(&mut rng, cfg.sampler.scale, arity);
            let b = sample_tuple(&mut rng, cfg.sampler.scale, arity);
            let fab = spec.eval_unchecked(sum(&a, &b).values());
            (fab > spec.eval_unchecked(a.values()) + spec.eval_unchecked(b.values()) + cmp)
                .then_some(Witness::Pair { a, b })
        },
    );
    finish(spec, PropertyKind::Subadditive, cfg, m * m, hit)
}

pub fn check_triplet_preservation(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<Verdict> {
    prepare(spec, arity, cfg)?;
    let cmp = cfg.tol.cmp;
    let grid = Grid::new(spec, cfg, arity, TRIPLE_GRID_CAP);
    let m = grid.len();
    let hit = two_phase(
        cfg,
        m * m * m,
        |i| {
            let (x, y, z) = ((i / (m * m)) as usize, ((i / m) % m) as usize, (i % m) as usize);
            let v = &grid.values;
            let (a, b, c) = (&grid.points[x], &grid.points[y], &grid.points[z]);
            (triplet_excess(v[x], v[y], v[z]) > cmp && is_triangle_triplet(a, b, c).unwrap_or(false))
                .then(|| Witness::Triple { a: a.clone(), b: b.clone(), c: c.clone() })
        },
        |d| {
            let (a, b, c) = sampling::sample_triplet(&cfg.sampler, arity, d).into_parts();
            let f = |t: &NonNegTuple| spec.eval_unchecked(t.values());
            (triplet_excess(f(&a), f(&b), f(&c)) > cmp).then_some(Witness::Triple { a, b, c })
        },
    );
    finish(spec, PropertyKind::TripletPreserving, cfg, m * m * m, hit)
}

pub fn check_asymmetric_triplet(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<Verdict> {
    prepare(spec, arity, cfg)?;
    let cmp = cfg.tol.cmp;
    let grid = Grid::new(spec, cfg, arity, TRIPLE_GRID_CAP);
    let m = grid.len();
    let hit = two_phase(
        cfg,
        m * m * m,
        |i| {
            let (x, y, z) = ((i / (m * m)) as usize, ((i / m) % m) as usize, (i % m) as usize);
            let v = &grid.values;
            let (a, b, c) = (&grid.points[x], &grid.points[y], &grid.points[z]);
            (v[x] > v[y] + v[z] + cmp && leq(a, &sum(b, c)))
                .then(|| Witness::Triple { a: a.clone(), b: b.clone(), c: c.clone() })
        },
        |d| {
            let (a, b, c) = sampling::sample_dominated(&cfg.sampler, arity, d);
            let f = |t: &NonNegTuple| spec.eval_unchecked(t.values());
            (f(&a) > f(&b) + f(&c) + cmp).then_some(Witness::Triple { a, b, c })
        },
    );
    finish(spec, PropertyKind::AsymmetricTriplet, cfg, m * m * m, hit)
}

/// The sampled maximum of `F` over `[0, delta)^n` at one level of the continuity scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityLevel {
    pub delta: f64,
    pub max_value: f64,
    pub argmax: NonNegTuple,
    pub samples: u64,
    pub grid: u64,
}

/// `m(δ)` for `δ = scale · 2^{-j}`, `j = 0..=J`. Each level evaluates the
/// midpoint `(δ/2, …, δ/2)`, the grid points inside the box, and its share of
/// the budget drawn uniformly from the box.
pub fn continuity_profile(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<Vec<ContinuityLevel>> {
    prepare(spec, arity, cfg)?;
    let levels = u64::from(cfg.continuity_levels) + 1;
    let budget = cfg.sampler.budget;
    let grid = corner_points(&search_levels(&cfg.sampler.grid_levels), arity, cfg.sampler.corner_cap);
    let mut out = Vec::with_capacity(levels as usize);
    for j in 0..levels {
        let delta = cfg.sampler.scale * 0.5f64.powi(j as i32);
        let start = budget * j / levels;
        let samples = budget * (j + 1) / levels - start;
        let inside: Vec<&NonNegTuple> = grid.iter().filter(|p| p.values().iter().all(|&x| x < delta)).collect();
        let fixed = 1 + inside.len() as u64;
        let point = |k: u64| -> NonNegTuple {
            if k == 0 {
                NonNegTuple::from_raw(vec![delta / 2.0; arity])
            } else if k < fixed {
                inside[(k - 1) as usize].clone()
            } else {
                let mut rng = draw_rng(cfg.sampler.seed, Stream::Continuity, start + (k - fixed));
                NonNegTuple::from_raw((0..arity).map(|_| rng.random_range(0.0..delta)).collect())
            }
        };
        let (k, max_value, ()) = par::argmax(cfg.workers, fixed + samples, |k| {
            (spec.eval_unchecked(point(k).values()), ())
        })
        .expect("every level has its midpoint");
        out.push(ContinuityLevel { delta, max_value, argmax: point(k), samples, grid: fixed });
    }
    Ok(out)
}

pub fn check_continuity_at_zero(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<Verdict> {
    let profile = continuity_profile(spec, arity, cfg)?;
    let grid: u64 = profile.iter().map(|l| l.grid).sum();
    let last = profile.last().expect("at least one level");
    let seed = cfg.sampler.seed;
    Ok(if last.max_value > cfg.tol.cont {
        let witness = Witness::Continuity { delta: last.delta, a: last.argmax.clone(), value: last.max_value };
        Verdict::falsified(witness, cfg.sampler.budget, grid, seed)
    } else {
        Verdict::consistent(cfg.sampler.budget, grid, seed)
    })
}

fn positive_coordinate<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    loop {
        let v = sample_coordinate(rng, scale);
        if v > 0.0 {
            return v;
        }
    }
}

/// A triangle triplet inside `{0_n} ∪ (0, ∞)^n`, or `None` when rounding
/// produced a zero coordinate in a positive slot.
fn positive_cone_triplet<R: Rng + ?Sized>(rng: &mut R, scale: f64, arity: usize) -> Option<[NonNegTuple; 3]> {
    let side = |rng: &mut R| -> Vec<f64> {
        if rng.random_bool(0.25) {
            vec![0.0; arity]
        } else {
            (0..arity).map(|_| positive_coordinate(rng, scale)).collect()
        }
    };
    let b = side(rng);
    let c = side(rng);
    let a: Vec<f64> = b
        .iter()
        .zip(&c)
        .map(|(&bi, &ci)| {
            let (lo, hi) = ((bi - ci).abs(), bi + ci);
            let x = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            if crate::tuple::scalar_triplet(x, bi, ci) {
                x
            } else {
                hi
            }
        })
        .collect();
    let mixed = |v: &[f64]| v.contains(&0.0) && v.iter().any(|&x| x > 0.0);
    if mixed(&a) {
        return None;
    }
    Some([a, b, c].map(NonNegTuple::from_raw))
}

/// Whether `witness` falsifies separation or triplet preservation on `{0_n} ∪ (0, ∞)^n`.
pub fn positive_cone_violation(spec: &AggregatorSpec, witness: &Witness, tol: &Tolerances) -> Result<bool> {
    let in_cone = |a: &NonNegTuple| a.is_zero() || a.values().iter().all(|&x| x > 0.0);
    match witness {
        Witness::Point { a } => Ok(in_cone(a) && cone_separation_fails(a, spec.evaluate(a)?, tol)),
        Witness::Triple { a, b, c } => Ok([a, b, c].into_iter().all(in_cone)
            && is_triangle_triplet(a, b, c)?
            && triplet_excess(spec.evaluate(a)?, spec.evaluate(b)?, spec.evaluate(c)?) > tol.cmp),
        _ => Err(Error::Contract("positive-cone witnesses are points or triples".into())),
    }
}

/// Separation and triplet preservation restricted to `{0_n} ∪ (0, ∞)^n`.
pub fn check_positive_cone_metric(spec: &AggregatorSpec, arity: usize, cfg: &ClassifierConfig) -> Result<Verdict> {
    prepare(spec, arity, cfg)?;
    let tol = cfg.tol;
    let positive = &search_levels(&cfg.sampler.grid_levels)[1..];
    let mut points = vec![NonNegTuple::zeros(arity)];
    let fits = u32::try_from(arity)
        .ok()
        .and_then(|n| positive.len().checked_pow(n))
        .is_some_and(|size| size < TRIPLE_GRID_CAP);
    if fits {
        points.extend(corner_points(positive, arity, usize::MAX));
    } else {
        points.extend(positive.iter().map(|&l| NonNegTuple::from_raw(vec![l; arity])));
    }
    let values: Vec<f64> = points.iter().map(|p| spec.eval_unchecked(p.values())).collect();
    let m = points.len() as u64;
    let grid_count = m + m * m * m;
    let hit = two_phase(
        cfg,
        grid_count,
        |i| {
            if i < m {
                let a = &points[i as usize];
                return cone_separation_fails(a, values[i as usize], &tol).then(|| Witness::Point { a: a.clone() });
            }
            let i = i - m;
            let (x, y, z) = ((i / (m * m)) as usize, ((i / m) % m) as usize, (i % m) as usize);
            let (a, b, c) = (&points[x], &points[y], &points[z]);
            (triplet_excess(values[x], values[y], values[z]) > tol.cmp && is_triangle_triplet(a, b, c).unwrap_or(false))
                .then(|| Witness::Triple { a: a.clone(), b: b.clone(), c: c.clone() })
        },
        |d| {
            let mut rng = draw_rng(cfg.sampler.seed, Stream::PositiveCone, d);
            let [a, b, c] = positive_cone_triplet(&mut rng, cfg.sampler.scale, arity)?;
            let f = |t: &NonNegTuple| spec.eval_unchecked(t.values());
            let (fa, fb, fc) = (f(&a), f(&b), f(&c));
            for (p, v) in [(&a, fa), (&b, fb), (&c, fc)] {
                if cone_separation_fails(p, v, &tol) {
                    return Some(Witness::Point { a: p.clone() });
                }
            }
            (triplet_excess(fa, fb, fc) > tol.cmp).then_some(Witness::Triple { a, b, c })
        },
    );
    let seed = cfg.sampler.seed;
    Ok(match hit {
        None => Verdict::consistent(cfg.sampler.budget, grid_count, seed),
        Some(Hit::Grid(i, w)) => Verdict::falsified(w, 0, i + 1, seed),
        Some(Hit::Random(i, w)) => Verdict::falsified(w, i + 1, grid_count, seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SamplerConfig;

    fn cfg() -> ClassifierConfig {
        ClassifierConfig::with_sampler(SamplerConfig::default().with_budget(20_000))
    }

    fn t(v: &[f64]) -> NonNegTuple {
        NonNegTuple::new(v.to_vec()).unwrap()
    }

    #[test]
    fn search_order() {
        assert_eq!(
            search_levels(&[0.0, 1e-9, 1e-3, 1.0, 2.0, 3.0, 1e3]),
            vec![0.0, 1.0, 2.0, 3.0, 1e3, 1e-3, 1e-9]
        );
    }

    #[test]
    fn vanishes() {
        assert!(check_vanishes_at_zero(&AggregatorSpec::max(), 2, &cfg()).unwrap().is_consistent());
        assert!(check_vanishes_at_zero(&AggregatorSpec::jump(), 1, &cfg()).unwrap().is_consistent());
        let v = check_vanishes_at_zero(&AggregatorSpec::shift(), 2, &cfg()).unwrap();
        assert_eq!(v.witness, Some(Witness::Point { a: t(&[0.0, 0.0]) }));
    }

    #[test]
    fn zero_preimage_examples() {
        let v = check_zero_preimage(&AggregatorSpec::indicator(), 2, &cfg()).unwrap();
        assert_eq!(v.witness, Some(Witness::Point { a: t(&[0.0, 1.0]) }));
        let v = check_zero_preimage(&AggregatorSpec::projection(2).unwrap(), 2, &cfg()).unwrap();
        assert_eq!(v.witness, Some(Witness::Point { a: t(&[1.0, 0.0]) }));
        assert!(check_zero_preimage(&AggregatorSpec::max(), 2, &cfg()).unwrap().is_consistent());
        // F(0) > 0 is reported through the zero preimage as well
        assert!(check_zero_preimage(&AggregatorSpec::shift(), 1, &cfg()).unwrap().is_falsified());
    }

    #[test]
    fn monotone_examples() {
        let v = check_monotone(&AggregatorSpec::dobos(), 1, &cfg()).unwrap();
        assert_eq!(v.witness, Some(Witness::Pair { a: t(&[2.0]), b: t(&[3.0]) }));
        assert!(check_monotone(&AggregatorSpec::max(), 3, &cfg()).unwrap().is_consistent());
        assert!(check_monotone(&AggregatorSpec::indicator(), 2, &cfg()).unwrap().is_consistent());
    }

    #[test]
    fn subadditive_examples() {
        let v = check_subadditive(&AggregatorSpec::min(), 2, &cfg()).unwrap();
        assert_eq!(v.witness, Some(Witness::Pair { a: t(&[0.0, 1.0]), b: t(&[1.0, 0.0]) }));
        let v = check_subadditive(&AggregatorSpec::square(), 1, &cfg()).unwrap();
        assert_eq!(v.witness, Some(Witness::Pair { a: t(&[1.0]), b: t(&[1.0]) }));
        assert!(check_subadditive(&AggregatorSpec::max(), 3, &cfg()).unwrap().is_consistent());
    }

    #[test]
    fn triplet_examples() {
        assert!(check_triplet_preservation(&AggregatorSpec::dobos(), 1, &cfg()).unwrap().is_consistent());
        assert!(check_triplet_preservation(&AggregatorSpec::max(), 3, &cfg()).unwrap().is_consistent());
        let v = check_triplet_preservation(&AggregatorSpec::square(), 1, &cfg()).unwrap();
        assert!(violation(&AggregatorSpec::square(), PropertyKind::TripletPreserving, v.witness.as_ref().unwrap(), &cfg().tol).unwrap());
    }

    #[test]
    fn asymmetric_examples() {
        let dobos = AggregatorSpec::dobos();
        let v = check_asymmetric_triplet(&dobos, 1, &cfg()).unwrap();
        assert_eq!(v.witness, Some(Witness::Triple { a: t(&[2.0]), b: t(&[0.0]), c: t(&[3.0]) }));
        let concrete = Witness::Triple { a: t(&[2.0]), b: t(&[3.0]), c: t(&[0.0]) };
        assert!(violation(&dobos, PropertyKind::AsymmetricTriplet, &concrete, &cfg().tol).unwrap());
        assert!(check_asymmetric_triplet(&AggregatorSpec::max(), 2, &cfg()).unwrap().is_consistent());
        assert!(check_asymmetric_triplet(&AggregatorSpec::jump(), 1, &cfg()).unwrap().is_consistent());
    }

    #[test]
    fn continuity_examples() {
        let v = check_continuity_at_zero(&AggregatorSpec::jump(), 1, &cfg()).unwrap();
        let delta_min = 4.0 * 0.5f64.powi(40);
        assert_eq!(v.witness, Some(Witness::Continuity { delta: delta_min, a: t(&[delta_min / 2.0]), value: 1.0 }));
        assert!(check_continuity_at_zero(&AggregatorSpec::max(), 3, &cfg()).unwrap().is_consistent());
        assert!(check_continuity_at_zero(&AggregatorSpec::series(16).unwrap(), 16, &cfg()).unwrap().is_consistent());
    }

    #[test]
    fn continuity_profile_bounds_max() {
        for level in continuity_profile(&AggregatorSpec::max(), 2, &cfg()).unwrap() {
            assert!(level.max_value < level.delta);
        }
        let profile = continuity_profile(&AggregatorSpec::max(), 1, &cfg()).unwrap();
        assert_eq!(profile.iter().map(|l| l.samples).sum::<u64>(), 20_000);
    }

    #[test]
    fn positive_cone() {
        let c = cfg();
        assert!(check_positive_cone_metric(&AggregatorSpec::indicator(), 2, &c).unwrap().is_consistent());
        assert!(check_positive_cone_metric(&AggregatorSpec::max(), 3, &c).unwrap().is_consistent());
        let v = check_positive_cone_metric(&AggregatorSpec::min(), 2, &c).unwrap();
        assert!(positive_cone_violation(&AggregatorSpec::min(), v.witness.as_ref().unwrap(), &c.tol).unwrap());
        assert!(check_positive_cone_metric(&AggregatorSpec::constant_zero(), 2, &c).unwrap().is_falsified());
    }

    #[test]
    fn verdicts_do_not_depend_on_workers() {
        let spec = AggregatorSpec::min();
        let base = cfg().with_workers(1);
        for kind in PropertyKind::ALL {
            let seq = check_property(&spec, 3, kind, &base).unwrap();
            for workers in [0, 2, 5] {
                assert_eq!(check_property(&spec, 3, kind, &base.clone().with_workers(workers)).unwrap(), seq);
            }
        }
    }

    #[test]
    fn shape_mismatch_is_a_contract_error() {
        let w = Witness::Point { a: t(&[1.0]) };
        assert!(matches!(
            violation(&AggregatorSpec::max(), PropertyKind::Monotone, &w, &Tolerances::default()),
            Err(Error::Contract(_))
        ));
    }
}
