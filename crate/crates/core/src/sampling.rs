//! Deterministic samplers over `[0, ∞)^n`.
//!
//! Every draw gets its own ChaCha stream keyed by `(seed, stream tag, draw index)`,
//! so a draw never depends on how many draws came before it or on which worker
//! evaluates it.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tuple::{scalar_triplet, NonNegTuple, TriangleTriplet};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BUDGET: u64 = 100_000;
pub const DEFAULT_SCALE: f64 = 4.0;
pub const DEFAULT_CORNER_CAP: usize = 1 << 16;
pub const DEFAULT_GRID_LEVELS: [f64; 7] = [0.0, 1e-9, 1e-3, 1.0, 2.0, 3.0, 1e3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub budget: u64,
    pub scale: f64,
    pub grid_levels: Vec<f64>,
    /// Largest grid `corner_stream` will enumerate.
    pub corner_cap: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            budget: DEFAULT_BUDGET,
            scale: DEFAULT_SCALE,
            grid_levels: DEFAULT_GRID_LEVELS.to_vec(),
            corner_cap: DEFAULT_CORNER_CAP,
        }
    }
}

impl SamplerConfig {
    pub fn new(seed: u64, budget: u64, scale: f64, grid_levels: Vec<f64>) -> Result<Self> {
        let cfg = Self {
            seed,
            budget,
            scale,
            grid_levels,
            corner_cap: DEFAULT_CORNER_CAP,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget < 1 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Config(format!("scale must be positive, got {}", self.scale)));
        }
        match self.grid_levels.first() {
            Some(&0.0) => {}
            _ => return Err(Error::Config("grid levels must start at 0".into())),
        }
        if !self.grid_levels.iter().all(|v| v.is_finite()) {
            return Err(Error::Config("grid levels must be finite".into()));
        }
        if self.grid_levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("grid levels must be strictly ascending".into()));
        }
        if self.corner_cap == 0 {
            return Err(Error::Config("corner cap must be positive".into()));
        }
        Ok(())
    }
}

/// Stream tags separating the random sequences used by different consumers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Point = 1,
    Triplet = 2,
    Dominated = 3,
    ZeroPreimage = 4,
    Monotone = 5,
    Subadditive = 6,
    Continuity = 7,
    PositiveCone = 8,
    Spaces = 9,
}

/// Generator for draw `index` of `stream` under `seed`.
pub fn draw_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let key = seed ^ (stream as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// One coordinate from the zero-heavy mixture: 1/4 exact zero, 1/2 uniform on
/// `[0, scale]`, 1/4 exponential with mean `scale / 4`.
pub fn sample_coordinate<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    let pick: f64 = rng.random();
    if pick < 0.25 {
        0.0
    } else if pick < 0.75 {
        rng.random_range(0.0..=scale)
    } else {
        let exp = Exp::new(4.0 / scale).expect("scale is positive");
        exp.sample(rng)
    }
}

pub fn sample_tuple<R: Rng + ?Sized>(rng: &mut R, scale: f64, arity: usize) -> NonNegTuple {
    NonNegTuple::from_raw((0..arity).map(|_| sample_coordinate(rng, scale)).collect())
}

/// A single mixture point.
pub fn sample_point(cfg: &SamplerConfig, arity: usize, draw: u64) -> NonNegTuple {
    let mut rng = draw_rng(cfg.seed, Stream::Point, draw);
    sample_tuple(&mut rng, cfg.scale, arity)
}

pub(crate) fn triplet_from<R: Rng + ?Sized>(rng: &mut R, scale: f64, arity: usize) -> TriangleTriplet {
    let b = sample_tuple(rng, scale, arity);
    let c = sample_tuple(rng, scale, arity);
    let a = b
        .values()
        .iter()
        .zip(c.values())
        .map(|(&bi, &ci)| {
            let lo = (bi - ci).abs();
            let hi = bi + ci;
            let ai = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            // rounding in `lo` can push the draw just outside the admissible
            // interval; `hi` itself always satisfies all three inequalities
            if scalar_triplet(ai, bi, ci) {
                ai
            } else {
                hi
            }
        })
        .collect();
    TriangleTriplet::from_raw(NonNegTuple::from_raw(a), b, c)
}

/// Draw `(a, b, c)` with `b, c` from the mixture and `a_i` uniform on
/// `[|b_i − c_i|, b_i + c_i]`.
pub fn sample_triplet(cfg: &SamplerConfig, arity: usize, draw: u64) -> TriangleTriplet {
    let mut rng = draw_rng(cfg.seed, Stream::Triplet, draw);
    triplet_from(&mut rng, cfg.scale, arity)
}

pub(crate) fn dominated_from<R: Rng + ?Sized>(
    rng: &mut R,
    scale: f64,
    arity: usize,
) -> (NonNegTuple, NonNegTuple, NonNegTuple) {
    let b = sample_tuple(rng, scale, arity);
    let c = sample_tuple(rng, scale, arity);
    let a = b
        .values()
        .iter()
        .zip(c.values())
        .map(|(&bi, &ci)| {
            let hi = bi + ci;
            if hi > 0.0 {
                rng.random_range(0.0..=hi).min(hi)
            } else {
                0.0
            }
        })
        .collect();
    (NonNegTuple::from_raw(a), b, c)
}

/// Draw `(a, b, c)` with `b, c` from the mixture and `a_i` uniform on `[0, b_i + c_i]`.
pub fn sample_dominated(
    cfg: &SamplerConfig,
    arity: usize,
    draw: u64,
) -> (NonNegTuple, NonNegTuple, NonNegTuple) {
    let mut rng = draw_rng(cfg.seed, Stream::Dominated, draw);
    dominated_from(&mut rng, cfg.scale, arity)
}

/// The full grid `grid_levels^arity` in lexicographic order.
pub fn corner_stream(cfg: &SamplerConfig, arity: usize) -> Result<Vec<NonNegTuple>> {
    if arity == 0 {
        return Err(Error::InvalidTuple("arity must be at least 1".into()));
    }
    let levels = cfg.grid_levels.len();
    let required = grid_size(levels, arity);
    if required.is_none_or(|n| n > cfg.corner_cap) {
        return Err(Error::CapExceeded {
            cap: cfg.corner_cap,
            required: required.unwrap_or(usize::MAX),
        });
    }
    Ok(full_grid(&cfg.grid_levels, arity))
}

fn grid_size(levels: usize, arity: usize) -> Option<usize> {
    u32::try_from(arity).ok().and_then(|a| levels.checked_pow(a))
}

fn full_grid(levels: &[f64], arity: usize) -> Vec<NonNegTuple> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; arity];
    loop {
        out.push(NonNegTuple::from_raw(idx.iter().map(|&i| levels[i]).collect()));
        let mut pos = arity;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < levels.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Grid points with at most `support` nonzero coordinates, lexicographic.
fn sparse_grid(levels: &[f64], arity: usize, support: usize) -> Vec<NonNegTuple> {
    // depth-first in lexicographic order, pruning once the support is used up
    fn rec(
        levels: &[f64],
        arity: usize,
        support: usize,
        prefix: &mut Vec<f64>,
        nonzero: usize,
        out: &mut Vec<NonNegTuple>,
    ) {
        if prefix.len() == arity {
            out.push(NonNegTuple::from_raw(prefix.clone()));
            return;
        }
        for &l in levels {
            let nz = nonzero + usize::from(l != 0.0);
            if nz > support {
                continue;
            }
            prefix.push(l);
            rec(levels, arity, support, prefix, nz, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(levels, arity, support, &mut Vec::with_capacity(arity), 0, &mut out);
    out
}

/// Corner points used by the checkers: the full grid when it fits under `cap`,
/// otherwise the points with at most two, then at most one, nonzero coordinate,
/// truncated to `cap` as a last resort.
pub(crate) fn corner_points(levels: &[f64], arity: usize, cap: usize) -> Vec<NonNegTuple> {
    let l = levels.len();
    if grid_size(l, arity).is_some_and(|n| n <= cap) {
        return full_grid(levels, arity);
    }
    let nz = l - 1;
    let pairs = 1 + arity * nz + arity * arity.saturating_sub(1) / 2 * nz * nz;
    if pairs <= cap {
        return sparse_grid(levels, arity, 2);
    }
    let mut singles = sparse_grid(levels, arity, 1);
    singles.truncate(cap.max(1));
    singles
}
