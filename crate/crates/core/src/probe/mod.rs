//! Probes for behaviour that finite spaces cannot show: convergence of
//! sequences near a limit, and upper semicontinuity and continuity at 0 of
//! `F` restricted to an image.
//!
//! Neighbourhoods of a zero set are unions of half-open boxes. With finitely
//! many coordinates the boxes are a base of the product topology on the cone,
//! so every open set around the zero set contains such a union and checking
//! boxes is enough.

mod image;
mod sequence;

use serde::{Deserialize, Serialize};

pub use image::{NamedCurve, Ray, StructuredImage};
pub use sequence::{
    converges, strongness_probe, ConvergenceMode, ConvergenceVerdict, EpsilonWitness, MemberMetric, ProbeFamily,
    ProbeSequence, SequenceOutcome, SequenceSpace, StrongnessReport, TailProtocol,
};

use crate::aggregators::AggregatorSpec;
use crate::classifier::Tolerances;
use crate::error::{Error, Result};
use crate::tuple::NonNegTuple;
use crate::verdict::{Verdict, Witness};

/// Geometric grids: curves at `t = 2^{-j}` for `j = 0..=ray_levels`, values
/// `δ = 2^{-j}` for `j = 0..=delta_levels`, radii `r = 2^{-j}` for
/// `j = 1..=radius_levels`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeGrids {
    pub ray_levels: u32,
    pub delta_levels: u32,
    pub radius_levels: u32,
}

impl Default for ProbeGrids {
    fn default() -> Self {
        Self { ray_levels: 40, delta_levels: 30, radius_levels: 10 }
    }
}

impl ProbeGrids {
    pub fn deltas(&self) -> Vec<f64> {
        (0..=self.delta_levels).map(|j| 0.5f64.powi(j as i32)).collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        (1..=self.radius_levels.max(1)).map(|j| 0.5f64.powi(j as i32)).collect()
    }
}

fn evaluated(spec: &AggregatorSpec, img: &StructuredImage, grids: &ProbeGrids) -> Result<Vec<(NonNegTuple, f64)>> {
    spec.check_arity(img.arity())?;
    Ok(img
        .samples(grids.ray_levels)
        .into_iter()
        .map(|a| {
            let v = spec.eval_unchecked(a.values());
            (a, v)
        })
        .collect())
}

fn in_box(a: &NonNegTuple, z: &NonNegTuple, r: f64) -> bool {
    a.values()
        .iter()
        .zip(z.values())
        .all(|(&x, &c)| x >= (c - r).max(0.0) && x < c + r)
}

/// Upper semicontinuity at 0 of `t ↦ F|_img^{-1}([0, t))`.
///
/// The zero set `Z` is the samples where `F` is exactly 0. Falsified with
/// witness `(r, δ_min, a)` when, for some radius `r`, every `δ` in the grid has
/// a sample with `F(a) < δ` outside the `r`-box neighbourhood of `Z`.
pub fn check_usc_at_zero(
    spec: &AggregatorSpec,
    img: &StructuredImage,
    grids: &ProbeGrids,
    seed: u64,
) -> Result<Verdict> {
    let samples = evaluated(spec, img, grids)?;
    let zeros: Vec<&NonNegTuple> = samples.iter().filter(|(_, v)| *v == 0.0).map(|(a, _)| a).collect();
    let deltas = grids.deltas();
    let radii = grids.radii();
    let checked = (deltas.len() * radii.len()) as u64;
    let n = samples.len() as u64;
    for &r in &radii {
        let escapes = |delta: f64| {
            samples
                .iter()
                .find(|(a, v)| *v < delta && !zeros.iter().any(|z| in_box(a, z, r)))
                .map(|(a, _)| a.clone())
        };
        if deltas.iter().all(|&d| escapes(d).is_some()) {
            let delta = *deltas.last().expect("delta grid is nonempty");
            let a = escapes(delta).expect("checked above");
            return Ok(Verdict::falsified(Witness::Usc { radius: r, delta, a }, n, checked, seed));
        }
    }
    Ok(Verdict::consistent(n, checked, seed))
}

/// Continuity at `0_n` of `F` restricted to the image. Falsified when every
/// box `[0, δ)^n` of the grid holds a sample with `F > tol_cont`; the witness
/// is the largest value in the smallest box.
pub fn check_restricted_continuity_at_zero(
    spec: &AggregatorSpec,
    img: &StructuredImage,
    grids: &ProbeGrids,
    tol: &Tolerances,
    seed: u64,
) -> Result<Verdict> {
    let samples = evaluated(spec, img, grids)?;
    if !samples.iter().any(|(a, _)| a.is_zero()) {
        return Err(Error::Precondition("the image must contain 0_n".into()));
    }
    let deltas = grids.deltas();
    let n = samples.len() as u64;
    let checked = deltas.len() as u64;
    let worst = |delta: f64| {
        samples
            .iter()
            .filter(|(a, _)| a.values().iter().all(|&x| x < delta))
            .fold(None::<&(NonNegTuple, f64)>, |best, s| match best {
                Some(b) if b.1 >= s.1 => Some(b),
                _ => Some(s),
            })
            .cloned()
            .expect("0_n lies in every box")
    };
    for &delta in &deltas {
        if worst(delta).1 <= tol.cont {
            return Ok(Verdict::consistent(n, checked, seed));
        }
    }
    let delta = *deltas.last().expect("delta grid is nonempty");
    let (a, value) = worst(delta);
    Ok(Verdict::falsified(Witness::Continuity { delta, a, value }, n, checked, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn projection_usc_fails_on_ray() {
        let img = StructuredImage::single_ray(vec![1.0, 0.0], 2).unwrap();
        let v = check_usc_at_zero(&AggregatorSpec::projection(2).unwrap(), &img, &ProbeGrids::default(), 0).unwrap();
        let delta = 0.5f64.powi(30);
        assert_eq!(
            v.witness,
            Some(Witness::Usc { radius: 0.5, delta, a: NonNegTuple::new(vec![1.0, delta / 2.0]).unwrap() })
        );
    }

    #[test]
    fn max_usc_holds_on_grid() {
        let levels = [0.0, 0.25, 0.5, 0.75, 1.0];
        let isolated = levels
            .iter()
            .flat_map(|&x| levels.iter().map(move |&y| NonNegTuple::new(vec![x, y]).unwrap()))
            .collect();
        let img = StructuredImage::new(2, isolated, vec![]).unwrap();
        let v = check_usc_at_zero(&AggregatorSpec::max(), &img, &ProbeGrids::default(), 0).unwrap();
        assert!(v.is_consistent());
        let diag = StructuredImage::diagonal(2);
        assert!(check_usc_at_zero(&AggregatorSpec::max(), &diag, &ProbeGrids::default(), 0).unwrap().is_consistent());
    }

    #[test]
    fn restricted_continuity_examples() {
        let g = ProbeGrids::default();
        let flat = StructuredImage::new(
            2,
            vec![NonNegTuple::zeros(2)],
            vec![Ray::Affine { base: NonNegTuple::zeros(2), direction: vec![1.0, 0.0] }],
        )
        .unwrap();
        assert!(check_restricted_continuity_at_zero(&AggregatorSpec::indicator(), &flat, &g, &tol(), 0).unwrap().is_consistent());
        let line = StructuredImage::diagonal(1);
        assert!(check_restricted_continuity_at_zero(&AggregatorSpec::jump(), &line, &g, &tol(), 0).unwrap().is_falsified());
        assert!(check_restricted_continuity_at_zero(&AggregatorSpec::max(), &line, &g, &tol(), 0).unwrap().is_consistent());
        let no_zero = StructuredImage::new(1, vec![NonNegTuple::new(vec![1.0]).unwrap()], vec![]).unwrap();
        assert!(matches!(
            check_restricted_continuity_at_zero(&AggregatorSpec::max(), &no_zero, &g, &tol(), 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn indicator_is_discontinuous_on_the_diagonal() {
        let v = check_restricted_continuity_at_zero(
            &AggregatorSpec::indicator(),
            &StructuredImage::diagonal(2),
            &ProbeGrids::default(),
            &tol(),
            0,
        )
        .unwrap();
        assert!(v.is_falsified());
    }
}
