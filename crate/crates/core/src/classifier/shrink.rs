use std::collections::BTreeMap;

use super::checks::{triplet_excess, violation};
use super::{PropertyKind, Propagation, Tolerances};
use crate::aggregators::AggregatorSpec;
use crate::error::{Error, Result};
use crate::tuple::NonNegTuple;
use crate::verdict::{Verdict, Witness};

/// Smaller replacement values for one entry, most aggressive first.
fn candidates(x: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    if x > 1.0 {
        out.extend([1.0, x.floor(), x / 2.0]);
    }
    out.retain(|&c| c < x);
    out.dedup();
    out
}

fn slots(w: &Witness) -> Vec<Vec<f64>> {
    match w {
        Witness::Point { a } => vec![a.values().to_vec()],
        Witness::Pair { a, b } => vec![a.values().to_vec(), b.values().to_vec()],
        Witness::Triple { a, b, c } => vec![a.values().to_vec(), b.values().to_vec(), c.values().to_vec()],
        _ => Vec::new(),
    }
}

fn rebuild(w: &Witness, s: &[Vec<f64>]) -> Witness {
    let t = |i: usize| NonNegTuple::from_raw(s[i].clone());
    match w {
        Witness::Point { .. } => Witness::Point { a: t(0) },
        Witness::Pair { .. } => Witness::Pair { a: t(0), b: t(1) },
        Witness::Triple { .. } => Witness::Triple { a: t(0), b: t(1), c: t(2) },
        other => other.clone(),
    }
}

/// Move witness entries toward 0 and toward round values while the witness
/// keeps falsifying `kind`. Every output entry is at most the matching input entry.
pub fn shrink_witness(spec: &AggregatorSpec, kind: PropertyKind, witness: &Witness, tol: &Tolerances) -> Result<Witness> {
    if !violation(spec, kind, witness, tol)? {
        return Err(Error::Contract(format!("witness does not falsify {}", kind.name())));
    }
    let mut s = slots(witness);
    loop {
        let mut changed = false;
        for slot in 0..s.len() {
            for i in 0..s[slot].len() {
                for c in candidates(s[slot][i]) {
                    let old = s[slot][i];
                    s[slot][i] = c;
                    if violation(spec, kind, &rebuild(witness, &s), tol)? {
                        changed = true;
                        break;
                    }
                    s[slot][i] = old;
                }
            }
        }
        if !changed {
            return Ok(rebuild(witness, &s));
        }
    }
}

/// Split a violation `F(a) > F(b) + F(c)` with `a ≤ b + c` through the point
/// `b + c`: either `F(a) > F(b + c)` (a monotonicity failure) or
/// `F(b + c) > F(b) + F(c)` (a subadditivity failure). The branch carrying the
/// larger part of the violation is returned, so the derived witness keeps at
/// least half of it.
pub fn propagate_triplet_witness(
    spec: &AggregatorSpec,
    a: &NonNegTuple,
    b: &NonNegTuple,
    c: &NonNegTuple,
) -> Result<(PropertyKind, Witness)> {
    let s = b.add(c)?;
    if !a.le(&s)? {
        return Err(Error::Contract("propagation needs a ≤ b + c".into()));
    }
    let (fa, fb, fc, fs) = (spec.evaluate(a)?, spec.evaluate(b)?, spec.evaluate(c)?, spec.evaluate(&s)?);
    if !(fa > fb + fc) {
        return Err(Error::Contract("propagation needs F(a) > F(b) + F(c)".into()));
    }
    let mono = fa - fs;
    let sub = fs - fb - fc;
    Ok(if mono >= sub {
        (PropertyKind::Monotone, Witness::Pair { a: a.clone(), b: s })
    } else {
        (PropertyKind::Subadditive, Witness::Pair { a: b.clone(), b: c.clone() })
    })
}

/// Put the violated inequality of a triangle-triplet witness first.
fn orient(spec: &AggregatorSpec, a: &NonNegTuple, b: &NonNegTuple, c: &NonNegTuple) -> Result<[NonNegTuple; 3]> {
    let (fa, fb, fc) = (spec.evaluate(a)?, spec.evaluate(b)?, spec.evaluate(c)?);
    let e = triplet_excess(fa, fb, fc);
    Ok(if fa - (fb + fc) == e {
        [a.clone(), b.clone(), c.clone()]
    } else if fb - (fa + fc) == e {
        [b.clone(), a.clone(), c.clone()]
    } else {
        [c.clone(), a.clone(), b.clone()]
    })
}

/// Derive Monotone or Subadditive witnesses from the triplet verdicts for
/// targets whose own sampler found nothing.
pub(crate) fn propagate_all(
    spec: &AggregatorSpec,
    verdicts: &BTreeMap<PropertyKind, Verdict>,
    tol: &Tolerances,
) -> Result<Vec<Propagation>> {
    let mut out: Vec<Propagation> = Vec::new();
    for source in [PropertyKind::TripletPreserving, PropertyKind::AsymmetricTriplet] {
        let Some(Witness::Triple { a, b, c }) = verdicts.get(&source).and_then(|v| v.witness.as_ref()) else {
            continue;
        };
        let [a, b, c] = if source == PropertyKind::TripletPreserving {
            orient(spec, a, b, c)?
        } else {
            [a.clone(), b.clone(), c.clone()]
        };
        let excess = spec.evaluate(&a)? - spec.evaluate(&b)? - spec.evaluate(&c)?;
        if !(excess > 2.0 * tol.cmp) {
            continue;
        }
        let (target, witness) = propagate_triplet_witness(spec, &a, &b, &c)?;
        let open = verdicts.get(&target).is_some_and(|v| v.is_consistent()) && out.iter().all(|p| p.target != target);
        if open && violation(spec, target, &witness, tol)? {
            let witness = shrink_witness(spec, target, &witness, tol)?;
            out.push(Propagation { source, target, witness });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[f64]) -> NonNegTuple {
        NonNegTuple::new(v.to_vec()).unwrap()
    }

    #[test]
    fn indicator_zero_preimage_shrinks() {
        let w = Witness::Point { a: t(&[0.0, 7.3]) };
        let out = shrink_witness(&AggregatorSpec::indicator(), PropertyKind::ZeroPreimageTrivial, &w, &Tolerances::default());
        assert_eq!(out.unwrap(), Witness::Point { a: t(&[0.0, 1.0]) });
    }

    #[test]
    fn min_shrinks_to_unit_pattern() {
        let w = Witness::Pair { a: t(&[0.0, 7.0]), b: t(&[5.0, 0.0]) };
        let out = shrink_witness(&AggregatorSpec::min(), PropertyKind::Subadditive, &w, &Tolerances::default()).unwrap();
        assert_eq!(out, Witness::Pair { a: t(&[0.0, 1.0]), b: t(&[1.0, 0.0]) });
    }

    #[test]
    fn minimal_witness_is_a_fixpoint() {
        let w = Witness::Pair { a: t(&[2.0]), b: t(&[3.0]) };
        let out = shrink_witness(&AggregatorSpec::dobos(), PropertyKind::Monotone, &w, &Tolerances::default()).unwrap();
        assert_eq!(out, w);
    }

    #[test]
    fn non_falsifying_input_is_rejected() {
        let w = Witness::Pair { a: t(&[1.0]), b: t(&[2.0]) };
        let out = shrink_witness(&AggregatorSpec::max(), PropertyKind::Monotone, &w, &Tolerances::default());
        assert!(matches!(out, Err(Error::Contract(_))));
    }

    #[test]
    fn propagation_examples() {
        let (kind, w) = propagate_triplet_witness(&AggregatorSpec::square(), &t(&[2.0]), &t(&[1.0]), &t(&[1.0])).unwrap();
        assert_eq!(kind, PropertyKind::Subadditive);
        assert_eq!(w, Witness::Pair { a: t(&[1.0]), b: t(&[1.0]) });

        let (kind, w) = propagate_triplet_witness(&AggregatorSpec::dobos(), &t(&[2.0]), &t(&[3.0]), &t(&[0.0])).unwrap();
        assert_eq!(kind, PropertyKind::Monotone);
        assert_eq!(w, Witness::Pair { a: t(&[2.0]), b: t(&[3.0]) });
        assert!(violation(&AggregatorSpec::dobos(), kind, &w, &Tolerances::default()).unwrap());
    }

    #[test]
    fn propagation_precondition() {
        let r = propagate_triplet_witness(&AggregatorSpec::max(), &t(&[1.0]), &t(&[1.0]), &t(&[1.0]));
        assert!(matches!(r, Err(Error::Contract(_))));
        let r = propagate_triplet_witness(&AggregatorSpec::square(), &t(&[3.0]), &t(&[1.0]), &t(&[1.0]));
        assert!(matches!(r, Err(Error::Contract(_))));
    }
}
