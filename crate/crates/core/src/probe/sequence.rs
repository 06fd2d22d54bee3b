use serde::{Deserialize, Serialize};

use crate::aggregators::AggregatorSpec;
use crate::error::{Error, Result};
use crate::verdict::{Verdict, Witness};

/// Minimum number of terms a sequence must have before the tail protocol applies.
pub const MIN_SEQUENCE_LEN: usize = 100;

/// `{0} ∪ {1/k : 1 ≤ k ≤ K}` with `|x − y|`, a truncation of the line near 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpace {
    pub depth: usize,
}

impl SequenceSpace {
    pub fn null_sequence(depth: usize) -> Result<Self> {
        if depth < 10 {
            return Err(Error::InvalidParams(format!("null sequence depth must be at least 10, got {depth}")));
        }
        Ok(Self { depth })
    }

    /// `0, 1, 1/2, …, 1/K`.
    pub fn points(&self) -> Vec<f64> {
        std::iter::once(0.0).chain(self.sequence()).collect()
    }

    /// `1/k` for `k = 1..=K`.
    pub fn sequence(&self) -> Vec<f64> {
        (1..=self.depth).map(|k| 1.0 / k as f64).collect()
    }
}

/// A member distance on the points of a [`SequenceSpace`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "metric", rename_all = "snake_case")]
pub enum MemberMetric {
    Euclid,
    /// `a · d_D`.
    Discrete { scale: f64 },
}

impl MemberMetric {
    fn d(self, x: f64, y: f64) -> f64 {
        match self {
            MemberMetric::Euclid => (x - y).abs(),
            MemberMetric::Discrete { scale } => {
                if x == y {
                    0.0
                } else {
                    scale
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProbeFamily {
    /// `copies` Euclidean factors on products; sequences move in `X^copies`.
    Products { space: SequenceSpace, copies: usize },
    /// Several distances on the one set `X`; sequences move in `X`.
    Sets { space: SequenceSpace, members: Vec<MemberMetric> },
}

impl ProbeFamily {
    pub fn products(space: SequenceSpace, copies: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::Precondition("a family needs at least one member".into()));
        }
        Ok(ProbeFamily::Products { space, copies })
    }

    pub fn sets(space: SequenceSpace, members: Vec<MemberMetric>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Precondition("a family needs at least one member".into()));
        }
        Ok(ProbeFamily::Sets { space, members })
    }

    pub fn arity(&self) -> usize {
        match self {
            ProbeFamily::Products { copies, .. } => *copies,
            ProbeFamily::Sets { members, .. } => members.len(),
        }
    }

    fn point_arity(&self) -> usize {
        match self {
            ProbeFamily::Products { copies, .. } => *copies,
            ProbeFamily::Sets { .. } => 1,
        }
    }

    fn reference_mode(&self) -> ConvergenceMode {
        match self {
            ProbeFamily::Products { .. } => ConvergenceMode::ProductTopology,
            ProbeFamily::Sets { .. } => ConvergenceMode::SupTopology,
        }
    }

    /// Member distances `d_i(limit, term)`.
    fn distances(&self, limit: &[f64], term: &[f64]) -> Vec<f64> {
        match self {
            ProbeFamily::Products { .. } => limit.iter().zip(term).map(|(l, x)| (l - x).abs()).collect(),
            ProbeFamily::Sets { members, .. } => members.iter().map(|m| m.d(limit[0], term[0])).collect(),
        }
    }

    fn space(&self) -> SequenceSpace {
        match self {
            ProbeFamily::Products { space, .. } | ProbeFamily::Sets { space, .. } => *space,
        }
    }

    /// Sequences toward the origin whose reference convergence is guaranteed:
    /// the diagonal and, on products, each coordinate axis.
    pub fn default_sequences(&self) -> Vec<ProbeSequence> {
        let s = self.space().sequence();
        let n = self.point_arity();
        let mut out = vec![ProbeSequence {
            name: "diagonal".into(),
            terms: s.iter().map(|&x| vec![x; n]).collect(),
            limit: vec![0.0; n],
        }];
        if n > 1 {
            for i in 0..n {
                out.push(ProbeSequence {
                    name: format!("axis{}", i + 1),
                    terms: s
                        .iter()
                        .map(|&x| {
                            let mut t = vec![0.0; n];
                            t[i] = x;
                            t
                        })
                        .collect(),
                    limit: vec![0.0; n],
                });
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSequence {
    pub name: String,
    pub terms: Vec<Vec<f64>>,
    pub limit: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvergenceMode {
    ProductTopology,
    SupTopology,
    Aggregated,
}

/// A nonnegative sequence `v_k` is taken to converge to 0 when every term in
/// the last `tail_fraction` is below `tau`, or every such term is below
/// `relative` times the largest term in the first `tail_fraction`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailProtocol {
    pub tau: f64,
    pub tail_fraction: f64,
    pub relative: f64,
}

impl Default for TailProtocol {
    fn default() -> Self {
        Self { tau: 1e-6, tail_fraction: 0.1, relative: 1e-2 }
    }
}

impl TailProtocol {
    fn window(&self, len: usize) -> usize {
        ((len as f64 * self.tail_fraction).ceil() as usize).clamp(1, len)
    }

    /// `None` when `v` converges, else the first tail term at or above the threshold.
    fn judge(&self, v: &[f64]) -> Option<EpsilonWitness> {
        let w = self.window(v.len());
        let tail_start = v.len() - w;
        let head = v[..w].iter().copied().fold(0.0, f64::max);
        let tail = &v[tail_start..];
        if tail.iter().all(|&x| x < self.tau) {
            return None;
        }
        let epsilon = self.tau.max(self.relative * head);
        if tail.iter().all(|&x| x < epsilon) {
            return None;
        }
        let offset = tail.iter().position(|&x| x >= epsilon).expect("some tail term reaches epsilon");
        Some(EpsilonWitness { epsilon, index: tail_start + offset })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonWitness {
    pub epsilon: f64,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub mode: ConvergenceMode,
    pub converges: bool,
    pub epsilon_witness: Option<EpsilonWitness>,
    /// Member whose distances fail to converge, in reference modes.
    pub member: Option<usize>,
    pub protocol: TailProtocol,
}

/// Convergence of a sequence to its limit. `distances[k][i] = d_i(limit, x_k)`.
/// Reference modes require every member column to converge; `Aggregated`
/// mode requires `F(distances[k]) → 0`.
pub fn converges(
    distances: &[Vec<f64>],
    spec: Option<&AggregatorSpec>,
    mode: ConvergenceMode,
    protocol: &TailProtocol,
) -> Result<ConvergenceVerdict> {
    if distances.is_empty() {
        return Err(Error::Empty("sequence has no terms".into()));
    }
    if distances.len() < MIN_SEQUENCE_LEN {
        return Err(Error::Precondition(format!(
            "sequences need at least {MIN_SEQUENCE_LEN} terms, got {}",
            distances.len()
        )));
    }
    let arity = distances[0].len();
    if arity == 0 || distances.iter().any(|d| d.len() != arity) {
        return Err(Error::Dimension { expected: format!("{arity} distances per term"), found: arity });
    }
    let verdict = |w: Option<EpsilonWitness>, member: Option<usize>| ConvergenceVerdict {
        mode,
        converges: w.is_none(),
        epsilon_witness: w,
        member: if w.is_some() { member } else { None },
        protocol: *protocol,
    };
    match mode {
        ConvergenceMode::ProductTopology | ConvergenceMode::SupTopology => {
            for i in 0..arity {
                let column: Vec<f64> = distances.iter().map(|d| d[i]).collect();
                if let Some(w) = protocol.judge(&column) {
                    return Ok(verdict(Some(w), Some(i)));
                }
            }
            Ok(verdict(None, None))
        }
        ConvergenceMode::Aggregated => {
            let spec = spec.ok_or_else(|| Error::Precondition("aggregated convergence needs a function".into()))?;
            let values = distances.iter().map(|d| spec.evaluate_slice(d)).collect::<Result<Vec<f64>>>()?;
            Ok(verdict(protocol.judge(&values), None))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceOutcome {
    pub sequence: String,
    pub reference: ConvergenceVerdict,
    pub aggregated: ConvergenceVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongnessReport {
    pub verdict: Verdict,
    pub outcomes: Vec<SequenceOutcome>,
}

/// Compare convergence in the reference topology (product or supremum) with
/// convergence under `F`. The first sequence on which they disagree is the witness.
pub fn strongness_probe(
    spec: &AggregatorSpec,
    family: &ProbeFamily,
    sequences: &[ProbeSequence],
    protocol: &TailProtocol,
    seed: u64,
) -> Result<StrongnessReport> {
    let arity = family.arity();
    spec.check_arity(arity)?;
    if spec.evaluate_slice(&vec![0.0; arity])? != 0.0 {
        return Err(Error::Precondition(format!("{spec} does not vanish at 0")));
    }
    let n = family.point_arity();
    let mut outcomes = Vec::with_capacity(sequences.len());
    let mut witness = None;
    let mut terms = 0u64;
    for seq in sequences {
        if seq.limit.len() != n || seq.terms.iter().any(|t| t.len() != n) {
            return Err(Error::Dimension { expected: format!("points of arity {n}"), found: seq.limit.len() });
        }
        let distances: Vec<Vec<f64>> = seq.terms.iter().map(|t| family.distances(&seq.limit, t)).collect();
        terms += distances.len() as u64;
        let reference = converges(&distances, None, family.reference_mode(), protocol)?;
        let aggregated = converges(&distances, Some(spec), ConvergenceMode::Aggregated, protocol)?;
        if witness.is_none() && reference.converges != aggregated.converges {
            let w = reference.epsilon_witness.or(aggregated.epsilon_witness).expect("one side diverges");
            witness = Some(Witness::Sequence {
                sequence: seq.name.clone(),
                epsilon: w.epsilon,
                index: w.index,
                converges_in_reference: reference.converges,
                converges_aggregated: aggregated.converges,
            });
        }
        outcomes.push(SequenceOutcome { sequence: seq.name.clone(), reference, aggregated });
    }
    let verdict = match witness {
        Some(w) => Verdict::falsified(w, terms, 0, seed),
        None => Verdict::consistent(terms, 0, seed),
    };
    Ok(StrongnessReport { verdict, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq1(k: usize) -> Vec<Vec<f64>> {
        SequenceSpace::null_sequence(k).unwrap().sequence().into_iter().map(|x| vec![x]).collect()
    }

    #[test]
    fn depth_floor() {
        assert!(SequenceSpace::null_sequence(9).is_err());
        assert_eq!(SequenceSpace::null_sequence(10).unwrap().points().len(), 11);
    }

    #[test]
    fn null_sequence_converges_in_product() {
        let v = converges(&seq1(1000), None, ConvergenceMode::ProductTopology, &TailProtocol::default()).unwrap();
        assert!(v.converges);
        assert!(v.epsilon_witness.is_none());
    }

    #[test]
    fn jump_does_not_converge() {
        let v = converges(&seq1(1000), Some(&AggregatorSpec::jump()), ConvergenceMode::Aggregated, &TailProtocol::default())
            .unwrap();
        assert!(!v.converges);
        let w = v.epsilon_witness.unwrap();
        assert!(w.index >= 900);
    }

    #[test]
    fn constant_at_limit_converges_everywhere() {
        let zeros = vec![vec![0.0, 0.0]; 200];
        for mode in [ConvergenceMode::ProductTopology, ConvergenceMode::SupTopology, ConvergenceMode::Aggregated] {
            let v = converges(&zeros, Some(&AggregatorSpec::indicator()), mode, &TailProtocol::default()).unwrap();
            assert!(v.converges);
        }
    }

    #[test]
    fn short_or_empty_sequences() {
        let p = TailProtocol::default();
        assert!(matches!(converges(&[], None, ConvergenceMode::ProductTopology, &p), Err(Error::Empty(_))));
        assert!(matches!(converges(&seq1(50), None, ConvergenceMode::ProductTopology, &p), Err(Error::Precondition(_))));
    }

    #[test]
    fn probe_examples() {
        let space = SequenceSpace::null_sequence(1000).unwrap();
        let p = TailProtocol::default();
        let fam = ProbeFamily::products(space, 1).unwrap();
        let r = strongness_probe(&AggregatorSpec::jump(), &fam, &fam.default_sequences(), &p, 0).unwrap();
        assert!(r.verdict.is_falsified());
        match r.verdict.witness.unwrap() {
            Witness::Sequence { converges_in_reference, converges_aggregated, .. } => {
                assert!(converges_in_reference && !converges_aggregated)
            }
            w => panic!("{w:?}"),
        }
        let fam = ProbeFamily::products(space, 3).unwrap();
        assert!(strongness_probe(&AggregatorSpec::max(), &fam, &fam.default_sequences(), &p, 0).unwrap().verdict.is_consistent());
        let fam = ProbeFamily::products(space, 16).unwrap();
        let r = strongness_probe(&AggregatorSpec::series(16).unwrap(), &fam, &fam.default_sequences(), &p, 0).unwrap();
        assert!(r.verdict.is_consistent());
        assert_eq!(r.outcomes.len(), 17);
    }

    #[test]
    fn reverse_direction_is_detected() {
        // (1, 1/k) does not converge to 0 in the product, but its second coordinate does
        let space = SequenceSpace::null_sequence(200).unwrap();
        let fam = ProbeFamily::products(space, 2).unwrap();
        let seq = ProbeSequence {
            name: "pinned".into(),
            terms: space.sequence().into_iter().map(|x| vec![1.0, x]).collect(),
            limit: vec![0.0, 0.0],
        };
        let r = strongness_probe(&AggregatorSpec::projection(2).unwrap(), &fam, &[seq], &TailProtocol::default(), 0).unwrap();
        match r.verdict.witness.unwrap() {
            Witness::Sequence { converges_in_reference, converges_aggregated, .. } => {
                assert!(!converges_in_reference && converges_aggregated)
            }
            w => panic!("{w:?}"),
        }
    }

    #[test]
    fn sets_family() {
        let space = SequenceSpace::null_sequence(500).unwrap();
        let fam = ProbeFamily::sets(space, vec![MemberMetric::Euclid, MemberMetric::Euclid]).unwrap();
        let seqs = fam.default_sequences();
        assert_eq!(seqs.len(), 1);
        let r = strongness_probe(&AggregatorSpec::indicator(), &fam, &seqs, &TailProtocol::default(), 0).unwrap();
        assert!(r.verdict.is_falsified());
        let fam = ProbeFamily::sets(space, vec![MemberMetric::Euclid, MemberMetric::Discrete { scale: 1.0 }]).unwrap();
        let r = strongness_probe(&AggregatorSpec::max(), &fam, &fam.default_sequences(), &TailProtocol::default(), 0).unwrap();
        // neither side converges: the discrete member keeps the sequence away
        assert!(r.verdict.is_consistent());
        assert!(!r.outcomes[0].reference.converges);
        assert!(matches!(strongness_probe(&AggregatorSpec::shift(), &fam, &seqs, &TailProtocol::default(), 0), Err(Error::Precondition(_))));
    }
}
