use proptest::prelude::*;

use metriforge::aggregators::AggregatorSpec;
use metriforge::alexandrov::{compare, minimal_neighborhoods, product_neighborhoods, supremum_neighborhoods, TopologyOrder};
use metriforge::classifier::{
    classify, shrink_witness, violation, ClassName, ClassifierConfig, Mode, PropertyKind, Strength,
};
use metriforge::probe::{check_usc_at_zero, ProbeGrids, StructuredImage};
use metriforge::sampling::{corner_stream, sample_dominated, sample_triplet, SamplerConfig};
use metriforge::spaces::{product_aggregate, random_space, set_aggregate, validate_space, AxiomClass, SpaceFamily};
use metriforge::tuple::{is_triangle_triplet, NonNegTuple};

fn sampler(seed: u64) -> SamplerConfig {
    SamplerConfig::default().with_seed(seed)
}

/// Axiom class of a matrix, computed directly from the definitions.
fn oracle_class(m: &[Vec<f64>]) -> Option<AxiomClass> {
    let n = m.len();
    for i in 0..n {
        if m[i][i] != 0.0 || m[i].iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
            return None;
        }
        for j in 0..n {
            for k in 0..n {
                if m[i][k] > m[i][j] + m[j][k] {
                    return None;
                }
            }
        }
    }
    let symmetric = (0..n).all(|i| (0..n).all(|j| m[i][j] == m[j][i]));
    let separated = (0..n).all(|i| (0..n).all(|j| i == j || m[i][j] > 0.0 || m[j][i] > 0.0));
    Some(match (symmetric, separated) {
        (true, true) => AxiomClass::Metric,
        (true, false) => AxiomClass::Pseudometric,
        (false, true) => AxiomClass::QuasiMetric,
        (false, false) => AxiomClass::QuasiPseudometric,
    })
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

fn matrix(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0u8..4, n), n)).prop_map(|rows| {
        rows.iter()
            .enumerate()
            .map(|(i, r)| r.iter().enumerate().map(|(j, &v)| if i == j { 0.0 } else { f64::from(v) }).collect())
            .collect()
    })
}

fn spec_strategy() -> impl Strategy<Value = (AggregatorSpec, usize)> {
    prop_oneof![
        (1usize..4).prop_map(|n| (AggregatorSpec::max(), n)),
        (1usize..4).prop_map(|n| (AggregatorSpec::min(), n)),
        prop::collection::vec(0.0f64..3.0, 1..4).prop_map(|w| {
            let n = w.len();
            (AggregatorSpec::weighted_sum(w).unwrap(), n)
        }),
        (1.0f64..5.0, 1usize..4).prop_map(|(p, n)| (AggregatorSpec::pnorm(p).unwrap(), n)),
        (1usize..4).prop_map(|n| (AggregatorSpec::series(n).unwrap(), n)),
        Just((AggregatorSpec::dobos(), 1)),
        Just((AggregatorSpec::jump(), 1)),
        Just((AggregatorSpec::indicator(), 2)),
        (1usize..3).prop_map(|k| (AggregatorSpec::projection(k).unwrap(), 2)),
        Just((AggregatorSpec::square(), 1)),
        Just((AggregatorSpec::shift(), 2)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triplet_sampler_yields_triplets(seed in any::<u64>(), arity in 1usize..5, draw in any::<u64>()) {
        let t = sample_triplet(&sampler(seed), arity, draw);
        prop_assert!(is_triangle_triplet(t.a(), t.b(), t.c()).unwrap());
        prop_assert_eq!(t, sample_triplet(&sampler(seed), arity, draw));
    }

    #[test]
    fn dominated_sampler_is_dominated(seed in any::<u64>(), arity in 1usize..5, draw in any::<u64>()) {
        let (a, b, c) = sample_dominated(&sampler(seed), arity, draw);
        prop_assert!(a.le(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!((a, b, c), sample_dominated(&sampler(seed), arity, draw));
    }

    #[test]
    fn corner_stream_is_distinct(levels in prop::collection::btree_set(0u16..200, 1..5), arity in 1usize..4) {
        let mut cfg = SamplerConfig::default();
        cfg.grid_levels = std::iter::once(0.0).chain(levels.iter().map(|&l| f64::from(l) + 1.0)).collect();
        let pts = corner_stream(&cfg, arity).unwrap();
        prop_assert_eq!(pts.len(), cfg.grid_levels.len().pow(arity as u32));
        for w in pts.windows(2) {
            prop_assert!(w[0].values() < w[1].values());
        }
    }

    #[test]
    fn validation_agrees_with_oracle(m in matrix(5)) {
        let expected = oracle_class(&m);
        let got = validate_space(labels(m.len()), m).ok().map(|s| s.axiom_class());
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn random_spaces_are_valid(seed in any::<u64>(), n in 1usize..7, symmetric in any::<bool>()) {
        let s = random_space(seed, 0, n, symmetric);
        let class = oracle_class(s.matrix());
        prop_assert_eq!(Some(s.axiom_class()), class);
        prop_assert!(!symmetric || s.axiom_class().is_symmetric());
        let u = minimal_neighborhoods(&s);
        prop_assert!(u.is_transitive());
        for x in 0..n {
            prop_assert!(u.contains(x, x));
        }
    }

    #[test]
    fn reversal_is_an_involution(seed in any::<u64>(), n in 1usize..6) {
        let s = random_space(seed, 1, n, false);
        prop_assert_eq!(s.reversed().reversed(), s.clone());
        prop_assert_eq!(s.reversed().axiom_class().is_symmetric(), s.axiom_class().is_symmetric());
    }

    #[test]
    fn max_aggregate_is_product_topology(seed in any::<u64>(), sizes in prop::collection::vec(1usize..4, 1..4)) {
        let members: Vec<_> = sizes.iter().enumerate().map(|(i, &n)| random_space(seed, i as u64, n, false)).collect();
        let maps: Vec<_> = members.iter().map(minimal_neighborhoods).collect();
        let fam = SpaceFamily::products(members).unwrap();
        let agg = product_aggregate(&AggregatorSpec::max(), &fam).unwrap();
        let product = product_neighborhoods(&maps).unwrap();
        prop_assert_eq!(compare(&product, &minimal_neighborhoods(&agg)).unwrap(), TopologyOrder::Equal);
    }

    #[test]
    fn supremum_is_coarsest_above_members(seed in any::<u64>(), n in 1usize..5, k in 1usize..4) {
        let members: Vec<_> = (0..k).map(|i| random_space(seed, i as u64, n, false)).collect();
        let maps: Vec<_> = members.iter().map(minimal_neighborhoods).collect();
        let sup = supremum_neighborhoods(&maps).unwrap();
        prop_assert!(sup.is_transitive());
        for m in &maps {
            prop_assert!(compare(m, &sup).unwrap().first_included());
        }
        let agg = set_aggregate(&AggregatorSpec::max(), &SpaceFamily::sets(members).unwrap()).unwrap();
        prop_assert_eq!(compare(&sup, &minimal_neighborhoods(&agg)).unwrap(), TopologyOrder::Equal);
    }

    #[test]
    fn compare_is_antisymmetric(seed in any::<u64>(), n in 1usize..6) {
        let a = minimal_neighborhoods(&random_space(seed, 0, n, false));
        let b = minimal_neighborhoods(&random_space(seed, 1, n, false));
        let ab = compare(&a, &b).unwrap();
        let ba = compare(&b, &a).unwrap();
        prop_assert_eq!(ab.first_included(), ba.second_included());
        prop_assert_eq!(ab.second_included(), ba.first_included());
        prop_assert_eq!(compare(&a, &a).unwrap(), TopologyOrder::Equal);
    }

    #[test]
    fn isolated_images_are_usc(points in prop::collection::vec(prop::collection::vec(1e-3f64..10.0, 2), 1..12)) {
        // 0 plus finitely many points far from it: every small δ isolates the zero set
        let mut isolated = vec![NonNegTuple::zeros(2)];
        isolated.extend(points.into_iter().map(|p| NonNegTuple::new(p).unwrap()));
        let img = StructuredImage::new(2, isolated, vec![]).unwrap();
        for spec in [AggregatorSpec::max(), AggregatorSpec::pnorm(2.0).unwrap(), AggregatorSpec::projection(2).unwrap()] {
            prop_assert!(check_usc_at_zero(&spec, &img, &ProbeGrids::default(), 0).unwrap().is_consistent());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classifier_is_sound((spec, arity) in spec_strategy(), seed in any::<u64>()) {
        let cfg = ClassifierConfig::with_sampler(sampler(seed).with_budget(2000));
        let r = classify(&spec, arity, &cfg).unwrap();
        for (kind, v) in &r.verdicts {
            if let Some(w) = &v.witness {
                prop_assert!(violation(&spec, *kind, w, &cfg.tol).unwrap(), "{} {:?} {:?}", spec, kind, w);
                if *kind != PropertyKind::ContinuousAtZero {
                    let shrunk = shrink_witness(&spec, *kind, w, &cfg.tol).unwrap();
                    prop_assert_eq!(&shrunk, w);
                }
            } else {
                prop_assert_eq!(v.samples_used, cfg.sampler.budget);
            }
        }
        for p in &r.propagated {
            prop_assert!(violation(&spec, p.target, &p.witness, &cfg.tol).unwrap());
        }
    }

    #[test]
    fn lattice_is_monotone((spec, arity) in spec_strategy(), seed in any::<u64>()) {
        let cfg = ClassifierConfig::with_sampler(sampler(seed).with_budget(2000));
        let r = classify(&spec, arity, &cfg).unwrap();
        for c in ClassName::all() {
            let status = r.class(c);
            prop_assert!(!(status.is_consistent() && status.is_excluded()));
            if c.strength == Strength::Strongly && status.is_consistent() {
                prop_assert!(r.class(ClassName { strength: Strength::Plain, ..c }).is_consistent(), "{}", c);
            }
            if c.mode == Mode::Products && status.is_consistent() {
                prop_assert!(r.class(ClassName { mode: Mode::Sets, ..c }).is_consistent(), "{}", c);
            }
            if c.strength == Strength::Plain && status.is_excluded() {
                prop_assert!(!r.class(ClassName { strength: Strength::Strongly, ..c }).is_consistent(), "{}", c);
            }
        }
    }
}
