//! Values computed outside this crate (by hand or in an independent script) and frozen here.

use metriforge::aggregators::{parse_spec, AggregatorSpec};
use metriforge::alexandrov::{check_product_inclusion, check_sup_inclusion, TopologyOrder};
use metriforge::sampling::{corner_stream, SamplerConfig};
use metriforge::spaces::{
    discrete, euclid_points, indiscrete, oneway, product_aggregate, set_aggregate, AxiomClass, SpaceFamily,
};
use metriforge::tuple::{is_triangle_triplet, NonNegTuple};
use metriforge::verdict::Witness;
use metriforge::Error;

fn t(v: &[f64]) -> NonNegTuple {
    NonNegTuple::new(v.to_vec()).unwrap()
}

fn eval(spec: &str, a: &[f64]) -> f64 {
    parse_spec(spec).unwrap().evaluate(&t(a)).unwrap()
}

#[test]
fn triangle_triplet_examples() {
    assert!(is_triangle_triplet(&t(&[0.0]), &t(&[0.0]), &t(&[0.0])).unwrap());
    assert!(!is_triangle_triplet(&t(&[3.0]), &t(&[1.0]), &t(&[1.0])).unwrap());
    assert!(is_triangle_triplet(&t(&[2.0, 1.0]), &t(&[1.0, 1.0]), &t(&[1.0, 1.0])).unwrap());
    assert!(matches!(
        is_triangle_triplet(&t(&[1.0]), &t(&[1.0, 1.0]), &t(&[1.0])),
        Err(Error::Dimension { .. })
    ));
}

#[test]
fn corner_stream_examples() {
    let mut cfg = SamplerConfig::default();
    cfg.grid_levels = vec![0.0, 1.0];
    let pts: Vec<Vec<f64>> = corner_stream(&cfg, 2).unwrap().into_iter().map(NonNegTuple::into_inner).collect();
    assert_eq!(pts, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
    cfg.grid_levels = vec![0.0];
    assert_eq!(corner_stream(&cfg, 3).unwrap().len(), 1);
    cfg.grid_levels = vec![0.0, 1e-9, 1.0, 10.0];
    let pts = corner_stream(&cfg, 2).unwrap();
    assert_eq!(pts.len(), 16);
    assert!(pts[0].is_zero());
}

#[test]
fn evaluations() {
    assert_eq!(eval("series(4)", &[1.0, 2.0, 3.0, 4.0]), 0.5604166666666667);
    assert!((eval("pnorm(3)", &[1.0, 2.0, 2.0]) - 2.571281590658235).abs() < 1e-14);
    assert!((eval("pnorm(2.5)", &[3.0, 4.0]) - 4.688140842343588).abs() < 1e-14);
    assert!((eval("dobos", &[2.5]) - 1.6666666666666665).abs() < 1e-15);
    assert!((eval("dobos", &[1000.0]) - 1.001001001001001).abs() < 1e-15);
    assert_eq!(eval("dobos", &[2.0]), 2.0);
    assert_eq!(eval("wsum(0.5,2)", &[3.0, 1.0]), 3.5);
    assert_eq!(eval("indicator", &[0.0, 5.0]), 0.0);
    assert_eq!(eval("indicator", &[1e-300, 1e-300]), 1.0);
    assert_eq!(eval("proj(2)", &[7.0, 3.0, 1.0]), 3.0);
    assert_eq!(eval("jump", &[1e-12]), 1.0);
}

#[test]
fn max_on_discrete_times_oneway() {
    let fam = SpaceFamily::products(vec![discrete(2).unwrap(), oneway(2).unwrap()]).unwrap();
    let s = product_aggregate(&AggregatorSpec::max(), &fam).unwrap();
    assert_eq!(s.points(), &["(p,p)", "(p,q)", "(q,p)", "(q,q)"]);
    let expected = [[0.0, 0.0, 1.0, 1.0], [1.0, 0.0, 1.0, 1.0], [1.0, 1.0, 0.0, 0.0], [1.0, 1.0, 1.0, 0.0]];
    for (row, e) in s.matrix().iter().zip(expected) {
        assert_eq!(row.as_slice(), &e);
    }
    assert_eq!(s.axiom_class(), AxiomClass::QuasiMetric);
}

#[test]
fn square_breaks_the_triangle_on_three_collinear_points() {
    let fam = SpaceFamily::products(vec![euclid_points(&[0.0, 1.0, 2.0]).unwrap()]).unwrap();
    match product_aggregate(&AggregatorSpec::square(), &fam) {
        Err(Error::Aggregation { violations }) => {
            let s = serde_json::to_value(&violations[0]).unwrap();
            assert_eq!(s["indices"], serde_json::json!([0, 1, 2]));
            assert_eq!(s["d_xz"], 4.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn indicator_on_two_discrete_members() {
    let fam = SpaceFamily::sets(vec![discrete(2).unwrap(), discrete(2).unwrap()]).unwrap();
    assert_eq!(set_aggregate(&AggregatorSpec::indicator(), &fam).unwrap(), discrete(2).unwrap());
}

#[test]
fn inclusion_examples() {
    let sets = SpaceFamily::sets(vec![discrete(2).unwrap(), indiscrete(2).unwrap()]).unwrap();
    let r = check_sup_inclusion(&AggregatorSpec::projection(2).unwrap(), &sets).unwrap();
    assert!(!r.reference_included);
    assert_eq!(r.comparison.order, TopologyOrder::SecondCoarserStrict);

    let d2 = SpaceFamily::products(vec![discrete(2).unwrap(), discrete(2).unwrap()]).unwrap();
    assert_eq!(check_product_inclusion(&AggregatorSpec::max(), &d2).unwrap().comparison.order, TopologyOrder::Equal);
    let zero = check_product_inclusion(&AggregatorSpec::constant_zero(), &d2).unwrap();
    assert!(!zero.reference_included);
    assert_eq!(zero.comparison.right_u.unwrap().len(), 4);
}

#[test]
fn witness_json_shape() {
    let w = Witness::Pair { a: t(&[1.0, 0.0]), b: t(&[0.0, 1.0]) };
    assert_eq!(
        serde_json::to_string(&w).unwrap(),
        r#"{"kind":"pair","a":[1.0,0.0],"b":[0.0,1.0]}"#
    );
}
