//! Worked examples, each run end to end with its expected outcome checked.

use serde_json::{json, Value};

use metriforge::aggregators::AggregatorSpec;
use metriforge::alexandrov::{check_product_inclusion, check_sup_inclusion, TopologyOrder};
use metriforge::classifier::{classify, ClassName, ClassificationReport, Mode, PropertyKind, Strength, Structure};
use metriforge::probe::{MemberMetric, ProbeFamily, SequenceSpace, StructuredImage};
use metriforge::sampling::{DEFAULT_BUDGET, DEFAULT_SCALE};
use metriforge::spaces::{
    discrete, euclid_points, image_of_ddelta, indiscrete, lu_family, oneway, product_aggregate, random_space,
    set_aggregate, two_point_pq, validate_space, AxiomClass, SpaceFamily,
};
use metriforge::verdict::Witness;

use crate::{
    axiom_result, class_status, classifier_config, image_results, null_sequence_results, CliError, CliResult,
    Expectation,
};

pub const NAMES: [&str; 10] = [
    "max-strong",
    "series",
    "dobos",
    "indicator-sets",
    "projection-sets",
    "zero-preimage-twopoint",
    "oneway-quasi",
    "lu-image",
    "jump-not-strong",
    "usc-projection",
];

pub struct Demo {
    pub results: Value,
    pub citations: Vec<&'static str>,
    pub expectations: Vec<Expectation>,
}

struct Ctx {
    seed: u64,
    workers: usize,
    expectations: Vec<Expectation>,
}

impl Ctx {
    fn expect(&mut self, check: impl Into<String>, passed: bool) {
        self.expectations.push(Expectation { check: check.into(), passed });
    }

    fn classify(&self, spec: &AggregatorSpec, arity: usize) -> CliResult<ClassificationReport> {
        let cfg = classifier_config(self.seed, DEFAULT_BUDGET, DEFAULT_SCALE, self.workers)?;
        Ok(classify(spec, arity, &cfg)?)
    }

    fn expect_property(&mut self, r: &ClassificationReport, kind: PropertyKind, falsified: bool) {
        let got = r.verdict(kind).is_falsified();
        let word = if falsified { "Falsified" } else { "ConsistentAfterBudget" };
        self.expect(format!("{} {} is {word} for {}", r.function, kind.name(), arity_note(r)), got == falsified);
    }

    fn expect_class(&mut self, r: &ClassificationReport, class: ClassName, status: &str) {
        let got = class_status(r, &class.to_string());
        self.expect(format!("{} is {status} for {}", class, r.function), got == Some(status));
    }
}

fn arity_note(r: &ClassificationReport) -> String {
    format!("arity {}", r.arity)
}

const fn class(strength: Strength, structure: Structure, mode: Mode) -> ClassName {
    ClassName::new(strength, structure, mode)
}

const STRONG_M_PRODUCTS: ClassName = class(Strength::Strongly, Structure::Metric, Mode::Products);
const STRONG_M_SETS: ClassName = class(Strength::Strongly, Structure::Metric, Mode::Sets);
const M_PRODUCTS: ClassName = class(Strength::Plain, Structure::Metric, Mode::Products);
const M_SETS: ClassName = class(Strength::Plain, Structure::Metric, Mode::Sets);
const QM_PRODUCTS: ClassName = class(Strength::Plain, Structure::QuasiMetric, Mode::Products);
const QPM_PRODUCTS: ClassName = class(Strength::Plain, Structure::QuasiPseudometric, Mode::Products);

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialise")
}

pub fn run(name: &str, seed: u64, workers: usize) -> CliResult<Demo> {
    let mut ctx = Ctx { seed, workers, expectations: Vec::new() };
    let (results, citations) = match name {
        "max-strong" => max_strong(&mut ctx)?,
        "series" => series(&mut ctx)?,
        "dobos" => dobos(&mut ctx)?,
        "indicator-sets" => indicator_sets(&mut ctx)?,
        "projection-sets" => projection_sets(&mut ctx)?,
        "zero-preimage-twopoint" => zero_preimage_twopoint(&mut ctx)?,
        "oneway-quasi" => oneway_quasi(&mut ctx)?,
        "lu-image" => lu_image(&mut ctx)?,
        "jump-not-strong" => jump_not_strong(&mut ctx)?,
        "usc-projection" => usc_projection(&mut ctx)?,
        other => return Err(CliError::Usage(format!("unknown demo {other:?}; expected one of {}", NAMES.join(", ")))),
    };
    Ok(Demo { results, citations, expectations: ctx.expectations })
}

type DemoOut = CliResult<(Value, Vec<&'static str>)>;

fn max_strong(ctx: &mut Ctx) -> DemoOut {
    let max = AggregatorSpec::max();
    let r = ctx.classify(&max, 3)?;
    for c in ClassName::all().into_iter().filter(|c| c.strength == Strength::Strongly) {
        ctx.expect_class(&r, c, "ConsistentWith");
    }
    let mut families = Vec::new();
    for k in 0..3u64 {
        let members: Vec<_> = (0..3).map(|i| random_space(ctx.seed, 3 * k + i, 3, false)).collect();
        let products = check_product_inclusion(&max, &SpaceFamily::products(members.clone())?)?;
        let sets = check_sup_inclusion(&max, &SpaceFamily::sets(members.clone())?)?;
        ctx.expect(format!("random family {k}: product topology equals the max topology"), products.comparison.order == TopologyOrder::Equal);
        ctx.expect(format!("random family {k}: supremum topology equals the max topology"), sets.comparison.order == TopologyOrder::Equal);
        families.push(json!({
            "members": members.iter().map(|m| m.to_file()).collect::<Vec<_>>(),
            "products": products,
            "sets": sets,
        }));
    }
    Ok((
        json!({ "classification": to_value(&r), "families": families }),
        vec!["max of the member distances is the supremum metric, strongly aggregating in both modes"],
    ))
}

fn series(ctx: &mut Ctx) -> DemoOut {
    const K: usize = 8;
    let spec = AggregatorSpec::series(K)?;
    let r = ctx.classify(&spec, K)?;
    for kind in PropertyKind::ALL {
        ctx.expect_property(&r, kind, false);
    }
    ctx.expect_class(&r, STRONG_M_PRODUCTS, "ConsistentWith");
    let family = ProbeFamily::products(SequenceSpace::null_sequence(1000)?, K)?;
    let probe = null_sequence_results(&spec, &family, ctx.seed)?;
    ctx.expect("null sequences converge both in the product and under the series", probe["verdict"]["status"] == "ConsistentAfterBudget");
    let members: Vec<_> = (0..K as u64).map(|i| random_space(ctx.seed, 100 + i, 2, false)).collect();
    let inclusion = check_product_inclusion(&spec, &SpaceFamily::products(members)?)?;
    ctx.expect("product topology equals the series topology on a random family", inclusion.comparison.order == TopologyOrder::Equal);
    Ok((
        json!({ "truncation": K, "classification": to_value(&r), "probe": probe, "inclusion": inclusion }),
        vec!["weighted series of a/(1+a) aggregates countably many metrics and induces the product topology"],
    ))
}

/// 3 points with `d(x,y) = 0`, `d(x,z) = 2`, `d(y,z) = 3`: a quasi-metric
/// whose composition with `dobos` breaks the triangle at `(x, y, z)`.
fn dobos_quasi_space() -> metriforge::Result<metriforge::spaces::FiniteSpace> {
    validate_space(
        vec!["x".into(), "y".into(), "z".into()],
        vec![vec![0.0, 0.0, 2.0], vec![1.0, 0.0, 3.0], vec![3.0, 3.0, 0.0]],
    )
}

fn dobos(ctx: &mut Ctx) -> DemoOut {
    let spec = AggregatorSpec::dobos();
    let r = ctx.classify(&spec, 1)?;
    ctx.expect_property(&r, PropertyKind::Monotone, true);
    ctx.expect_property(&r, PropertyKind::AsymmetricTriplet, true);
    for kind in [PropertyKind::TripletPreserving, PropertyKind::ZeroPreimageTrivial, PropertyKind::ContinuousAtZero] {
        ctx.expect_property(&r, kind, false);
    }
    ctx.expect_class(&r, STRONG_M_PRODUCTS, "ConsistentWith");
    ctx.expect_class(&r, QM_PRODUCTS, "Excluded");
    ctx.expect_class(&r, QPM_PRODUCTS, "Excluded");
    let quasi = dobos_quasi_space()?;
    let on_quasi = axiom_result(product_aggregate(&spec, &SpaceFamily::products(vec![quasi.clone()])?))?;
    ctx.expect("dobos composed with a quasi-metric breaks the triangle inequality", on_quasi["valid"] == false);
    let line = euclid_points(&[0.0, 2.0, 3.0])?;
    let on_metric = axiom_result(product_aggregate(&spec, &SpaceFamily::products(vec![line.clone()])?))?;
    ctx.expect("dobos composed with a metric is a metric", on_metric["axiom_class"] == to_value(&AxiomClass::Metric));
    Ok((
        json!({
            "classification": to_value(&r),
            "quasi_metric": quasi.to_file(),
            "on_quasi_metric": on_quasi,
            "metric": line.to_file(),
            "on_metric": on_metric,
        }),
        vec!["a non-monotone metric preserving function that preserves triangle triplets but not asymmetric ones"],
    ))
}

fn indicator_sets(ctx: &mut Ctx) -> DemoOut {
    let spec = AggregatorSpec::indicator();
    let fam = SpaceFamily::sets(vec![discrete(2)?, discrete(2)?])?;
    let aggregated = set_aggregate(&spec, &fam)?;
    ctx.expect("indicator on two discrete members is the discrete metric", aggregated == discrete(2)?);
    let r = ctx.classify(&spec, 2)?;
    ctx.expect_property(&r, PropertyKind::ZeroPreimageTrivial, true);
    ctx.expect_class(&r, M_SETS, "ConsistentWith");
    ctx.expect_class(&r, M_PRODUCTS, "Excluded");
    ctx.expect_class(&r, STRONG_M_SETS, "Excluded");
    let family = ProbeFamily::sets(SequenceSpace::null_sequence(1000)?, vec![MemberMetric::Euclid; 2])?;
    let probe = null_sequence_results(&spec, &family, ctx.seed)?;
    ctx.expect("1/k converges in the supremum of two Euclidean members but not under indicator", probe["verdict"]["status"] == "Falsified");
    Ok((
        json!({
            "family": fam,
            "aggregated": aggregated.to_file(),
            "axiom_class": aggregated.axiom_class(),
            "classification": to_value(&r),
            "probe": probe,
        }),
        vec!["indicator of a_1 a_2 > 0 aggregates metrics on sets although its zero preimage is not trivial"],
    ))
}

fn projection_sets(ctx: &mut Ctx) -> DemoOut {
    let spec = AggregatorSpec::projection(2)?;
    let fam = SpaceFamily::sets(vec![discrete(2)?, indiscrete(2)?])?;
    let inclusion = check_sup_inclusion(&spec, &fam)?;
    ctx.expect("supremum topology is not inside the aggregated one for proj(2)", !inclusion.reference_included);
    let r = ctx.classify(&spec, 2)?;
    ctx.expect_property(&r, PropertyKind::ZeroPreimageTrivial, true);
    ctx.expect_class(&r, M_SETS, "ConsistentWith");
    ctx.expect_class(&r, STRONG_M_SETS, "Excluded");
    Ok((
        json!({ "family": fam, "inclusion": inclusion, "classification": to_value(&r) }),
        vec!["projection aggregates metrics on sets without inducing the supremum topology"],
    ))
}

fn zero_preimage_twopoint(ctx: &mut Ctx) -> DemoOut {
    let spec = AggregatorSpec::indicator();
    let r = ctx.classify(&spec, 2)?;
    let zp = r.verdict(PropertyKind::ZeroPreimageTrivial);
    let Some(Witness::Point { a }) = &zp.witness else {
        ctx.expect("indicator has a nonzero point in its zero preimage", false);
        return Ok((json!({ "classification": to_value(&r) }), vec![]));
    };
    ctx.expect(format!("indicator vanishes at {:?}", a.values()), spec.evaluate(a)? == 0.0 && !a.is_zero());
    let fam = two_point_pq(a.values())?;
    let inclusion = check_product_inclusion(&spec, &fam)?;
    ctx.expect("product topology is not inside the indicator topology on the two-point family", !inclusion.reference_included);
    Ok((
        json!({ "zero_preimage_witness": a, "family": fam, "inclusion": inclusion }),
        vec!["a nonzero a with F(a) = 0 gives the two-point family on which the product topology is lost"],
    ))
}

fn oneway_quasi(ctx: &mut Ctx) -> DemoOut {
    let spec = AggregatorSpec::max();
    let fam = SpaceFamily::products(vec![oneway(2)?, discrete(2)?])?;
    let aggregated = product_aggregate(&spec, &fam)?;
    ctx.expect("max on oneway(2) x discrete(2) is a quasi-metric", aggregated.axiom_class() == AxiomClass::QuasiMetric);
    let forward = check_product_inclusion(&spec, &fam)?;
    ctx.expect("product topology equals the max topology", forward.comparison.order == TopologyOrder::Equal);
    let conjugate = SpaceFamily::products(vec![oneway(2)?.reversed(), discrete(2)?])?;
    let backward = check_product_inclusion(&spec, &conjugate)?;
    ctx.expect("the same holds for the conjugate", backward.comparison.order == TopologyOrder::Equal);
    Ok((
        json!({
            "family": fam,
            "aggregated": aggregated.to_file(),
            "axiom_class": aggregated.axiom_class(),
            "inclusion": forward,
            "conjugate_inclusion": backward,
        }),
        vec!["quasi-metric aggregation on products keeps asymmetry"],
    ))
}

fn lu_image(ctx: &mut Ctx) -> DemoOut {
    let values = [0.0, 0.125, 0.25, 0.5, 0.75];
    let fam = lu_family(&values, 2)?;
    for (i, m) in fam.members().iter().enumerate() {
        ctx.expect(format!("member {} is a quasi-metric", i + 1), m.axiom_class() == AxiomClass::QuasiMetric);
    }
    let first = &fam.members()[0];
    let origin = first.index_of("(0,0)")?;
    let mut max_error = 0.0f64;
    for y in 0..first.len() {
        let coords: Vec<f64> = values
            .iter()
            .flat_map(|&u| values.iter().map(move |&v| [u, v]))
            .nth(y)
            .expect("grid order matches")
            .to_vec();
        for (i, m) in fam.members().iter().enumerate() {
            max_error = max_error.max((m.d(origin, y) - coords[i]).abs());
        }
    }
    ctx.expect("d_Δ(0, a) = a on the 5 x 5 grid with max error 0", max_error == 0.0);
    let image = image_of_ddelta(&fam, "(0,0)")?;
    ctx.expect("the image of d_Δ(0, ·) is the whole grid", image.len() == values.len().pow(2));
    Ok((
        json!({ "values": values, "max_error": max_error, "image": image }),
        vec!["quasi-metrics l/u on a grid realise every a in [0,1)^n as d_Δ(0, ·)"],
    ))
}

fn jump_not_strong(ctx: &mut Ctx) -> DemoOut {
    let spec = AggregatorSpec::jump();
    let family = ProbeFamily::products(SequenceSpace::null_sequence(1000)?, 1)?;
    let probe = null_sequence_results(&spec, &family, ctx.seed)?;
    let witness = &probe["verdict"]["witness"];
    ctx.expect(
        "1/k converges in the product topology but not under jump",
        witness["converges_in_reference"] == true && witness["converges_aggregated"] == false,
    );
    let r = ctx.classify(&spec, 1)?;
    ctx.expect_property(&r, PropertyKind::ContinuousAtZero, true);
    ctx.expect_class(&r, M_PRODUCTS, "ConsistentWith");
    ctx.expect_class(&r, STRONG_M_PRODUCTS, "Excluded");
    Ok((
        json!({ "probe": probe, "classification": to_value(&r) }),
        vec!["the jump at 0 is metric preserving but discontinuous at 0, so not strongly aggregating"],
    ))
}

fn usc_projection(ctx: &mut Ctx) -> DemoOut {
    let img = StructuredImage::single_ray(vec![1.0, 0.0], 2)?;
    let proj = image_results(&AggregatorSpec::projection(2)?, &img, ctx.seed)?;
    let w = &proj["usc"]["witness"];
    ctx.expect("proj(2) is not usc at 0 on {(1, t)}", proj["usc"]["status"] == "Falsified");
    ctx.expect("the usc witness lies on the ray (1, t)", w["a"][0] == 1.0 && w["a"][1].as_f64().is_some_and(|t| t > 0.0));
    let max = image_results(&AggregatorSpec::max(), &img, ctx.seed)?;
    ctx.expect("max is usc at 0 on the same image", max["usc"]["status"] == "ConsistentAfterBudget");
    Ok((
        json!({ "projection": proj, "max": max }),
        vec!["preimages of small t under proj(2) on {(1, t)} escape every box around the zero set"],
    ))
}
