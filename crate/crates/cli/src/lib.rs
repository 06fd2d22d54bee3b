//! Commands behind the `metriforge` binary.
//!
//! Every command builds a [`Report`]. With `--json` the report is printed as
//! one JSON document (keys sorted, so equal inputs give equal bytes); without
//! it a short text summary is printed instead.

pub mod demos;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use metriforge::aggregators::{parse_spec, AggregatorSpec};
use metriforge::alexandrov::{check_product_inclusion, check_sup_inclusion};
use metriforge::classifier::{classify, ClassStatus, ClassificationReport, ClassifierConfig};
use metriforge::probe::{
    check_restricted_continuity_at_zero, check_usc_at_zero, strongness_probe, MemberMetric, ProbeFamily,
    ProbeGrids, SequenceSpace, StructuredImage, TailProtocol,
};
use metriforge::sampling::{SamplerConfig, DEFAULT_BUDGET, DEFAULT_GRID_LEVELS, DEFAULT_SCALE, DEFAULT_SEED};
use metriforge::spaces::{builtin_space, product_aggregate, set_aggregate, FiniteSpace, SpaceFamily};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit status for usage, parse and input errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status of a demo whose expectations were not all met.
pub const EXIT_EXPECTATION: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] metriforge::Error),
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "metriforge", version, about = "Aggregated quasi-pseudometrics: classification, finite spaces and topology")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Semidecide the seven properties of F and place it in the class lattice.
    Classify(ClassifyArgs),
    /// Aggregate finite spaces and report the axiom class of the result.
    Axioms(SpaceArgs),
    /// Compare the reference topology with the aggregated one.
    Topology(SpaceArgs),
    /// Run a convergence, usc or restricted-continuity scenario.
    Probe(ProbeArgs),
    /// Run a named worked example end to end and check its expected outcome.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every random draw.
    #[arg(long, env = "METRIFORGE_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long = "fn", value_name = "SPEC")]
    pub function: String,
    #[arg(long)]
    pub arity: Option<usize>,
    /// Random draws per property after the grid.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub samples: u64,
    /// Magnitude of sampled coordinates.
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    pub scale: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Products,
    Sets,
}

#[derive(Debug, Clone, Args)]
pub struct SpaceArgs {
    #[arg(long = "fn", value_name = "SPEC")]
    pub function: String,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// A space file `{"points": [...], "matrix": [[...]]}` or `builtin:NAME(...)`; repeat per member.
    #[arg(long = "space", value_name = "FILE", required = true, num_args = 1..)]
    pub spaces: Vec<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// `1/k` toward the origin of a power of the null-sequence space.
    NullSeq,
    /// `1/k` on one set carrying Euclidean members.
    NullSeqSets,
    /// The ray `{(1, t)}` together with 0.
    UscProjection,
    /// Rays `t` at one coordinate and 1 elsewhere.
    UscAxes,
    /// The diagonal `{(t, …, t)}`.
    Diagonal,
    /// An image read from `--image`.
    Image,
}

#[derive(Debug, Clone, Args)]
pub struct ProbeArgs {
    #[arg(long = "fn", value_name = "SPEC")]
    pub function: String,
    #[arg(long, value_enum)]
    pub scenario: Scenario,
    /// Depth of the null-sequence space.
    #[arg(long = "K", value_name = "N", default_value_t = 1000)]
    pub depth: usize,
    #[arg(long)]
    pub arity: Option<usize>,
    /// Image file for the `image` scenario.
    #[arg(long, value_name = "FILE")]
    pub image: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(demos::NAMES))]
    pub name: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expectation {
    pub check: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub citations: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub expectations: Vec<Expectation>,
    pub seed: u64,
    pub version: String,
}

impl Report {
    fn new(command: &str, inputs: Value, results: Value, citations: &[&str], seed: u64) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            results,
            citations: citations.iter().map(|c| c.to_string()).collect(),
            expectations: Vec::new(),
            seed,
            version: VERSION.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.expectations.iter().all(|e| e.passed)
    }

    pub fn to_json(&self) -> String {
        // through Value so map keys come out sorted
        let v = serde_json::to_value(self).expect("reports serialise");
        serde_json::to_string_pretty(&v).expect("values serialise")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("metriforge {} {} (seed {})\n", self.version, self.command, self.seed);
        match self.command.as_str() {
            "classify" => out.push_str(&classify_text(&self.results)),
            _ => {
                out.push_str(&serde_json::to_string_pretty(&self.results).expect("values serialise"));
                out.push('\n');
            }
        }
        for e in &self.expectations {
            out.push_str(&format!("[{}] {}\n", if e.passed { "pass" } else { "FAIL" }, e.check));
        }
        for c in &self.citations {
            out.push_str(&format!("see: {c}\n"));
        }
        out
    }
}

fn classify_text(results: &Value) -> String {
    let mut out = String::new();
    if let Some(verdicts) = results["verdicts"].as_object() {
        for (kind, v) in verdicts {
            out.push_str(&format!("  {kind:<24} {}", v["status"].as_str().unwrap_or("?")));
            if !v["witness"].is_null() {
                out.push_str(&format!("  witness {}", v["witness"]));
            }
            out.push('\n');
        }
    }
    if let Some(classes) = results["classes"].as_array() {
        for c in classes {
            out.push_str(&format!(
                "  {:<26} {}\n",
                c["class"].as_str().unwrap_or("?"),
                c["status"]["status"].as_str().unwrap_or("?")
            ));
        }
    }
    out
}

pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    let report = match cli.command {
        Command::Classify(a) => cmd_classify(&a)?,
        Command::Axioms(a) => cmd_axioms(&a)?,
        Command::Topology(a) => cmd_topology(&a)?,
        Command::Probe(a) => cmd_probe(&a)?,
        Command::Demo(a) => cmd_demo(&a)?,
    };
    let exit_code = if report.passed() { 0 } else { EXIT_EXPECTATION };
    Ok(Outcome { report, exit_code })
}

fn workers_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> CliResult<T> {
    if workers == 0 {
        return Ok(job());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(job))
}

pub fn parse_function(text: &str) -> CliResult<AggregatorSpec> {
    Ok(parse_spec(text)?)
}

pub(crate) fn classifier_config(seed: u64, samples: u64, scale: f64, workers: usize) -> CliResult<ClassifierConfig> {
    let sampler = SamplerConfig::new(seed, samples, scale, DEFAULT_GRID_LEVELS.to_vec())?;
    Ok(ClassifierConfig::with_sampler(sampler).with_workers(workers))
}

pub fn cmd_classify(a: &ClassifyArgs) -> CliResult<Report> {
    let spec = parse_function(&a.function)?;
    let arity = spec.arity().resolve(a.arity)?;
    let cfg = classifier_config(a.common.seed, a.samples, a.scale, a.common.workers)?;
    let report = classify(&spec, arity, &cfg)?;
    let inputs = json!({
        "fn": spec.to_string(),
        "arity": arity,
        "samples": a.samples,
        "scale": a.scale,
        "grid_levels": DEFAULT_GRID_LEVELS,
    });
    Ok(Report::new(
        "classify",
        inputs,
        serde_json::to_value(&report).expect("classification serialises"),
        &[
            "strong aggregation on products: trivial zero preimage, the defining inequality and continuity at 0",
            "metric aggregation: triangle triplets preserved and trivial zero preimage",
        ],
        a.common.seed,
    ))
}

/// Read a member space from a file or a `builtin:` name.
pub fn load_space(arg: &str) -> CliResult<FiniteSpace> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return Ok(builtin_space(name)?);
    }
    let path = PathBuf::from(arg);
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    FiniteSpace::from_json(&text).map_err(|e| CliError::Usage(format!("{arg}: {e}")))
}

fn load_family(a: &SpaceArgs) -> CliResult<SpaceFamily> {
    let members = a.spaces.iter().map(|s| load_space(s)).collect::<CliResult<Vec<_>>>()?;
    Ok(match a.mode {
        ModeArg::Products => SpaceFamily::products(members)?,
        ModeArg::Sets => SpaceFamily::sets(members)?,
    })
}

fn space_inputs(spec: &AggregatorSpec, a: &SpaceArgs, fam: &SpaceFamily) -> Value {
    json!({
        "fn": spec.to_string(),
        "mode": a.mode,
        "spaces": a.spaces,
        "members": fam.members().iter().map(FiniteSpace::to_file).collect::<Vec<_>>(),
    })
}

pub(crate) fn axiom_result(result: metriforge::Result<FiniteSpace>) -> CliResult<Value> {
    match result {
        Ok(space) => Ok(json!({
            "valid": true,
            "axiom_class": space.axiom_class(),
            "points": space.points(),
            "matrix": space.matrix(),
        })),
        Err(metriforge::Error::Aggregation { violations }) => Ok(json!({
            "valid": false,
            "violations": violations,
        })),
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_axioms(a: &SpaceArgs) -> CliResult<Report> {
    let spec = parse_function(&a.function)?;
    let fam = load_family(a)?;
    let aggregated = workers_pool(a.common.workers, || match a.mode {
        ModeArg::Products => product_aggregate(&spec, &fam),
        ModeArg::Sets => set_aggregate(&spec, &fam),
    })?;
    Ok(Report::new(
        "axioms",
        space_inputs(&spec, a, &fam),
        axiom_result(aggregated)?,
        &["aggregation of a family: F composed with the tuple of member distances"],
        a.common.seed,
    ))
}

pub fn cmd_topology(a: &SpaceArgs) -> CliResult<Report> {
    let spec = parse_function(&a.function)?;
    let fam = load_family(a)?;
    let (report, citation) = match a.mode {
        ModeArg::Products => (
            check_product_inclusion(&spec, &fam)?,
            "product topology inside the aggregated one iff F^-1(0) = {0}",
        ),
        ModeArg::Sets => (
            check_sup_inclusion(&spec, &fam)?,
            "supremum topology inside the aggregated one iff F^-1(0) = {0}",
        ),
    };
    Ok(Report::new(
        "topology",
        space_inputs(&spec, a, &fam),
        serde_json::to_value(&report).expect("inclusion report serialises"),
        &[citation],
        a.common.seed,
    ))
}

/// Every probe verdict from one image.
pub(crate) fn image_results(spec: &AggregatorSpec, img: &StructuredImage, seed: u64) -> CliResult<Value> {
    let grids = ProbeGrids::default();
    let tol = ClassifierConfig::default().tol;
    let usc = check_usc_at_zero(spec, img, &grids, seed)?;
    let continuity = check_restricted_continuity_at_zero(spec, img, &grids, &tol, seed)?;
    Ok(json!({
        "image": img,
        "grids": grids,
        "usc": usc,
        "restricted_continuity": continuity,
    }))
}

pub(crate) fn null_sequence_results(
    spec: &AggregatorSpec,
    family: &ProbeFamily,
    seed: u64,
) -> CliResult<Value> {
    let protocol = TailProtocol::default();
    let report = strongness_probe(spec, family, &family.default_sequences(), &protocol, seed)?;
    Ok(json!({
        "family": family,
        "protocol": protocol,
        "verdict": report.verdict,
        "outcomes": report.outcomes,
    }))
}

pub fn cmd_probe(a: &ProbeArgs) -> CliResult<Report> {
    let spec = parse_function(&a.function)?;
    let seed = a.common.seed;
    let (results, arity, citation) = match a.scenario {
        Scenario::NullSeq | Scenario::NullSeqSets => {
            let arity = spec.arity().resolve(a.arity)?;
            let space = SequenceSpace::null_sequence(a.depth)?;
            let family = if a.scenario == Scenario::NullSeq {
                ProbeFamily::products(space, arity)?
            } else {
                ProbeFamily::sets(space, vec![MemberMetric::Euclid; arity])?
            };
            (
                null_sequence_results(&spec, &family, seed)?,
                arity,
                "convergence in the reference topology against convergence under F",
            )
        }
        Scenario::UscProjection => {
            let arity = spec.arity().resolve(Some(a.arity.unwrap_or(2)))?;
            if arity != 2 {
                return Err(CliError::Usage("usc-projection is a scenario in two coordinates".into()));
            }
            let img = StructuredImage::single_ray(vec![1.0, 0.0], 2)?;
            (image_results(&spec, &img, seed)?, arity, "projection onto the second coordinate is not usc at 0 on {(1, t)}")
        }
        Scenario::UscAxes | Scenario::Diagonal => {
            let arity = spec.arity().resolve(a.arity)?;
            let img = if a.scenario == Scenario::UscAxes {
                StructuredImage::axis_rays(arity, 1.0)
            } else {
                StructuredImage::diagonal(arity)
            };
            (image_results(&spec, &img, seed)?, arity, "usc and continuity at 0 of F restricted to an image")
        }
        Scenario::Image => {
            let path = a.image.as_ref().ok_or_else(|| CliError::Usage("the image scenario needs --image FILE".into()))?;
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            let img = StructuredImage::from_json(&text)?;
            let arity = spec.arity().resolve(Some(img.arity()))?;
            (image_results(&spec, &img, seed)?, arity, "usc and continuity at 0 of F restricted to an image")
        }
    };
    let inputs = json!({
        "fn": spec.to_string(),
        "scenario": a.scenario,
        "K": a.depth,
        "arity": arity,
        "image": a.image,
    });
    Ok(Report::new("probe", inputs, results, &[citation], seed))
}

pub fn cmd_demo(a: &DemoArgs) -> CliResult<Report> {
    let demo = demos::run(&a.name, a.common.seed, a.common.workers)?;
    let mut report = Report::new(
        "demo",
        json!({ "name": a.name }),
        demo.results,
        &demo.citations,
        a.common.seed,
    );
    report.expectations = demo.expectations;
    Ok(report)
}

/// Status name of a class in a classification report.
pub(crate) fn class_status(report: &ClassificationReport, name: &str) -> Option<&'static str> {
    report.classes.iter().find(|c| c.class.to_string() == name).map(|c| match c.status {
        ClassStatus::ConsistentWith { .. } => "ConsistentWith",
        ClassStatus::Excluded { .. } => "Excluded",
        ClassStatus::Undetermined { .. } => "Undetermined",
    })
}
