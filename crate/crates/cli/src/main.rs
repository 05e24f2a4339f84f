//! JSON-spec-driven front end for the analysis library: one subcommand per
//! operation, deterministic machine-readable reports on stdout, a one-line
//! human summary on stderr, and exit codes that mirror verdicts.
//!
//! Exit codes: 0 for Pass / Found / Feasible / Valid and plain computations,
//! 1 for Fail / Infeasible / Invalid / divergence-as-refutation, 2 for usage,
//! schema, or evaluation errors.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use strongconv::{
    alpha_cyclic_monotone, alpha_monotone, amplify_jensen, amplify_scaling, check_jensen,
    check_strong_convexity, directional_derivative, feasibility_check, modulus_validity,
    reconstruct, sample_domain, subdiff_1d, subdivision_certificate, sublinearity_test,
    support_search, equivalence_suite, AmplifyResult, AmplifyValue, BoxDomain, Error,
    FeasibilityVerdict, FieldSpec, FunctionOracle, Modulus, MultiMap, Point, Scalar, ScalarMode,
    SupportStatus, TSet, ValidityVerdict, Verdict, DEFAULT_TOLERANCE,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const SPEC_VERSIONS: &[&str] = &["1"];

#[derive(Parser)]
#[command(
    name = "strongconv",
    version,
    about = "Sampled verification toolkit for strong convexity, subgradients, and monotone maps",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sampled strong-convexity check over a weight set
    Check(CommonArgs),
    /// Midpoint (Jensen) convexity check
    Jensen(CommonArgs),
    /// Dyadic subdivision certificate along a segment
    CertifySubdivision(CommonArgs),
    /// Evaluate an amplified modulus at a direction
    Amplify {
        #[command(flatten)]
        common: CommonArgs,
        /// Which amplification operator to apply
        #[arg(long, value_enum)]
        op: AmplifyOp,
    },
    /// Screen a modulus for compatibility with bounded functions
    Feasible(CommonArgs),
    /// Necessary-condition screen: zero at the origin, vanishing quotients
    Validity(CommonArgs),
    /// Field-restricted directional derivative via monotone quotients
    Dirderiv(CommonArgs),
    /// Subadditivity and positive homogeneity of the directional derivative
    Sublinear(CommonArgs),
    /// Search for a supporting functional at a base point
    Support(CommonArgs),
    /// Three-way equivalence suite: combination, derivative bound, support
    HarnessE(CommonArgs),
    /// One-dimensional subdifferential interval at a point
    Subdiff(CommonArgs),
    /// Pairwise or cyclic monotonicity of a multivalued map
    Monotone {
        #[command(flatten)]
        common: CommonArgs,
        /// Which monotonicity criterion to decide
        #[arg(long, value_enum)]
        criterion: Criterion,
    },
    /// Rebuild a potential from a monotone map by chain maxima
    Reconstruct(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON problem spec
    #[arg(long)]
    spec: PathBuf,
    /// Override the spec's grid resolution
    #[arg(long)]
    grid: Option<usize>,
    /// Override the spec's tolerance
    #[arg(long)]
    tolerance: Option<f64>,
    /// Override the spec's arithmetic mode (float literals cannot be
    /// promoted to exact)
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Report format; csv tabulates sweeps for amplify and feasible
    #[arg(long, value_enum, default_value_t = Emit::Json)]
    emit: Emit,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for ScalarMode {
    fn from(m: ModeArg) -> ScalarMode {
        match m {
            ModeArg::Exact => ScalarMode::Exact,
            ModeArg::Float => ScalarMode::Float,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Emit {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum AmplifyOp {
    Jensen,
    Scaling,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Criterion {
    Pair,
    Cyclic,
}

/// One problem per file. Every field is optional at parse time; the invoked
/// subcommand then demands exactly the fields it consumes, so a stray field
/// is as much a schema error as a missing one.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSpec {
    version: String,
    mode: Option<ScalarMode>,
    domain: Option<BoxDomain>,
    function: Option<FunctionOracle>,
    modulus: Option<Modulus>,
    tset: Option<TSet>,
    field: Option<FieldSpec>,
    multimap: Option<MultiMap>,
    grid: Option<usize>,
    n: Option<u64>,
    k_max: Option<u32>,
    max_cycle_len: Option<usize>,
    base_index: Option<usize>,
    tolerance: Option<f64>,
    x0: Option<Point>,
    h: Option<Point>,
    x: Option<Point>,
    y: Option<Point>,
    u: Option<Point>,
    threshold: Option<Scalar>,
    directions: Option<Vec<Point>>,
    sweep: Option<Vec<Scalar>>,
}

/// A usage, schema, or evaluation failure: exit 2 with a one-line JSON
/// object on stderr.
struct CliError(String);

impl CliError {
    fn schema(path: &str, detail: impl std::fmt::Display) -> CliError {
        CliError(format!("invalid spec: {detail} at $.{path}"))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError(e.to_string())
    }
}

/// Everything a finished run emits: the stdout report, the stderr summary,
/// and the process exit code.
struct Finished {
    stdout: String,
    summary: String,
    code: u8,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    spec_sha256: &'a str,
    mode: ScalarMode,
    tolerance: f64,
    report: T,
}

/// Refutation-shaped failures (a non-convex oracle or a positive cycle)
/// refute the premise rather than erroring out: exit 1 with this payload.
#[derive(Serialize)]
struct RefutedReport {
    status: &'static str,
    detail: String,
}

/// The published shape of a reconstruction: the base index anchoring the
/// zero of the potential, the tabulated values in carrier order, and the
/// always-true marker that the subgradient property was re-verified.
#[derive(Serialize)]
struct ReconstructReport {
    base_index: usize,
    values: Vec<Scalar>,
    verified_subgradient: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common, op, criterion) = match &cli.command {
        Command::Check(c) => ("check", c, None, None),
        Command::Jensen(c) => ("jensen", c, None, None),
        Command::CertifySubdivision(c) => ("certify-subdivision", c, None, None),
        Command::Amplify { common, op } => ("amplify", common, Some(*op), None),
        Command::Feasible(c) => ("feasible", c, None, None),
        Command::Validity(c) => ("validity", c, None, None),
        Command::Dirderiv(c) => ("dirderiv", c, None, None),
        Command::Sublinear(c) => ("sublinear", c, None, None),
        Command::Support(c) => ("support", c, None, None),
        Command::HarnessE(c) => ("harness-e", c, None, None),
        Command::Subdiff(c) => ("subdiff", c, None, None),
        Command::Monotone { common, criterion } => ("monotone", common, None, Some(*criterion)),
        Command::Reconstruct(c) => ("reconstruct", c, None, None),
    };
    match run(name, common, op, criterion) {
        Ok(f) => {
            print!("{}", f.stdout);
            eprintln!("{name}: {}", f.summary);
            ExitCode::from(f.code)
        }
        Err(CliError(msg)) => {
            eprintln!("{}", serde_json::json!({ "error": msg }));
            ExitCode::from(2)
        }
    }
}

fn run(
    name: &str,
    common: &CommonArgs,
    op: Option<AmplifyOp>,
    criterion: Option<Criterion>,
) -> Result<Finished, CliError> {
    let raw = fs::read(&common.spec)
        .map_err(|e| CliError(format!("cannot read spec {}: {e}", common.spec.display())))?;
    let spec_sha256 = hex_digest(&raw);

    let mut de = serde_json::Deserializer::from_slice(&raw);
    let mut spec: ProblemSpec = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| CliError::schema(&e.path().to_string(), e.inner()))?;

    if !SPEC_VERSIONS.contains(&spec.version.as_str()) {
        return Err(CliError::schema(
            "version",
            format!("unrecognized version {:?}", spec.version),
        ));
    }

    // Flags win over file values.
    if let Some(g) = common.grid {
        spec.grid = Some(g);
    }
    if let Some(t) = common.tolerance {
        spec.tolerance = Some(t);
    }
    let mode = match common.mode.map(ScalarMode::from).or(spec.mode) {
        Some(m) => m,
        None => return Err(CliError::schema("mode", "missing field (or pass --mode)")),
    };
    coerce_mode(&mut spec, mode)?;
    let tau = spec.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(CliError::schema(
            "tolerance",
            "must be finite and nonnegative",
        ));
    }

    check_field_plan(name, op, criterion, common.emit, &spec)?;

    if common.emit == Emit::Csv {
        return match (name, op) {
            ("amplify", Some(AmplifyOp::Jensen)) => csv_amplify(&spec, &spec_sha256, tau),
            ("feasible", _) => csv_feasible(&spec, &spec_sha256, tau),
            _ => Err(CliError(format!(
                "csv output tabulates sweeps and is only available for `amplify --op jensen` and `feasible`, not {name}"
            ))),
        };
    }

    let ctx = Ctx {
        name,
        spec_sha256: &spec_sha256,
        mode,
        tau,
    };
    match dispatch(name, op, criterion, &spec, &ctx, tau) {
        Ok(f) => Ok(f),
        Err(CliErrorOrRefuted::Refuted(detail)) => ctx.finish(
            &RefutedReport {
                status: "refuted",
                detail: detail.clone(),
            },
            format!("refuted ({detail})"),
            1,
        ),
        Err(CliErrorOrRefuted::Error(e)) => Err(e),
    }
}

struct Ctx<'a> {
    name: &'a str,
    spec_sha256: &'a str,
    mode: ScalarMode,
    tau: f64,
}

impl Ctx<'_> {
    fn finish<T: Serialize>(
        &self,
        report: &T,
        summary: String,
        code: u8,
    ) -> Result<Finished, CliError> {
        let env = Envelope {
            command: self.name,
            version: VERSION,
            spec_sha256: self.spec_sha256,
            mode: self.mode,
            tolerance: self.tau,
            report,
        };
        let mut stdout = serde_json::to_string_pretty(&env)
            .map_err(|e| CliError(format!("report serialization failed: {e}")))?;
        stdout.push('\n');
        Ok(Finished {
            stdout,
            summary,
            code,
        })
    }
}

enum CliErrorOrRefuted {
    Error(CliError),
    Refuted(String),
}

impl From<Error> for CliErrorOrRefuted {
    fn from(e: Error) -> CliErrorOrRefuted {
        match &e {
            Error::NonConvexOracle(_) | Error::PositiveCycle(_) => {
                CliErrorOrRefuted::Refuted(e.to_string())
            }
            _ => CliErrorOrRefuted::Error(CliError(e.to_string())),
        }
    }
}

impl From<CliError> for CliErrorOrRefuted {
    fn from(e: CliError) -> CliErrorOrRefuted {
        CliErrorOrRefuted::Error(e)
    }
}

fn dispatch(
    name: &str,
    op: Option<AmplifyOp>,
    criterion: Option<Criterion>,
    spec: &ProblemSpec,
    ctx: &Ctx<'_>,
    tau: f64,
) -> Result<Finished, CliErrorOrRefuted> {
    let verdict_line = |v: Verdict, n: u64| -> (String, u8) {
        match v {
            Verdict::Pass => (format!("Pass ({n} instances checked)"), 0),
            Verdict::Fail => (format!("Fail (violation among {n} instances)"), 1),
        }
    };
    match name {
        "check" => {
            let r = check_strong_convexity(
                function(spec)?,
                modulus(spec)?,
                domain(spec)?,
                tset(spec)?,
                grid(spec)?,
                tau,
            )?;
            let (s, c) = verdict_line(r.verdict, r.samples_checked);
            Ok(ctx.finish(&r, s, c)?)
        }
        "jensen" => {
            let r = check_jensen(
                function(spec)?,
                modulus(spec)?,
                domain(spec)?,
                grid(spec)?,
                tau,
            )?;
            let (s, c) = verdict_line(r.verdict, r.samples_checked);
            Ok(ctx.finish(&r, s, c)?)
        }
        "certify-subdivision" => {
            let r = subdivision_certificate(
                function(spec)?,
                modulus(spec)?,
                domain(spec)?,
                point("x", &spec.x)?,
                point("y", &spec.y)?,
                n_param(spec)?,
                tau,
            )?;
            let (s, c) = verdict_line(r.verdict, r.samples_checked);
            Ok(ctx.finish(&r, s, c)?)
        }
        "amplify" => {
            let u = point("u", &spec.u)?;
            let r = match op.expect("amplify always carries --op") {
                AmplifyOp::Jensen => amplify_jensen(modulus(spec)?, u, n_param(spec)?)?,
                AmplifyOp::Scaling => amplify_scaling(modulus(spec)?, u, field(spec)?)?,
            };
            let (s, c) = match &r.value {
                AmplifyValue::Finite(v) => (format!("finite value {}", v.render()), 0),
                AmplifyValue::Diverges => ("DIVERGES".to_string(), 1),
            };
            Ok(ctx.finish(&r, s, c)?)
        }
        "feasible" => {
            let r = feasibility_check(
                modulus(spec)?,
                domain(spec)?,
                n_param(spec)?,
                threshold(spec)?,
            )?;
            let (s, c) = match r.verdict {
                FeasibilityVerdict::Feasible => {
                    (format!("Feasible ({} directions scanned)", r.scanned), 0)
                }
                FeasibilityVerdict::Infeasible => {
                    ("Infeasible (divergent direction found)".to_string(), 1)
                }
            };
            Ok(ctx.finish(&r, s, c)?)
        }
        "validity" => {
            let r = modulus_validity(modulus(spec)?, directions(spec)?, k_max(spec)?, tau)?;
            let (s, c) = match r.verdict {
                ValidityVerdict::Valid => ("Valid".to_string(), 0),
                ValidityVerdict::Invalid => ("Invalid".to_string(), 1),
            };
            Ok(ctx.finish(&r, s, c)?)
        }
        "dirderiv" => {
            let r = directional_derivative(
                function(spec)?,
                domain(spec)?,
                point("x0", &spec.x0)?,
                point("h", &spec.h)?,
                field(spec)?,
                k_max(spec)?,
                tau,
            )?;
            let s = format!(
                "derivative bound {} after {} probes",
                r.value.render(),
                r.probes
            );
            Ok(ctx.finish(&r, s, 0)?)
        }
        "sublinear" => {
            let r = sublinearity_test(
                function(spec)?,
                domain(spec)?,
                point("x0", &spec.x0)?,
                directions(spec)?,
                field(spec)?,
                k_max(spec)?,
                tau,
            )?;
            let (s, c) = verdict_line(r.verdict, r.samples_checked);
            Ok(ctx.finish(&r, s, c)?)
        }
        "support" => {
            let dom = domain(spec)?;
            let sample = sample_domain(dom, grid(spec)?)?;
            let r = support_search(
                function(spec)?,
                modulus(spec)?,
                dom,
                point("x0", &spec.x0)?,
                &sample,
                tau,
            )?;
            let (s, c) = match &r.status {
                SupportStatus::Found { phi } => (format!("Found {}", phi.render()), 0),
                SupportStatus::Infeasible { .. } => {
                    ("Infeasible (no supporting functional)".to_string(), 1)
                }
                SupportStatus::Unbounded => ("Unbounded (no binding constraint)".to_string(), 0),
            };
            Ok(ctx.finish(&r, s, c)?)
        }
        "harness-e" => {
            let r = equivalence_suite(
                function(spec)?,
                modulus(spec)?,
                domain(spec)?,
                field(spec)?,
                grid(spec)?,
                k_max(spec)?,
                tau,
            )?;
            let all_pass = r.consistent && r.convexity.verdict == Verdict::Pass;
            let s = format!(
                "combination {:?}, derivative bound {:?}, support {:?} ({})",
                r.convexity.verdict,
                r.subgradient.verdict,
                r.support.verdict,
                if r.consistent {
                    "consistent"
                } else {
                    "inconsistent"
                },
            );
            Ok(ctx.finish(&r, s, u8::from(!all_pass))?)
        }
        "subdiff" => {
            let r = subdiff_1d(
                function(spec)?,
                domain(spec)?,
                point("x0", &spec.x0)?,
                field(spec)?,
                k_max(spec)?,
                tau,
            )?;
            let side = |b: &Option<Scalar>| b.as_ref().map_or("unbounded".into(), Scalar::render);
            let s = format!("[{}, {}]", side(&r.lo), side(&r.hi));
            Ok(ctx.finish(&r, s, 0)?)
        }
        "monotone" => {
            let map = multimap(spec)?;
            let r = match criterion.expect("monotone always carries --criterion") {
                Criterion::Pair => alpha_monotone(map, modulus(spec)?, tau)?,
                Criterion::Cyclic => {
                    alpha_cyclic_monotone(map, modulus(spec)?, max_cycle_len(spec)?, tau)?
                }
            };
            let (s, c) = verdict_line(r.verdict, r.samples_checked);
            Ok(ctx.finish(&r, s, c)?)
        }
        "reconstruct" => {
            let base_index = spec
                .base_index
                .ok_or_else(|| CliError::schema("base_index", "missing field"))?;
            let f = reconstruct(multimap(spec)?, modulus(spec)?, base_index, tau)?;
            let FunctionOracle::Tabulated { values, .. } = f else {
                return Err(CliError("reconstruction did not return a table".into()).into());
            };
            let s = format!(
                "{} values tabulated, subgradient property verified",
                values.len()
            );
            let r = ReconstructReport {
                base_index,
                values,
                verified_subgradient: true,
            };
            Ok(ctx.finish(&r, s, 0)?)
        }
        _ => unreachable!("clap restricts the subcommand set"),
    }
}

// ---------------------------------------------------------------------------
// Field access with JSON-path errors

fn missing(path: &str) -> CliError {
    CliError::schema(path, "missing field")
}

fn domain(spec: &ProblemSpec) -> Result<&BoxDomain, CliError> {
    spec.domain.as_ref().ok_or_else(|| missing("domain"))
}

fn function(spec: &ProblemSpec) -> Result<&FunctionOracle, CliError> {
    spec.function.as_ref().ok_or_else(|| missing("function"))
}

fn modulus(spec: &ProblemSpec) -> Result<&Modulus, CliError> {
    spec.modulus.as_ref().ok_or_else(|| missing("modulus"))
}

fn tset(spec: &ProblemSpec) -> Result<&TSet, CliError> {
    spec.tset.as_ref().ok_or_else(|| missing("tset"))
}

fn field(spec: &ProblemSpec) -> Result<&FieldSpec, CliError> {
    spec.field.as_ref().ok_or_else(|| missing("field"))
}

fn multimap(spec: &ProblemSpec) -> Result<&MultiMap, CliError> {
    spec.multimap.as_ref().ok_or_else(|| missing("multimap"))
}

fn grid(spec: &ProblemSpec) -> Result<usize, CliError> {
    spec.grid.ok_or_else(|| missing("grid"))
}

fn n_param(spec: &ProblemSpec) -> Result<u64, CliError> {
    spec.n.ok_or_else(|| missing("n"))
}

fn k_max(spec: &ProblemSpec) -> Result<u32, CliError> {
    spec.k_max.ok_or_else(|| missing("k_max"))
}

fn max_cycle_len(spec: &ProblemSpec) -> Result<usize, CliError> {
    spec.max_cycle_len.ok_or_else(|| missing("max_cycle_len"))
}

fn threshold(spec: &ProblemSpec) -> Result<&Scalar, CliError> {
    spec.threshold.as_ref().ok_or_else(|| missing("threshold"))
}

fn directions(spec: &ProblemSpec) -> Result<&[Point], CliError> {
    spec.directions
        .as_deref()
        .ok_or_else(|| missing("directions"))
}

fn point<'a>(name: &str, slot: &'a Option<Point>) -> Result<&'a Point, CliError> {
    slot.as_ref().ok_or_else(|| missing(name))
}

// ---------------------------------------------------------------------------
// Spec hygiene: exactly the fields the subcommand consumes

fn check_field_plan(
    name: &str,
    op: Option<AmplifyOp>,
    criterion: Option<Criterion>,
    emit: Emit,
    spec: &ProblemSpec,
) -> Result<(), CliError> {
    let allowed: &[&str] = match (name, op, criterion) {
        ("check", ..) => &["domain", "function", "modulus", "tset", "grid"],
        ("jensen", ..) => &["domain", "function", "modulus", "grid"],
        ("certify-subdivision", ..) => &["domain", "function", "modulus", "x", "y", "n"],
        ("amplify", Some(AmplifyOp::Jensen), _) => &["modulus", "u", "n", "sweep"],
        ("amplify", Some(AmplifyOp::Scaling), _) => &["modulus", "u", "field"],
        ("feasible", ..) => &["modulus", "domain", "n", "threshold", "sweep"],
        ("validity", ..) => &["modulus", "directions", "k_max"],
        ("dirderiv", ..) => &["domain", "function", "x0", "h", "field", "k_max"],
        ("sublinear", ..) => &["domain", "function", "x0", "directions", "field", "k_max"],
        ("support", ..) => &["domain", "function", "modulus", "x0", "grid"],
        ("harness-e", ..) => &["domain", "function", "modulus", "field", "grid", "k_max"],
        ("subdiff", ..) => &["domain", "function", "x0", "field", "k_max"],
        ("monotone", _, Some(Criterion::Pair)) => &["multimap", "modulus"],
        ("monotone", _, Some(Criterion::Cyclic)) => &["multimap", "modulus", "max_cycle_len"],
        ("reconstruct", ..) => &["multimap", "modulus", "base_index"],
        _ => unreachable!("clap restricts the subcommand set"),
    };
    let present: &[(&str, bool)] = &[
        ("domain", spec.domain.is_some()),
        ("function", spec.function.is_some()),
        ("modulus", spec.modulus.is_some()),
        ("tset", spec.tset.is_some()),
        ("field", spec.field.is_some()),
        ("multimap", spec.multimap.is_some()),
        ("grid", spec.grid.is_some()),
        ("n", spec.n.is_some()),
        ("k_max", spec.k_max.is_some()),
        ("max_cycle_len", spec.max_cycle_len.is_some()),
        ("base_index", spec.base_index.is_some()),
        ("x0", spec.x0.is_some()),
        ("h", spec.h.is_some()),
        ("x", spec.x.is_some()),
        ("y", spec.y.is_some()),
        ("u", spec.u.is_some()),
        ("threshold", spec.threshold.is_some()),
        ("directions", spec.directions.is_some()),
        ("sweep", spec.sweep.is_some()),
    ];
    for (field, is_present) in present {
        if *is_present && !allowed.contains(field) {
            return Err(CliError::schema(field, format!("field not used by {name}")));
        }
        if *is_present && *field == "sweep" && emit != Emit::Csv {
            return Err(CliError::schema(
                "sweep",
                "sweeps are only tabulated under --emit csv",
            ));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Mode coercion: exact literals can be demoted to float, never the reverse

fn fix_scalar(s: &mut Scalar, want: ScalarMode) -> Result<(), CliError> {
    match (s.mode(), want) {
        (ScalarMode::Exact, ScalarMode::Float) => {
            *s = Scalar::Float(s.to_f64());
            Ok(())
        }
        (ScalarMode::Float, ScalarMode::Exact) => Err(CliError(
            "invalid spec: float literal under exact mode; write it as a \"p/q\" string".into(),
        )),
        _ => Ok(()),
    }
}

fn fix_points(ps: &mut [Point], want: ScalarMode) -> Result<(), CliError> {
    for p in ps {
        for s in &mut p.0 {
            fix_scalar(s, want)?;
        }
    }
    Ok(())
}

fn fix_oracle(f: &mut FunctionOracle, want: ScalarMode) -> Result<(), CliError> {
    match f {
        FunctionOracle::QuadraticForm { a, b, c0 } => {
            for row in a {
                for s in row {
                    fix_scalar(s, want)?;
                }
            }
            fix_points(std::slice::from_mut(b), want)?;
            fix_scalar(c0, want)
        }
        FunctionOracle::PowerAbs { epsilon, p } => {
            fix_scalar(epsilon, want)?;
            fix_scalar(p, want)
        }
        FunctionOracle::AbsVal => Ok(()),
        FunctionOracle::Tabulated { points, values } => {
            fix_points(points, want)?;
            for v in values {
                fix_scalar(v, want)?;
            }
            Ok(())
        }
        FunctionOracle::Sum { terms } => {
            for t in terms {
                fix_oracle(t, want)?;
            }
            Ok(())
        }
    }
}

fn fix_modulus(m: &mut Modulus, want: ScalarMode) -> Result<(), CliError> {
    match m {
        Modulus::Zero | Modulus::SinSq => Ok(()),
        Modulus::Quadratic { c } => fix_scalar(c, want),
        Modulus::PowerNorm { epsilon, p } => {
            fix_scalar(epsilon, want)?;
            fix_scalar(p, want)
        }
        Modulus::Tabulated { points, values, .. } => {
            fix_points(points, want)?;
            for v in values {
                fix_scalar(v, want)?;
            }
            Ok(())
        }
    }
}

fn coerce_mode(spec: &mut ProblemSpec, want: ScalarMode) -> Result<(), CliError> {
    if let Some(d) = &mut spec.domain {
        fix_points(std::slice::from_mut(&mut d.lo), want)?;
        fix_points(std::slice::from_mut(&mut d.hi), want)?;
    }
    if let Some(f) = &mut spec.function {
        fix_oracle(f, want)?;
    }
    if let Some(m) = &mut spec.modulus {
        fix_modulus(m, want)?;
    }
    if let Some(TSet::ExplicitList { values }) = &mut spec.tset {
        for v in values {
            fix_scalar(v, want)?;
        }
    }
    if let Some(map) = &mut spec.multimap {
        fix_points(&mut map.carrier, want)?;
        for fs in &mut map.values {
            for f in fs {
                for s in &mut f.0 {
                    fix_scalar(s, want)?;
                }
            }
        }
    }
    for p in [
        &mut spec.x0,
        &mut spec.h,
        &mut spec.x,
        &mut spec.y,
        &mut spec.u,
    ]
    .into_iter()
    .flatten()
    {
        fix_points(std::slice::from_mut(p), want)?;
    }
    if let Some(t) = &mut spec.threshold {
        fix_scalar(t, want)?;
    }
    if let Some(ds) = &mut spec.directions {
        fix_points(ds, want)?;
    }
    if let Some(sw) = &mut spec.sweep {
        for s in sw {
            fix_scalar(s, want)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// CSV sweeps

fn csv_header(command: &str, spec_sha256: &str) -> String {
    format!("# strongconv {VERSION} command={command} spec_sha256={spec_sha256}\n")
}

/// A sweep entry as a truncation index: a positive integer, written either
/// exactly or as an integral float literal.
fn truncation_index(s: &Scalar) -> Option<u64> {
    match s {
        Scalar::Exact(_) => s.as_positive_integer().map(u64::from),
        Scalar::Float(v) => {
            (v.fract() == 0.0 && *v >= 1.0 && *v <= u32::MAX as f64).then_some(*v as u64)
        }
    }
}

/// Convergence of the Jensen amplification as the truncation grows: one row
/// per truncation in the sweep (plus the spec's own n).
fn csv_amplify(spec: &ProblemSpec, spec_sha256: &str, _tau: f64) -> Result<Finished, CliError> {
    let base = modulus(spec)?;
    let u = spec.u.as_ref().ok_or_else(|| missing("u"))?;
    let mut ns = vec![n_param(spec)?];
    if let Some(sweep) = &spec.sweep {
        for s in sweep {
            let n = truncation_index(s).ok_or_else(|| {
                CliError::schema(
                    "sweep",
                    "amplification sweeps over positive integer truncations",
                )
            })?;
            ns.push(n);
        }
    }
    ns.sort_unstable();
    ns.dedup();
    let mut out = csv_header("amplify", spec_sha256);
    out.push_str("n,value\n");
    let mut last: Option<AmplifyResult> = None;
    for n in &ns {
        let r = amplify_jensen(base, u, *n)?;
        let cell = match &r.value {
            AmplifyValue::Finite(v) => v.render(),
            AmplifyValue::Diverges => "DIVERGES".to_string(),
        };
        writeln!(out, "{n},{cell}").expect("string write");
        if *n == *ns.last().unwrap() {
            last = Some(r);
        }
    }
    let last = last.expect("at least one truncation");
    let (summary, code) = match &last.value {
        AmplifyValue::Finite(v) => (format!("{} rows, final value {}", ns.len(), v.render()), 0),
        AmplifyValue::Diverges => (format!("{} rows, DIVERGES", ns.len()), 1),
    };
    Ok(Finished {
        stdout: out,
        summary,
        code,
    })
}

/// The feasibility boundary as the power exponent varies: one row per p in
/// the sweep. Without a sweep, a single row for the spec's own modulus.
fn csv_feasible(spec: &ProblemSpec, spec_sha256: &str, _tau: f64) -> Result<Finished, CliError> {
    let base = modulus(spec)?;
    let dom = domain(spec)?;
    let n = n_param(spec)?;
    let threshold = threshold(spec)?;
    let mut out = csv_header("feasible", spec_sha256);
    out.push_str("p,verdict,witness_u,witness_n\n");
    let row =
        |out: &mut String, p_cell: &str, m: &Modulus| -> Result<FeasibilityVerdict, CliError> {
            let r = feasibility_check(m, dom, n, threshold)?;
            let verdict = match r.verdict {
                FeasibilityVerdict::Feasible => "Feasible",
                FeasibilityVerdict::Infeasible => "Infeasible",
            };
            let (wu, wn) = r
                .witness
                .as_ref()
                .map_or((String::new(), String::new()), |w| {
                    (
                        w.u.0
                            .iter()
                            .map(Scalar::render)
                            .collect::<Vec<_>>()
                            .join(";"),
                        w.n.to_string(),
                    )
                });
            writeln!(out, "{p_cell},{verdict},{wu},{wn}").expect("string write");
            Ok(r.verdict)
        };
    let verdict = if let Some(sweep) = &spec.sweep {
        let Modulus::PowerNorm { epsilon, .. } = base else {
            return Err(CliError::schema(
                "sweep",
                "feasibility sweeps vary the exponent of a power_norm modulus",
            ));
        };
        for p in sweep {
            let m = Modulus::PowerNorm {
                epsilon: epsilon.clone(),
                p: p.clone(),
            };
            row(&mut out, &p.render(), &m)?;
        }
        // The exit code still reflects the spec's own modulus.
        feasibility_check(base, dom, n, threshold)?.verdict
    } else {
        let p_cell = match base {
            Modulus::PowerNorm { p, .. } => p.render(),
            _ => String::new(),
        };
        row(&mut out, &p_cell, base)?
    };
    let rows = out.lines().count() - 2;
    let (summary, code) = match verdict {
        FeasibilityVerdict::Feasible => (format!("{rows} rows, spec modulus Feasible"), 0),
        FeasibilityVerdict::Infeasible => (format!("{rows} rows, spec modulus Infeasible"), 1),
    };
    Ok(Finished {
        stdout: out,
        summary,
        code,
    })
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").expect("string write");
    }
    out
}
