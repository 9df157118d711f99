//! Command-line front end. Every invocation writes one JSON report.

mod report;
mod verify;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub use report::{number, operator_norm, overall, sha256_hex, Check, RunReport, Status};
pub use verify::{gap_json, load_operator, scalar_battery, verify_suite, Tolerances};

use crate::calculus::{apply_function, apply_truncated, domain_member, parse_decay, DomainVerdict, DEFAULT_HORIZON};
use crate::exact::QComplex;
use crate::expr::parse_lambda_expr;
use crate::function::BorelFunction;
use crate::gap::{decompose, gap_theorem_check, reducible_inverse, restriction_spectrum_check, GapError};
use crate::models::{CMatrix, Operator, ScalarOperator};
use crate::spectrum::{classify_point, compute_spectrum, SpectrumError, Verdict, Witness};
use crate::vector::{vector_to_json, FiniteVector, VectorJson};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_SPEC: i32 = 65;

#[derive(Debug, Parser)]
#[command(name = "scalar-spectral", version, about = "Spectral checks for scalar type spectral operators")]
struct Cli {
    /// Omit wall time and timestamp from the report.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Tolerance for every deviation check, replacing the defaults.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Sequence-space exponent for diagonal specs.
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify points into point, continuous, residual or resolvent.
    Classify {
        spec: PathBuf,
        #[arg(long = "lambda", required = true, allow_hyphen_values = true)]
        lambda: Vec<String>,
        #[arg(long = "N", default_value_t = 1000)]
        n: u64,
    },
    /// Describe the spectrum.
    Spectrum {
        spec: PathBuf,
        #[arg(long = "N", default_value_t = 100)]
        n: u64,
    },
    /// Check the kernel/range decomposition on random vectors.
    Decompose {
        spec: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Compare isolation of 0 in the spectrum with closedness of the range.
    Gap {
        spec: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Solve (A + E({0}))y = x.
    Reduce {
        spec: PathBuf,
        #[arg(long)]
        vector: String,
    },
    /// Apply F(A) to a vector, or test domain membership of a decay profile.
    Calculus {
        spec: PathBuf,
        #[arg(long)]
        function: String,
        #[arg(long, required_unless_present = "decay")]
        vector: Option<String>,
        /// `geometric(r)` or `power(s)`.
        #[arg(long)]
        decay: Option<String>,
    },
    /// Run the invariant battery over several specs.
    Verify { specs: Vec<PathBuf> },
}

/// Exit code and the text written to each stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Context {
    tol: Tolerances,
    p: Option<f64>,
    seed: u64,
}

/// Parses `args` (including the program name) and executes one subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    if let Some(t) = cli.tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            return Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: "--tolerance must be finite and non-negative\n".into() };
        }
    }
    if let Some(p) = cli.p {
        if crate::vector::validate_p(p).is_err() {
            return Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: "--p must be at least 1\n".into() };
        }
    }
    let ctx = Context { tol: cli.tolerance.map_or_else(Tolerances::default, Tolerances::uniform), p: cli.p, seed: cli.seed };
    let start = Instant::now();
    let (mut report, code) = match &cli.command {
        Command::Verify { specs } => {
            let loaded: Vec<(String, Result<Vec<u8>, String>)> = specs
                .iter()
                .map(|p| (p.display().to_string(), std::fs::read(p).map_err(|e| format!("cannot read spec: {e}"))))
                .collect();
            let r = verify_suite(&loaded, ctx.seed, ctx.p, &ctx.tol);
            let code = r.status().exit_code();
            (r, code)
        }
        other => single(other, &ctx),
    };
    if !cli.no_timestamp {
        report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
        report.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    }
    Outcome { code, stdout: report.to_json(), stderr: String::new() }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Classify { .. } => "classify",
        Command::Spectrum { .. } => "spectrum",
        Command::Decompose { .. } => "decompose",
        Command::Gap { .. } => "gap",
        Command::Reduce { .. } => "reduce",
        Command::Calculus { .. } => "calculus",
        Command::Verify { .. } => "verify",
    }
}

fn spec_path(c: &Command) -> &PathBuf {
    match c {
        Command::Classify { spec, .. }
        | Command::Spectrum { spec, .. }
        | Command::Decompose { spec, .. }
        | Command::Gap { spec, .. }
        | Command::Reduce { spec, .. }
        | Command::Calculus { spec, .. } => spec,
        Command::Verify { .. } => unreachable!("verify takes a list"),
    }
}

/// Single-spec commands: load errors exit 65, argument errors 64.
fn single(command: &Command, ctx: &Context) -> (RunReport, i32) {
    let mut report = RunReport::new(command_name(command));
    let path = spec_path(command);
    let loaded = std::fs::read(path)
        .map_err(|e| format!("cannot read spec: {e}"))
        .and_then(|bytes| {
            report.specs.push((path.display().to_string(), sha256_hex(&bytes)));
            load_operator(&String::from_utf8_lossy(&bytes), ctx.p)
        });
    let op = match loaded {
        Ok(op) => op,
        Err(e) => {
            report.results = json!({ "error": e });
            report.forced = Some(Status::Fail);
            return (report, EXIT_SPEC);
        }
    };
    report.results = json!({ "model": op.model_name() });
    let outcome = match command {
        Command::Classify { lambda, n, .. } => classify(&op, lambda, *n, ctx, &mut report),
        Command::Spectrum { n, .. } => spectrum(&op, *n, &mut report),
        Command::Decompose { samples, .. } => with_scalar(&op, &mut report, |s, r| decomposition(s, *samples, ctx, r)),
        Command::Gap { samples, .. } => with_scalar(&op, &mut report, |s, r| gap(s, *samples, ctx, r)),
        Command::Reduce { vector, .. } => with_scalar(&op, &mut report, |s, r| reduce(s, vector, ctx, r)),
        Command::Calculus { function, vector, decay, .. } => {
            with_scalar(&op, &mut report, |s, r| calculus(s, function, vector.as_deref(), decay.as_deref(), ctx, r))
        }
        Command::Verify { .. } => unreachable!("handled by run"),
    };
    match outcome {
        Ok(()) => {
            let code = report.status().exit_code();
            (report, code)
        }
        Err(usage) => {
            report.results["error"] = json!(usage);
            report.forced = Some(Status::Fail);
            (report, EXIT_USAGE)
        }
    }
}

/// Runs `f` on a scalar-type model; other models get a failing entry.
fn with_scalar<F>(op: &Operator, report: &mut RunReport, f: F) -> Result<(), String>
where
    F: FnOnce(ScalarOperator<'_>, &mut RunReport) -> Result<(), String>,
{
    match op.as_scalar() {
        Some(s) => f(s, report),
        None => {
            report.checks.push(Check::failed(
                "scalar_type",
                format!("the {} model is not scalar type; this command needs a spectral measure", op.model_name()),
            ));
            Ok(())
        }
    }
}

fn set(report: &mut RunReport, key: &str, value: Value) {
    report.results[key] = value;
}

/// Parses a constant scalar such as `0`, `-1/2`, `2+3i`.
pub fn parse_scalar(src: &str) -> Result<Complex64, String> {
    let e = parse_lambda_expr(src).map_err(|e| format!("invalid point '{src}': {e}"))?;
    if !e.is_constant() {
        return Err(format!("invalid point '{src}': must not depend on n"));
    }
    e.eval(1).map_err(|e| format!("invalid point '{src}': {e}"))
}

fn parse_vector(src: &str) -> Result<FiniteVector, String> {
    let v: VectorJson = serde_json::from_str(src).map_err(|e| format!("invalid vector JSON: {e}"))?;
    v.to_vector().map_err(|e| format!("invalid vector: {e}"))
}

fn rng(ctx: &Context) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(ctx.seed)
}

fn spectrum_error_check(name: &str, e: &SpectrumError) -> Check {
    match e {
        SpectrumError::Model(_) | SpectrumError::NonFinite => Check::failed(name, e.to_string()),
        _ => Check::inconclusive(name, e.to_string()),
    }
}

/// `‖(A − λI)y − x‖` and `‖y‖ ≤ bound·‖x‖` for `y = (A − λI)⁻¹x` on seeded random `x`.
fn resolvent_certificate(op: ScalarOperator<'_>, lambda: Complex64, bound: f64, ctx: &Context, name: &str) -> Vec<Check> {
    let mut g = rng(ctx);
    let samples = verify::sample_vectors(op, &mut g, 20);
    let p = op.p();
    let mut residual = 0.0_f64;
    let mut within = true;
    for x in &samples {
        let y = match op {
            ScalarOperator::Diagonal(d) => {
                let l = QComplex::from_f64(lambda).expect("finite point");
                x.map_support(|k, v| v.checked_div(&(&d.eigenvalue(k) - &l)).expect("resolvent point"))
            }
            ScalarOperator::Finite(f) => {
                let n = f.dimension();
                let shifted = f.matrix() - CMatrix::identity(n, n) * lambda;
                let col = f.to_column(x).expect("sampled within the dimension");
                match shifted.lu().solve(&col) {
                    Some(sol) => crate::models::FiniteDiagonalizableOperator::from_column(&sol),
                    None => return vec![Check::failed(name, "shifted matrix is singular")],
                }
            }
        };
        let image = match op.apply(&y) {
            Ok(ay) => ay.sub(&y.scale(&QComplex::from_f64(lambda).expect("finite point"))),
            Err(e) => return vec![Check::failed(name, e.to_string())],
        };
        residual = residual.max(image.sub(x).norm(p));
        within &= y.norm(p) <= bound * x.norm(p) * (1.0 + 1e-9);
    }
    let t = ctx.tol.for_model(op).max(if op.is_exact() { 0.0 } else { 1e-9 });
    vec![
        Check::within(format!("{name}: resolvent_residual"), residual, t),
        Check::holds(format!("{name}: resolvent_bound"), within),
    ]
}

fn classify(op: &Operator, lambdas: &[String], n: u64, ctx: &Context, report: &mut RunReport) -> Result<(), String> {
    let points: Vec<Complex64> = lambdas.iter().map(|s| parse_scalar(s)).collect::<Result<_, _>>()?;
    let mut entries = Vec::new();
    for (src, lambda) in lambdas.iter().zip(points) {
        let name = format!("lambda={src}");
        match classify_point(op, lambda, n) {
            Ok(c) => {
                entries.push(serde_json::to_value(&c).expect("serializable"));
                if let Some(s) = op.as_scalar() {
                    report.checks.push(Check::holds(format!("{name}: not_residual"), c.verdict != Verdict::Residual));
                    if let Witness::InverseBound { bound } = c.witness {
                        report.checks.extend(resolvent_certificate(s, lambda, bound, ctx, &name));
                    }
                } else {
                    report.checks.push(Check::holds(&name, true).with_detail(format!("{:?}", c.verdict).to_lowercase()));
                }
            }
            Err(e) => {
                entries.push(json!({ "lambda": {"re": lambda.re, "im": lambda.im}, "error": e.to_string() }));
                report.checks.push(spectrum_error_check(&name, &e));
            }
        }
    }
    set(report, "classifications", Value::Array(entries));
    Ok(())
}

fn spectrum(op: &Operator, n: u64, report: &mut RunReport) -> Result<(), String> {
    match compute_spectrum(op, n) {
        Ok(s) => {
            set(report, "spectrum", serde_json::to_value(&s).expect("serializable"));
            report.checks.push(Check::holds("spectrum", true));
        }
        Err(e) => report.checks.push(match e {
            SpectrumError::LimitPointInconsistent { .. } => Check::failed("spectrum", e.to_string()),
            _ => spectrum_error_check("spectrum", &e),
        }),
    }
    Ok(())
}

fn decomposition(op: ScalarOperator<'_>, samples: usize, ctx: &Context, report: &mut RunReport) -> Result<(), String> {
    let xs = verify::sample_vectors(op, &mut rng(ctx), samples);
    match decompose(op, &xs) {
        Ok(r) => {
            report.checks.push(Check::within("decomposition", r.max_deviation(), ctx.tol.for_model(op)));
            set(report, "decomposition", serde_json::to_value(&r).expect("serializable"));
        }
        Err(e) => report.checks.push(Check::failed("decomposition", e.to_string())),
    }
    Ok(())
}

fn gap(op: ScalarOperator<'_>, samples: usize, ctx: &Context, report: &mut RunReport) -> Result<(), String> {
    let xs = verify::sample_vectors(op, &mut rng(ctx), samples);
    match gap_theorem_check(op, &xs) {
        Ok(g) => {
            report.checks.push(Check::holds("predicates_agree", g.predicates_agree));
            if let Some(d) = g.proof_identity_deviation {
                report.checks.push(Check::within("proof_identity", d, ctx.tol.for_model(op)));
            }
            set(report, "gap", verify::gap_json(&g));
            if g.is_eigenvalue {
                match restriction_spectrum_check(op, 20) {
                    Ok(r) => {
                        report.checks.push(Check::holds("restriction_spectrum_union", r.union_holds));
                        let mut v = serde_json::to_value(&r).expect("serializable");
                        v["a1_inverse_norm"] = operator_norm(r.a1_inverse_norm);
                        set(report, "restriction", v);
                    }
                    Err(e) if e.is_inconclusive() => report.checks.push(Check::inconclusive("restriction_spectrum_union", e.to_string())),
                    Err(e) => report.checks.push(Check::failed("restriction_spectrum_union", e.to_string())),
                }
            }
        }
        Err(GapError::ZeroNotInSpectrum) => {
            set(report, "gap", json!({ "zero_in_spectrum": false }));
            report.checks.push(Check::holds("predicates_agree", true).with_detail("0 is not in the spectrum; the operator is invertible"));
        }
        Err(e) if e.is_inconclusive() => report.checks.push(Check::inconclusive("predicates_agree", e.to_string())),
        Err(e) => report.checks.push(Check::failed("predicates_agree", e.to_string())),
    }
    Ok(())
}

fn reduce(op: ScalarOperator<'_>, vector: &str, ctx: &Context, report: &mut RunReport) -> Result<(), String> {
    let x = parse_vector(vector)?;
    match reducible_inverse(op, &x) {
        Ok(r) => {
            let p = op.p();
            let ratio = if x.is_zero() { 0.0 } else { r.y.norm(p) / x.norm(p) };
            report.checks.push(Check::within("residual", r.residual, ctx.tol.for_model(op)));
            report.checks.push(Check::holds("norm_bound", ratio <= r.inverse_norm_bound * (1.0 + 1e-12)));
            set(
                report,
                "reduce",
                json!({
                    "y": vector_to_json(&r.y),
                    "inverse_norm_bound": number(r.inverse_norm_bound),
                    "residual": number(r.residual),
                    "norm_ratio": number(ratio),
                }),
            );
        }
        Err(e) if e.is_inconclusive() => report.checks.push(Check::inconclusive("reduce", e.to_string())),
        Err(e) => report.checks.push(Check::failed("reduce", e.to_string())),
    }
    Ok(())
}

fn calculus(
    op: ScalarOperator<'_>,
    function: &str,
    vector: Option<&str>,
    decay: Option<&str>,
    ctx: &Context,
    report: &mut RunReport,
) -> Result<(), String> {
    let f: BorelFunction = function.parse().map_err(|e| format!("invalid function: {e}"))?;
    set(report, "function", json!(f.to_string()));
    if let Some(src) = vector {
        let x = parse_vector(src)?;
        match apply_function(op, &f, &x) {
            Ok(r) => {
                let t = ctx.tol.for_model(op);
                let mut dev = 0.0_f64;
                for m in [r.converged_at, r.converged_at + 1, 2 * r.converged_at] {
                    match apply_truncated(op, &f, m, &x) {
                        Ok(v) => dev = dev.max(v.sub(&r.value).norm(op.p())),
                        Err(e) => return Err(e.to_string()),
                    }
                }
                report.checks.push(Check::within("truncation_consistency", dev, t));
                set(
                    report,
                    "calculus",
                    json!({
                        "value": vector_to_json(&r.value),
                        "converged_at": r.converged_at,
                        "domain_verdict": r.domain_verdict,
                    }),
                );
            }
            Err(e) => report.checks.push(Check::failed("calculus", e.to_string())),
        }
    }
    if let Some(src) = decay {
        let profile = parse_decay(src).ok_or_else(|| format!("invalid decay profile '{src}'"))?;
        match op {
            ScalarOperator::Diagonal(d) => {
                let r = domain_member(d, &f, profile, DEFAULT_HORIZON);
                report.checks.push(match r.verdict {
                    DomainVerdict::Undetermined => Check::inconclusive("domain", r.test),
                    _ => Check::holds("domain", true).with_detail(r.test),
                });
                let mut v = serde_json::to_value(&r).expect("serializable");
                v["partial_sum"] = number(r.partial_sum);
                set(report, "domain", v);
            }
            ScalarOperator::Finite(_) => {
                report.checks.push(Check::holds("domain", true).with_detail("every vector is in the domain of a bounded F(A)"));
                set(report, "domain", json!({ "verdict": DomainVerdict::Member, "test": "finite dimension" }));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("2+3i").unwrap(), Complex64::new(2.0, 3.0));
        assert_eq!(parse_scalar("-1/2").unwrap(), Complex64::new(-0.5, 0.0));
        assert!(parse_scalar("n").is_err());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["scalar-spectral"]).code, EXIT_USAGE);
        assert_eq!(run(["scalar-spectral", "classify", "x.json"]).code, EXIT_USAGE);
        assert_eq!(run(["scalar-spectral", "--help"]).code, 0);
    }

    #[test]
    fn missing_spec_is_a_spec_error() {
        let out = run(["scalar-spectral", "gap", "/nonexistent/spec.json", "--no-timestamp"]);
        assert_eq!(out.code, EXIT_SPEC);
        assert!(out.stdout.contains("\"status\": \"fail\""));
    }

    #[test]
    fn empty_verify_passes_with_warning() {
        let out = run(["scalar-spectral", "verify", "--no-timestamp"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("warnings"));
        assert!(!out.stdout.contains("timestamp"));
    }
}
