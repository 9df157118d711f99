//! The invariant battery run by `verify`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::report::{number, operator_norm, overall, sha256_hex, Check, RunReport, Status};
use crate::exact::QComplex;
use crate::gap::{decompose, gap_theorem_check, zero_in_spectrum, ReducibleInverse};
use crate::measure::{measure_bound, verify_measure_axioms};
use crate::models::{Operator, OperatorSpec, ScalarOperator};
use crate::region::BorelRegion;
use crate::sampling::{random_point, random_vector, random_vectors};
use crate::spectrum::{classify_point, residual_spectrum, Verdict};
use crate::vector::FiniteVector;

/// Deviation tolerances: exact for the diagonal model, `finite` for the matrix model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub exact: f64,
    pub finite: f64,
    pub measure_bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { exact: 0.0, finite: 1e-10, measure_bound: 1e-8 }
    }
}

impl Tolerances {
    /// A single tolerance applied everywhere.
    pub fn uniform(t: f64) -> Self {
        Self { exact: t, finite: t, measure_bound: t }
    }

    pub fn for_model(&self, op: ScalarOperator<'_>) -> f64 {
        if op.is_exact() {
            self.exact
        } else {
            self.finite
        }
    }
}

const SAMPLES: usize = 100;
const REGION_PAIRS: usize = 4;
const LAMBDA_SAMPLES: usize = 50;

/// Loads a spec file, applying an optional `p` override to diagonal specs.
pub fn load_operator(text: &str, p: Option<f64>) -> Result<Operator, String> {
    let mut spec: OperatorSpec = serde_json::from_str(text).map_err(|e| format!("invalid operator spec JSON: {e}"))?;
    if let (Some(p), OperatorSpec::Diagonal { p: slot, .. }) = (p, &mut spec) {
        *slot = p;
    }
    Operator::from_spec(&spec).map_err(|e| e.to_string())
}

pub fn sample_vectors<R: Rng>(op: ScalarOperator<'_>, rng: &mut R, count: usize) -> Vec<FiniteVector> {
    match op {
        ScalarOperator::Diagonal(_) => random_vectors(rng, count, 64, 8),
        ScalarOperator::Finite(f) => random_vectors(rng, count, f.dimension() as u64, f.dimension()),
    }
}

fn eigen_samples(op: ScalarOperator<'_>, n: u64) -> Vec<Complex64> {
    match op {
        ScalarOperator::Diagonal(d) => (1..=n).map(|k| d.eigenvalue(k).to_f64()).collect(),
        ScalarOperator::Finite(f) => f.eigenvalues().to_vec(),
    }
}

fn random_region<R: Rng>(rng: &mut R, anchors: &[Complex64]) -> BorelRegion {
    let center = anchors[rng.gen_range(0..anchors.len())];
    let radius = rng.gen_range(1..=16) as f64 / 16.0;
    let disk = BorelRegion::closed_disk(center, radius).expect("finite disk");
    if rng.gen_bool(0.5) {
        disk
    } else {
        let normal = Complex64::new(rng.gen_range(-4..=4) as f64, rng.gen_range(1..=4) as f64);
        BorelRegion::union(disk, BorelRegion::half_plane(normal, rng.gen_range(-8..=8) as f64 / 8.0).expect("nonzero normal"))
    }
}

/// Points for residual sampling: eigenvalues, midpoints between them, and grid points.
fn lambda_samples<R: Rng>(rng: &mut R, eigs: &[Complex64], count: usize) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = eigs.iter().take(count / 3).copied().collect();
    for w in eigs.windows(2).take(count / 3) {
        out.push((w[0] + w[1]) / 2.0);
    }
    while out.len() < count {
        out.push(random_point(rng, 4.0));
    }
    out
}

/// Battery for a scalar-type model.
pub fn scalar_battery<R: Rng>(op: ScalarOperator<'_>, rng: &mut R, tol: &Tolerances) -> (Vec<Check>, Value) {
    let t = tol.for_model(op);
    let mut checks = Vec::new();
    let mut results = serde_json::Map::new();
    let samples = sample_vectors(op, rng, SAMPLES);
    let eigs = eigen_samples(op, 16);

    let mut worst = 0.0_f64;
    for _ in 0..REGION_PAIRS {
        let delta = random_region(rng, &eigs);
        let sigma = random_region(rng, &eigs);
        match verify_measure_axioms(op, &delta, &sigma, &samples[..SAMPLES / 4]) {
            Ok(r) => worst = worst.max(r.max_deviation()),
            Err(e) => checks.push(Check::failed("measure_axioms", e.to_string())),
        }
    }
    checks.push(Check::within("measure_axioms", worst, t));

    let bound = measure_bound(op, 16, rng);
    checks.push(Check::holds("measure_bound", bound.max_observed <= bound.exact_bound + tol.measure_bound));
    results.insert(
        "measure_bound".into(),
        json!({"max_observed": number(bound.max_observed), "exact_bound": number(bound.exact_bound), "exhaustive": bound.exhaustive}),
    );

    match decompose(op, &samples) {
        Ok(r) => {
            checks.push(Check::within("decomposition", r.max_deviation(), t));
            results.insert("decomposition".into(), serde_json::to_value(&r).expect("serializable"));
        }
        Err(e) => checks.push(Check::failed("decomposition", e.to_string())),
    }

    let lambdas = lambda_samples(rng, &eigen_samples(op, 40), LAMBDA_SAMPLES);
    match residual_spectrum(op, &lambdas, 1000) {
        Ok(r) => checks.push(Check::holds("residual_spectrum_empty", r.is_empty()).with_detail(format!("{} points sampled", lambdas.len()))),
        Err(e) => checks.push(Check::inconclusive("residual_spectrum_empty", e.to_string())),
    }

    match zero_in_spectrum(op) {
        Ok(true) => match gap_theorem_check(op, &samples) {
            Ok(g) => {
                checks.push(Check::holds("gap_predicates_agree", g.predicates_agree));
                if let Some(d) = g.proof_identity_deviation {
                    checks.push(Check::within("proof_identity", d, t));
                }
                results.insert("gap".into(), gap_json(&g));
            }
            Err(e) if e.is_inconclusive() => checks.push(Check::inconclusive("gap_predicates_agree", e.to_string())),
            Err(e) => checks.push(Check::failed("gap_predicates_agree", e.to_string())),
        },
        Ok(false) => {}
        Err(e) => checks.push(Check::inconclusive("gap_predicates_agree", e.to_string())),
    }

    match ReducibleInverse::new(op) {
        Ok(solver) => {
            let mut residual = 0.0_f64;
            let mut ratio_ok = true;
            for x in &samples {
                match solver.solve(x) {
                    Ok(r) => {
                        residual = residual.max(r.residual);
                        ratio_ok &= r.y.norm(op.p()) <= r.inverse_norm_bound * x.norm(op.p()) * (1.0 + 1e-12);
                    }
                    Err(e) => {
                        checks.push(Check::failed("reducible_inverse_residual", e.to_string()));
                        break;
                    }
                }
            }
            checks.push(Check::within("reducible_inverse_residual", residual, t));
            checks.push(Check::holds("reducible_inverse_bound", ratio_ok));
        }
        Err(e) => {
            results.insert("reducible_inverse".into(), json!({ "skipped": e.to_string() }));
        }
    }
    (checks, Value::Object(results))
}

pub fn gap_json(g: &crate::gap::GapReport) -> Value {
    let mut v = json!({
        "zero_in_spectrum": g.zero_in_spectrum,
        "isolated": g.isolated,
        "gap_radius": number(g.gap_radius),
        "range_closed": g.range_closed,
        "inf_nonzero_modulus": number(g.inf_nonzero_modulus),
        "predicates_agree": g.predicates_agree,
        "is_eigenvalue": g.is_eigenvalue,
        "restriction_inverse_norm": operator_norm(g.restriction_inverse_norm),
    });
    if let Some(gamma) = g.gamma {
        v["gamma"] = number(gamma);
    }
    if let Some(d) = g.proof_identity_deviation {
        v["proof_identity_deviation"] = number(d);
    }
    v
}

/// Battery for the two operators outside the scalar-type class.
fn counterexample_battery<R: Rng>(op: &Operator, rng: &mut R) -> Vec<Check> {
    let mut checks = Vec::new();
    match op {
        Operator::WeightedShift(s) => {
            let residual_at_zero = classify_point(op, Complex64::new(0.0, 0.0), 10).map(|c| c.verdict);
            checks.push(Check::holds("residual_at_zero", residual_at_zero == Ok(Verdict::Residual)));
            let e1 = FiniteVector::basis(1).expect("index 1");
            let obstruction = (0..SAMPLES).all(|_| {
                let x = random_vector(rng, 50, 50);
                let ax = s.apply(&x);
                ax.get(1).is_zero() && ax.sub(&e1).norm(2.0) >= 1.0
            });
            checks.push(Check::holds("range_obstruction", obstruction));
        }
        Operator::Differentiation(d) => {
            let all_points = (0..LAMBDA_SAMPLES).all(|_| {
                let z = random_point(rng, 8.0);
                let (_, residual) = d.differentiate_exponential(&QComplex::from_f64(z).expect("finite"), &QComplex::one());
                residual.is_zero() && classify_point(op, z, 10).map(|c| c.verdict) == Ok(Verdict::Point)
            });
            checks.push(Check::holds("point_spectrum_everywhere", all_points));
        }
        _ => unreachable!("scalar-type models use scalar_battery"),
    }
    checks
}

/// Runs the battery over every spec, in order, with one generator seeded by `seed`.
pub fn verify_suite(specs: &[(String, Result<Vec<u8>, String>)], seed: u64, p: Option<f64>, tol: &Tolerances) -> RunReport {
    let mut report = RunReport::new("verify");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if specs.is_empty() {
        report.warnings.push("no operator specs given; nothing was checked".into());
    }
    let mut entries = Vec::new();
    for (path, bytes) in specs {
        let mut entry = serde_json::Map::new();
        entry.insert("path".into(), json!(path));
        let (checks, results) = match bytes {
            Err(e) => (vec![Check::failed("load", e.clone())], Value::Null),
            Ok(bytes) => {
                report.specs.push((path.clone(), sha256_hex(bytes)));
                let text = String::from_utf8_lossy(bytes);
                match load_operator(&text, p) {
                    Err(e) => (vec![Check::failed("load", e)], Value::Null),
                    Ok(op) => {
                        entry.insert("model".into(), json!(op.model_name()));
                        match op.as_scalar() {
                            Some(s) => scalar_battery(s, &mut rng, tol),
                            None => (counterexample_battery(&op, &mut rng), Value::Null),
                        }
                    }
                }
            }
        };
        entry.insert("status".into(), json!(overall(checks.iter().map(|c| c.status))));
        entry.insert("checks".into(), Value::Array(checks.iter().map(Check::to_json).collect()));
        if !results.is_null() {
            entry.insert("results".into(), results);
        }
        for c in checks {
            report.checks.push(Check { name: format!("{path}: {}", c.name), ..c });
        }
        entries.push(Value::Object(entry));
    }
    report.results = json!({ "seed": seed, "operators": entries, "check_count": report.checks.len() });
    if report.status() == Status::Pass && !specs.is_empty() {
        report.warnings.clear();
    }
    report
}
