//! The Borel operational calculus `F ↦ F(A)` through truncations `F_n`.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use crate::exact::{rational_from_f64, QComplex};
use crate::function::{exhaustion_level, truncate_function, BorelFunction};
use crate::models::{DiagonalOperator, ModelError, ScalarOperator};
use crate::poly::Asymptote;
use crate::vector::FiniteVector;

/// Horizon for the partial sums reported alongside domain verdicts.
pub const DEFAULT_HORIZON: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DomainVerdict {
    #[serde(rename = "member")]
    Member,
    #[serde(rename = "non-member")]
    NonMember,
    #[serde(rename = "undetermined-at-truncation")]
    Undetermined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalculusResult {
    pub value: FiniteVector,
    /// Smallest `n` with `F_m(A)x = F(A)x` for every `m ≥ n`.
    pub converged_at: u64,
    pub domain_verdict: DomainVerdict,
}

fn finite_weights<F>(op: &crate::models::FiniteDiagonalizableOperator, f: F) -> crate::models::CMatrix
where
    F: Fn(&QComplex) -> QComplex,
{
    op.spectral_matrix(|_, z| f(&QComplex::from_f64(z).expect("finite eigenvalue")).to_f64())
}

/// `F_n(A)x`.
pub fn apply_truncated(
    op: ScalarOperator<'_>,
    f: &BorelFunction,
    n: u64,
    x: &FiniteVector,
) -> Result<FiniteVector, ModelError> {
    let fn_ = truncate_function(f.clone(), n.max(1));
    apply_exact(op, &fn_, x)
}

fn apply_exact(op: ScalarOperator<'_>, f: &BorelFunction, x: &FiniteVector) -> Result<FiniteVector, ModelError> {
    match op {
        ScalarOperator::Diagonal(d) => Ok(x.map_support(|k, v| &f.eval_exact(&d.eigenvalue(k)) * v)),
        ScalarOperator::Finite(m) => m.apply_matrix(&finite_weights(m, |z| f.eval_exact(z)), x),
    }
}

/// `F(A)x = lim F_n(A)x`. For a finitely supported `x` only finitely many
/// eigenvalues are involved, so the sequence is constant from
/// `max ⌈|F(λ)|⌉` onwards.
pub fn apply_function(op: ScalarOperator<'_>, f: &BorelFunction, x: &FiniteVector) -> Result<CalculusResult, ModelError> {
    let value = apply_exact(op, f, x)?;
    let converged_at = match op {
        ScalarOperator::Diagonal(d) => x.support().map(|k| exhaustion_level(&f.eval_exact(&d.eigenvalue(k)))).max(),
        ScalarOperator::Finite(m) => {
            m.eigenvalues().iter().map(|z| exhaustion_level(&f.eval_exact(&QComplex::from_f64(*z).expect("finite")))).max()
        }
    }
    .unwrap_or(1);
    Ok(CalculusResult { value, converged_at, domain_verdict: DomainVerdict::Member })
}

/// Analytic decay profile of an infinite vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayProfile {
    /// `|x_k| = r^k`, `r > 0`.
    Geometric { ratio: f64 },
    /// `|x_k| = k^(-s)`.
    Power { exponent: f64 },
}

/// Eventual size of `F(λ(k))` as `k → ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Growth {
    /// Eventually zero.
    Zero,
    /// `F(λ(k)) = coeff·k^degree·(1 + o(1))`, `coeff ≠ 0`.
    Exact { coeff: QComplex, degree: i64 },
    /// `|F(λ(k))| ≤ C·k^degree` eventually.
    Bounded { degree: i64 },
    Unknown,
}

impl Growth {
    fn upper_degree(&self) -> Option<i64> {
        match self {
            Growth::Exact { degree, .. } | Growth::Bounded { degree } => Some(*degree),
            _ => None,
        }
    }
}

fn leaf_growth(f: &BorelFunction, lambda: &Asymptote) -> Growth {
    let (c, d) = match lambda {
        Asymptote::Zero => {
            return match f {
                BorelFunction::Power(0) => Growth::Exact { coeff: QComplex::one(), degree: 0 },
                BorelFunction::Constant(z) if !z.is_zero() => Growth::Exact { coeff: z.clone(), degree: 0 },
                BorelFunction::Indicator(r) if r.contains_exact(&QComplex::zero()) => {
                    Growth::Exact { coeff: QComplex::one(), degree: 0 }
                }
                _ => Growth::Zero,
            };
        }
        Asymptote::Power { coeff, degree } => (coeff, *degree),
    };
    match f {
        BorelFunction::Identity => Growth::Exact { coeff: c.clone(), degree: d },
        BorelFunction::Constant(z) if z.is_zero() => Growth::Zero,
        BorelFunction::Constant(z) => Growth::Exact { coeff: z.clone(), degree: 0 },
        BorelFunction::Power(k) => {
            let coeff = c.powi(*k as i32).expect("nonzero leading coefficient");
            Growth::Exact { coeff, degree: d * *k as i64 }
        }
        BorelFunction::ReciprocalCutoff(gamma) => {
            if d > 0 {
                Growth::Exact { coeff: c.recip().expect("nonzero"), degree: -d }
            } else if d < 0 {
                Growth::Zero
            } else {
                match c.cmp_abs(gamma) {
                    std::cmp::Ordering::Greater => Growth::Exact { coeff: c.recip().expect("nonzero"), degree: 0 },
                    std::cmp::Ordering::Less => Growth::Zero,
                    std::cmp::Ordering::Equal => Growth::Bounded { degree: 0 },
                }
            }
        }
        BorelFunction::Indicator(_) => Growth::Bounded { degree: 0 },
        _ => unreachable!("composite descriptors are handled by growth()"),
    }
}

fn growth(f: &BorelFunction, lambda: &Asymptote) -> Growth {
    match f {
        BorelFunction::Sum(a, b) => add_growth(growth(a, lambda), growth(b, lambda)),
        BorelFunction::Product(a, b) => mul_growth(growth(a, lambda), growth(b, lambda)),
        BorelFunction::Truncated(inner, n) => {
            let level = BigRational::from_integer((*n).into());
            match growth(inner, lambda) {
                Growth::Zero => Growth::Zero,
                Growth::Exact { degree, .. } if degree > 0 => Growth::Zero,
                Growth::Exact { coeff, degree: 0 } => match coeff.cmp_abs(&level) {
                    std::cmp::Ordering::Greater => Growth::Zero,
                    std::cmp::Ordering::Less => Growth::Exact { coeff, degree: 0 },
                    std::cmp::Ordering::Equal => Growth::Bounded { degree: 0 },
                },
                exact @ Growth::Exact { .. } => exact,
                Growth::Bounded { degree } => Growth::Bounded { degree: degree.min(0) },
                Growth::Unknown => Growth::Bounded { degree: 0 },
            }
        }
        leaf => leaf_growth(leaf, lambda),
    }
}

fn add_growth(a: Growth, b: Growth) -> Growth {
    use Growth::*;
    match (a, b) {
        (Zero, g) | (g, Zero) => g,
        (Unknown, _) | (_, Unknown) => Unknown,
        (Exact { coeff: c1, degree: d1 }, Exact { coeff: c2, degree: d2 }) => {
            if d1 > d2 {
                Exact { coeff: c1, degree: d1 }
            } else if d2 > d1 {
                Exact { coeff: c2, degree: d2 }
            } else {
                let sum = &c1 + &c2;
                if sum.is_zero() {
                    Bounded { degree: d1 }
                } else {
                    Exact { coeff: sum, degree: d1 }
                }
            }
        }
        (Exact { coeff, degree: d1 }, Bounded { degree: d2 }) | (Bounded { degree: d2 }, Exact { coeff, degree: d1 }) => {
            if d1 > d2 {
                Exact { coeff, degree: d1 }
            } else {
                Bounded { degree: d2 }
            }
        }
        (Bounded { degree: d1 }, Bounded { degree: d2 }) => Bounded { degree: d1.max(d2) },
    }
}

fn mul_growth(a: Growth, b: Growth) -> Growth {
    use Growth::*;
    match (a, b) {
        (Zero, _) | (_, Zero) => Zero,
        (Unknown, _) | (_, Unknown) => Unknown,
        (Exact { coeff: c1, degree: d1 }, Exact { coeff: c2, degree: d2 }) => Exact { coeff: &c1 * &c2, degree: d1 + d2 },
        (a, b) => Bounded { degree: a.upper_degree().unwrap_or(0) + b.upper_degree().unwrap_or(0) },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainReport {
    pub verdict: DomainVerdict,
    pub test: &'static str,
    /// `Σ_{k ≤ N} |F(λ(k)) x_k|^p`.
    pub partial_sum: f64,
    pub horizon: u64,
}

fn power_verdict(g: &Growth, s: f64, p: f64) -> (DomainVerdict, &'static str) {
    match g {
        Growth::Zero => (DomainVerdict::Member, "eventually zero"),
        Growth::Exact { degree, .. } => {
            if (s - *degree as f64) * p > 1.0 {
                (DomainVerdict::Member, "p-series comparison (convergent)")
            } else {
                (DomainVerdict::NonMember, "p-series comparison (divergent)")
            }
        }
        Growth::Bounded { degree } => {
            if (s - *degree as f64) * p > 1.0 {
                (DomainVerdict::Member, "p-series comparison (convergent)")
            } else {
                (DomainVerdict::Undetermined, "upper bound only")
            }
        }
        Growth::Unknown => (DomainVerdict::Undetermined, "no growth bound"),
    }
}

/// Whether `x ∈ D(F(A))`, i.e. `Σ |F(λ(k)) x_k|^p < ∞`, for an infinite
/// vector described by its decay profile.
pub fn domain_member(op: &DiagonalOperator, f: &BorelFunction, profile: DecayProfile, horizon: u64) -> DomainReport {
    let p = op.p();
    let g = growth(f, &op.tail_fn().asymptote());
    let (verdict, test) = match profile {
        DecayProfile::Geometric { ratio } if !(ratio > 0.0 && ratio.is_finite()) => {
            (DomainVerdict::Undetermined, "invalid ratio")
        }
        DecayProfile::Geometric { ratio: 1.0 } => power_verdict(&g, 0.0, p),
        DecayProfile::Geometric { ratio } => match (&g, ratio < 1.0) {
            (Growth::Zero, _) => (DomainVerdict::Member, "eventually zero"),
            (Growth::Exact { .. } | Growth::Bounded { .. }, true) => {
                (DomainVerdict::Member, "geometric ratio test (convergent)")
            }
            (Growth::Exact { .. }, false) => (DomainVerdict::NonMember, "geometric ratio test (divergent)"),
            _ => (DomainVerdict::Undetermined, "upper bound only"),
        },
        DecayProfile::Power { exponent } => power_verdict(&g, exponent, p),
    };
    let coordinate = |k: u64| -> f64 {
        match profile {
            DecayProfile::Geometric { ratio } => ratio.powf(k as f64),
            DecayProfile::Power { exponent } => (k as f64).powf(-exponent),
        }
    };
    let partial_sum = (1..=horizon)
        .map(|k| (f.eval(op.eigenvalue(k).to_f64()).norm() * coordinate(k)).powf(p))
        .sum();
    DomainReport { verdict, test, partial_sum, horizon }
}

/// Parses the command-line decay syntax `geometric(r)` / `power(s)`.
pub fn parse_decay(src: &str) -> Option<DecayProfile> {
    let src = src.trim();
    let (name, rest) = src.split_once('(')?;
    let arg: f64 = rest.strip_suffix(')')?.trim().parse().ok()?;
    rational_from_f64(arg)?;
    match name.trim() {
        "geometric" => Some(DecayProfile::Geometric { ratio: arg }),
        "power" => Some(DecayProfile::Power { exponent: arg }),
        _ => None,
    }
}

/// `F(λ)` for every eigenvalue of the finite model, or the first `n` of a diagonal one.
pub fn function_values(op: ScalarOperator<'_>, f: &BorelFunction, n: u64) -> Vec<Complex64> {
    match op {
        ScalarOperator::Diagonal(d) => (1..=n).map(|k| f.eval_exact(&d.eigenvalue(k)).to_f64()).collect(),
        ScalarOperator::Finite(m) => m.eigenvalues().iter().map(|z| f.eval(*z)).collect(),
    }
}
