//! Closed-form Borel functions `F: ℂ → ℂ` and their truncations `F_n`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Signed;

use crate::exact::{format_rational, rational_from_f64, QComplex};
use crate::region::{scalar_text, BorelRegion, RegionError};
use crate::syntax::{parse_call, Call, DescriptorError};

/// Largest accepted exponent in [`BorelFunction::Power`].
pub const MAX_POWER: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BorelFunction {
    Identity,
    Constant(QComplex),
    Power(u32),
    /// `0` for `|λ| < γ`, `1/λ` for `|λ| ≥ γ` (with `γ > 0`).
    ReciprocalCutoff(BigRational),
    Indicator(BorelRegion),
    Sum(Box<BorelFunction>, Box<BorelFunction>),
    Product(Box<BorelFunction>, Box<BorelFunction>),
    /// `F_n = F · χ{|F| ≤ n}`.
    Truncated(Box<BorelFunction>, u64),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FunctionError {
    #[error("cutoff radius must be a positive finite number")]
    InvalidCutoff,
    #[error("non-finite constant")]
    NonFinite,
    #[error("power exponent exceeds {MAX_POWER}")]
    PowerTooLarge,
    #[error("truncation level must be at least 1")]
    ZeroTruncation,
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Syntax(#[from] DescriptorError),
}

impl BorelFunction {
    pub fn constant(c: Complex64) -> Result<Self, FunctionError> {
        Ok(Self::Constant(QComplex::from_f64(c).ok_or(FunctionError::NonFinite)?))
    }

    pub fn power(k: u32) -> Result<Self, FunctionError> {
        if k > MAX_POWER {
            return Err(FunctionError::PowerTooLarge);
        }
        Ok(Self::Power(k))
    }

    pub fn reciprocal_cutoff(gamma: f64) -> Result<Self, FunctionError> {
        let g = rational_from_f64(gamma).ok_or(FunctionError::InvalidCutoff)?;
        if !g.is_positive() {
            return Err(FunctionError::InvalidCutoff);
        }
        Ok(Self::ReciprocalCutoff(g))
    }

    pub fn sum(a: Self, b: Self) -> Self {
        Self::Sum(Box::new(a), Box::new(b))
    }

    pub fn product(a: Self, b: Self) -> Self {
        Self::Product(Box::new(a), Box::new(b))
    }

    /// Exact value `F(λ)`.
    pub fn eval_exact(&self, z: &QComplex) -> QComplex {
        use BorelFunction::*;
        match self {
            Identity => z.clone(),
            Constant(c) => c.clone(),
            Power(k) => z.powi(*k as i32).expect("non-negative power"),
            ReciprocalCutoff(gamma) => {
                if z.is_zero() || z.cmp_abs(gamma).is_lt() {
                    QComplex::zero()
                } else {
                    z.recip().expect("non-zero")
                }
            }
            Indicator(r) => {
                if r.contains_exact(z) {
                    QComplex::one()
                } else {
                    QComplex::zero()
                }
            }
            Sum(a, b) => &a.eval_exact(z) + &b.eval_exact(z),
            Product(a, b) => &a.eval_exact(z) * &b.eval_exact(z),
            Truncated(f, n) => {
                let v = f.eval_exact(z);
                if within_level(&v, *n) {
                    v
                } else {
                    QComplex::zero()
                }
            }
        }
    }

    /// `F(λ)` for a finite `f64` point, computed exactly and rounded once.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match QComplex::from_f64(z) {
            Some(q) => self.eval_exact(&q).to_f64(),
            None => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    pub(crate) fn from_call(c: &Call) -> Result<Self, FunctionError> {
        let nonzero_level = |c: &Call, i: usize| -> Result<u64, FunctionError> {
            match c.integer_arg(i)? {
                0 => Err(FunctionError::ZeroTruncation),
                n => Ok(n),
            }
        };
        Ok(match c.name.as_str() {
            "identity" => {
                c.expect_arity(0)?;
                Self::Identity
            }
            "constant" => {
                c.expect_arity(1)?;
                Self::Constant(c.scalar_arg(0)?)
            }
            "power" => {
                c.expect_arity(1)?;
                let k = c.integer_arg(0)?;
                Self::power(u32::try_from(k).map_err(|_| FunctionError::PowerTooLarge)?)?
            }
            "reciprocal_cutoff" | "recip_cutoff" => {
                c.expect_arity(1)?;
                let g = c.scalar_arg(0)?;
                if !g.is_real() || !g.re.is_positive() {
                    return Err(FunctionError::InvalidCutoff);
                }
                Self::ReciprocalCutoff(g.re)
            }
            "indicator" => {
                c.expect_arity(1)?;
                Self::Indicator(BorelRegion::from_call(c.call_arg(0)?)?)
            }
            "sum" | "product" => {
                c.expect_arity(2)?;
                let a = Self::from_call(c.call_arg(0)?)?;
                let b = Self::from_call(c.call_arg(1)?)?;
                if c.name == "sum" {
                    Self::sum(a, b)
                } else {
                    Self::product(a, b)
                }
            }
            "truncate" => {
                c.expect_arity(2)?;
                truncate_function(Self::from_call(c.call_arg(0)?)?, nonzero_level(c, 1)?)
            }
            other => {
                return Err(DescriptorError::new(c.position, format!("unknown function '{other}'")).into());
            }
        })
    }
}

/// `|v| ≤ n`, exactly.
pub(crate) fn within_level(v: &QComplex, n: u64) -> bool {
    v.cmp_abs(&BigRational::from_integer(BigInt::from(n))).is_le()
}

/// The truncation `F_n(λ) = F(λ)` when `|F(λ)| ≤ n`, else `0`.
pub fn truncate_function(f: BorelFunction, n: u64) -> BorelFunction {
    BorelFunction::Truncated(Box::new(f), n)
}

/// Smallest level `n ≥ 1` with `|v| ≤ n`, i.e. `max(1, ⌈|v|⌉)`.
pub fn exhaustion_level(v: &QComplex) -> u64 {
    let approx = v.abs_f64().ceil().max(1.0);
    let mut n = if approx.is_finite() && approx < u64::MAX as f64 { approx as u64 } else { u64::MAX };
    while n > 1 && within_level(v, n - 1) {
        n -= 1;
    }
    while !within_level(v, n) {
        n += 1;
    }
    n
}

impl FromStr for BorelFunction {
    type Err = FunctionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_call(&parse_call(s)?)
    }
}

impl fmt::Display for BorelFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use BorelFunction::*;
        match self {
            Identity => write!(f, "identity"),
            Constant(c) => write!(f, "constant({})", scalar_text(c)),
            Power(k) => write!(f, "power({k})"),
            ReciprocalCutoff(g) => write!(f, "reciprocal_cutoff({})", format_rational(g)),
            Indicator(r) => write!(f, "indicator({r})"),
            Sum(a, b) => write!(f, "sum({a}, {b})"),
            Product(a, b) => write!(f, "product({a}, {b})"),
            Truncated(g, n) => write!(f, "truncate({g}, {n})"),
        }
    }
}
