//! Eigenvalue-family expressions `λ(n)` over the index variable `n`.

mod parser;

use std::fmt;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::exact::{format_rational, QComplex};
use crate::poly::{Poly, RationalFn};

pub use parser::{parse_lambda_expr, ParseError, MAX_EXPONENT};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaExpr {
    /// The free index variable `n ≥ 1`.
    Index,
    Literal(QComplex),
    Add(Box<LambdaExpr>, Box<LambdaExpr>),
    Sub(Box<LambdaExpr>, Box<LambdaExpr>),
    Mul(Box<LambdaExpr>, Box<LambdaExpr>),
    Div(Box<LambdaExpr>, Box<LambdaExpr>),
    Neg(Box<LambdaExpr>),
    /// Integer power; a negative exponent is the reciprocal form.
    Pow(Box<LambdaExpr>, i32),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero at n = {0}")]
    DivisionByZero(u64),
    #[error("index must be at least 1")]
    IndexOutOfRange,
}

impl LambdaExpr {
    pub fn literal(z: QComplex) -> Self {
        LambdaExpr::Literal(z)
    }

    /// Exact value at index `n`.
    pub fn eval_exact(&self, n: u64) -> Result<QComplex, EvalError> {
        if n == 0 {
            return Err(EvalError::IndexOutOfRange);
        }
        self.eval_inner(n)
    }

    fn eval_inner(&self, n: u64) -> Result<QComplex, EvalError> {
        use LambdaExpr::*;
        Ok(match self {
            Index => QComplex::from_integer(n as i64),
            Literal(z) => z.clone(),
            Add(a, b) => &a.eval_inner(n)? + &b.eval_inner(n)?,
            Sub(a, b) => &a.eval_inner(n)? - &b.eval_inner(n)?,
            Mul(a, b) => &a.eval_inner(n)? * &b.eval_inner(n)?,
            Div(a, b) => a
                .eval_inner(n)?
                .checked_div(&b.eval_inner(n)?)
                .ok_or(EvalError::DivisionByZero(n))?,
            Neg(a) => -a.eval_inner(n)?,
            Pow(a, k) => a.eval_inner(n)?.powi(*k).ok_or(EvalError::DivisionByZero(n))?,
        })
    }

    /// Value at index `n`, rounded to `f64` from the exact result.
    pub fn eval(&self, n: u64) -> Result<Complex64, EvalError> {
        self.eval_exact(n).map(|z| z.to_f64())
    }

    /// True when the expression does not mention `n`.
    pub fn is_constant(&self) -> bool {
        use LambdaExpr::*;
        match self {
            Index => false,
            Literal(_) => true,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.is_constant() && b.is_constant(),
            Neg(a) | Pow(a, _) => a.is_constant(),
        }
    }

    /// Normal form as a rational function of `n`, together with the
    /// polynomials whose positive integer zeros are the indices where some
    /// sub-expression divides by zero.
    pub fn to_rational_fn(&self) -> (RationalFn, Vec<Poly>) {
        let mut guards = Vec::new();
        let r = self.normalize(&mut guards);
        guards.push(r.den.clone());
        (r, guards)
    }

    fn normalize(&self, guards: &mut Vec<Poly>) -> RationalFn {
        use LambdaExpr::*;
        match self {
            Index => RationalFn::index(),
            Literal(z) => RationalFn::constant(z.clone()),
            Add(a, b) => a.normalize(guards).add(&b.normalize(guards)),
            Sub(a, b) => a.normalize(guards).sub(&b.normalize(guards)),
            Mul(a, b) => a.normalize(guards).mul(&b.normalize(guards)),
            Div(a, b) => {
                let (a, b) = (a.normalize(guards), b.normalize(guards));
                guards.push(b.num.clone());
                a.div(&b)
            }
            Neg(a) => a.normalize(guards).neg(),
            Pow(a, k) => {
                let a = a.normalize(guards);
                if *k < 0 {
                    guards.push(a.num.clone());
                }
                a.powi(*k)
            }
        }
    }

    fn precedence(&self) -> u8 {
        use LambdaExpr::*;
        match self {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Pow(..) => 3,
            Literal(z) if !z.re.is_zero() && !z.im.is_zero() => 1,
            Literal(z) if z.re.is_negative() || z.im.is_negative() => 1,
            Literal(z) if format_rational(&z.re).contains('/') || format_rational(&z.im).contains('/') => 2,
            Index | Literal(_) | Neg(_) => 4,
        }
    }
}

fn write_literal(f: &mut fmt::Formatter<'_>, z: &QComplex) -> fmt::Result {
    let re_zero = z.re.is_zero();
    let im_zero = z.im.is_zero();
    match (re_zero, im_zero) {
        (_, true) => write!(f, "{}", format_rational(&z.re)),
        (true, false) => write_imaginary(f, &z.im),
        (false, false) => {
            write!(f, "{}{}", format_rational(&z.re), if z.im.is_negative() { '-' } else { '+' })?;
            write_imaginary(f, &z.im.abs())
        }
    }
}

/// `qi`, or `ai/b` when `q = a/b` has no decimal form: `1/3i` would read as `1/(3i)`.
fn write_imaginary(f: &mut fmt::Formatter<'_>, q: &num_rational::BigRational) -> fmt::Result {
    let text = format_rational(q);
    if text.contains('/') {
        write!(f, "{}i/{}", q.numer(), q.denom())
    } else {
        write!(f, "{text}i")
    }
}

impl fmt::Display for LambdaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use LambdaExpr::*;
        let wrap = |f: &mut fmt::Formatter<'_>, e: &LambdaExpr, min: u8| -> fmt::Result {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Index => write!(f, "n"),
            Literal(z) => write_literal(f, z),
            Add(a, b) | Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " {} ", if matches!(self, Add(..)) { '+' } else { '-' })?;
                wrap(f, b, 2)
            }
            Mul(a, b) | Div(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "{}", if matches!(self, Mul(..)) { '*' } else { '/' })?;
                wrap(f, b, 3)
            }
            Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 4)
            }
            Pow(a, k) => {
                wrap(f, a, 4)?;
                write!(f, "^{k}")
            }
        }
    }
}
