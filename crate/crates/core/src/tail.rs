//! Certified infima over a rational eigenvalue tail.
//!
//! Two routes that share no code beyond exact arithmetic:
//! [`distance_infimum`] works for any target and any rational tail through an
//! eventual-monotonicity certificate, and [`modulus_infimum_closed_form`]
//! handles only tails of the shape `c + q·n^m` by minimising a quadratic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exact::{rational_to_f64, QComplex};
use crate::poly::{eventual_sign, Poly, RationalFn, ROOT_SCAN_CAP};

/// Indices scanned with exact arithmetic before switching to an `f64` prefilter.
const EXACT_SCAN: u64 = 50_000;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TailError {
    #[error("no monotonicity certificate: critical-point bound {bound:.3e} exceeds the scan cap")]
    Uncertifiable { bound: f64 },
    #[error("tail is not of the form c + q·n^m")]
    UnsupportedShape,
    #[error("vertex index {0:.3e} is beyond exact integer range")]
    VertexOutOfRange(f64),
}

/// Infimum of `|tail(n) - target|²` over the `n` with `tail(n) ≠ target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailInfimum {
    /// `None` when every tail value equals the target.
    pub squared: Option<BigRational>,
    /// Index attaining the infimum, `None` when it is only approached in the limit.
    pub attained_at: Option<u64>,
}

impl TailInfimum {
    pub fn value(&self) -> f64 {
        self.squared.as_ref().map_or(f64::INFINITY, |q| rational_to_f64(q).sqrt())
    }

    pub fn is_positive(&self) -> bool {
        self.squared.as_ref().is_none_or(|q| q.is_positive())
    }
}

fn real_part(p: &Poly) -> Vec<BigRational> {
    p.coeffs().iter().map(|c| c.re.clone()).collect()
}

fn eval_real(coeffs: &[BigRational], n: u64) -> BigRational {
    let x = BigRational::from_integer(BigInt::from(n));
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * &x + c)
}

fn eval_f64(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn keep_min(best: &mut Option<(BigRational, Option<u64>)>, value: BigRational, at: Option<u64>) {
    if best.as_ref().is_none_or(|(b, _)| value < *b) {
        *best = Some((value, at));
    }
}

fn finish(best: Option<(BigRational, Option<u64>)>) -> TailInfimum {
    match best {
        Some((q, at)) => TailInfimum { squared: Some(q), attained_at: at },
        None => TailInfimum { squared: None, attained_at: None },
    }
}

/// Infimum of `|tail(n) - target|` over indices where the two differ.
///
/// With `g = U/V = |tail - target|²` as a real rational function and
/// `W = U'V - UV'`, every real root of `W` and `V` lies below the Cauchy bound
/// `B`, so `g` is monotone on `[B, ∞)`. Indices up to `⌈B⌉ + 1` are scanned;
/// beyond that the infimum is either already seen (increasing) or the limit
/// (decreasing).
pub fn distance_infimum(tail: &RationalFn, target: &QComplex) -> Result<TailInfimum, TailError> {
    let (u, v) = tail.squared_distance(target);
    let w = u.derivative().mul(&v).sub(&u.mul(&v.derivative()));
    let (ur, vr) = (real_part(&u), real_part(&v));
    let g = |n: u64| eval_real(&ur, n) / eval_real(&vr, n);

    if w.is_zero() {
        let value = g(1);
        return Ok(if value.is_zero() {
            finish(None)
        } else {
            TailInfimum { squared: Some(value), attained_at: Some(1) }
        });
    }

    let bound = [w.root_modulus_bound(), v.root_modulus_bound()]
        .into_iter()
        .flatten()
        .fold(1.0_f64, f64::max);
    if bound > ROOT_SCAN_CAP as f64 {
        return Err(TailError::Uncertifiable { bound });
    }
    let last = bound.ceil() as u64 + 1;

    let mut best: Option<(BigRational, Option<u64>)> = None;
    for n in 1..=last.min(EXACT_SCAN) {
        let value = g(n);
        if !value.is_zero() {
            keep_min(&mut best, value, Some(n));
        }
    }
    if last > EXACT_SCAN {
        // Only indices whose float estimate could beat the current exact best
        // are re-evaluated exactly.
        let (uf, vf): (Vec<f64>, Vec<f64>) =
            (ur.iter().map(rational_to_f64).collect(), vr.iter().map(rational_to_f64).collect());
        for n in EXACT_SCAN + 1..=last {
            let x = n as f64;
            let approx = eval_f64(&uf, x) / eval_f64(&vf, x);
            let threshold = best.as_ref().map_or(f64::INFINITY, |(b, _)| rational_to_f64(b) * (1.0 + 1e-6));
            if approx <= threshold {
                let value = g(n);
                if !value.is_zero() {
                    keep_min(&mut best, value, Some(n));
                }
            }
        }
    }

    if eventual_sign(&w) < 0 {
        // Decreasing beyond the bound: the limit of g is approached but never reached.
        let limit = match (u.degree(), v.degree()) {
            (Some(du), Some(dv)) if du < dv => BigRational::zero(),
            (Some(du), Some(dv)) if du == dv => {
                u.leading().expect("nonzero").re.clone() / v.leading().expect("nonzero").re.clone()
            }
            _ => unreachable!("a decreasing non-negative function has a finite limit"),
        };
        keep_min(&mut best, limit, None);
    }
    Ok(finish(best))
}

/// `(c, q, m)` with `tail(n) = c + q·n^m` and `m ≠ 0`, read off the rational form.
/// A constant tail is returned with `q = 0` and `m = 0`.
pub fn power_shape(tail: &RationalFn) -> Option<(QComplex, QComplex, i64)> {
    let monomial = |p: &Poly| -> Option<Vec<usize>> {
        Some(p.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect())
    };
    let den_terms = monomial(&tail.den)?;
    if den_terms.len() != 1 {
        return None;
    }
    let a = den_terms[0];
    let d = &tail.den.coeffs()[a];
    let num_terms = monomial(&tail.num)?;
    let coeff = |i: usize| &tail.num.coeffs()[i] / d;
    match num_terms.as_slice() {
        [] => Some((QComplex::zero(), QComplex::zero(), 0)),
        [b] if *b == a => Some((coeff(a), QComplex::zero(), 0)),
        [b] => Some((QComplex::zero(), coeff(*b), *b as i64 - a as i64)),
        [b1, b2] if *b1 == a => Some((coeff(a), coeff(*b2), *b2 as i64 - a as i64)),
        [b1, b2] if *b2 == a => Some((coeff(a), coeff(*b1), *b1 as i64 - a as i64)),
        _ => None,
    }
}

/// Infimum of `|tail(n)|` over indices with `tail(n) ≠ 0`, for tails `c + q·n^m`.
///
/// `|c + q s|² = |c|² + 2 Re(c q̄) s + |q|² s²` is a convex quadratic in
/// `s = n^m`, minimised at `s* = -Re(c q̄)/|q|²`; since `n ↦ n^m` is monotone
/// the integer minimum sits at `n = 1`, next to `n* = s*^{1/m}`, or (for
/// `m < 0`) in the limit `|c|`.
pub fn modulus_infimum_closed_form(tail: &RationalFn) -> Result<TailInfimum, TailError> {
    let (c, q, m) = power_shape(tail).ok_or(TailError::UnsupportedShape)?;
    let value_sq = |n: u64| -> BigRational {
        let s = if m >= 0 {
            QComplex::from_real(BigRational::from_integer(BigInt::from(n).pow(m as u32)))
        } else {
            QComplex::from_real(BigRational::new(BigInt::from(1), BigInt::from(n).pow(m.unsigned_abs() as u32)))
        };
        (&c + &(&q * &s)).norm_sqr()
    };
    if q.is_zero() {
        let value = c.norm_sqr();
        return Ok(if value.is_zero() {
            finish(None)
        } else {
            TailInfimum { squared: Some(value), attained_at: Some(1) }
        });
    }

    let mut candidates = vec![1_u64, 2];
    let s_star = -(&c.re * &q.re + &c.im * &q.im) / q.norm_sqr();
    if s_star.is_positive() {
        let n_star = rational_to_f64(&s_star).powf(1.0 / m as f64);
        if !n_star.is_finite() || n_star > 2f64.powi(52) {
            return Err(TailError::VertexOutOfRange(n_star));
        }
        let base = n_star.floor().to_u64().unwrap_or(1);
        for n in base.saturating_sub(1)..=base + 2 {
            if n >= 1 {
                candidates.push(n);
            }
        }
    }
    let mut best = None;
    for n in candidates {
        let value = value_sq(n);
        if !value.is_zero() {
            keep_min(&mut best, value, Some(n));
        }
    }
    if m < 0 {
        keep_min(&mut best, c.norm_sqr(), None);
    }
    Ok(finish(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_lambda_expr;

    fn tail(src: &str) -> RationalFn {
        parse_lambda_expr(src).unwrap().to_rational_fn().0
    }

    fn q(v: f64) -> QComplex {
        QComplex::from_f64(num_complex::Complex64::new(v, 0.0)).unwrap()
    }

    #[test]
    fn one_plus_reciprocal_has_infimum_one() {
        let t = tail("1 + 1/n");
        let a = distance_infimum(&t, &QComplex::zero()).unwrap();
        assert_eq!(a.squared, Some(BigRational::from_integer(1.into())));
        assert_eq!(a.attained_at, None);
        let b = modulus_infimum_closed_form(&t).unwrap();
        assert_eq!(b.squared, a.squared);
    }

    #[test]
    fn reciprocal_accumulates_at_zero() {
        for src in ["1/n", "1/n^2", "0 + 1/n"] {
            let t = tail(src);
            assert!(!distance_infimum(&t, &QComplex::zero()).unwrap().is_positive(), "{src}");
            assert!(!modulus_infimum_closed_form(&t).unwrap().is_positive(), "{src}");
        }
    }

    #[test]
    fn zeros_are_excluded() {
        // n - 3 vanishes at n = 3; nonzero values have modulus at least 1.
        let t = tail("n - 3");
        let a = distance_infimum(&t, &QComplex::zero()).unwrap();
        assert_eq!(a.value(), 1.0);
        assert_eq!(modulus_infimum_closed_form(&t).unwrap().value(), 1.0);
    }

    #[test]
    fn interior_vertex() {
        // |n - 7.5| is smallest at n = 7 and 8.
        let t = tail("n - 7.5");
        assert_eq!(distance_infimum(&t, &QComplex::zero()).unwrap().value(), 0.5);
        assert_eq!(modulus_infimum_closed_form(&t).unwrap().value(), 0.5);
        // Distance from 1/n to 0.3 is smallest at n = 3.
        let r = tail("1/n");
        let d = distance_infimum(&r, &q(0.3)).unwrap();
        assert_eq!(d.attained_at, Some(3));
    }

    #[test]
    fn constant_tails() {
        let t = tail("2");
        assert_eq!(distance_infimum(&t, &QComplex::zero()).unwrap().value(), 2.0);
        assert_eq!(distance_infimum(&t, &q(2.0)).unwrap().squared, None);
        assert_eq!(modulus_infimum_closed_form(&t).unwrap().value(), 2.0);
    }

    #[test]
    fn closed_form_shape_detection() {
        assert!(power_shape(&tail("1/4 + 1/n")).is_some());
        assert!(power_shape(&tail("i*n^2")).is_some());
        assert!(power_shape(&tail("1/(n+1)")).is_none());
        assert_eq!(modulus_infimum_closed_form(&tail("1/(n+1)")), Err(TailError::UnsupportedShape));
    }
}
