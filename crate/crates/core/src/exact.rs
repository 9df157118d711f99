//! Exact arithmetic over the Gaussian rationals `Q(i)`.
//!
//! Every eigenvalue expression, every Borel-function descriptor and every
//! vector entry handed to the diagonal model is a Gaussian rational (finite
//! `f64` values are dyadic rationals), so the diagonal model can be evaluated
//! without rounding. Floating point enters only when a norm is reported.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A complex number with exact rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl QComplex {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    /// Exact conversion of a finite `f64` pair. Returns `None` for NaN or infinities.
    pub fn from_f64(z: Complex64) -> Option<Self> {
        Some(Self::new(rational_from_f64(z.re)?, rational_from_f64(z.im)?))
    }

    pub fn to_f64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// `|z|` rounded to the nearest `f64` via the exact squared modulus.
    pub fn abs_f64(&self) -> f64 {
        sqrt_rational(&self.norm_sqr())
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let d = rhs.norm_sqr();
        let num = self * &rhs.conj();
        Some(Self::new(num.re / &d, num.im / &d))
    }

    pub fn recip(&self) -> Option<Self> {
        Self::one().checked_div(self)
    }

    /// Integer power; negative exponents invert, failing at zero.
    pub fn powi(&self, k: i32) -> Option<Self> {
        let mut base = if k < 0 { self.recip()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Some(acc)
    }

    /// Compares `|self|` with a non-negative rational bound without rounding.
    pub fn cmp_abs(&self, bound: &BigRational) -> Ordering {
        self.norm_sqr().cmp(&(bound * bound))
    }
}

impl fmt::Debug for QComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl fmt::Display for QComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> Add<&'a QComplex> for &'a QComplex {
    type Output = QComplex;
    fn add(self, rhs: &QComplex) -> QComplex {
        QComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a QComplex> for &'a QComplex {
    type Output = QComplex;
    fn sub(self, rhs: &QComplex) -> QComplex {
        QComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a QComplex> for &'a QComplex {
    type Output = QComplex;
    fn mul(self, rhs: &QComplex) -> QComplex {
        QComplex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl<'a> Div<&'a QComplex> for &'a QComplex {
    type Output = QComplex;
    /// Panics on division by zero; use [`QComplex::checked_div`] on untrusted input.
    fn div(self, rhs: &QComplex) -> QComplex {
        self.checked_div(rhs).expect("division by exact zero")
    }
}

impl Neg for &QComplex {
    type Output = QComplex;
    fn neg(self) -> QComplex {
        QComplex::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QComplex> for QComplex {
            type Output = QComplex;
            fn $m(self, rhs: QComplex) -> QComplex {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QComplex {
    type Output = QComplex;
    fn neg(self) -> QComplex {
        -&self
    }
}

/// Exact rational value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    BigRational::from_float(x)
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    // `ToPrimitive` on BigRational handles huge numerators and denominators.
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Square root of a non-negative rational, correctly scaled for huge or tiny values.
pub fn sqrt_rational(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let v = rational_to_f64(q);
    if v.is_finite() && v > 0.0 {
        return v.sqrt();
    }
    // Fall back to a scaled computation when the value under/overflows f64.
    let num_bits = q.numer().bits() as i64;
    let den_bits = q.denom().bits() as i64;
    let shift = (num_bits - den_bits) / 2 * 2;
    let scaled = if shift >= 0 {
        q / BigRational::from_integer(BigInt::one() << shift as usize)
    } else {
        q * BigRational::from_integer(BigInt::one() << (-shift) as usize)
    };
    rational_to_f64(&scaled).sqrt() * 2f64.powi((shift / 2) as i32)
}

/// Parses a decimal literal such as `12`, `0.25` or `3.` into an exact rational.
pub fn rational_from_decimal(text: &str) -> Option<BigRational> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Some(BigRational::new(numer, denom))
}

/// Shortest decimal or fraction rendering of a rational that parses back to the same value.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    // Terminating decimals (denominator 2^a 5^b) print as decimals.
    let mut d = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if d.is_one() {
        let places = twos.max(fives);
        let scaled = q * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
        let digits = scaled.numer().abs().to_string();
        let digits = format!("{:0>width$}", digits, width = places + 1);
        let (a, b) = digits.split_at(digits.len() - places);
        let sign = if q.is_negative() { "-" } else { "" };
        return format!("{sign}{a}.{b}");
    }
    format!("{}/{}", q.numer(), q.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn f64_round_trip_is_exact() {
        for x in [0.1, -3.25, 1e-300, 7.0e200, 0.0] {
            let r = rational_from_f64(x).unwrap();
            assert_eq!(rational_to_f64(&r), x);
        }
        assert!(rational_from_f64(f64::NAN).is_none());
    }

    #[test]
    fn reciprocal_times_value_is_exactly_one() {
        let z = QComplex::new(q(4, 3), q(-2, 7));
        let r = z.recip().unwrap();
        assert_eq!(&z * &r, QComplex::one());
        assert!(QComplex::zero().recip().is_none());
    }

    #[test]
    fn powers() {
        let i = QComplex::i();
        assert_eq!(i.powi(2).unwrap(), QComplex::from_integer(-1));
        assert_eq!(QComplex::from_integer(2).powi(-3).unwrap(), QComplex::from_real(q(1, 8)));
        assert!(QComplex::zero().powi(-1).is_none());
    }

    #[test]
    fn decimal_parsing_and_printing() {
        assert_eq!(rational_from_decimal("0.25").unwrap(), q(1, 4));
        assert_eq!(rational_from_decimal("12").unwrap(), q(12, 1));
        assert!(rational_from_decimal(".").is_none());
        assert_eq!(format_rational(&q(1, 4)), "0.25");
        assert_eq!(format_rational(&q(-1, 20)), "-0.05");
        assert_eq!(format_rational(&q(1, 3)), "1/3");
        assert_eq!(format_rational(&q(7, 1)), "7");
    }

    #[test]
    fn sqrt_of_extreme_rationals() {
        let tiny = rational_from_f64(1e-300).unwrap();
        let sq = &tiny * &tiny;
        let s = sqrt_rational(&sq);
        assert!((s / 1e-300 - 1.0).abs() < 1e-14);
    }
}
