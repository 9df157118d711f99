//! Polynomials and rational functions in the index variable `n` with
//! Gaussian-rational coefficients.
//!
//! Every eigenvalue expression normalizes to a rational function of `n`,
//! which is what makes limits, integer roots and eventual monotonicity
//! decidable for the diagonal model.

use std::fmt;

use num_traits::Signed;

use crate::exact::QComplex;

/// Largest index scanned when searching for positive integer roots.
pub const ROOT_SCAN_CAP: u64 = 2_000_000;

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    /// Ascending coefficients, no trailing zeros.
    coeffs: Vec<QComplex>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<QComplex>) -> Self {
        while coeffs.last().is_some_and(QComplex::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: QComplex) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `n`.
    pub fn index() -> Self {
        Self::new(vec![QComplex::zero(), QComplex::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[QComplex] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&QComplex> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &QComplex) -> QComplex {
        self.coeffs
            .iter()
            .rev()
            .fold(QComplex::zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn eval_at(&self, n: u64) -> QComplex {
        self.eval(&QComplex::from_integer(n as i64))
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = QComplex::zero();
        Poly::new(
            (0..len)
                .map(|i| {
                    let a = self.coeffs.get(i).unwrap_or(&zero);
                    let b = rhs.coeffs.get(i).unwrap_or(&zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![QComplex::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &QComplex) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(QComplex::one()), |acc, _| acc.mul(self))
    }

    /// Polynomial with conjugated coefficients; equals the conjugate of `p(x)` for real `x`.
    pub fn conj(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(QComplex::conj).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &QComplex::from_integer(i as i64))
                .collect(),
        )
    }

    /// Upper bound on the modulus of every complex root (Cauchy bound).
    /// `None` for constant polynomials, which have no roots (or vanish identically).
    pub fn root_modulus_bound(&self) -> Option<f64> {
        let lead = self.leading()?;
        if self.degree()? == 0 {
            return None;
        }
        let lead = lead.abs_f64();
        let worst = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs_f64() / lead)
            .fold(0.0_f64, f64::max);
        // Pad for rounding in the f64 estimate.
        Some((1.0 + worst) * (1.0 + 1e-9) + 1.0)
    }

    /// Positive integer roots, found by exhaustive exact evaluation below the Cauchy bound.
    /// `Err(bound)` when the bound exceeds [`ROOT_SCAN_CAP`].
    pub fn positive_integer_roots(&self) -> Result<Vec<u64>, f64> {
        let Some(bound) = self.root_modulus_bound() else {
            return Ok(Vec::new());
        };
        if bound > ROOT_SCAN_CAP as f64 {
            return Err(bound);
        }
        let limit = bound.floor() as u64;
        let approx: Vec<(f64, f64)> = self
            .coeffs
            .iter()
            .map(|c| {
                let z = c.to_f64();
                (z.re, z.im)
            })
            .collect();
        let mut roots = Vec::new();
        for n in 1..=limit {
            if float_near_root(&approx, n as f64) && self.eval_at(n).is_zero() {
                roots.push(n);
            }
        }
        Ok(roots)
    }
}

fn float_near_root(coeffs: &[(f64, f64)], x: f64) -> bool {
    let mut re = 0.0;
    let mut im = 0.0;
    let mut scale = 0.0;
    for &(cr, ci) in coeffs.iter().rev() {
        re = re * x + cr;
        im = im * x + ci;
        scale = scale * x + cr.abs() + ci.abs();
    }
    re.abs() + im.abs() <= 1e-6 * scale.max(f64::MIN_POSITIVE)
}

/// Rational function `num(n) / den(n)`; never normalized by a gcd, so the
/// denominator keeps every pole that the source expression had.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFn {
    pub num: Poly,
    pub den: Poly,
}

/// Asymptotic behaviour of a rational function as `n → ∞`:
/// `value(n) ~ coeff · n^degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Asymptote {
    /// Identically zero.
    Zero,
    Power { coeff: QComplex, degree: i64 },
}

impl RationalFn {
    pub fn constant(c: QComplex) -> Self {
        Self { num: Poly::constant(c), den: Poly::constant(QComplex::one()) }
    }

    pub fn index() -> Self {
        Self { num: Poly::index(), den: Poly::constant(QComplex::one()) }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return Self { num: self.num.add(&rhs.num), den: self.den.clone() };
        }
        Self {
            num: self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            den: self.den.mul(&rhs.den),
        }
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self { num: self.num.mul(&rhs.num), den: self.den.mul(&rhs.den) }
    }

    pub fn div(&self, rhs: &Self) -> Self {
        Self { num: self.num.mul(&rhs.den), den: self.den.mul(&rhs.num) }
    }

    pub fn powi(&self, k: i32) -> Self {
        let e = k.unsigned_abs();
        let (num, den) = (self.num.pow(e), self.den.pow(e));
        if k >= 0 {
            Self { num, den }
        } else {
            Self { num: den, den: num }
        }
    }

    pub fn eval_at(&self, n: u64) -> Option<QComplex> {
        self.num.eval_at(n).checked_div(&self.den.eval_at(n))
    }

    pub fn is_identically_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn asymptote(&self) -> Asymptote {
        match (self.num.degree(), self.den.degree()) {
            (None, _) => Asymptote::Zero,
            (Some(dn), Some(dd)) => Asymptote::Power {
                coeff: self.num.leading().unwrap() / self.den.leading().unwrap(),
                degree: dn as i64 - dd as i64,
            },
            // A zero denominator never comes out of a validated expression.
            (Some(_), None) => Asymptote::Power { coeff: QComplex::zero(), degree: 0 },
        }
    }

    /// Finite limit as `n → ∞`, or `None` when the sequence diverges to infinity.
    pub fn limit(&self) -> Option<QComplex> {
        match self.asymptote() {
            Asymptote::Zero => Some(QComplex::zero()),
            Asymptote::Power { degree, .. } if degree < 0 => Some(QComplex::zero()),
            Asymptote::Power { coeff, degree: 0 } => Some(coeff),
            Asymptote::Power { .. } => None,
        }
    }

    /// `|value(x) - target|^2` as a quotient of real polynomials `(u, v)` in real `x`.
    pub fn squared_distance(&self, target: &QComplex) -> (Poly, Poly) {
        let shifted = self.num.sub(&self.den.scale(target));
        let u = shifted.mul(&shifted.conj());
        let v = self.den.mul(&self.den.conj());
        (u, v)
    }
}

/// Sign of a real rational polynomial for all sufficiently large `x`.
pub fn eventual_sign(p: &Poly) -> i8 {
    match p.leading() {
        None => 0,
        Some(c) if c.re.is_positive() => 1,
        Some(c) if c.re.is_negative() => -1,
        // Real polynomials only reach here with a purely imaginary lead, which
        // cannot happen for the products built in this crate.
        Some(_) => 0,
    }
}
