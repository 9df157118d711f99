use num_complex::Complex64;

use super::ModelError;
use crate::exact::QComplex;
use crate::expr::{parse_lambda_expr, LambdaExpr};
use crate::poly::{Poly, RationalFn};
use crate::vector::{validate_p, FiniteVector};

/// A diagonal operator on `ℓ_p`: `(Ax)_k = λ(k) x_k`.
///
/// The first `prepend.len()` eigenvalues are listed explicitly; the rest come
/// from the tail expression, re-indexed from 1, so `λ(m + n) = tail(n)` for
/// `m = prepend.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOperator {
    prepend: Vec<QComplex>,
    tail: LambdaExpr,
    tail_fn: RationalFn,
    p: f64,
    limit_points: Vec<QComplex>,
}

/// Numerical confirmation of declared limit points at a truncation `N`:
/// the minimum distance from each point to the window `(N/2, N]` must not
/// exceed its minimum distance to the window `(N/4, N/2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowCheck {
    pub truncation: u64,
    /// `(point, distance to the late window, distance to the early window)`.
    pub distances: Vec<(Complex64, f64, f64)>,
    pub consistent: bool,
}

impl DiagonalOperator {
    pub fn new(prepend: &[Complex64], tail_src: &str, p: f64, limit_points: &[Complex64]) -> Result<Self, ModelError> {
        let exact = |zs: &[Complex64]| -> Result<Vec<QComplex>, ModelError> {
            zs.iter().map(|z| QComplex::from_f64(*z).ok_or(ModelError::NonFinite)).collect()
        };
        let tail = parse_lambda_expr(tail_src)?;
        Self::from_parts(exact(prepend)?, tail, p, exact(limit_points)?)
    }

    /// Validates finiteness of every eigenvalue and the declared limit points.
    pub fn from_parts(
        prepend: Vec<QComplex>,
        tail: LambdaExpr,
        p: f64,
        limit_points: Vec<QComplex>,
    ) -> Result<Self, ModelError> {
        let p = validate_p(p)?;
        let (tail_fn, guards) = tail.to_rational_fn();
        for g in &guards {
            if g.is_zero() {
                return Err(ModelError::SingularTail { index: 1 });
            }
            match g.positive_integer_roots() {
                Ok(roots) => {
                    if let Some(&index) = roots.first() {
                        return Err(ModelError::SingularTail { index });
                    }
                }
                Err(bound) => return Err(ModelError::UncertifiableTail { bound }),
            }
        }
        let mut declared: Vec<QComplex> = Vec::new();
        for l in limit_points {
            if !declared.contains(&l) {
                declared.push(l);
            }
        }
        let op = Self { prepend, tail, tail_fn, p, limit_points: declared };
        op.check_limit_points()?;
        Ok(op)
    }

    fn check_limit_points(&self) -> Result<(), ModelError> {
        let genuine = self.accumulation_points();
        let allowed: Vec<QComplex> = self.tail_fn.limit().into_iter().collect();
        let missing = genuine.iter().any(|g| !self.limit_points.contains(g));
        let spurious = self.limit_points.iter().any(|l| !allowed.contains(l));
        if missing || spurious {
            return Err(ModelError::LimitPointMismatch {
                declared: self.limit_points.iter().map(QComplex::to_f64).collect(),
                detected: genuine.iter().map(QComplex::to_f64).collect(),
            });
        }
        Ok(())
    }

    pub fn prepend(&self) -> &[QComplex] {
        &self.prepend
    }

    pub fn tail(&self) -> &LambdaExpr {
        &self.tail
    }

    pub fn tail_fn(&self) -> &RationalFn {
        &self.tail_fn
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn declared_limit_points(&self) -> &[QComplex] {
        &self.limit_points
    }

    /// True when the tail takes a single value for every `n`.
    pub fn tail_is_constant(&self) -> bool {
        let RationalFn { num, den } = &self.tail_fn;
        num.derivative().mul(den).sub(&num.mul(&den.derivative())).is_zero()
    }

    /// Accumulation points of the set of eigenvalues. A non-constant rational
    /// tail takes each value finitely often, so its finite limit (if any) is
    /// the only one.
    pub fn accumulation_points(&self) -> Vec<QComplex> {
        if self.tail_is_constant() {
            return Vec::new();
        }
        self.tail_fn.limit().into_iter().collect()
    }

    /// `λ(k)` for `k ≥ 1`.
    pub fn eigenvalue(&self, k: u64) -> QComplex {
        assert!(k >= 1, "indices start at 1");
        let m = self.prepend.len() as u64;
        if k <= m {
            self.prepend[(k - 1) as usize].clone()
        } else {
            self.tail_value(k - m)
        }
    }

    /// `tail(n)`; finite for all `n ≥ 1` by construction.
    pub fn tail_value(&self, n: u64) -> QComplex {
        self.tail_fn.eval_at(n).expect("poles excluded at construction")
    }

    /// Converts a tail index into a global coordinate index.
    pub fn tail_to_global(&self, n: u64) -> u64 {
        n + self.prepend.len() as u64
    }

    pub fn apply(&self, x: &FiniteVector) -> FiniteVector {
        x.map_support(|k, v| &self.eigenvalue(k) * v)
    }

    /// Polynomial whose positive integer roots `n` are the tail indices with `tail(n) = z`.
    pub fn tail_level_poly(&self, z: &QComplex) -> Poly {
        self.tail_fn.num.sub(&self.tail_fn.den.scale(z))
    }

    pub fn window_check(&self, truncation: u64) -> WindowCheck {
        let n = truncation.max(8);
        let window_min = |lo: u64, hi: u64, l: &QComplex| -> f64 {
            (lo + 1..=hi)
                .map(|i| (&self.tail_value(i) - l).abs_f64())
                .fold(f64::INFINITY, f64::min)
        };
        let mut consistent = true;
        let distances = self
            .accumulation_points()
            .iter()
            .map(|l| {
                let late = window_min(n / 2, n, l);
                let early = window_min(n / 4, n / 2, l);
                consistent &= late <= early;
                (l.to_f64(), late, early)
            })
            .collect();
        WindowCheck { truncation: n, distances, consistent }
    }
}
