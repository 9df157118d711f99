//! Concrete operators: the representable scalar-type class (diagonal and
//! finite diagonalizable) and the two counterexample operators.

mod diagonal;
mod finite;
mod spec;

use num_complex::Complex64;

pub use diagonal::{DiagonalOperator, WindowCheck};
pub use finite::{norm_1, norm_2, CMatrix, FiniteDiagonalizableOperator, DEFECTIVE_TOLERANCE, MAX_CONDITION, MAX_DIMENSION};
pub use spec::{Operator, OperatorSpec, SpecError};

use crate::exact::QComplex;
use crate::expr::ParseError;
use crate::vector::{FiniteVector, VectorError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("tail expression: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Vector(#[from] VectorError),
    #[error("operator description contains a non-finite value")]
    NonFinite,
    #[error("tail expression divides by zero at n = {index}")]
    SingularTail { index: u64 },
    #[error("cannot certify tail finiteness: root bound {bound:.3e} exceeds the scan cap")]
    UncertifiableTail { bound: f64 },
    #[error("declared limit points {declared:?} do not match the detected cluster set {detected:?}")]
    LimitPointMismatch { declared: Vec<Complex64>, detected: Vec<Complex64> },
    #[error("matrix must be square and non-empty")]
    NotSquare,
    #[error("dimension {0} exceeds the cap of 16")]
    DimensionTooLarge(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("similarity matrix is singular")]
    SingularSimilarity,
    #[error("similarity matrix is too ill-conditioned (condition {0:.3e})")]
    IllConditioned(f64),
    #[error("defective matrix: no eigenbasis (smallest eigenvector-matrix singular value {smallest_singular_value:.3e})")]
    Defective { smallest_singular_value: f64 },
    #[error("eigenvalue computation failed")]
    EigenFailure,
    #[error("decomposition residual {0:.3e} exceeds tolerance")]
    InaccurateDecomposition(f64),
    #[error("interval endpoints must satisfy a < b")]
    InvalidInterval,
}

/// `(Ax)_1 = 0`, `(Ax)_{k+1} = k·x_k` on `ℓ_2`, with maximal domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WeightedShiftOperator;

impl WeightedShiftOperator {
    pub fn apply(&self, x: &FiniteVector) -> FiniteVector {
        let mut out = FiniteVector::zero();
        for (k, v) in x.iter() {
            out.set(k + 1, v * &QComplex::from_integer(k as i64)).expect("index >= 2");
        }
        out
    }

    /// Coordinates `w_k = conj(λ)^{k-1}/(k-1)!` of a vector orthogonal to the
    /// range of `A - λI`, for `k = 1..=len`.
    pub fn range_annihilator(&self, lambda: Complex64, len: usize) -> Vec<Complex64> {
        let mut w = Vec::with_capacity(len);
        let mut cur = Complex64::new(1.0, 0.0);
        for k in 1..=len {
            w.push(cur);
            cur = cur * lambda.conj() / k as f64;
        }
        w
    }
}

/// `x ↦ x'` on `C([a, b])`, acting symbolically on the family `c·e^{λt}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DifferentiationOperator {
    a: f64,
    b: f64,
}

/// `c·e^{λt}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exponential {
    pub coefficient: QComplex,
    pub rate: QComplex,
}

impl DifferentiationOperator {
    pub fn new(a: f64, b: f64) -> Result<Self, ModelError> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        if a >= b {
            return Err(ModelError::InvalidInterval);
        }
        Ok(Self { a, b })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// `d/dt [c·e^{λt}] = (λc)·e^{λt}`.
    pub fn apply(&self, f: &Exponential) -> Exponential {
        Exponential { coefficient: &f.rate * &f.coefficient, rate: f.rate.clone() }
    }

    /// Differentiates `c·e^{λt}` and returns `(λ, residual)` where the residual
    /// is the coefficient of `A f − λ f`, exactly zero by the symbolic rule.
    pub fn differentiate_exponential(&self, lambda: &QComplex, c: &QComplex) -> (QComplex, QComplex) {
        let f = Exponential { coefficient: c.clone(), rate: lambda.clone() };
        let af = self.apply(&f);
        let residual = &af.coefficient - &(lambda * &f.coefficient);
        (lambda.clone(), residual)
    }
}

/// Borrowed view of a scalar-type model, the operators that carry a spectral measure.
#[derive(Clone, Copy, Debug)]
pub enum ScalarOperator<'a> {
    Diagonal(&'a DiagonalOperator),
    Finite(&'a FiniteDiagonalizableOperator),
}

impl<'a> From<&'a DiagonalOperator> for ScalarOperator<'a> {
    fn from(op: &'a DiagonalOperator) -> Self {
        ScalarOperator::Diagonal(op)
    }
}

impl<'a> From<&'a FiniteDiagonalizableOperator> for ScalarOperator<'a> {
    fn from(op: &'a FiniteDiagonalizableOperator) -> Self {
        ScalarOperator::Finite(op)
    }
}

impl ScalarOperator<'_> {
    pub fn apply(&self, x: &FiniteVector) -> Result<FiniteVector, ModelError> {
        match self {
            ScalarOperator::Diagonal(op) => Ok(op.apply(x)),
            ScalarOperator::Finite(op) => op.apply(x),
        }
    }

    /// Exponent of the underlying sequence space; the finite model is Euclidean.
    pub fn p(&self) -> f64 {
        match self {
            ScalarOperator::Diagonal(op) => op.p(),
            ScalarOperator::Finite(_) => 2.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ScalarOperator::Diagonal(_))
    }
}
