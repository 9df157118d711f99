//! Operator spec JSON, as consumed by the command line and the C API.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    CMatrix, DiagonalOperator, DifferentiationOperator, FiniteDiagonalizableOperator, ModelError, ScalarOperator,
    WeightedShiftOperator,
};
use crate::vector::ComplexJson;

fn default_p() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Diagonal {
        #[serde(default = "default_p")]
        p: f64,
        #[serde(default)]
        prepend: Vec<ComplexJson>,
        tail_expr: String,
        #[serde(default)]
        limit_points: Vec<ComplexJson>,
    },
    /// Either `matrix` (eigendecomposed on load) or `eigenvalues` together with
    /// `similarity` (assembled as `T·D·T⁻¹`).
    Finite {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<ComplexJson>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eigenvalues: Option<Vec<ComplexJson>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        similarity: Option<Vec<Vec<ComplexJson>>>,
    },
    WeightedShift,
    Differentiation {
        a: f64,
        b: f64,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("invalid operator spec JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("finite spec needs either 'matrix' or both 'eigenvalues' and 'similarity'")]
    FiniteFields,
    #[error("matrix rows must all have the same length")]
    Ragged,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Diagonal(DiagonalOperator),
    Finite(FiniteDiagonalizableOperator),
    WeightedShift(WeightedShiftOperator),
    Differentiation(DifferentiationOperator),
}

fn to_matrix(rows: &[Vec<ComplexJson>]) -> Result<CMatrix, SpecError> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(SpecError::Ragged);
    }
    Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j].into()))
}

impl Operator {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let spec: OperatorSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn from_spec(spec: &OperatorSpec) -> Result<Self, SpecError> {
        let cvec = |v: &[ComplexJson]| v.iter().map(|z| Complex64::from(*z)).collect::<Vec<_>>();
        Ok(match spec {
            OperatorSpec::Diagonal { p, prepend, tail_expr, limit_points } => Operator::Diagonal(
                DiagonalOperator::new(&cvec(prepend), tail_expr, *p, &cvec(limit_points))?,
            ),
            OperatorSpec::Finite { matrix: Some(m), eigenvalues: None, similarity: None } => {
                Operator::Finite(FiniteDiagonalizableOperator::eigendecompose(to_matrix(m)?)?)
            }
            OperatorSpec::Finite { matrix: None, eigenvalues: Some(e), similarity: Some(t) } => {
                Operator::Finite(FiniteDiagonalizableOperator::make_similar(&cvec(e), to_matrix(t)?)?)
            }
            OperatorSpec::Finite { .. } => return Err(SpecError::FiniteFields),
            OperatorSpec::WeightedShift => Operator::WeightedShift(WeightedShiftOperator),
            OperatorSpec::Differentiation { a, b } => Operator::Differentiation(DifferentiationOperator::new(*a, *b)?),
        })
    }

    pub fn as_scalar(&self) -> Option<ScalarOperator<'_>> {
        match self {
            Operator::Diagonal(op) => Some(ScalarOperator::Diagonal(op)),
            Operator::Finite(op) => Some(ScalarOperator::Finite(op)),
            _ => None,
        }
    }

    pub fn is_scalar_type(&self) -> bool {
        self.as_scalar().is_some()
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            Operator::Diagonal(_) => "diagonal",
            Operator::Finite(_) => "finite",
            Operator::WeightedShift(_) => "weighted_shift",
            Operator::Differentiation(_) => "differentiation",
        }
    }
}
