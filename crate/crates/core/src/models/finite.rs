use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

use super::ModelError;
use crate::vector::FiniteVector;

pub type CMatrix = DMatrix<Complex64>;

/// Largest dimension accepted by the finite model.
pub const MAX_DIMENSION: usize = 16;
/// Largest accepted `‖T‖·‖T⁻¹‖` for a similarity.
pub const MAX_CONDITION: f64 = 1e6;
/// Eigenvector matrices with a smaller normalized singular value are treated as defective.
pub const DEFECTIVE_TOLERANCE: f64 = 1e-8;

const CLUSTER_TOLERANCE: f64 = 1e-8;
const SNAP_TOLERANCE: f64 = 1e-11;

/// `A = T·D·T⁻¹` on `ℂ^d`, `d ≤ 16`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDiagonalizableOperator {
    matrix: CMatrix,
    eigenvalues: Vec<Complex64>,
    t: CMatrix,
    t_inv: CMatrix,
    condition: f64,
}

/// Maximum column sum norm.
pub fn norm_1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn norm_2(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

fn smallest_singular_value(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

fn check_square(m: &CMatrix) -> Result<usize, ModelError> {
    let d = m.nrows();
    if d == 0 || d != m.ncols() {
        return Err(ModelError::NotSquare);
    }
    if d > MAX_DIMENSION {
        return Err(ModelError::DimensionTooLarge(d));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(ModelError::NonFinite);
    }
    Ok(d)
}

/// Snaps a component to the nearest fraction with denominator at most 12
/// when it lies within `tol` of it.
fn snap_component(x: f64, tol: f64) -> f64 {
    for d in 1..=12 {
        let d = d as f64;
        let cand = (x * d).round() / d;
        if (x - cand).abs() <= tol {
            return cand;
        }
    }
    x
}

impl FiniteDiagonalizableOperator {
    /// Builds `T·diag(eigs)·T⁻¹`.
    pub fn make_similar(eigs: &[Complex64], t: CMatrix) -> Result<Self, ModelError> {
        let d = check_square(&t)?;
        if eigs.len() != d {
            return Err(ModelError::DimensionMismatch { expected: d, found: eigs.len() });
        }
        if eigs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        let t_inv = t.clone().try_inverse().ok_or(ModelError::SingularSimilarity)?;
        let condition = norm_2(&t) * norm_2(&t_inv);
        if !condition.is_finite() || condition > MAX_CONDITION {
            return Err(ModelError::IllConditioned(condition));
        }
        let identity_gap = norm_1(&(&t * &t_inv - CMatrix::identity(d, d)));
        if identity_gap > 1e-10 {
            return Err(ModelError::IllConditioned(condition));
        }
        let diag = CMatrix::from_diagonal(&DVector::from_column_slice(eigs));
        let matrix = &t * diag * &t_inv;
        Ok(Self { matrix, eigenvalues: eigs.to_vec(), t, t_inv, condition })
    }

    /// Eigendecomposition of a dense matrix; defective matrices are refused.
    ///
    /// Computed eigenvalues within `1e-8·max(1, ‖A‖)` of each other are merged,
    /// and components within `1e-11·max(1, ‖A‖)` of a fraction with
    /// denominator at most 12 are snapped to it, so that exact eigenvalues such
    /// as `0` survive round-off.
    pub fn eigendecompose(matrix: CMatrix) -> Result<Self, ModelError> {
        let d = check_square(&matrix)?;
        let is_diagonal = (0..d).all(|i| (0..d).all(|j| i == j || matrix[(i, j)] == Complex64::new(0.0, 0.0)));
        if is_diagonal {
            let eigenvalues = matrix.diagonal().iter().copied().collect();
            let id = CMatrix::identity(d, d);
            return Ok(Self { matrix, eigenvalues, t: id.clone(), t_inv: id, condition: 1.0 });
        }
        let scale = norm_1(&matrix).max(1.0);
        let raw = Schur::new(matrix.clone()).eigenvalues().ok_or(ModelError::EigenFailure)?;

        let mut clusters: Vec<(Complex64, usize)> = Vec::new();
        for z in raw.iter() {
            match clusters.iter_mut().find(|(c, m)| (*c / *m as f64 - z).norm() <= CLUSTER_TOLERANCE * scale) {
                Some((sum, m)) => {
                    *sum += z;
                    *m += 1;
                }
                None => clusters.push((*z, 1)),
            }
        }

        let mut eigenvalues = Vec::with_capacity(d);
        let mut columns: Vec<DVector<Complex64>> = Vec::with_capacity(d);
        for (sum, m) in clusters {
            let mean = sum / m as f64;
            let mu = Complex64::new(snap_component(mean.re, SNAP_TOLERANCE * scale), snap_component(mean.im, SNAP_TOLERANCE * scale));
            let shifted = &matrix - CMatrix::identity(d, d) * mu;
            let svd = shifted.svd(false, true);
            let v_t = svd.v_t.ok_or(ModelError::EigenFailure)?;
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
            if svd.singular_values[order[m - 1]] > CLUSTER_TOLERANCE * scale {
                return Err(ModelError::Defective { smallest_singular_value: 0.0 });
            }
            for &i in &order[..m] {
                let v: DVector<Complex64> = v_t.row(i).adjoint();
                columns.push(v.normalize());
                eigenvalues.push(mu);
            }
        }
        let t = CMatrix::from_columns(&columns);
        let smallest = smallest_singular_value(&t);
        if smallest < DEFECTIVE_TOLERANCE {
            return Err(ModelError::Defective { smallest_singular_value: smallest });
        }
        let t_inv = t.clone().try_inverse().ok_or(ModelError::Defective { smallest_singular_value: smallest })?;
        let diag = CMatrix::from_diagonal(&DVector::from_column_slice(&eigenvalues));
        let residual = norm_1(&(&matrix - &t * diag * &t_inv));
        if residual > 1e-8 * norm_1(&matrix).max(f64::MIN_POSITIVE) {
            return Err(ModelError::InaccurateDecomposition(residual));
        }
        let condition = norm_2(&t) * norm_2(&t_inv);
        Ok(Self { matrix, eigenvalues, t, t_inv, condition })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn similarity(&self) -> &CMatrix {
        &self.t
    }

    pub fn similarity_inverse(&self) -> &CMatrix {
        &self.t_inv
    }

    /// `‖T‖₂·‖T⁻¹‖₂`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Distinct eigenvalues (exact equality) with the positions carrying them.
    pub fn distinct_eigenvalues(&self) -> Vec<(Complex64, Vec<usize>)> {
        let mut out: Vec<(Complex64, Vec<usize>)> = Vec::new();
        for (i, z) in self.eigenvalues.iter().enumerate() {
            match out.iter_mut().find(|(w, _)| w == z) {
                Some((_, idx)) => idx.push(i),
                None => out.push((*z, vec![i])),
            }
        }
        out
    }

    /// `T·diag(weights)·T⁻¹`.
    pub fn spectral_matrix<F>(&self, mut weight: F) -> CMatrix
    where
        F: FnMut(usize, Complex64) -> Complex64,
    {
        let w: Vec<Complex64> = self.eigenvalues.iter().enumerate().map(|(i, z)| weight(i, *z)).collect();
        let mut scaled = self.t.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= w[j];
        }
        scaled * &self.t_inv
    }

    pub fn to_column(&self, x: &FiniteVector) -> Result<DVector<Complex64>, ModelError> {
        let d = self.dimension();
        if x.max_index() > d as u64 {
            return Err(ModelError::DimensionMismatch { expected: d, found: x.max_index() as usize });
        }
        Ok(DVector::from_vec(x.to_dense(d)))
    }

    pub fn from_column(v: &DVector<Complex64>) -> FiniteVector {
        FiniteVector::from_dense(v.as_slice()).expect("finite matrix products")
    }

    /// Applies a `d×d` matrix to a vector supported in `1..=d`.
    pub fn apply_matrix(&self, m: &CMatrix, x: &FiniteVector) -> Result<FiniteVector, ModelError> {
        let v = self.to_column(x)?;
        Ok(Self::from_column(&(m * v)))
    }

    pub fn apply(&self, x: &FiniteVector) -> Result<FiniteVector, ModelError> {
        self.apply_matrix(&self.matrix, x)
    }
}
