//! Spectra and the point / continuous / residual / resolvent partition.

use std::collections::HashMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::exact::{rational_to_f64, QComplex};
use crate::measure::spectral_projection;
use crate::models::{
    CMatrix, DiagonalOperator, FiniteDiagonalizableOperator, ModelError, Operator, ScalarOperator, WindowCheck,
};
use crate::region::BorelRegion;
use crate::tail::{distance_infimum, TailError};
use crate::vector::{complex_serde, FiniteVector};

/// Distance below which a non-equal atom makes a classification undetermined.
pub const ATOM_TOLERANCE: f64 = 1e-12;
/// Indices checked one by one when confirming that the range of `A − λI` is dense.
const DENSITY_PROBES: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Point,
    Continuous,
    Residual,
    Resolvent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `A e_k = λ e_k` (diagonal) or the `k`-th column of `T` (finite), 1-based.
    Eigenvector { index: u64 },
    /// `d/dt e^{λt} = λ e^{λt}`, with the exact residual of the symbolic rule.
    Eigenfunction {
        #[serde(serialize_with = "complex_serde::one")]
        rate: Complex64,
        #[serde(serialize_with = "complex_serde::one")]
        residual: Complex64,
    },
    /// `A − λI` is injective with dense range, yet `inf_k |λ(k) − λ| = 0`.
    Density {
        #[serde(serialize_with = "complex_serde::one")]
        limit_point: Complex64,
    },
    /// A nonzero vector orthogonal to the range of `A − λI`; its first
    /// coordinates are listed.
    RangeObstruction {
        #[serde(serialize_with = "complex_serde::many")]
        annihilator: Vec<Complex64>,
    },
    /// `‖(A − λI)^{-1}‖ ≤ bound`.
    InverseBound { bound: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointClassification {
    #[serde(serialize_with = "complex_serde::one")]
    pub lambda: Complex64,
    pub verdict: Verdict,
    pub witness: Witness,
    pub injective: bool,
    pub range_dense: bool,
    pub range_closed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("undetermined: atom {index} lies within {distance:.3e} of the point without equalling it")]
    Undetermined { index: u64, distance: f64 },
    #[error("inconclusive: {0}")]
    Tail(#[from] TailError),
    #[error("inconclusive: level polynomial root bound {0:.3e} exceeds the scan cap")]
    LevelSet(f64),
    #[error("declared limit points are not confirmed at truncation {truncation}")]
    LimitPointInconsistent { truncation: u64 },
    #[error("point is not in the spectrum")]
    NotInSpectrum,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("non-finite point")]
    NonFinite,
}

/// Partition of the plane from the three structural facts about `A − λI`.
fn partition(injective: bool, range_dense: bool, range_closed: bool) -> Verdict {
    match (injective, range_dense, range_closed) {
        (false, _, _) => Verdict::Point,
        (true, false, _) => Verdict::Residual,
        (true, true, true) => Verdict::Resolvent,
        (true, true, false) => Verdict::Continuous,
    }
}

fn exact_point(lambda: Complex64) -> Result<QComplex, SpectrumError> {
    QComplex::from_f64(lambda).ok_or(SpectrumError::NonFinite)
}

/// First global index `k` with `λ(k) = z`, if any.
pub fn diagonal_atom_index(op: &DiagonalOperator, z: &QComplex) -> Result<Option<u64>, SpectrumError> {
    if let Some(i) = op.prepend().iter().position(|p| p == z) {
        return Ok(Some(i as u64 + 1));
    }
    let level = op.tail_level_poly(z);
    if level.is_zero() {
        return Ok(Some(op.tail_to_global(1)));
    }
    let roots = level.positive_integer_roots().map_err(SpectrumError::LevelSet)?;
    Ok(roots.first().map(|&n| op.tail_to_global(n)))
}

fn horner(coeffs: &[Complex64], x: f64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// First index among `1..=n` whose eigenvalue lies within `ATOM_TOLERANCE`
/// of `λ`. Tail values are screened in floating point and confirmed exactly.
fn near_atom(op: &DiagonalOperator, lambda: Complex64, n: u64) -> Option<(u64, f64)> {
    let m = op.prepend().len() as u64;
    let to_f64 = |p: &crate::poly::Poly| p.coeffs().iter().map(QComplex::to_f64).collect::<Vec<_>>();
    let (num, den) = (to_f64(&op.tail_fn().num), to_f64(&op.tail_fn().den));
    (1..=n.max(m)).find_map(|k| {
        let value = if k <= m {
            op.prepend()[(k - 1) as usize].to_f64()
        } else {
            let j = (k - m) as f64;
            let approx = horner(&num, j) / horner(&den, j);
            if approx.is_finite() && (approx - lambda).norm() > 1e3 * ATOM_TOLERANCE {
                return None;
            }
            op.tail().eval(k - m).ok()?
        };
        let d = (value - lambda).norm();
        (d <= ATOM_TOLERANCE).then_some((k, d))
    })
}

/// `inf_k |λ(k) − z|²` over the indices with `λ(k) ≠ z`, together with declared
/// limit points other than `z`. `None` when no such atom or limit point exists.
pub(crate) fn diagonal_distance_sq(op: &DiagonalOperator, z: &QComplex) -> Result<Option<BigRational>, SpectrumError> {
    let tail = distance_infimum(op.tail_fn(), z)?;
    let mut best = tail.squared;
    let others = op
        .prepend()
        .iter()
        .chain(op.declared_limit_points())
        .filter(|w| *w != z)
        .map(|w| (w - z).norm_sqr());
    for d in others {
        if best.as_ref().is_none_or(|b| d < *b) {
            best = Some(d);
        }
    }
    Ok(best)
}

fn classify_diagonal(op: &DiagonalOperator, lambda: Complex64, n: u64) -> Result<PointClassification, SpectrumError> {
    let z = exact_point(lambda)?;
    let atom = diagonal_atom_index(op, &z)?;
    if atom.is_none() {
        if let Some((index, distance)) = near_atom(op, lambda, n) {
            return Err(SpectrumError::Undetermined { index, distance });
        }
    }
    let injective = atom.is_none();
    // Every e_k with λ(k) ≠ λ is (A − λI)(e_k/(λ(k) − λ)); the orthogonal
    // complement of the range is spanned by the e_k with λ(k) = λ.
    let range_dense = injective && {
        let shift = |x: &FiniteVector| op.apply(x).sub(&x.scale(&z));
        (1..=DENSITY_PROBES).all(|k| {
            let ek = FiniteVector::basis(k).expect("k >= 1");
            let scale = (&op.eigenvalue(k) - &z).recip().expect("not an atom");
            shift(&ek.scale(&scale)) == ek
        })
    };
    let limit_hit = op.accumulation_points().into_iter().find(|l| *l == z);
    let distance_sq = diagonal_distance_sq(op, &z)?;
    let range_closed = distance_sq.as_ref().is_none_or(|d| !d.is_zero()) && limit_hit.is_none();
    let verdict = partition(injective, range_dense, range_closed);
    let witness = match verdict {
        Verdict::Point => Witness::Eigenvector { index: atom.expect("not injective") },
        Verdict::Continuous => Witness::Density { limit_point: lambda },
        Verdict::Resolvent => Witness::InverseBound {
            bound: distance_sq.map_or(0.0, |d| 1.0 / rational_to_f64(&d).sqrt()),
        },
        Verdict::Residual => unreachable!("dense range follows from injectivity in the diagonal model"),
    };
    Ok(PointClassification { lambda, verdict, witness, injective, range_dense, range_closed, note: None })
}

fn smallest_singular(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

fn classify_finite(op: &FiniteDiagonalizableOperator, lambda: Complex64) -> Result<PointClassification, SpectrumError> {
    exact_point(lambda)?;
    let eigen = op.eigenvalues().iter().position(|z| *z == lambda);
    if eigen.is_none() {
        if let Some((i, z)) = op.eigenvalues().iter().enumerate().find(|(_, z)| (**z - lambda).norm() <= ATOM_TOLERANCE) {
            return Err(SpectrumError::Undetermined { index: i as u64 + 1, distance: (*z - lambda).norm() });
        }
    }
    let d = op.dimension();
    let shifted = op.matrix() - CMatrix::identity(d, d) * lambda;
    let injective = eigen.is_none();
    let tol = 1e-12 * crate::models::norm_1(op.matrix()).max(1.0);
    let sigma_min = smallest_singular(&shifted);
    if injective && sigma_min <= tol {
        let (i, z) = op
            .eigenvalues()
            .iter()
            .enumerate()
            .min_by(|a, b| (*a.1 - lambda).norm().total_cmp(&(*b.1 - lambda).norm()))
            .expect("non-empty");
        return Err(SpectrumError::Undetermined { index: i as u64 + 1, distance: (*z - lambda).norm() });
    }
    // Rank-nullity: the range is dense (and closed) exactly when the adjoint is injective.
    let range_dense = smallest_singular(&shifted.adjoint()) > tol;
    let range_closed = true;
    let verdict = partition(injective, range_dense, range_closed);
    let witness = match verdict {
        Verdict::Point => Witness::Eigenvector { index: eigen.expect("eigenvalue") as u64 + 1 },
        Verdict::Resolvent => Witness::InverseBound { bound: 1.0 / sigma_min },
        _ => unreachable!("finite-dimensional injective maps are onto"),
    };
    Ok(PointClassification { lambda, verdict, witness, injective, range_dense, range_closed, note: None })
}

const NOT_SCALAR_TYPE: &str = "not scalar type: scalar type operators have empty residual spectrum";

/// Classifies `λ`. The diagonal and finite models are decided from injectivity,
/// density and closedness of the range of `A − λI`; the two remaining models
/// follow their analytic descriptions.
pub fn classify_point(op: &Operator, lambda: Complex64, n: u64) -> Result<PointClassification, SpectrumError> {
    match op {
        Operator::Diagonal(d) => classify_diagonal(d, lambda, n),
        Operator::Finite(f) => classify_finite(f, lambda),
        Operator::WeightedShift(s) => {
            exact_point(lambda)?;
            // Injective by the recursion k·x_k = λ x_{k+1}, x_1 = 0; the vector
            // w_k = conj(λ)^{k-1}/(k-1)! is orthogonal to the range.
            Ok(PointClassification {
                lambda,
                verdict: Verdict::Residual,
                witness: Witness::RangeObstruction { annihilator: s.range_annihilator(lambda, 8) },
                injective: true,
                range_dense: false,
                range_closed: false,
                note: Some(NOT_SCALAR_TYPE.to_string()),
            })
        }
        Operator::Differentiation(d) => {
            let z = exact_point(lambda)?;
            let (rate, residual) = d.differentiate_exponential(&z, &QComplex::one());
            Ok(PointClassification {
                lambda,
                verdict: Verdict::Point,
                witness: Witness::Eigenfunction { rate: rate.to_f64(), residual: residual.to_f64() },
                injective: false,
                range_dense: true,
                range_closed: true,
                note: Some("every complex number is an eigenvalue".to_string()),
            })
        }
    }
}

/// The sampled points classified residual; empty for every scalar-type model.
pub fn residual_spectrum(op: ScalarOperator<'_>, samples: &[Complex64], n: u64) -> Result<Vec<Complex64>, SpectrumError> {
    let mut out = Vec::new();
    for &lambda in samples {
        let c = match op {
            ScalarOperator::Diagonal(d) => classify_diagonal(d, lambda, n),
            ScalarOperator::Finite(f) => classify_finite(f, lambda),
        };
        match c {
            Ok(c) if c.verdict == Verdict::Residual => out.push(lambda),
            Ok(_) | Err(SpectrumError::Undetermined { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Atom {
    #[serde(serialize_with = "complex_serde::one")]
    pub value: Complex64,
    /// 1-based coordinates (diagonal) or eigenvector positions (finite) carrying this value.
    pub indices: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumDescription {
    pub atoms: Vec<Atom>,
    #[serde(serialize_with = "complex_serde::many")]
    pub limit_points: Vec<Complex64>,
    pub is_scalar_type: bool,
    /// Atoms are listed up to this index for the diagonal model.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

fn group_atoms<I>(values: I) -> Vec<Atom>
where
    I: IntoIterator<Item = (u64, QComplex)>,
{
    let mut order: Vec<QComplex> = Vec::new();
    let mut map: HashMap<QComplex, Vec<u64>> = HashMap::new();
    for (k, v) in values {
        map.entry(v.clone()).or_insert_with(|| {
            order.push(v);
            Vec::new()
        }).push(k);
    }
    order.into_iter().map(|v| Atom { value: v.to_f64(), indices: map.remove(&v).unwrap_or_default() }).collect()
}

pub fn diagonal_spectrum(op: &DiagonalOperator, n: u64) -> Result<(SpectrumDescription, WindowCheck), SpectrumError> {
    let window = op.window_check(n);
    if !window.consistent {
        return Err(SpectrumError::LimitPointInconsistent { truncation: window.truncation });
    }
    let atoms = group_atoms((1..=n).map(|k| (k, op.eigenvalue(k))));
    let description = SpectrumDescription {
        atoms,
        limit_points: op.declared_limit_points().iter().map(QComplex::to_f64).collect(),
        is_scalar_type: true,
        truncation: Some(n),
        description: None,
    };
    Ok((description, window))
}

pub fn compute_spectrum(op: &Operator, n: u64) -> Result<SpectrumDescription, SpectrumError> {
    match op {
        Operator::Diagonal(d) => diagonal_spectrum(d, n.max(1)).map(|(s, _)| s),
        Operator::Finite(f) => Ok(SpectrumDescription {
            atoms: f
                .distinct_eigenvalues()
                .into_iter()
                .map(|(value, idx)| Atom { value, indices: idx.into_iter().map(|i| i as u64 + 1).collect() })
                .collect(),
            limit_points: Vec::new(),
            is_scalar_type: true,
            truncation: None,
            description: None,
        }),
        Operator::WeightedShift(_) => Ok(SpectrumDescription {
            atoms: Vec::new(),
            limit_points: Vec::new(),
            is_scalar_type: false,
            truncation: None,
            description: Some("sigma = sigma_r = C: injective for every lambda, range orthogonal to (conj(lambda)^(k-1)/(k-1)!)_k".into()),
        }),
        Operator::Differentiation(_) => Ok(SpectrumDescription {
            atoms: Vec::new(),
            limit_points: Vec::new(),
            is_scalar_type: false,
            truncation: None,
            description: Some("sigma = sigma_p = C: e^(lambda t) is an eigenfunction for every lambda".into()),
        }),
    }
}

/// Distinct eigenvalues in order of first appearance, `λ(1..=n)` for the diagonal model.
pub fn enumerate_point_spectrum(op: ScalarOperator<'_>, n: u64) -> Vec<Complex64> {
    let atoms = match op {
        ScalarOperator::Diagonal(d) => group_atoms((1..=n).map(|k| (k, d.eigenvalue(k)))),
        ScalarOperator::Finite(f) => {
            return f.distinct_eigenvalues().into_iter().map(|(z, _)| z).collect();
        }
    };
    atoms.into_iter().map(|a| a.value).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsolationReport {
    pub isolated: bool,
    /// Distance from the point to the rest of the spectrum; infinite when the
    /// spectrum is a single point.
    pub gap_radius: f64,
    /// Exact square of `gap_radius` for the diagonal model.
    #[serde(skip)]
    pub gap_radius_sq: Option<BigRational>,
    pub is_eigenvalue: bool,
    /// `‖E({λ0}) e_k‖` for the coordinate (diagonal) or eigenvector (finite) witness.
    pub projection_witness: f64,
    /// Smallest distance to the other atoms among the first `N`, for comparison.
    pub sampled_gap: f64,
}

/// Whether `λ0 ∈ σ(A)` is isolated, from the spectrum description alone.
pub fn isolated_point_check(op: ScalarOperator<'_>, lambda0: Complex64, n: u64) -> Result<IsolationReport, SpectrumError> {
    let singleton = BorelRegion::singleton(lambda0).map_err(|_| SpectrumError::NonFinite)?;
    let e0 = spectral_projection(op, &singleton);
    match op {
        ScalarOperator::Diagonal(d) => {
            let z = exact_point(lambda0)?;
            let atom = diagonal_atom_index(d, &z)?;
            if atom.is_none() && !d.declared_limit_points().contains(&z) {
                return Err(SpectrumError::NotInSpectrum);
            }
            let gap_sq = diagonal_distance_sq(d, &z)?;
            let gap_radius = gap_sq.as_ref().map_or(f64::INFINITY, |q| rational_to_f64(q).sqrt());
            let isolated = gap_sq.as_ref().is_none_or(|q| !q.is_zero());
            let projection_witness = match atom {
                Some(k) => e0.apply(&FiniteVector::basis(k).expect("k >= 1"))?.norm(d.p()),
                None => 0.0,
            };
            let sampled_gap = (1..=n.max(1))
                .map(|k| d.eigenvalue(k))
                .filter(|v| *v != z)
                .map(|v| (&v - &z).abs_f64())
                .fold(f64::INFINITY, f64::min);
            Ok(IsolationReport {
                isolated,
                gap_radius,
                gap_radius_sq: gap_sq,
                is_eigenvalue: atom.is_some(),
                projection_witness,
                sampled_gap,
            })
        }
        ScalarOperator::Finite(f) => {
            let position = f.eigenvalues().iter().position(|w| *w == lambda0).ok_or(SpectrumError::NotInSpectrum)?;
            let gap_radius = f
                .eigenvalues()
                .iter()
                .filter(|w| **w != lambda0)
                .map(|w| (*w - lambda0).norm())
                .fold(f64::INFINITY, f64::min);
            let column = f.similarity().column(position).clone_owned();
            let witness = FiniteDiagonalizableOperator::from_column(&column);
            let projection_witness = e0.apply(&witness)?.norm(2.0);
            Ok(IsolationReport {
                isolated: gap_radius > 0.0,
                gap_radius,
                gap_radius_sq: None,
                is_eigenvalue: true,
                projection_witness,
                sampled_gap: gap_radius,
            })
        }
    }
}
