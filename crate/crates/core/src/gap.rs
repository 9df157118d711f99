//! Kernel/range decomposition, the spectral gap at `0` versus closed range,
//! and the inverse of `A + E({0})`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::calculus::apply_function;
use crate::exact::{rational_from_f64, rational_to_f64, QComplex};
use crate::function::BorelFunction;
use crate::measure::{nonzero_region, spectral_projection, zero_region, Projection};
use crate::models::{norm_2, CMatrix, DiagonalOperator, ModelError, ScalarOperator};
use crate::spectrum::{diagonal_atom_index, diagonal_distance_sq, isolated_point_check, Atom, SpectrumDescription, SpectrumError};
use crate::tail::{modulus_infimum_closed_form, TailError};
use crate::vector::FiniteVector;

/// Truncation used when a spectrum description is sampled.
pub const DEFAULT_TRUNCATION: u64 = 1000;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GapError {
    #[error("0 is not in the spectrum")]
    ZeroNotInSpectrum,
    #[error("inconclusive: {0}")]
    Spectrum(#[from] SpectrumError),
    #[error("inconclusive: {0}")]
    Tail(#[from] TailError),
    #[error("cutoff must be a positive finite number")]
    InvalidGamma,
    #[error("annulus violation: atom {value} at index {index} has 0 < |λ| < γ")]
    AnnulusViolation { index: u64, value: Complex64 },
    #[error("annulus violation: nonzero atoms accumulate below γ")]
    AnnulusAccumulation,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl GapError {
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, GapError::Spectrum(_) | GapError::Tail(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub samples: usize,
    /// `‖x − Px − Qx‖`.
    pub reconstruction: f64,
    /// `max(‖P²x − Px‖, ‖Q²x − Qx‖)`.
    pub idempotency: f64,
    /// `max(‖PQx‖, ‖QPx‖)`.
    pub complementarity: f64,
    /// `‖A P x‖`.
    pub annihilation: f64,
    /// Coordinates among the first 64 spanning `ker A` (diagonal model).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_indices: Option<Vec<u64>>,
}

impl DecompositionReport {
    pub fn max_deviation(&self) -> f64 {
        [self.reconstruction, self.idempotency, self.complementarity, self.annihilation].into_iter().fold(0.0, f64::max)
    }
}

/// `P = E({0})` onto `ker A` and `Q = E(σ(A) ∖ {0})` onto the closure of the range.
pub fn decompose(op: ScalarOperator<'_>, samples: &[FiniteVector]) -> Result<DecompositionReport, ModelError> {
    let p_norm = op.p();
    let pp = spectral_projection(op, &zero_region());
    let qq = spectral_projection(op, &nonzero_region());
    let mut r = DecompositionReport { samples: samples.len(), kernel_indices: pp.kept_indices(64), ..Default::default() };
    for x in samples {
        let px = pp.apply(x)?;
        let qx = qq.apply(x)?;
        r.reconstruction = r.reconstruction.max(x.sub(&px).sub(&qx).norm(p_norm));
        r.idempotency = r.idempotency.max(pp.apply(&px)?.sub(&px).norm(p_norm)).max(qq.apply(&qx)?.sub(&qx).norm(p_norm));
        r.complementarity = r.complementarity.max(pp.apply(&qx)?.norm(p_norm)).max(qq.apply(&px)?.norm(p_norm));
        r.annihilation = r.annihilation.max(op.apply(&px)?.norm(p_norm));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeReport {
    pub closed: bool,
    /// `inf |λ|` over the nonzero atoms; infinite when there are none.
    pub inf_nonzero_modulus: f64,
    #[serde(skip)]
    pub inf_nonzero_modulus_sq: Option<BigRational>,
}

impl RangeReport {
    /// `‖A₁⁻¹‖ = 1/inf |λ|`, infinite when the range is not closed.
    pub fn restriction_inverse_norm(&self) -> f64 {
        1.0 / self.inf_nonzero_modulus
    }
}

/// Closed range iff the nonzero atoms stay away from `0`. The diagonal model
/// reads the infimum off the closed form of a `c + q·n^m` tail.
pub fn is_range_closed(op: ScalarOperator<'_>) -> Result<RangeReport, GapError> {
    match op {
        ScalarOperator::Diagonal(d) => {
            let mut best = modulus_infimum_closed_form(d.tail_fn())?.squared;
            for v in d.prepend().iter().filter(|v| !v.is_zero()) {
                let m = v.norm_sqr();
                if best.as_ref().is_none_or(|b| m < *b) {
                    best = Some(m);
                }
            }
            let inf = best.as_ref().map_or(f64::INFINITY, |q| rational_to_f64(q).sqrt());
            let closed = best.as_ref().is_none_or(|q| q.is_positive());
            Ok(RangeReport { closed, inf_nonzero_modulus: inf, inf_nonzero_modulus_sq: best })
        }
        ScalarOperator::Finite(f) => {
            let inf = f
                .eigenvalues()
                .iter()
                .filter(|z| **z != Complex64::new(0.0, 0.0))
                .map(|z| z.norm())
                .fold(f64::INFINITY, f64::min);
            Ok(RangeReport { closed: true, inf_nonzero_modulus: inf, inf_nonzero_modulus_sq: None })
        }
    }
}

/// `F(A)` for `F = reciprocal_cutoff(γ)`.
#[derive(Clone, Debug)]
pub struct GapInverse<'a> {
    op: ScalarOperator<'a>,
    function: BorelFunction,
    gamma: f64,
}

impl GapInverse<'_> {
    pub fn apply(&self, x: &FiniteVector) -> Result<FiniteVector, ModelError> {
        Ok(apply_function(self.op, &self.function, x)?.value)
    }

    pub fn function(&self) -> &BorelFunction {
        &self.function
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `1/γ` for the diagonal model; the spectral norm of `F(A)` for the finite one.
    pub fn norm_bound(&self) -> f64 {
        match self.op {
            ScalarOperator::Diagonal(_) => 1.0 / self.gamma,
            ScalarOperator::Finite(f) => norm_2(&f.spectral_matrix(|_, z| self.function.eval(z))),
        }
    }
}

fn diagonal_annulus_witness(d: &DiagonalOperator, gamma_sq: &BigRational) -> Option<(u64, Complex64)> {
    (1..=100_000u64).find_map(|k| {
        let v = d.eigenvalue(k);
        let m = v.norm_sqr();
        (!m.is_zero() && m < *gamma_sq).then(|| (k, v.to_f64()))
    })
}

pub fn build_gap_inverse(op: ScalarOperator<'_>, gamma: f64) -> Result<GapInverse<'_>, GapError> {
    let function = BorelFunction::reciprocal_cutoff(gamma).map_err(|_| GapError::InvalidGamma)?;
    let gamma_q = rational_from_f64(gamma).ok_or(GapError::InvalidGamma)?;
    let gamma_sq = &gamma_q * &gamma_q;
    match op {
        ScalarOperator::Diagonal(d) => {
            let inf_sq = diagonal_distance_sq(d, &QComplex::zero())?;
            if inf_sq.as_ref().is_some_and(|q| *q < gamma_sq) {
                return Err(match diagonal_annulus_witness(d, &gamma_sq) {
                    Some((index, value)) => GapError::AnnulusViolation { index, value },
                    None => GapError::AnnulusAccumulation,
                });
            }
        }
        ScalarOperator::Finite(f) => {
            let bad = f.eigenvalues().iter().enumerate().find(|(_, z)| {
                let q = QComplex::from_f64(**z).expect("finite");
                !q.is_zero() && q.norm_sqr() < gamma_sq
            });
            if let Some((i, z)) = bad {
                return Err(GapError::AnnulusViolation { index: i as u64 + 1, value: *z });
            }
        }
    }
    Ok(GapInverse { op, function, gamma })
}

/// `max ‖A F(A) x − E(σ(A) ∖ {0}) x‖` over the samples.
pub fn verify_proof_identity(op: ScalarOperator<'_>, gamma: f64, samples: &[FiniteVector]) -> Result<f64, GapError> {
    let inverse = build_gap_inverse(op, gamma)?;
    let q = spectral_projection(op, &nonzero_region());
    let mut worst: f64 = 0.0;
    for x in samples {
        let lhs = op.apply(&inverse.apply(x)?)?;
        worst = worst.max(lhs.sub(&q.apply(x)?).norm(op.p()));
    }
    Ok(worst)
}

pub fn zero_in_spectrum(op: ScalarOperator<'_>) -> Result<bool, GapError> {
    Ok(match op {
        ScalarOperator::Diagonal(d) => {
            diagonal_atom_index(d, &QComplex::zero())?.is_some() || d.declared_limit_points().iter().any(QComplex::is_zero)
        }
        ScalarOperator::Finite(f) => f.eigenvalues().iter().any(|z| *z == Complex64::new(0.0, 0.0)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictionReport {
    /// Spectrum of `A₁`, the part of `A` on the closure of the range.
    pub sigma_a1: SpectrumDescription,
    /// `σ(A) = {0} ∪ σ(A₁)` on the listed atoms and limit points.
    pub union_holds: bool,
    /// `sup_{σ(A₁)} 1/|λ|`; infinite when `A₁` has no bounded inverse.
    pub a1_inverse_norm: f64,
}

/// Splits off the kernel and describes `A₁ = A|_{R(A)‾}`; requires `0 ∈ σ_p(A)`.
pub fn restriction_spectrum_check(op: ScalarOperator<'_>, n: u64) -> Result<RestrictionReport, GapError> {
    let zero = QComplex::zero();
    match op {
        ScalarOperator::Diagonal(d) => {
            if diagonal_atom_index(d, &zero)?.is_none() {
                return Err(GapError::PreconditionViolation("0 is not an eigenvalue".into()));
            }
            let values: Vec<(u64, QComplex)> = (1..=n).map(|k| (k, d.eigenvalue(k))).collect();
            let mut atoms: Vec<Atom> = Vec::new();
            let mut seen: Vec<QComplex> = Vec::new();
            for (k, v) in values.iter().filter(|(_, v)| !v.is_zero()) {
                match seen.iter().position(|s| s == v) {
                    Some(i) => atoms[i].indices.push(*k),
                    None => {
                        seen.push(v.clone());
                        atoms.push(Atom { value: v.to_f64(), indices: vec![*k] });
                    }
                }
            }
            let limit_points = d.declared_limit_points().to_vec();
            let mut whole: Vec<&QComplex> = values.iter().map(|(_, v)| v).collect();
            whole.sort_by_key(|v| v.to_string());
            whole.dedup();
            let mut union: Vec<&QComplex> = seen.iter().chain(std::iter::once(&zero)).collect();
            union.sort_by_key(|v| v.to_string());
            union.dedup();
            let union_holds = whole == union;
            let range = is_range_closed(op)?;
            let a1_inverse_norm = if limit_points.iter().any(QComplex::is_zero) {
                f64::INFINITY
            } else {
                range.restriction_inverse_norm()
            };
            Ok(RestrictionReport {
                sigma_a1: SpectrumDescription {
                    atoms,
                    limit_points: limit_points.iter().map(QComplex::to_f64).collect(),
                    is_scalar_type: true,
                    truncation: Some(n),
                    description: None,
                },
                union_holds,
                a1_inverse_norm,
            })
        }
        ScalarOperator::Finite(f) => {
            let distinct = f.distinct_eigenvalues();
            if !distinct.iter().any(|(z, _)| *z == Complex64::new(0.0, 0.0)) {
                return Err(GapError::PreconditionViolation("0 is not an eigenvalue".into()));
            }
            let atoms: Vec<Atom> = distinct
                .iter()
                .filter(|(z, _)| *z != Complex64::new(0.0, 0.0))
                .map(|(z, idx)| Atom { value: *z, indices: idx.iter().map(|i| *i as u64 + 1).collect() })
                .collect();
            let union_holds = distinct.len() == atoms.len() + 1;
            let a1_inverse_norm = atoms.iter().map(|a| 1.0 / a.value.norm()).fold(0.0, f64::max);
            Ok(RestrictionReport {
                sigma_a1: SpectrumDescription {
                    atoms,
                    limit_points: Vec::new(),
                    is_scalar_type: true,
                    truncation: None,
                    description: None,
                },
                union_holds,
                a1_inverse_norm,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub zero_in_spectrum: bool,
    pub isolated: bool,
    pub gap_radius: f64,
    pub range_closed: bool,
    pub inf_nonzero_modulus: f64,
    pub predicates_agree: bool,
    /// `γ` used for the proof identity, `gap_radius/2` (or 1 when the spectrum is `{0}`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof_identity_deviation: Option<f64>,
    /// `‖A₁⁻¹‖ = sup 1/|λ|` over the nonzero atoms.
    pub restriction_inverse_norm: f64,
    pub is_eigenvalue: bool,
}

/// Decides isolation of `0` from the spectrum and closedness of the range from
/// the moduli of the atoms, independently, and compares them.
pub fn gap_theorem_check(op: ScalarOperator<'_>, samples: &[FiniteVector]) -> Result<GapReport, GapError> {
    if !zero_in_spectrum(op)? {
        return Err(GapError::ZeroNotInSpectrum);
    }
    let iso = isolated_point_check(op, Complex64::new(0.0, 0.0), DEFAULT_TRUNCATION)?;
    let range = is_range_closed(op)?;
    let (gamma, proof_identity_deviation) = if iso.isolated {
        let gamma = if iso.gap_radius.is_finite() { iso.gap_radius / 2.0 } else { 1.0 };
        (Some(gamma), Some(verify_proof_identity(op, gamma, samples)?))
    } else {
        (None, None)
    };
    Ok(GapReport {
        zero_in_spectrum: true,
        isolated: iso.isolated,
        gap_radius: if iso.isolated { iso.gap_radius } else { 0.0 },
        range_closed: range.closed,
        inf_nonzero_modulus: range.inf_nonzero_modulus,
        predicates_agree: iso.isolated == range.closed,
        gamma,
        proof_identity_deviation,
        restriction_inverse_norm: range.restriction_inverse_norm(),
        is_eigenvalue: iso.is_eigenvalue,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReducibleInverseReport {
    pub y: FiniteVector,
    pub inverse_norm_bound: f64,
    /// `‖(A + E({0}))y − x‖`.
    pub residual: f64,
}

/// `(A + E({0}))⁻¹`, prepared once; requires `0` to be regular or an isolated point of `σ(A)`.
pub struct ReducibleInverse<'a> {
    op: ScalarOperator<'a>,
    e0: Projection<'a>,
    /// Matrix of the inverse for the finite model.
    matrix: Option<CMatrix>,
    norm_bound: f64,
}

impl<'a> ReducibleInverse<'a> {
    pub fn new(op: ScalarOperator<'a>) -> Result<Self, GapError> {
        if zero_in_spectrum(op)? {
            let iso = isolated_point_check(op, Complex64::new(0.0, 0.0), DEFAULT_TRUNCATION)?;
            if !iso.isolated {
                return Err(GapError::PreconditionViolation("0 is a non-isolated point of the spectrum".into()));
            }
        }
        let e0 = spectral_projection(op, &zero_region());
        let (matrix, norm_bound) = match op {
            ScalarOperator::Diagonal(d) => {
                let inf = diagonal_distance_sq(d, &QComplex::zero())?;
                let restriction = inf.as_ref().map_or(0.0, |q| 1.0 / rational_to_f64(q).sqrt());
                (None, restriction.max(1.0))
            }
            ScalarOperator::Finite(f) => {
                let zero = Complex64::new(0.0, 0.0);
                let one = Complex64::new(1.0, 0.0);
                let m: CMatrix = f.spectral_matrix(|_, z| if z == zero { one } else { one / z });
                let bound = norm_2(&m);
                (Some(m), bound)
            }
        };
        Ok(Self { op, e0, matrix, norm_bound })
    }

    /// Bound on `‖(A + E({0}))⁻¹‖`: `max(1, sup 1/|λ|)` for the diagonal model,
    /// the spectral norm of the inverse for the finite model.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn solve(&self, x: &FiniteVector) -> Result<ReducibleInverseReport, GapError> {
        let y = match (self.op, &self.matrix) {
            (ScalarOperator::Diagonal(d), _) => x.map_support(|k, v| {
                let l = d.eigenvalue(k);
                if l.is_zero() {
                    v.clone()
                } else {
                    v / &l
                }
            }),
            (ScalarOperator::Finite(f), Some(m)) => f.apply_matrix(m, x)?,
            (ScalarOperator::Finite(_), None) => unreachable!("finite inverse is prepared"),
        };
        let image = self.op.apply(&y)?.add(&self.e0.apply(&y)?);
        let residual = image.sub(x).norm(self.op.p());
        Ok(ReducibleInverseReport { y, inverse_norm_bound: self.norm_bound, residual })
    }
}

/// Solves `(A + E({0}))y = x`; see [`ReducibleInverse`].
pub fn reducible_inverse(op: ScalarOperator<'_>, x: &FiniteVector) -> Result<ReducibleInverseReport, GapError> {
    ReducibleInverse::new(op)?.solve(x)
}
