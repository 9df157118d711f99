//! The spectral measure `δ ↦ E(δ)` of the scalar-type models.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::exact::QComplex;
use crate::models::{norm_2, CMatrix, DiagonalOperator, FiniteDiagonalizableOperator, ModelError, ScalarOperator};
use crate::region::BorelRegion;
use crate::vector::FiniteVector;

/// Largest number of distinct eigenvalues whose subsets are enumerated exhaustively.
const EXHAUSTIVE_SUBSETS: usize = 12;

/// A spectral projection `E(δ)`.
#[derive(Clone, Debug)]
pub enum Projection<'a> {
    /// Keeps the coordinates `k` with `λ(k) ∈ δ`.
    Diagonal { op: &'a DiagonalOperator, region: BorelRegion },
    /// `T·diag(χ_δ(λ_i))·T⁻¹`.
    Finite { op: &'a FiniteDiagonalizableOperator, matrix: CMatrix },
}

impl Projection<'_> {
    pub fn apply(&self, x: &FiniteVector) -> Result<FiniteVector, ModelError> {
        match self {
            Projection::Diagonal { op, region } => {
                Ok(x.map_support(|k, v| if region.contains_exact(&op.eigenvalue(k)) { v.clone() } else { QComplex::zero() }))
            }
            Projection::Finite { op, matrix } => op.apply_matrix(matrix, x),
        }
    }

    /// Coordinates among `1..=n` kept by a diagonal projection.
    pub fn kept_indices(&self, n: u64) -> Option<Vec<u64>> {
        match self {
            Projection::Diagonal { op, region } => {
                Some((1..=n).filter(|&k| region.contains_exact(&op.eigenvalue(k))).collect())
            }
            Projection::Finite { .. } => None,
        }
    }

    pub fn matrix(&self) -> Option<&CMatrix> {
        match self {
            Projection::Finite { matrix, .. } => Some(matrix),
            Projection::Diagonal { .. } => None,
        }
    }
}

pub fn spectral_projection<'a>(op: ScalarOperator<'a>, region: &BorelRegion) -> Projection<'a> {
    match op {
        ScalarOperator::Diagonal(op) => Projection::Diagonal { op, region: region.clone() },
        ScalarOperator::Finite(op) => {
            let matrix = op.spectral_matrix(|_, z| if region.contains(z) { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
            Projection::Finite { op, matrix }
        }
    }
}

/// `E(ℂ ∖ {0})`, which coincides with `E(σ(A) ∖ {0})`.
pub fn nonzero_region() -> BorelRegion {
    BorelRegion::complement(BorelRegion::Singleton(QComplex::zero()))
}

pub fn zero_region() -> BorelRegion {
    BorelRegion::Singleton(QComplex::zero())
}

/// Maximum deviations over the sample vectors; all are norms of differences.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MeasureAxiomReport {
    pub samples: usize,
    /// `‖E(∅)x‖`.
    pub empty: f64,
    /// `‖E(ℂ)x − x‖`.
    pub whole: f64,
    /// `‖E(δ)E(δ)x − E(δ)x‖`.
    pub idempotency: f64,
    /// `‖E(δ∩σ)x − E(δ)E(σ)x‖`.
    pub multiplicativity: f64,
    /// `‖E(δ)E(σ)x − E(σ)E(δ)x‖`.
    pub commutation: f64,
    /// `‖A E(δ)x − E(δ) A x‖`.
    pub operator_commutation: f64,
    /// `‖E((δ∖σ) ∪ σ)x − E(δ∖σ)x − E(σ)x‖`, on the disjoint pair `δ∖σ`, `σ`.
    pub additivity: f64,
}

impl MeasureAxiomReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.empty,
            self.whole,
            self.idempotency,
            self.multiplicativity,
            self.commutation,
            self.operator_commutation,
            self.additivity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn verify_measure_axioms(
    op: ScalarOperator<'_>,
    delta: &BorelRegion,
    sigma: &BorelRegion,
    samples: &[FiniteVector],
) -> Result<MeasureAxiomReport, ModelError> {
    let p = op.p();
    let e = |r: &BorelRegion| spectral_projection(op, r);
    let ed = e(delta);
    let es = e(sigma);
    let e_cap = e(&BorelRegion::intersection(delta.clone(), sigma.clone()));
    let e_empty = e(&BorelRegion::Empty);
    let e_whole = e(&BorelRegion::WholePlane);
    let diff = BorelRegion::difference(delta.clone(), sigma.clone());
    let e_diff = e(&diff);
    let e_union = e(&BorelRegion::union(diff, sigma.clone()));

    let mut r = MeasureAxiomReport { samples: samples.len(), ..Default::default() };
    let dev = |a: &FiniteVector, b: &FiniteVector| a.sub(b).norm(p);
    for x in samples {
        let dx = ed.apply(x)?;
        let sx = es.apply(x)?;
        let dsx = ed.apply(&sx)?;
        let sdx = es.apply(&dx)?;
        r.empty = r.empty.max(e_empty.apply(x)?.norm(p));
        r.whole = r.whole.max(dev(&e_whole.apply(x)?, x));
        r.idempotency = r.idempotency.max(dev(&ed.apply(&dx)?, &dx));
        r.multiplicativity = r.multiplicativity.max(dev(&e_cap.apply(x)?, &dsx));
        r.commutation = r.commutation.max(dev(&dsx, &sdx));
        r.operator_commutation = r.operator_commutation.max(dev(&op.apply(&dx)?, &ed.apply(&op.apply(x)?)?));
        let split = e_diff.apply(x)?.add(&sx);
        r.additivity = r.additivity.max(dev(&e_union.apply(x)?, &split));
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureBoundReport {
    pub sampled_regions: usize,
    /// Largest operator norm observed over the sampled regions.
    pub max_observed: f64,
    /// Model bound: `1` for the diagonal model, `‖T‖·‖T⁻¹‖` for the finite model.
    pub exact_bound: f64,
    /// True when every distinct spectral projection was enumerated, so that
    /// `max_observed` is the supremum itself.
    pub exhaustive: bool,
}

/// `sup_δ ‖E(δ)‖`. For the diagonal model every `E(δ)` is a coordinate
/// projection, of norm 0 or 1 on `ℓ_p`; the sampled regions are disks around
/// eigenvalues among the first `region_sample_count` indices. For the finite
/// model `E(δ)` depends only on which distinct eigenvalues lie in `δ`, so the
/// subsets of distinct eigenvalues are enumerated (or sampled when there are
/// too many) and the spectral norm of each projection is taken.
pub fn measure_bound<R: Rng>(op: ScalarOperator<'_>, region_sample_count: usize, rng: &mut R) -> MeasureBoundReport {
    let count = region_sample_count.max(1);
    match op {
        ScalarOperator::Diagonal(d) => {
            let mut max_observed: f64 = 0.0;
            for _ in 0..count {
                let k = rng.gen_range(1..=count as u64);
                let radius = rng.gen_range(0.0..1.0);
                let region = BorelRegion::closed_disk(d.eigenvalue(k).to_f64(), radius).expect("finite disk");
                let kept = spectral_projection(op, &region).kept_indices(count as u64).map_or(0, |v| v.len());
                max_observed = max_observed.max(if kept > 0 { 1.0 } else { 0.0 });
            }
            MeasureBoundReport { sampled_regions: count, max_observed, exact_bound: 1.0, exhaustive: false }
        }
        ScalarOperator::Finite(f) => {
            let distinct = f.distinct_eigenvalues();
            let k = distinct.len();
            let exhaustive = k <= EXHAUSTIVE_SUBSETS;
            let masks: Vec<u64> = if exhaustive {
                (0..1u64 << k).collect()
            } else {
                (0..count).map(|_| rng.gen_range(0..u64::MAX) & ((1u64 << k) - 1)).collect()
            };
            let mut max_observed: f64 = 0.0;
            for mask in &masks {
                let mut keep = vec![false; f.dimension()];
                for (bit, (_, positions)) in distinct.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        for &i in positions {
                            keep[i] = true;
                        }
                    }
                }
                let m = f.spectral_matrix(|i, _| if keep[i] { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
                max_observed = max_observed.max(norm_2(&m));
            }
            MeasureBoundReport { sampled_regions: masks.len(), max_observed, exact_bound: f.condition(), exhaustive }
        }
    }
}
