//! Seeded generators for test vectors and sample points.

use num_complex::Complex64;
use rand::Rng;

use crate::vector::FiniteVector;

/// A random dyadic value `m/8` with `|m| ≤ 32`.
fn dyadic<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-32_i32..=32) as f64 / 8.0
}

pub fn random_scalar<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(dyadic(rng), dyadic(rng))
}

/// A nonzero finitely supported vector with at most `max_support` entries
/// among the indices `1..=max_index`.
pub fn random_vector<R: Rng>(rng: &mut R, max_index: u64, max_support: usize) -> FiniteVector {
    let max_index = max_index.max(1);
    loop {
        let size = rng.gen_range(1..=max_support.max(1));
        let entries: Vec<(u64, Complex64)> =
            (0..size).map(|_| (rng.gen_range(1..=max_index), random_scalar(rng))).collect();
        let x = FiniteVector::from_entries(entries).expect("indices start at 1");
        if !x.is_zero() {
            return x;
        }
    }
}

pub fn random_vectors<R: Rng>(rng: &mut R, count: usize, max_index: u64, max_support: usize) -> Vec<FiniteVector> {
    (0..count).map(|_| random_vector(rng, max_index, max_support)).collect()
}

/// A point of the square `[-r, r]²` on the grid of spacing `1/64`.
pub fn random_point<R: Rng>(rng: &mut R, r: f64) -> Complex64 {
    let steps = (r * 64.0).round().max(1.0) as i64;
    Complex64::new(rng.gen_range(-steps..=steps) as f64 / 64.0, rng.gen_range(-steps..=steps) as f64 / 64.0)
}
