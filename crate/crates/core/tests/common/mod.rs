//! Independent oracles: dense complex row reduction written out by hand, and
//! seeded generators for test models.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

pub type Mat = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { re(1.0) } else { re(0.0) }).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

pub fn matvec(a: &Mat, x: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

pub fn shift(a: &Mat, lambda: Complex64) -> Mat {
    let mut out = a.clone();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    out
}

pub fn max_entry_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Reduced row echelon form with partial pivoting; entries below `tol` count as zero.
pub fn rref(a: &Mat, tol: f64) -> (Mat, Vec<usize>) {
    let mut m = a.clone();
    let (rows, cols) = (m.len(), m[0].len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let (best, size) = (r..rows).map(|i| (i, m[i][col].norm())).fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if size <= tol {
            for row in m.iter_mut().skip(r) {
                row[col] = re(0.0);
            }
            continue;
        }
        m.swap(r, best);
        let p = m[r][col];
        for x in m[r].iter_mut() {
            *x /= p;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            let f = row[col];
            if i != r && f != re(0.0) {
                for (x, v) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &Mat, tol: f64) -> usize {
    rref(a, tol).1.len()
}

/// Basis of the null space, one vector per free column.
pub fn null_space(a: &Mat, tol: f64) -> Vec<Vec<Complex64>> {
    let (r, pivots) = rref(a, tol);
    let cols = a[0].len();
    (0..cols)
        .filter(|j| !pivots.contains(j))
        .map(|free| {
            let mut v = vec![re(0.0); cols];
            v[free] = re(1.0);
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[row][free];
            }
            v
        })
        .collect()
}

/// Pivot columns of `a`, a basis of its column space.
pub fn column_space(a: &Mat, tol: f64) -> Vec<Vec<Complex64>> {
    let (_, pivots) = rref(a, tol);
    pivots.iter().map(|&j| a.iter().map(|row| row[j]).collect()).collect()
}

/// Gauss-Jordan inverse; `None` when singular.
pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let aug: Mat = a.iter().zip(identity(n)).map(|(row, id)| row.iter().copied().chain(id).collect()).collect();
    let (r, pivots) = rref(&aug, 1e-13);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Projection onto `span(kernel)` along `span(range)`, from the basis `[kernel | range]`.
pub fn projector_along(kernel: &[Vec<Complex64>], range: &[Vec<Complex64>]) -> Option<Mat> {
    let n = kernel.first().or(range.first())?.len();
    if kernel.len() + range.len() != n {
        return None;
    }
    let columns: Vec<&Vec<Complex64>> = kernel.iter().chain(range).collect();
    let b: Mat = (0..n).map(|i| columns.iter().map(|col| col[i]).collect()).collect();
    let b_inv = inverse(&b)?;
    let keep: Mat = (0..n)
        .map(|i| (0..n).map(|j| if i == j && i < kernel.len() { re(1.0) } else { re(0.0) }).collect())
        .collect();
    Some(matmul(&matmul(&b, &keep), &b_inv))
}

/// Riesz projector onto the `lambda` eigenspace of a diagonalizable matrix,
/// from the null space and column space of `A − λI`.
pub fn brute_force_projector(a: &Mat, lambda: Complex64) -> Option<Mat> {
    let s = shift(a, lambda);
    let scale = a.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    projector_along(&null_space(&s, tol), &column_space(&s, tol))
}

/// Dyadic scalar `m/4` with `|m| ≤ 12`.
pub fn dyadic<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-12_i32..=12) as f64 / 4.0
}

/// Eigenvalues with deliberate repeats and a zero with probability 1/2.
pub fn random_eigenvalues<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let mut eigs: Vec<Complex64> = Vec::with_capacity(dim);
    for i in 0..dim {
        if i > 0 && rng.gen_bool(0.25) {
            let j = rng.gen_range(0..i);
            eigs.push(eigs[j]);
        } else {
            let im = if rng.gen_bool(0.3) { dyadic(rng) } else { 0.0 };
            eigs.push(c(dyadic(rng), im));
        }
    }
    if rng.gen_bool(0.5) {
        eigs[0] = re(0.0);
    }
    eigs
}

/// `I + N` with small dyadic entries, well conditioned by construction.
pub fn random_similarity<R: Rng>(rng: &mut R, dim: usize) -> Mat {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let off = if rng.gen_bool(0.5) { rng.gen_range(-4_i32..=4) as f64 / 16.0 } else { 0.0 };
                    if i == j { re(1.0 + off.abs()) } else { c(off, if rng.gen_bool(0.2) { off / 2.0 } else { 0.0 }) }
                })
                .collect()
        })
        .collect()
}

/// A diagonal tail from the grammar together with its limit, if finite.
pub struct TailCase {
    pub expr: String,
    pub limit: Option<Complex64>,
}

fn rational<R: Rng>(rng: &mut R, nonzero: bool) -> (String, f64) {
    loop {
        let num = rng.gen_range(-6_i32..=6);
        let den = rng.gen_range(1_i32..=4);
        if nonzero && num == 0 {
            continue;
        }
        return (format!("{num}/{den}"), num as f64 / den as f64);
    }
}

pub fn random_tail<R: Rng>(rng: &mut R) -> TailCase {
    let (c_src, c_val) = rational(rng, false);
    let (q_src, _) = rational(rng, true);
    let k = rng.gen_range(1..=3);
    match rng.gen_range(0..5) {
        0 => TailCase { expr: format!("({c_src}) + ({q_src})/n^{k}"), limit: Some(re(c_val)) },
        1 => TailCase { expr: format!("({c_src}) + ({q_src})*i/n^{k}"), limit: Some(re(c_val)) },
        2 => TailCase { expr: format!("({c_src}) + ({q_src})*n^{k}"), limit: None },
        3 => {
            let (a_src, a_val) = rational(rng, true);
            let b = rng.gen_range(1..=5);
            TailCase { expr: format!("(({a_src})*n + 1)/(n + {b})"), limit: Some(re(a_val)) }
        }
        _ => TailCase { expr: c_src, limit: None },
    }
}

pub fn random_prepend<R: Rng>(rng: &mut R) -> Vec<Complex64> {
    let len = rng.gen_range(0..=3);
    (0..len).map(|_| if rng.gen_bool(0.3) { re(0.0) } else { c(dyadic(rng), if rng.gen_bool(0.3) { dyadic(rng) } else { 0.0 }) }).collect()
}
