//! Seeded random ensembles used by tests, demos and the see-saw restarts.
//!
//! Everything takes an explicit `Rng`; there is no global generator.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{vector, ComplexMatrix, HermitianOperator, C64};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Entries i.i.d. standard complex Gaussian.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Uniform on the unit sphere of `C^n` (normalized Gaussian).
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        if let Some(u) = vector::normalized(&v) {
            return u;
        }
    }
}

/// `(G + G^†)/2` with Gaussian `G`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianOperator {
    HermitianOperator::symmetrized(gaussian_matrix(rng, n, n)).expect("square")
}

/// Random trace-one Hermitian operator `s(H - Tr H/n) + I/n` with `s` in `[0.05, 0.5]`.
///
/// The spread keeps a healthy fraction of samples indefinite for `n <= 9`.
pub fn trace_one_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianOperator {
    let h = hermitian(rng, n);
    let s = rng.random_range(0.05..0.5);
    let shift = h.trace() / n as f64;
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { 1.0 / n as f64 - s * shift } else { 0.0 };
        h.matrix()[(i, j)] * s + C64::new(diag, 0.0)
    });
    HermitianOperator::symmetrized(m).expect("square")
}

/// `G G^†` normalized to unit trace, `G` of size `n × k`.
pub fn density<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> HermitianOperator {
    let g = gaussian_matrix(rng, n, k);
    let p = &g * &g.adjoint();
    let t = p.trace().re;
    HermitianOperator::symmetrized(p.scale_real(1.0 / t)).expect("square")
}

/// Haar-random unitary via Gram–Schmidt on a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let g = gaussian_matrix(rng, n, n);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut v = g.column(j);
            for u in &cols {
                let p = vector::inner(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= p * y;
                }
            }
            match vector::normalized(&v) {
                Some(u) if vector::norm(&v) > 1e-8 => cols.push(u),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]);
        }
    }
}

/// `U diag(s) V^†` with singular values drawn uniformly from `range`, padded
/// with zeros to give the requested rank.
pub fn matrix_with_rank<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    rank: usize,
    range: core::ops::Range<f64>,
) -> ComplexMatrix {
    let u = unitary(rng, n);
    let v = unitary(rng, n);
    let s: Vec<f64> = (0..n)
        .map(|k| if k < rank { rng.random_range(range.clone()) } else { 0.0 })
        .collect();
    let d = ComplexMatrix::from_real_diagonal(&s);
    &(&u * &d) * &v.adjoint()
}
