//! Dense complex linear algebra shared by every other module.

mod eig;
mod matrix;
pub mod real;
pub mod vector;

use alloc::vec;
use alloc::vec::Vec;

pub use eig::HermitianEigen;
pub use matrix::{kron, ComplexMatrix};

use crate::{Error, Result};

pub type C64 = num_complex::Complex<f64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Relative admission threshold for [`HermitianOperator::new`].
pub const HERMITIAN_ADMISSION: f64 = 1e-9;

/// A square matrix that equals its own conjugate transpose exactly.
///
/// Construction symmetrizes `(M + M^†)/2` and records the Frobenius norm of the
/// discarded anti-Hermitian part.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    defect: f64,
}

impl HermitianOperator {
    /// Admits `m` if its defect is below `1e-9 · |m|_F`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_threshold(m, HERMITIAN_ADMISSION)
    }

    pub fn with_threshold(m: ComplexMatrix, relative: f64) -> Result<Self> {
        let h = Self::symmetrized(m)?;
        let threshold = relative * h.matrix.frobenius_norm().max(h.defect);
        if h.defect > threshold {
            return Err(Error::NotHermitian {
                defect: h.defect,
                threshold,
            });
        }
        Ok(h)
    }

    /// Symmetrizes without a threshold check. Used internally for results of
    /// operations that preserve Hermiticity up to rounding.
    pub fn symmetrized(m: ComplexMatrix) -> Result<Self> {
        let n = m.require_square()?;
        let mut out = ComplexMatrix::zeros(n, n);
        let mut defect2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = m[(i, j)];
                let b = m[(j, i)].conj();
                out[(i, j)] = (a + b) * 0.5;
                defect2 += ((a - b) * 0.5).norm_sqr();
            }
        }
        Ok(Self {
            matrix: out,
            defect: libm::sqrt(defect2),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n),
            defect: 0.0,
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diagonal(diag),
            defect: 0.0,
        }
    }

    /// Projector `|v><v|` (not normalized).
    pub fn projector(v: &[C64]) -> Self {
        // outer(v, v) is Hermitian entrywise up to the exact conj symmetry.
        Self::symmetrized(ComplexMatrix::outer(v, v)).expect("outer product is square")
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    pub fn eig(&self) -> HermitianEigen {
        eig::jacobi(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().min_value()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale_real(s),
            defect: self.defect * libm::fabs(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
            defect: 0.0,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix - &other.matrix,
            defect: 0.0,
        }
    }

    /// Real expectation `<v|H|v>`.
    pub fn expectation(&self, v: &[C64]) -> Result<f64> {
        Ok(self.matrix.sandwich(v, v)?.re)
    }

    /// `Tr(self · other)` for Hermitian operands (real).
    pub fn trace_product(&self, other: &Self) -> f64 {
        // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
        self.matrix.hs_inner(&other.matrix).re
    }

    /// Projection onto the PSD cone (negative eigenvalues clipped to zero).
    pub fn psd_part(&self) -> Self {
        let e = self.eig();
        Self::symmetrized(e.reconstruct_with(|l| l.max(0.0))).expect("square")
    }

    /// Frobenius norm of the negative spectral part, i.e. the distance to the PSD cone.
    pub fn psd_distance(&self) -> f64 {
        let e = self.eig();
        libm::sqrt(e.values.iter().filter(|&&l| l < 0.0).map(|l| l * l).sum())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.matrix.approx_eq(&other.matrix, tol)
    }
}

impl AsRef<ComplexMatrix> for HermitianOperator {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Ordered tensor-factor dimensions of a composite system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipartiteShape {
    dims: Vec<usize>,
}

impl BipartiteShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidShape);
        }
        Ok(Self { dims })
    }

    pub fn bipartite(da: usize, db: usize) -> Self {
        Self::new(vec![da, db]).expect("dimensions must be positive")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        let n = m.require_square()?;
        if n != self.total() {
            return Err(Error::DimensionMismatch {
                expected: self.total(),
                found: n,
            });
        }
        Ok(())
    }

    fn check_factor(&self, factor: usize) -> Result<()> {
        if factor >= self.dims.len() {
            return Err(Error::FactorOutOfRange {
                factor,
                factors: self.dims.len(),
            });
        }
        Ok(())
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.dims[k + 1];
        }
        s
    }

    fn digits(&self, mut index: usize, out: &mut [usize]) {
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
    }
}

/// Transposes the indices of `factor`.
pub fn partial_transpose_matrix(
    m: &ComplexMatrix,
    shape: &BipartiteShape,
    factor: usize,
) -> Result<ComplexMatrix> {
    shape.check(m)?;
    shape.check_factor(factor)?;
    let n = shape.total();
    let stride = shape.strides()[factor];
    let d = shape.dims[factor];
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let rf = (r / stride) % d;
        let cf = (c / stride) % d;
        let r2 = r - rf * stride + cf * stride;
        let c2 = c - cf * stride + rf * stride;
        m[(r2, c2)]
    }))
}

pub fn partial_transpose(
    w: &HermitianOperator,
    shape: &BipartiteShape,
    factor: usize,
) -> Result<HermitianOperator> {
    HermitianOperator::symmetrized(partial_transpose_matrix(w.matrix(), shape, factor)?)
}

/// Traces out `factor`; the result lives on the remaining factors in order.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    shape: &BipartiteShape,
    factor: usize,
) -> Result<ComplexMatrix> {
    shape.check(m)?;
    shape.check_factor(factor)?;
    let stride = shape.strides()[factor];
    let d = shape.dims[factor];
    let n_out = shape.total() / d;
    // Index in the reduced system -> index in the full system with the traced digit 0.
    let lift = |i: usize| {
        let high = i / stride;
        let low = i % stride;
        high * stride * d + low
    };
    Ok(ComplexMatrix::from_fn(n_out, n_out, |r, c| {
        let (r0, c0) = (lift(r), lift(c));
        (0..d).map(|t| m[(r0 + t * stride, c0 + t * stride)]).sum()
    }))
}

pub fn partial_trace(
    w: &HermitianOperator,
    shape: &BipartiteShape,
    factor: usize,
) -> Result<HermitianOperator> {
    HermitianOperator::symmetrized(partial_trace_matrix(w.matrix(), shape, factor)?)
}

/// Reorders tensor factors: factor `k` of the output is factor `perm[k]` of
/// the input. For product operators `permute(A⊗B, [1, 0]) = B⊗A`.
pub fn permute_systems_matrix(
    m: &ComplexMatrix,
    shape: &BipartiteShape,
    perm: &[usize],
) -> Result<ComplexMatrix> {
    shape.check(m)?;
    let k = shape.factors();
    if perm.len() != k {
        return Err(Error::InvalidPermutation);
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || seen[p] {
            return Err(Error::InvalidPermutation);
        }
        seen[p] = true;
    }
    let new_shape = BipartiteShape {
        dims: perm.iter().map(|&p| shape.dims[p]).collect(),
    };
    let old_strides = shape.strides();
    let n = shape.total();
    // Map each output index to its source index once.
    let mut digits = vec![0; k];
    let source: Vec<usize> = (0..n)
        .map(|i| {
            new_shape.digits(i, &mut digits);
            digits
                .iter()
                .enumerate()
                .map(|(pos, &dgt)| dgt * old_strides[perm[pos]])
                .sum()
        })
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |r, c| m[(source[r], source[c])]))
}

pub fn permute_systems(
    w: &HermitianOperator,
    shape: &BipartiteShape,
    perm: &[usize],
) -> Result<HermitianOperator> {
    HermitianOperator::symmetrized(permute_systems_matrix(w.matrix(), shape, perm)?)
}

/// Inverse of a permutation given as `perm[k] = old factor at position k`.
pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// Swap operator `S|x>|y> = |y>|x>` on `C^n ⊗ C^n`.
pub fn swap_operator(n: usize) -> HermitianOperator {
    let m = ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        let (i, j) = (r / n, r % n);
        if c == j * n + i {
            ONE
        } else {
            ZERO
        }
    });
    HermitianOperator { matrix: m, defect: 0.0 }
}
