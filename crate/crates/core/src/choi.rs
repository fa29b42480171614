//! Linear maps stored as Choi operators, and the operator/state correspondence.
//!
//! Convention: `W_φ = Σ_ij |i><j| ⊗ φ(|i><j|)`, input factor first, so
//! `W_φ[(i,k),(j,l)] = φ(|i><j|)[k,l]`. The identity map has Choi operator
//! `Q = Σ |ii><jj|` and the transpose map has the swap `S`.
//!
//! For product vectors `<x y|W_φ|x y> = <y|φ(|x̄><x̄|)|y>`, where `x̄` is the
//! entrywise conjugate of `x`.

use alloc::vec;
use alloc::vec::Vec;

use crate::cones::{psd_verdict, ConeVerdict};
use crate::linalg::{
    partial_transpose, swap_operator, vector, BipartiteShape, ComplexMatrix, HermitianOperator, C64,
};
use crate::{Error, Result};

/// Tolerance on `|x| = 1` for evaluation vectors.
pub const UNIT_TOL: f64 = 1e-10;

/// A Hermiticity-preserving map `L(C^din) → L(C^dout)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapChoi {
    choi: HermitianOperator,
    din: usize,
    dout: usize,
}

impl LinearMapChoi {
    pub fn new(choi: HermitianOperator, din: usize, dout: usize) -> Result<Self> {
        if choi.dim() != din * dout {
            return Err(Error::DimensionMismatch {
                expected: din * dout,
                found: choi.dim(),
            });
        }
        Ok(Self { choi, din, dout })
    }

    /// The identity map; its Choi operator is the unnormalized `Q`.
    pub fn identity(n: usize) -> Self {
        Self::from_conjugation(&ComplexMatrix::identity(n))
    }

    /// Transposition in the standard basis; its Choi operator is the swap.
    pub fn transpose(n: usize) -> Self {
        Self {
            choi: swap_operator(n),
            din: n,
            dout: n,
        }
    }

    /// `φ_A : X ↦ A X A^†` for `A` of size `dout × din`.
    pub fn from_conjugation(a: &ComplexMatrix) -> Self {
        let (dout, din) = (a.rows(), a.cols());
        let v: Vec<C64> = (0..din * dout).map(|r| a[(r % dout, r / dout)]).collect();
        Self {
            choi: HermitianOperator::projector(&v),
            din,
            dout,
        }
    }

    /// Builds the Choi operator from the action on matrix units.
    pub fn from_action(din: usize, dout: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        let n = din * dout;
        let mut w = ComplexMatrix::zeros(n, n);
        for i in 0..din {
            for j in 0..din {
                let b = f(&ComplexMatrix::unit(din, i, j));
                if b.rows() != dout || b.cols() != dout {
                    return Err(Error::DimensionMismatch {
                        expected: dout,
                        found: b.rows(),
                    });
                }
                for k in 0..dout {
                    for l in 0..dout {
                        w[(i * dout + k, j * dout + l)] = b[(k, l)];
                    }
                }
            }
        }
        Self::new(HermitianOperator::new(w)?, din, dout)
    }

    pub fn choi(&self) -> &HermitianOperator {
        &self.choi
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn shape(&self) -> BipartiteShape {
        BipartiteShape::bipartite(self.din, self.dout)
    }

    /// `φ(X)[k,l] = Σ_ij X_ij W[(i,k),(j,l)]`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.din || x.cols() != self.din {
            return Err(Error::DimensionMismatch {
                expected: self.din,
                found: x.rows(),
            });
        }
        let (din, dout) = (self.din, self.dout);
        let w = self.choi.matrix();
        let mut out = ComplexMatrix::zeros(dout, dout);
        for i in 0..din {
            for j in 0..din {
                let xij = x[(i, j)];
                if xij == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..dout {
                    for l in 0..dout {
                        out[(k, l)] += xij * w[(i * dout + k, j * dout + l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearMapChoi) -> Result<Self> {
        if self.din != inner.dout {
            return Err(Error::DimensionMismatch {
                expected: self.din,
                found: inner.dout,
            });
        }
        Self::from_action(inner.din, self.dout, |x| {
            self.apply(&inner.apply(x).expect("sizes checked")).expect("sizes checked")
        })
    }

    /// `self ∘ σ_U` where `σ_U(X) = U (U^† X U)^t U^†` transposes in the basis `{U e_i}`.
    pub fn transpose_in_basis(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.din || u.cols() != self.din {
            return Err(Error::DimensionMismatch {
                expected: self.din,
                found: u.rows(),
            });
        }
        let defect = u.unitarity_defect();
        if defect > 1e-10 {
            return Err(Error::NotUnitary { defect });
        }
        let ud = u.adjoint();
        Self::from_action(self.din, self.dout, |x| {
            let inner = &(&ud * x) * u;
            let sigma = &(u * &inner.transpose()) * &ud;
            self.apply(&sigma).expect("sizes checked")
        })
    }

    /// The map with the output transposed, whose Choi operator is `W^Γ`.
    pub fn co_map(&self) -> Self {
        let choi = partial_transpose(&self.choi, &self.shape(), 1).expect("shape matches");
        Self {
            choi,
            din: self.din,
            dout: self.dout,
        }
    }

    /// Completely positive iff the Choi operator is PSD.
    pub fn is_cp(&self, tol: f64) -> ConeVerdict {
        psd_verdict(&self.choi, tol)
    }

    /// Co-CP iff the partially transposed Choi operator is PSD.
    pub fn is_co_cp(&self, tol: f64) -> ConeVerdict {
        psd_verdict(self.co_map().choi(), tol)
    }

    /// Kraus operators from the eigendecomposition of the Choi operator.
    pub fn hk_representation(&self, tol: f64) -> Result<KrausSet> {
        let e = self.choi.eig();
        let min = e.min_value();
        if min < -tol {
            return Err(Error::NotCompletelyPositive { min_eigenvalue: min });
        }
        let cutoff = 1e-14 * e.max_value().abs().max(1.0);
        let mut operators = Vec::new();
        for (k, &lam) in e.values.iter().enumerate() {
            if lam <= cutoff {
                continue;
            }
            let v = e.vector(k);
            let s = libm::sqrt(lam);
            let mut data: Vec<C64> = vec![C64::new(0.0, 0.0); self.dout * self.din];
            for i in 0..self.din {
                for r in 0..self.dout {
                    data[r * self.din + i] = v[i * self.dout + r] * s;
                }
            }
            vector::fix_phase(&mut data);
            operators.push(ComplexMatrix::new(self.dout, self.din, data).expect("sized"));
        }
        Ok(KrausSet {
            operators,
            din: self.din,
            dout: self.dout,
        })
    }

    /// `(Tr W_φ, Tr φ(I))`; always equal.
    pub fn trace_condition(&self) -> (f64, f64) {
        let phi_i = self.apply(&ComplexMatrix::identity(self.din)).expect("sized");
        (self.choi.trace(), phi_i.trace().re)
    }

    /// Largest deviation between `self` and `other` on the matrix-unit basis.
    pub fn action_distance(&self, other: &Self) -> f64 {
        if self.din != other.din || self.dout != other.dout {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.din {
            for j in 0..self.din {
                let e = ComplexMatrix::unit(self.din, i, j);
                let d = self.apply(&e).expect("sized").frobenius_distance(&other.apply(&e).expect("sized"));
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Kraus operators `A_k` (`dout × din`), ordered by descending Choi eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub operators: Vec<ComplexMatrix>,
    pub din: usize,
    pub dout: usize,
}

impl KrausSet {
    /// `Σ_k A_k X A_k^†`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.dout, self.dout);
        for a in &self.operators {
            out = &out + &(&a.matmul(x)? * &a.adjoint());
        }
        Ok(out)
    }

    pub fn to_map(&self) -> Result<LinearMapChoi> {
        LinearMapChoi::from_action(self.din, self.dout, |x| self.apply(x).expect("sized"))
    }

    /// Largest deviation from `m` on the matrix-unit basis.
    pub fn reconstruction_error(&self, m: &LinearMapChoi) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.din {
            for j in 0..self.din {
                let e = ComplexMatrix::unit(self.din, i, j);
                match (self.apply(&e), m.apply(&e)) {
                    (Ok(a), Ok(b)) => worst = worst.max(a.frobenius_distance(&b)),
                    _ => return f64::INFINITY,
                }
            }
        }
        worst
    }
}

fn require_unit(v: &[C64]) -> Result<()> {
    let n = vector::norm(v);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnitVector { norm: n });
    }
    Ok(())
}

/// `<x y|W|x y>` for unit vectors.
pub fn state_eval(w: &HermitianOperator, shape: &BipartiteShape, x: &[C64], y: &[C64]) -> Result<f64> {
    let dims = shape.dims();
    if dims.len() != 2 || x.len() != dims[0] || y.len() != dims[1] {
        return Err(Error::DimensionMismatch {
            expected: shape.total(),
            found: x.len() * y.len(),
        });
    }
    require_unit(x)?;
    require_unit(y)?;
    w.expectation(&vector::kron(x, y))
}

/// The fixed polarization family `{e_i, (e_i+e_j)/√2, (e_i+i e_j)/√2}`, `i < j`.
fn polarization_family(d: usize) -> Vec<Vec<C64>> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let mut fam: Vec<Vec<C64>> = (0..d).map(|i| vector::basis(d, i)).collect();
    for i in 0..d {
        for j in (i + 1)..d {
            let mut p = vec![C64::new(0.0, 0.0); d];
            p[i] = C64::new(h, 0.0);
            p[j] = C64::new(h, 0.0);
            fam.push(p.clone());
            p[j] = C64::new(0.0, h);
            fam.push(p);
        }
    }
    fam
}

/// Extra probes `(e_i - e_j)/√2`, `(e_i - i e_j)/√2` and the uniform vector,
/// used only to validate a reconstruction.
fn validation_family(d: usize) -> Vec<Vec<C64>> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let mut fam = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            let mut p = vec![C64::new(0.0, 0.0); d];
            p[i] = C64::new(h, 0.0);
            p[j] = C64::new(-h, 0.0);
            fam.push(p.clone());
            p[j] = C64::new(0.0, -h);
            fam.push(p);
        }
    }
    let u = 1.0 / libm::sqrt(d as f64);
    fam.push((0..d).map(|k| C64::new(u, u * k as f64 / d as f64)).collect());
    fam.into_iter().filter_map(|v| vector::normalized(&v)).collect()
}

/// Recovers the complex matrix `M` from the values `f(v) = <v|M|v>` on the
/// polarization family, assuming `M` Hermitian. `values` follows the family order.
fn polarize(d: usize, values: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(values[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = (values[i] + values[j]) / 2.0;
            let re = values[k] - avg;
            let im = avg - values[k + 1];
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
            k += 2;
        }
    }
    m
}

/// The Hermitian `W` with `<x y|W|x y> = eval(x, y)` on product unit vectors.
///
/// `eval` is sampled on the polarization family of each side. The result is
/// checked against fresh probes and rejected if the relative residual exceeds `tol`.
pub fn reconstruct_operator(
    eval: impl Fn(&[C64], &[C64]) -> f64,
    da: usize,
    db: usize,
    tol: f64,
) -> Result<HermitianOperator> {
    let fa = polarization_family(da);
    let fb = polarization_family(db);
    // M_y = (I ⊗ <y|) W (I ⊗ |y>) for each y in Bob's family.
    let m_y: Vec<ComplexMatrix> = fb
        .iter()
        .map(|y| {
            let vals: Vec<f64> = fa.iter().map(|x| eval(x, y)).collect();
            polarize(da, &vals)
        })
        .collect();
    let n = da * db;
    let mut w = ComplexMatrix::zeros(n, n);
    for a in 0..da {
        for b in 0..da {
            // <y|N_ab|y> = M_y[a,b]; real and imaginary parts are the quadratic
            // forms of the Hermitian and anti-Hermitian halves of N_ab.
            let re: Vec<f64> = m_y.iter().map(|m| m[(a, b)].re).collect();
            let im: Vec<f64> = m_y.iter().map(|m| m[(a, b)].im).collect();
            let h1 = polarize(db, &re);
            let h2 = polarize(db, &im);
            for k in 0..db {
                for l in 0..db {
                    w[(a * db + k, b * db + l)] = h1[(k, l)] + C64::new(0.0, 1.0) * h2[(k, l)];
                }
            }
        }
    }
    let w = HermitianOperator::symmetrized(w)?;

    let mut probes_a = fa.clone();
    probes_a.extend(validation_family(da));
    let mut probes_b = fb;
    probes_b.extend(validation_family(db));
    let mut residual: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for x in &probes_a {
        for y in &probes_b {
            let target = eval(x, y);
            let got = w.expectation(&vector::kron(x, y))?;
            scale = scale.max(target.abs());
            residual = residual.max((target - got).abs());
        }
    }
    if !(residual <= tol * scale) {
        return Err(Error::InconsistentEvaluator { residual });
    }
    Ok(w)
}

#[cfg(test)]
mod tests;
