//! Four-party teleportation algebra on `A1 ⊗ A2 ⊗ B2 ⊗ B1`.
//!
//! Alice holds `A = A1 A2`, Bob holds `B = B2 B1`. Subsystem 1 is `(A1, B1)`
//! and subsystem 2 is `(A2, B2)`. An operator "on 1" is stored with its A1
//! factor first; one "on B" with its B2 factor first. Placements are realized
//! with [`permute_systems`](crate::linalg::permute_systems) only.

use alloc::vec;
use alloc::vec::Vec;

use crate::cones::{is_popt, PoptConfig};
use crate::linalg::{
    kron, partial_trace, permute_systems_matrix, swap_operator, BipartiteShape, ComplexMatrix, HermitianOperator,
    C64,
};
use crate::{Error, Result};

/// `Q = Σ_{e,f} |ee><ff|` on `C^n ⊗ C^n`.
pub fn unnormalized_q(n: usize) -> HermitianOperator {
    let m = ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        if r % (n + 1) == 0 && c % (n + 1) == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    HermitianOperator::new(m).expect("Q is Hermitian")
}

/// `T = Q / n`, the maximally entangled projector.
pub fn max_entangled(n: usize) -> HermitianOperator {
    unnormalized_q(n).scale(1.0 / n as f64)
}

/// Projector onto the antisymmetric subspace of `C^n ⊗ C^n`, `(I − S)/2`.
pub fn antisymmetric_projector(n: usize) -> HermitianOperator {
    HermitianOperator::identity(n * n).sub(&swap_operator(n)).scale(0.5)
}

/// `Q (|x><y| ⊗ |u><v|) Q`.
pub fn sandwich_lemma_check(n: usize, x: usize, y: usize, u: usize, v: usize) -> Result<HermitianOperator> {
    for i in [x, y, u, v] {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, bound: n });
        }
    }
    let q = unnormalized_q(n);
    let a = kron(&ComplexMatrix::unit(n, x, y), &ComplexMatrix::unit(n, u, v));
    let out = &(q.matrix() * &a) * q.matrix();
    HermitianOperator::new(out)
}

/// `V_{a,b} = X^a Z^b` at index `a·n + b`, with `X|k> = |k+1>` and `Z|k> = ω^k|k>`.
pub fn weyl_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            out.push(weyl(n, a, b));
        }
    }
    out
}

pub fn weyl(n: usize, a: usize, b: usize) -> ComplexMatrix {
    let tau = 2.0 * core::f64::consts::PI / n as f64;
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == (c + a) % n {
            let phase = tau * ((b * c) % n) as f64;
            C64::new(libm::cos(phase), libm::sin(phase))
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Bookkeeping for the factor order `(A1, A2, B2, B1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourPartyLayout {
    pub n: usize,
}

impl FourPartyLayout {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn shape(&self) -> BipartiteShape {
        BipartiteShape::new(vec![self.n; 4]).expect("n >= 1")
    }

    fn check(&self, op: &HermitianOperator) -> Result<()> {
        let d = self.n * self.n;
        if op.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: op.dim(),
            });
        }
        Ok(())
    }

    /// `W ⊗_12 X`: `W` on `(A1, B1)`, `X` on `(A2, B2)`.
    pub fn on_12(&self, w: &HermitianOperator, x: &HermitianOperator) -> Result<ComplexMatrix> {
        self.check(w)?;
        self.check(x)?;
        // kron(W, X) is ordered (A1, B1, A2, B2).
        permute_systems_matrix(&kron(w.matrix(), x.matrix()), &self.shape(), &[0, 2, 3, 1])
    }

    /// `X ⊗_AB Y`: `X` on `(A1, A2)`, `Y` on `(B2, B1)`.
    pub fn on_ab(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
        kron(x, y)
    }

    fn identity2(&self) -> ComplexMatrix {
        ComplexMatrix::identity(self.n * self.n)
    }
}

/// `α = Tr((T ⊗_AB 1)(W ⊗_12 T))`, from its definition.
pub fn alpha(w: &HermitianOperator, n: usize) -> Result<f64> {
    let layout = FourPartyLayout::new(n);
    let t = max_entangled(n);
    let x = layout.on_12(w, &t)?;
    let p = layout.on_ab(t.matrix(), &layout.identity2());
    Ok((&p * &x).trace().re)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PivotReport {
    /// `Tr((T ⊗ 1)(W ⊗_12 T))` (or the Bob-side analogue).
    pub alpha: f64,
    /// `c` minimizing `|lhs − c·product|_F`: the factor the data actually support.
    pub pivot_factor: f64,
    /// `|lhs − rhs|_F` with `rhs = α · product`.
    pub frobenius_gap: f64,
    pub lhs: HermitianOperator,
    pub rhs: HermitianOperator,
}

fn best_factor(lhs: &ComplexMatrix, product: &ComplexMatrix) -> f64 {
    let norm = product.frobenius_norm();
    let denom = norm * norm;
    if denom == 0.0 {
        return 0.0;
    }
    product.hs_inner(lhs).re / denom
}

fn sandwich(p: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    &(p * x) * p
}

fn report(alpha: f64, lhs: ComplexMatrix, product: ComplexMatrix) -> Result<PivotReport> {
    let pivot_factor = best_factor(&lhs, &product);
    let rhs = product.scale_real(alpha);
    let frobenius_gap = lhs.frobenius_distance(&rhs);
    Ok(PivotReport {
        alpha,
        pivot_factor,
        frobenius_gap,
        lhs: HermitianOperator::symmetrized(lhs)?,
        rhs: HermitianOperator::symmetrized(rhs)?,
    })
}

/// `(T ⊗_AB 1)(W ⊗_12 T)(T ⊗_AB 1)` against `α T ⊗_AB W`.
pub fn pivot_alice(w: &HermitianOperator, n: usize) -> Result<PivotReport> {
    let layout = FourPartyLayout::new(n);
    let t = max_entangled(n);
    let x = layout.on_12(w, &t)?;
    let p = layout.on_ab(t.matrix(), &layout.identity2());
    let alpha = (&p * &x).trace().re;
    let lhs = sandwich(&p, &x);
    report(alpha, lhs, layout.on_ab(t.matrix(), w.matrix()))
}

/// `(1 ⊗_AB T)(W ⊗_12 T)(1 ⊗_AB T)` against `α W ⊗_AB T`.
pub fn pivot_bob(w: &HermitianOperator, n: usize) -> Result<PivotReport> {
    let layout = FourPartyLayout::new(n);
    let t = max_entangled(n);
    let x = layout.on_12(w, &t)?;
    let p = layout.on_ab(&layout.identity2(), t.matrix());
    let alpha = (&p * &x).trace().re;
    let lhs = sandwich(&p, &x);
    report(alpha, lhs, layout.on_ab(w.matrix(), t.matrix()))
}

/// `T_V = (V ⊗ I) T (V^† ⊗ I)` on `(A1, A2)`.
pub fn bell_projector(n: usize, v: &ComplexMatrix) -> Result<HermitianOperator> {
    if v.rows() != n || v.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.rows(),
        });
    }
    let defect = v.unitarity_defect();
    if defect > 1e-10 {
        return Err(Error::NotUnitary { defect });
    }
    let vi = kron(v, &ComplexMatrix::identity(n));
    HermitianOperator::symmetrized(&(&vi * max_entangled(n).matrix()) * &vi.adjoint())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralPivot {
    pub alpha: f64,
    /// `Tr_A[(T_V ⊗ 1) · lhs]`, the operator left on `(B2, B1)`.
    pub bob_operator: HermitianOperator,
    /// `(V^t ⊗ I) W (V^* ⊗ I)`.
    pub expected: HermitianOperator,
    /// Scalar `c` best fitting `bob ≈ c·expected`; equals `α` for trace-one `W`.
    pub factor: f64,
    /// `|bob − c·expected|_F / |bob|_F`, the distance from proportionality.
    pub gap: f64,
    /// The same gap against `(V^† ⊗ I) W (V ⊗ I)`.
    pub adjoint_gap: f64,
    /// `|lhs − T ⊗ bob|_F / |lhs|_F`: Alice's residual taken to be `T`.
    pub alice_t_gap: f64,
    /// `|lhs − T_V ⊗ bob|_F / |lhs|_F`: Alice's residual taken to be `T_V`.
    pub alice_tv_gap: f64,
    /// `(T_V ⊗_AB 1)(W ⊗_12 T)(T_V ⊗_AB 1)`.
    pub lhs: HermitianOperator,
}

/// `(c, |a − c b|_F / |a|_F)` with `c` the least-squares factor.
fn proportional(a: &ComplexMatrix, b: &ComplexMatrix) -> (f64, f64) {
    let c = best_factor(a, b);
    (c, a.frobenius_distance(&b.scale_real(c)) / a.frobenius_norm().max(1e-300))
}

/// Pivot on the Bell outcome `T_V`, with the Bob-side operator extracted
/// rather than assumed and compared against both conjugation readings.
pub fn pivot_general(w: &HermitianOperator, n: usize, v: &ComplexMatrix) -> Result<GeneralPivot> {
    let layout = FourPartyLayout::new(n);
    let t = max_entangled(n);
    let tv = bell_projector(n, v)?;
    let x = layout.on_12(w, &t)?;
    let p = layout.on_ab(tv.matrix(), &layout.identity2());
    let alpha = (&p * &x).trace().re;
    let lhs = sandwich(&p, &x);

    // Tr over (A1, A2) after multiplying by the projector.
    let shape = BipartiteShape::bipartite(n * n, n * n);
    let bob = partial_trace(&HermitianOperator::symmetrized(&p * &lhs)?, &shape, 0)?;

    let vi = kron(v, &ComplexMatrix::identity(n));
    let expected = HermitianOperator::symmetrized(&(&vi.transpose() * w.matrix()) * &vi.conj())?;
    let adjoint = &(&vi.adjoint() * w.matrix()) * &vi;
    let (factor, gap) = proportional(bob.matrix(), expected.matrix());
    let (_, adjoint_gap) = proportional(bob.matrix(), &adjoint);
    let lhs_norm = lhs.frobenius_norm().max(1e-300);
    let alice_t_gap = lhs.frobenius_distance(&layout.on_ab(t.matrix(), bob.matrix())) / lhs_norm;
    let alice_tv_gap = lhs.frobenius_distance(&layout.on_ab(tv.matrix(), bob.matrix())) / lhs_norm;
    Ok(GeneralPivot {
        alpha,
        bob_operator: bob,
        expected,
        factor,
        gap,
        adjoint_gap,
        alice_t_gap,
        alice_tv_gap,
        lhs: HermitianOperator::symmetrized(lhs)?,
    })
}

/// `(lhs, rhs) = (Tr((T ⊗_AB B)(W ⊗_12 T)), α Tr(W B))` for trace-one `W`.
pub fn corollary_check(w: &HermitianOperator, b: &HermitianOperator, n: usize) -> Result<(f64, f64)> {
    let trace = w.trace();
    if (trace - 1.0).abs() > 1e-10 {
        return Err(Error::TraceViolation { trace });
    }
    let layout = FourPartyLayout::new(n);
    layout.check(b)?;
    let t = max_entangled(n);
    let x = layout.on_12(w, &t)?;
    let effect = layout.on_ab(t.matrix(), b.matrix());
    let lhs = (&effect * &x).trace().re;
    let rhs = alpha(w, n)? * w.trace_product(b);
    Ok((lhs, rhs))
}

/// B1 marginal of normalized `W ⊗_12 T`, and of the normalized post-pivot state.
pub fn b1_marginals(w: &HermitianOperator, n: usize) -> Result<(HermitianOperator, HermitianOperator)> {
    let layout = FourPartyLayout::new(n);
    let t = max_entangled(n);
    let shape = layout.shape();
    let reduce = |m: ComplexMatrix| -> Result<HermitianOperator> {
        let mut h = HermitianOperator::symmetrized(m)?;
        let tr = h.trace();
        h = h.scale(1.0 / tr);
        // Trace out A1, A2, B2 in turn; the factor indices shift as we go.
        let mut dims = shape.dims().to_vec();
        for _ in 0..3 {
            h = partial_trace(&h, &BipartiteShape::new(dims.clone())?, 0)?;
            dims.remove(0);
        }
        Ok(h)
    };
    let before = reduce(layout.on_12(w, &t)?)?;
    let after = reduce(pivot_alice(w, n)?.lhs.into_matrix())?;
    Ok((before, after))
}

/// One product test `T_V ⊗ B` evaluated on a four-party operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTestValue {
    /// Weyl index `a·n + b` of `V`.
    pub weyl_index: usize,
    /// Index into the Bob effect list (`0` antisymmetric, `1` symmetric, then basis projectors).
    pub effect_index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesideratumReport {
    pub n: usize,
    /// `W = S/n` is not PSD.
    pub w_psd: bool,
    /// `W = S/n` is certified POPT.
    pub w_popt_certified: bool,
    pub alpha: f64,
    /// Most negative product-test value on `W ⊗_12 T`, with its test.
    pub witness: ProductTestValue,
    /// `α Tr(W P_anti)` computed separately.
    pub predicted: f64,
    /// All product-test values on `W ⊗_12 T`.
    pub values: Vec<ProductTestValue>,
    /// Minimum over the same family with `T` replaced by `|00><00|`.
    pub product_state_min: f64,
}

fn bob_effects(n: usize) -> Vec<HermitianOperator> {
    let anti = antisymmetric_projector(n);
    let sym = HermitianOperator::identity(n * n).sub(&anti);
    let mut out = vec![anti, sym];
    for k in 0..n * n {
        out.push(HermitianOperator::from_real_diagonal(
            &(0..n * n).map(|i| if i == k { 1.0 } else { 0.0 }).collect::<Vec<_>>(),
        ));
    }
    out
}

/// Values `Tr((T_V ⊗_AB B) X)` over all Weyl `V` and the Bob effects.
pub fn product_test_values(x: &ComplexMatrix, n: usize) -> Result<Vec<ProductTestValue>> {
    let layout = FourPartyLayout::new(n);
    let effects = bob_effects(n);
    let mut out = Vec::new();
    for (k, v) in weyl_basis(n).iter().enumerate() {
        let tv = bell_projector(n, v)?;
        for (e, b) in effects.iter().enumerate() {
            let test = layout.on_ab(tv.matrix(), b.matrix());
            out.push(ProductTestValue {
                weyl_index: k,
                effect_index: e,
                value: test.hs_inner(x).re,
            });
        }
    }
    Ok(out)
}

/// The swap state `S/n` on subsystem 1 is POPT, `T` is a state on subsystem 2,
/// but their product takes negative values on product tests.
pub fn desideratum_violation_demo(n: usize, seed: u64) -> Result<DesideratumReport> {
    let w = swap_operator(n).scale(1.0 / n as f64);
    let layout = FourPartyLayout::new(n);
    let t = max_entangled(n);
    let popt = is_popt(&w, &BipartiteShape::bipartite(n, n), &PoptConfig::new(seed))?;
    let x = layout.on_12(&w, &t)?;
    let values = product_test_values(&x, n)?;
    let witness = values
        .iter()
        .fold(None::<&ProductTestValue>, |best, v| match best {
            Some(b) if b.value <= v.value => Some(b),
            _ => Some(v),
        })
        .expect("non-empty family")
        .clone();
    let a = alpha(&w, n)?;
    let predicted = a * w.trace_product(&antisymmetric_projector(n));

    let mut e0 = vec![0.0; n * n];
    e0[0] = 1.0;
    let product = HermitianOperator::from_real_diagonal(&e0);
    let xp = layout.on_12(&w, &product)?;
    let product_state_min = product_test_values(&xp, n)?
        .iter()
        .map(|v| v.value)
        .fold(f64::INFINITY, f64::min);

    Ok(DesideratumReport {
        n,
        w_psd: popt.psd,
        w_popt_certified: popt.verdict.is_member(),
        alpha: a,
        witness,
        predicted,
        values,
        product_state_min,
    })
}
