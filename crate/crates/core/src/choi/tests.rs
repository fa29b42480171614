use super::*;
use crate::linalg::vector::basis;
use crate::random;
use crate::teleport::unnormalized_q;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `φ_A(X) = A X A^†` straight from the definition.
fn conj_oracle(a: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    &(a * x) * &a.adjoint()
}

#[test]
fn standard_choi_operators() {
    assert_eq!(LinearMapChoi::identity(2).choi(), &unnormalized_q(2));
    assert_eq!(LinearMapChoi::transpose(2).choi(), &swap_operator(2));
    let via_action = LinearMapChoi::from_action(3, 3, |x| x.transpose()).unwrap();
    assert!(via_action.choi().approx_eq(&swap_operator(3), 0.0));
}

#[test]
fn conjugation_blocks_and_rank() {
    let a = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.5), c(3.0, 0.0)]).unwrap();
    let phi = LinearMapChoi::from_conjugation(&a);
    // Block (i, j) is A |i><j| A^†.
    for i in 0..2 {
        for j in 0..2 {
            let block = conj_oracle(&a, &ComplexMatrix::unit(2, i, j));
            for k in 0..2 {
                for l in 0..2 {
                    assert!((phi.choi().matrix()[(i * 2 + k, j * 2 + l)] - block[(k, l)]).norm() < 1e-14);
                }
            }
        }
    }
    let e = phi.choi().eig();
    assert_eq!(e.values.iter().filter(|v| v.abs() > 1e-12).count(), 1);

    // Rectangular: 3 × 2.
    let mut r = rng(1);
    let a = random::gaussian_matrix(&mut r, 3, 2);
    let phi = LinearMapChoi::from_conjugation(&a);
    assert_eq!((phi.din(), phi.dout()), (2, 3));
    let x = random::hermitian(&mut r, 2);
    assert!(phi.apply(x.matrix()).unwrap().approx_eq(&conj_oracle(&a, x.matrix()), 1e-12));
}

#[test]
fn apply_examples() {
    let mut r = rng(2);
    let x = random::gaussian_matrix(&mut r, 3, 3);
    assert!(LinearMapChoi::identity(3).apply(&x).unwrap().approx_eq(&x, 1e-15));
    assert!(LinearMapChoi::transpose(3).apply(&x).unwrap().approx_eq(&x.transpose(), 1e-15));
    assert!(LinearMapChoi::identity(3).apply(&ComplexMatrix::identity(2)).is_err());
}

#[test]
fn compose_conjugations() {
    let mut r = rng(3);
    let a = random::gaussian_matrix(&mut r, 3, 3);
    let b = random::gaussian_matrix(&mut r, 3, 3);
    let ab = LinearMapChoi::from_conjugation(&a)
        .compose(&LinearMapChoi::from_conjugation(&b))
        .unwrap();
    let want = LinearMapChoi::from_conjugation(&(&a * &b));
    assert!(ab.choi().approx_eq(want.choi(), 1e-10));
    let rect = LinearMapChoi::from_conjugation(&random::gaussian_matrix(&mut r, 2, 3));
    assert!(rect.compose(&rect).is_err());
}

#[test]
fn transpose_in_basis() {
    let mut r = rng(4);
    let u = random::unitary(&mut r, 3);
    let id = LinearMapChoi::identity(3);
    let sigma = id.transpose_in_basis(&u).unwrap();
    // σ_U fixes U|i><j|U^† up to swapping i and j.
    for i in 0..3 {
        for j in 0..3 {
            let ui = u.column(i);
            let uj = u.column(j);
            let x = ComplexMatrix::outer(&ui, &uj);
            let y = ComplexMatrix::outer(&uj, &ui);
            assert!(sigma.apply(&x).unwrap().approx_eq(&y, 1e-12));
        }
    }
    // Standard basis recovers the plain transpose.
    let plain = id.transpose_in_basis(&ComplexMatrix::identity(3)).unwrap();
    assert!(plain.choi().approx_eq(&swap_operator(3), 1e-14));
    // It equals transposition after conjugating by conj(U) U^†.
    let v = &u.conj() * &u.adjoint();
    let alt = LinearMapChoi::transpose(3).compose(&LinearMapChoi::from_conjugation(&v)).unwrap();
    assert!(alt.choi().approx_eq(sigma.choi(), 1e-12));
    let bad = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 2.0]);
    assert!(matches!(id.transpose_in_basis(&bad), Err(Error::NotUnitary { .. })));
}

#[test]
fn cp_and_co_cp() {
    assert!(LinearMapChoi::identity(2).is_cp(1e-9).is_member());
    assert!(LinearMapChoi::identity(2).is_co_cp(1e-9).is_refuted());
    assert!(LinearMapChoi::transpose(2).is_cp(1e-9).is_refuted());
    assert!(LinearMapChoi::transpose(2).is_co_cp(1e-9).is_member());
    match LinearMapChoi::transpose(2).is_cp(1e-9) {
        ConeVerdict::Refuted { residual, .. } => assert!((residual + 1.0).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
    // Depolarizing is both.
    let dep = LinearMapChoi::new(HermitianOperator::identity(4), 2, 2).unwrap();
    assert!(dep.is_cp(1e-9).is_member() && dep.is_co_cp(1e-9).is_member());
}

#[test]
fn hk_examples() {
    let k = LinearMapChoi::identity(3).hk_representation(1e-9).unwrap();
    assert_eq!(k.operators.len(), 1);
    assert!(k.operators[0].approx_eq(&ComplexMatrix::identity(3), 1e-12));

    let a = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.5, 0.0), c(-1.0, 0.0)]).unwrap();
    let k = LinearMapChoi::from_conjugation(&a).hk_representation(1e-9).unwrap();
    assert_eq!(k.operators.len(), 1);
    assert!(k.operators[0].approx_eq(&a, 1e-12));

    // I on C^2 ⊗ C^2 is X ↦ Tr(X) I with four Kraus operators.
    let m = LinearMapChoi::new(HermitianOperator::identity(4), 2, 2).unwrap();
    let k = m.hk_representation(1e-9).unwrap();
    assert_eq!(k.operators.len(), 4);
    let mut r = rng(5);
    let x = random::gaussian_matrix(&mut r, 2, 2);
    let want = ComplexMatrix::identity(2).scale(x.trace());
    assert!(k.apply(&x).unwrap().approx_eq(&want, 1e-12));

    assert!(matches!(
        LinearMapChoi::transpose(2).hk_representation(1e-9),
        Err(Error::NotCompletelyPositive { .. })
    ));
}

#[test]
fn trace_condition_holds() {
    let mut r = rng(6);
    let m = LinearMapChoi::new(random::hermitian(&mut r, 6), 2, 3).unwrap();
    let (a, b) = m.trace_condition();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn state_eval_identity() {
    // <x y|W_φ|x y> = <y|φ(|x̄><x̄|)|y>.
    let mut r = rng(7);
    let m = LinearMapChoi::new(random::hermitian(&mut r, 6), 2, 3).unwrap();
    for _ in 0..10 {
        let x = random::unit_vector(&mut r, 2);
        let y = random::unit_vector(&mut r, 3);
        let xb: Vec<C64> = x.iter().map(|z| z.conj()).collect();
        let out = m.apply(&ComplexMatrix::outer(&xb, &xb)).unwrap();
        let want = out.sandwich(&y, &y).unwrap().re;
        let got = state_eval(m.choi(), &m.shape(), &x, &y).unwrap();
        assert!((got - want).abs() < 1e-12);
    }
    let s = swap_operator(2);
    let shape = BipartiteShape::bipartite(2, 2);
    assert!((state_eval(&s, &shape, &basis(2, 0), &basis(2, 1)).unwrap()).abs() < 1e-15);
    let not_unit = vec![c(1.0, 0.0), c(1.0, 0.0)];
    assert!(matches!(
        state_eval(&s, &shape, &not_unit, &basis(2, 0)),
        Err(Error::NotUnitVector { .. })
    ));
}

#[test]
fn reconstruct_examples() {
    let t = crate::teleport::max_entangled(2);
    let shape = BipartiteShape::bipartite(2, 2);
    let got = reconstruct_operator(|x, y| state_eval(&t, &shape, x, y).unwrap(), 2, 2, 1e-10).unwrap();
    assert!(got.approx_eq(&t, 1e-12));

    // |<x|y>|^2 comes from the swap.
    let got = reconstruct_operator(|x, y| vector::inner(x, y).norm_sqr(), 3, 3, 1e-10).unwrap();
    assert!(got.approx_eq(&swap_operator(3), 1e-12));

    let mut r = rng(8);
    let w = random::trace_one_hermitian(&mut r, 6);
    let shape = BipartiteShape::bipartite(3, 2);
    let got = reconstruct_operator(|x, y| state_eval(&w, &shape, x, y).unwrap(), 3, 2, 1e-10).unwrap();
    assert!(got.matrix().frobenius_distance(w.matrix()) <= 1e-10);

    // Not a quadratic form in x: fails validation.
    let bad = |x: &[C64], y: &[C64]| x[0].norm() + y[0].norm_sqr();
    assert!(matches!(
        reconstruct_operator(bad, 2, 2, 1e-10),
        Err(Error::InconsistentEvaluator { .. })
    ));
}

fn hermitian_strategy(n: usize) -> impl Strategy<Value = HermitianOperator> {
    any::<u64>().prop_map(move |s| random::hermitian(&mut rng(s), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn apply_preserves_hermiticity(w in hermitian_strategy(6), x in hermitian_strategy(2)) {
        let m = LinearMapChoi::new(w, 2, 3).unwrap();
        let y = m.apply(x.matrix()).unwrap();
        prop_assert!(y.approx_eq(&y.adjoint(), 1e-12));
    }

    #[test]
    fn from_action_inverts_apply(w in hermitian_strategy(4)) {
        let m = LinearMapChoi::new(w, 2, 2).unwrap();
        let back = LinearMapChoi::from_action(2, 2, |x| m.apply(x).unwrap()).unwrap();
        prop_assert!(back.choi().approx_eq(m.choi(), 1e-14));
    }

    #[test]
    fn cp_iff_kraus(w in hermitian_strategy(4), shift in 0.0f64..4.0) {
        let w = w.add(&HermitianOperator::identity(4).scale(shift));
        let m = LinearMapChoi::new(w, 2, 2).unwrap();
        let cp = m.is_cp(1e-9).is_member();
        match m.hk_representation(1e-9) {
            Ok(k) => {
                prop_assert!(cp);
                prop_assert!(k.reconstruction_error(&m) <= 1e-10);
            }
            Err(_) => prop_assert!(!cp),
        }
    }

    #[test]
    fn reconstruct_roundtrip(w in hermitian_strategy(9)) {
        let shape = BipartiteShape::bipartite(3, 3);
        let got = reconstruct_operator(|x, y| state_eval(&w, &shape, x, y).unwrap(), 3, 3, 1e-10).unwrap();
        prop_assert!(got.matrix().frobenius_distance(w.matrix()) <= 1e-8);
    }
}
