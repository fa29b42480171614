use influence_core::choi::{reconstruct_operator, state_eval, LinearMapChoi};
use influence_core::cones::{extremality_probe, is_popt, ConeVerdict, ExtremalityConfig, PoptConfig};
use influence_core::linalg::{partial_transpose, swap_operator};
use influence_core::teleport::{antisymmetric_projector, corollary_check, pivot_alice};
use influence_core::{random, BipartiteShape, HermitianOperator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn transpose_map_is_positive_but_not_cp() {
    let t = LinearMapChoi::transpose(2);
    let shape = t.shape();
    assert!(t.is_cp(1e-9).is_refuted());
    let popt = is_popt(t.choi(), &shape, &PoptConfig::new(5)).unwrap();
    assert!(popt.verdict.is_member());
    // The swap functional |<x|y>|^2 on product vectors is what the POPT operator encodes.
    let back = reconstruct_operator(|x, y| state_eval(t.choi(), &shape, x, y).unwrap(), 2, 2, 1e-10).unwrap();
    assert!(back.approx_eq(&swap_operator(2), 1e-12));
}

#[test]
fn popt_swap_breaks_under_teleportation() {
    let w = swap_operator(2).scale(0.5);
    let (lhs, rhs) = corollary_check(&w, &antisymmetric_projector(2), 2).unwrap();
    let alpha = pivot_alice(&w, 2).unwrap().alpha;
    assert!((lhs - rhs).abs() <= 1e-10);
    assert!((lhs + alpha / 2.0).abs() <= 1e-12 && lhs < -1e-6);
}

#[test]
fn kraus_roundtrip_of_random_channel() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let choi = random::density(&mut rng, 6, 3).scale(2.0);
    let m = LinearMapChoi::new(choi, 2, 3).unwrap();
    let k = m.hk_representation(1e-9).unwrap();
    assert_eq!(k.operators.len(), 3);
    assert!(k.reconstruction_error(&m) <= 1e-10);
    assert!(k.to_map().unwrap().choi().approx_eq(m.choi(), 1e-10));
}

#[test]
fn extremality_splits_exactly_the_rank_one_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let cfg = ExtremalityConfig::default();
    for n in [2usize, 3] {
        let a = random::matrix_with_rank(&mut rng, n, 1, 0.3..1.0);
        assert!(!extremality_probe(&a, &cfg).unwrap().is_rigid());
        let a = random::matrix_with_rank(&mut rng, n, 2, 0.3..1.0);
        assert!(extremality_probe(&a, &cfg).unwrap().is_rigid());
    }
}

#[test]
fn mixtures_of_q_and_swap_are_popt() {
    // Mixtures of Q and S: p Q/2 + (1 − p) S/2 is POPT for every p in [0, 1].
    let shape = BipartiteShape::bipartite(2, 2);
    let q = partial_transpose(&swap_operator(2), &shape, 1).unwrap();
    for k in 0..=4 {
        let p = k as f64 / 4.0;
        let w: HermitianOperator = q.scale(p / 2.0).add(&swap_operator(2).scale((1.0 - p) / 2.0));
        let v = is_popt(&w, &shape, &PoptConfig::new(9)).unwrap();
        assert!(matches!(v.verdict, ConeVerdict::Member { .. }), "p = {p}");
    }
}
