use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sampling::{free_state, ipf_state, pr_box, random_test_space};
use super::*;

fn space(labels: &[&str], tests: &[&[&str]]) -> TestSpace {
    let tests: Vec<Vec<&str>> = tests.iter().map(|t| t.to_vec()).collect();
    TestSpace::new(labels, &tests).unwrap()
}

/// Alice signals her test choice to Bob: `ω(x1,y1) = ω(x3,y2) = 1`.
fn signalling_table() -> ProductState {
    let a = space(&["x1", "x2", "x3", "x4"], &[&["x1", "x2"], &["x3", "x4"]]);
    let b = space(&["y1", "y2"], &[&["y1", "y2"]]);
    let rows = vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]];
    ProductState::from_rows(a, b, &rows, 1e-9).unwrap()
}

/// Brute-force two-stage outcome sets for one direction, by nested choice lists.
fn two_stage_oracle(init: &TestSpace, resp: &TestSpace, flip: bool) -> Vec<BTreeSet<Pair>> {
    let mut out = Vec::new();
    for e in init.tests() {
        let mut partial: Vec<BTreeSet<Pair>> = vec![BTreeSet::new()];
        for &x in e {
            let mut next = Vec::new();
            for p in &partial {
                for f in resp.tests() {
                    let mut q = p.clone();
                    for &y in f {
                        q.insert(if flip { (y, x) } else { (x, y) });
                    }
                    next.push(q);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

#[test]
fn cartesian_examples() {
    let a = space(&["x1", "x2", "x3"], &[&["x1", "x2"], &["x3"]]);
    let b = space(&["y1", "y2", "y3"], &[&["y1"], &["y2"], &["y3"]]);
    assert_eq!(cartesian_tests(&a, &b).len(), 6);
    assert_eq!(cartesian_tests(&a, &b)[0], vec![(0, 0), (1, 0)]);
    let one = cartesian_tests(&TestSpace::simplex(2), &TestSpace::simplex(3));
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].len(), 6);
}

#[test]
fn forward_counts_and_cartesian_subset() {
    let a = TestSpace::simplex(2);
    let b = space(&["y1", "y2", "y3"], &[&["y1", "y2"], &["y3"]]);
    let fwd = forward_tests(&a, &b, 1000).unwrap();
    assert_eq!(fwd.len(), 4);
    let constant: BTreeSet<Vec<Pair>> = fwd.iter().filter(|t| t.is_constant()).map(|t| t.outcomes().to_vec()).collect();
    let cart: BTreeSet<Vec<Pair>> = cartesian_tests(&a, &b).into_iter().collect();
    assert_eq!(constant, cart);

    let a = space(&["x1", "x2", "x3", "x4", "x5"], &[&["x1", "x2"], &["x3", "x4", "x5"]]);
    let fwd = forward_tests(&a, &b, 1000).unwrap();
    assert_eq!(fwd.len(), 12);
    let got: Vec<BTreeSet<Pair>> = fwd.iter().map(|t| t.outcomes().iter().copied().collect()).collect();
    assert_eq!(got, two_stage_oracle(&a, &b, false));
}

#[test]
fn fns_examples() {
    let single = fns_tests(&TestSpace::simplex(2), &TestSpace::simplex(2), 1000).unwrap();
    assert_eq!(single.len(), 1);

    let a = space(&["x1", "x2", "x3"], &[&["x1", "x2"], &["x2", "x3"]]);
    let b = space(&["y1", "y2", "y3"], &[&["y1", "y2"], &["y3"]]);
    let fns = fns_tests(&a, &b, 1000).unwrap();
    let mut oracle: BTreeSet<BTreeSet<Pair>> = two_stage_oracle(&a, &b, false).into_iter().collect();
    oracle.extend(two_stage_oracle(&b, &a, true));
    assert_eq!(fns.len(), oracle.len());
    let got: BTreeSet<BTreeSet<Pair>> = fns.iter().map(|t| t.outcomes().iter().copied().collect()).collect();
    assert_eq!(got, oracle);
    let all: BTreeSet<Vec<Pair>> = fns.iter().map(|t| t.outcomes().to_vec()).collect();
    for c in cartesian_tests(&a, &b) {
        assert!(all.contains(&c));
    }
}

#[test]
fn enumeration_cap() {
    let a = TestSpace::simplex(6);
    let b = space(&["y1", "y2", "y3"], &[&["y1"], &["y2"], &["y3"]]);
    assert_eq!(
        forward_tests(&a, &b, 100),
        Err(Error::CapExceeded { required: 729, cap: 100 })
    );
    assert!(matches!(fns_tests(&a, &b, 729), Err(Error::CapExceeded { required: 732, .. })));
}

#[test]
fn marginal_examples() {
    let a = space(&["x1", "x2", "x3"], &[&["x1", "x2"], &["x2", "x3"]]);
    let b = TestSpace::simplex(2);
    let mu = [0.25, 0.75, 0.25];
    let nu = [0.5, 0.5];
    let w = ProductState::product(a, b, &mu, &nu, 1e-12).unwrap();
    for e in 0..2 {
        assert_eq!(w.marginal(Side::Bob, e).unwrap(), nu.to_vec());
    }
    assert_eq!(w.marginal(Side::Bob, 2), Err(Error::UnknownTest(2)));

    let s = signalling_table();
    assert_eq!(s.marginal(Side::Bob, 0).unwrap(), vec![1.0, 0.0]);
    assert_eq!(s.marginal(Side::Bob, 1).unwrap(), vec![0.0, 1.0]);

    let pr = pr_box();
    for t in 0..2 {
        assert_eq!(pr.marginal(Side::Bob, t).unwrap(), vec![0.5; 4]);
        assert_eq!(pr.marginal(Side::Alice, t).unwrap(), vec![0.5; 4]);
    }
}

#[test]
fn influence_examples() {
    let w = ProductState::product(TestSpace::simplex(2), TestSpace::simplex(3), &[0.5, 0.5], &[0.2, 0.3, 0.5], 1e-12)
        .unwrap();
    assert!(w.is_influence_free(1e-12).is_free());

    match signalling_table().is_influence_free(1e-9) {
        InfluenceVerdict::Signalling(s) => {
            assert_eq!(s.direction, Direction::AliceToBob);
            assert_eq!(s.tests, (0, 1));
            assert_eq!(s.deviation, 1.0);
        }
        v => panic!("expected signalling, got {v:?}"),
    }

    // Oracle: the 8 no-signalling equalities of two binary tests per side.
    let pr = pr_box();
    for s in 0..2 {
        for i in 0..2 {
            let x = 2 * s + i;
            let via0 = pr.value(x, 0) + pr.value(x, 1);
            let via1 = pr.value(x, 2) + pr.value(x, 3);
            assert_eq!(via0, via1);
            let y = 2 * s + i;
            assert_eq!(pr.value(0, y) + pr.value(1, y), pr.value(2, y) + pr.value(3, y));
        }
    }
    assert!(pr.is_influence_free(1e-12).is_free());
}

#[test]
fn two_stage_examples() {
    let s = signalling_table();
    let (a, b) = (s.alice().clone(), s.bob().clone());
    // Alice signals to Bob, so Bob's marginal is not test independent, but
    // Alice's is: every Alice-first test still sums to 1.
    let fwd = forward_tests(&a, &b, 100).unwrap();
    assert_eq!(fwd.len(), 2);
    assert!(s.is_state_on_two_stage(&fwd, 1e-10));
    let bwd = backward_tests(&a, &b, 100).unwrap();
    assert_eq!(bwd.len(), 4);
    assert!(!s.is_state_on_two_stage(&bwd, 1e-10));
    let sums: Vec<f64> = bwd.iter().map(|t| s.sum_over(t.outcomes())).collect();
    assert_eq!(sums, vec![1.0, 2.0, 0.0, 1.0]);

    let pr = pr_box();
    let all = fns_tests(pr.alice(), pr.bob(), 1000).unwrap();
    assert!(pr.is_state_on_two_stage(&all, 1e-12));
}

#[test]
fn condition_examples() {
    let a = space(&["x1", "x2", "x3"], &[&["x1", "x2"], &["x2", "x3"]]);
    let mu = [0.25, 0.75, 0.25];
    let nu = [0.5, 0.5];
    let w = ProductState::product(a.clone(), TestSpace::simplex(2), &mu, &nu, 1e-12).unwrap();
    assert_eq!(w.condition(0).unwrap(), nu.to_vec());

    let pr = pr_box();
    assert_eq!(pr.condition(0).unwrap(), vec![1.0, 0.0, 1.0, 0.0]);
    assert_eq!(pr.condition(3).unwrap(), vec![0.0, 1.0, 1.0, 0.0]);

    let zero = ProductState::product(a, TestSpace::simplex(2), &[0.0, 1.0, 0.0], &nu, 1e-12).unwrap();
    assert!(matches!(zero.condition(0), Err(Error::ZeroProbability { outcome: 0, .. })));
    assert!(matches!(signalling_table().condition(0), Err(Error::NotInfluenceFree { .. })));
}

#[test]
fn bayes_examples() {
    let w = ProductState::product(TestSpace::simplex(2), TestSpace::simplex(2), &[0.25, 0.75], &[0.5, 0.5], 1e-12)
        .unwrap();
    assert_eq!(w.bayes_mixture_check(0).unwrap(), 0.0);
    assert_eq!(w.operational_bayes_check(1, 0).unwrap(), 0.0);
    let pr = pr_box();
    assert_eq!(pr.operational_bayes_check(0, 0).unwrap(), 0.0);
    assert!(pr.bayes_mixture_check(1).unwrap() <= 1e-15);
}

#[test]
fn construction_rejects_non_states() {
    let s = signalling_table();
    let mut t = s.table().to_vec();
    t[0] = 0.9;
    assert!(matches!(
        ProductState::new(s.alice().clone(), s.bob().clone(), t, 1e-9),
        Err(Error::NotAState { alice_test: 0, bob_test: 0, .. })
    ));
}

#[test]
fn ipf_generator_produces_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut signalling = 0;
    for _ in 0..40 {
        let a = random_test_space(&mut rng, 5, 3);
        let b = random_test_space(&mut rng, 5, 3);
        if let Some(w) = ipf_state(&mut rng, &a, &b) {
            for (e, ea) in a.tests().iter().enumerate() {
                for (f, fb) in b.tests().iter().enumerate() {
                    let s: f64 = ea.iter().flat_map(|&x| fb.iter().map(move |&y| (x, y))).map(|(x, y)| w.value(x, y)).sum();
                    assert!((s - 1.0).abs() <= 1e-12, "block ({e},{f}) sums to {s}");
                }
            }
            if !w.is_influence_free(1e-10).is_free() {
                signalling += 1;
            }
        }
    }
    assert!(signalling > 5, "only {signalling} signalling samples");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn free_states_condition_and_marginalize_to_states(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_test_space(&mut rng, 5, 3);
        let b = random_test_space(&mut rng, 5, 3);
        let w = free_state(&mut rng, &a, &b, 3).unwrap();
        prop_assert!(w.is_influence_free(1e-12).is_free());
        for t in 0..b.tests().len() {
            prop_assert!(a.is_state(&w.marginal(Side::Alice, t).unwrap(), 1e-12).unwrap());
        }
        for x in 0..a.outcome_count() {
            match w.condition(x) {
                Ok(c) => prop_assert!(b.is_state(&c, 1e-9).unwrap()),
                Err(Error::ZeroProbability { .. }) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }

    #[test]
    fn two_stage_equivalence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_test_space(&mut rng, 4, 3);
        let b = random_test_space(&mut rng, 4, 3);
        let w = if seed % 2 == 0 { free_state(&mut rng, &a, &b, 2) } else { ipf_state(&mut rng, &a, &b) };
        prop_assume!(w.is_some());
        let w = w.unwrap();
        let fwd = forward_tests(&a, &b, DEFAULT_TWO_STAGE_CAP).unwrap();
        let bwd = backward_tests(&a, &b, DEFAULT_TWO_STAGE_CAP).unwrap();
        let no_b_to_a = w.signalling(Direction::BobToAlice).deviation <= 1e-10;
        let no_a_to_b = w.signalling(Direction::AliceToBob).deviation <= 1e-10;
        prop_assert_eq!(w.is_state_on_two_stage(&fwd, 1e-10), no_b_to_a);
        prop_assert_eq!(w.is_state_on_two_stage(&bwd, 1e-10), no_a_to_b);
        let constant: Vec<TwoStageTest> = fwd.into_iter().filter(TwoStageTest::is_constant).collect();
        prop_assert!(w.is_state_on_two_stage(&constant, 1e-10));
    }
}
