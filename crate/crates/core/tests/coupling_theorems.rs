use influence_core::coupling::sampling::{free_state, ipf_state, pr_box, random_test_space};
use influence_core::coupling::{backward_tests, forward_tests, Direction, DEFAULT_TWO_STAGE_CAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn two_stage_states_match_influence_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut signalling = 0;
    for _ in 0..120 {
        let a = random_test_space(&mut rng, 5, 3);
        let b = random_test_space(&mut rng, 5, 3);
        let omega = if rng.random_bool(0.5) {
            free_state(&mut rng, &a, &b, 3)
        } else {
            ipf_state(&mut rng, &a, &b)
        };
        let Some(omega) = omega else { continue };
        let fwd = forward_tests(&a, &b, DEFAULT_TWO_STAGE_CAP).unwrap();
        let bwd = backward_tests(&a, &b, DEFAULT_TWO_STAGE_CAP).unwrap();
        let no_ba = omega.signalling(Direction::BobToAlice).deviation <= 1e-10;
        let no_ab = omega.signalling(Direction::AliceToBob).deviation <= 1e-10;
        assert_eq!(omega.is_state_on_two_stage(&fwd, 1e-10), no_ba);
        assert_eq!(omega.is_state_on_two_stage(&bwd, 1e-10), no_ab);
        if !(no_ab && no_ba) {
            signalling += 1;
        }
    }
    assert!(signalling > 10);
}

#[test]
fn pr_box_is_free_and_bayes_consistent() {
    let pr = pr_box();
    assert!(pr.is_influence_free(1e-12).is_free());
    for t in 0..2 {
        assert!(pr.bayes_mixture_check(t).unwrap() <= 1e-12);
    }
    for a in 0..4 {
        for b in 0..4 {
            assert!(pr.operational_bayes_check(a, b).unwrap() <= 1e-12);
        }
    }
}
