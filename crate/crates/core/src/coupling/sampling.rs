//! Random test spaces and joint tables, both influence-free and signalling.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::Exp1;

use super::ProductState;
use crate::test_space::{TestSpace, DEFAULT_VERTEX_CAP};

/// IPF stops once every product-test sum is this close to 1.
pub const IPF_TARGET: f64 = 1e-13;
pub const IPF_ROUNDS: usize = 1000;

/// Random test space with `2..=max_outcomes` outcomes and `1..=max_tests`
/// tests that admits at least one state.
pub fn random_test_space<R: Rng + ?Sized>(rng: &mut R, max_outcomes: usize, max_tests: usize) -> TestSpace {
    loop {
        let n = rng.random_range(2..=max_outcomes.max(2));
        let k = rng.random_range(1..=max_tests.max(1));
        let mut tests: Vec<Vec<usize>> = (0..k)
            .map(|_| (0..n).filter(|_| rng.random_bool(0.5)).collect())
            .collect();
        // Every outcome joins at least one test.
        for i in 0..n {
            if !tests.iter().any(|t| t.contains(&i)) {
                let t = rng.random_range(0..k);
                tests[t].push(i);
            }
        }
        if tests.iter().any(Vec::is_empty) {
            continue;
        }
        for t in tests.iter_mut() {
            t.sort_unstable();
        }
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let ts = TestSpace::from_indices(labels, tests).expect("covering by construction");
        let poly = ts.weight_space_dimension(DEFAULT_VERTEX_CAP).expect("small space");
        if poly.vertex_count() > 0 {
            return ts;
        }
    }
}

fn dirichlet<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Random convex combination of the state-polytope vertices; `None` if there are no states.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, ts: &TestSpace) -> Option<Vec<f64>> {
    let vs = ts.weight_space_dimension(DEFAULT_VERTEX_CAP).ok()?.vertices;
    if vs.is_empty() {
        return None;
    }
    let w = dirichlet(rng, vs.len());
    let mut f = vec![0.0; ts.outcome_count()];
    for (v, c) in vs.iter().zip(w) {
        for (fi, vi) in f.iter_mut().zip(v) {
            *fi += c * vi;
        }
    }
    Some(f)
}

/// Mixture of `components` product states; influence-free by construction.
pub fn free_state<R: Rng + ?Sized>(
    rng: &mut R,
    alice: &TestSpace,
    bob: &TestSpace,
    components: usize,
) -> Option<ProductState> {
    let (nx, ny) = (alice.outcome_count(), bob.outcome_count());
    let mut table = vec![0.0; nx * ny];
    for c in dirichlet(rng, components.max(1)) {
        let mu = random_state(rng, alice)?;
        let nu = random_state(rng, bob)?;
        for x in 0..nx {
            for y in 0..ny {
                table[x * ny + y] += c * mu[x] * nu[y];
            }
        }
    }
    ProductState::new(alice.clone(), bob.clone(), table, 1e-12).ok()
}

/// Iterative proportional fitting from a random positive table, rescaling
/// each product block `E × F` to sum to 1. `None` if the fit does not reach
/// [`IPF_TARGET`] within [`IPF_ROUNDS`] rounds. The result is generically signalling.
pub fn ipf_state<R: Rng + ?Sized>(rng: &mut R, alice: &TestSpace, bob: &TestSpace) -> Option<ProductState> {
    let (nx, ny) = (alice.outcome_count(), bob.outcome_count());
    let mut table: Vec<f64> = (0..nx * ny).map(|_| rng.random_range(0.05..1.0)).collect();
    let blocks: Vec<Vec<usize>> = alice
        .tests()
        .iter()
        .flat_map(|e| {
            bob.tests()
                .iter()
                .map(move |f| e.iter().flat_map(|&x| f.iter().map(move |&y| x * ny + y)).collect())
        })
        .collect();
    for _ in 0..IPF_ROUNDS {
        for b in &blocks {
            let s: f64 = b.iter().map(|&k| table[k]).sum();
            if s <= 0.0 {
                return None;
            }
            for &k in b {
                table[k] /= s;
            }
        }
        let worst = blocks
            .iter()
            .map(|b| libm::fabs(b.iter().map(|&k| table[k]).sum::<f64>() - 1.0))
            .fold(0.0, f64::max);
        if worst <= IPF_TARGET {
            return ProductState::new(alice.clone(), bob.clone(), table, 1e-12).ok();
        }
    }
    None
}

/// The PR box on two binary tests per side: `ω(x_{s,i}, y_{t,j}) = 1/2` iff `i ⊕ j = s·t`.
///
/// Alice's outcomes are `x1, x2` (test 0) and `x3, x4` (test 1); Bob's are `y1..y4` likewise.
pub fn pr_box() -> ProductState {
    let alice = TestSpace::new(&["x1", "x2", "x3", "x4"], &[vec!["x1", "x2"], vec!["x3", "x4"]]).expect("valid");
    let bob = TestSpace::new(&["y1", "y2", "y3", "y4"], &[vec!["y1", "y2"], vec!["y3", "y4"]]).expect("valid");
    let mut table = vec![0.0; 16];
    for s in 0..2 {
        for i in 0..2 {
            for t in 0..2 {
                for j in 0..2 {
                    if (i ^ j) == (s & t) {
                        table[(2 * s + i) * 4 + 2 * t + j] = 0.5;
                    }
                }
            }
        }
    }
    ProductState::new(alice, bob, table, 1e-12).expect("PR box is a state")
}
