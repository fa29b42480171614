//! The acceptance suite, shared by `influence selftest` and the `acceptance` test target.

use std::time::{Duration, Instant};

use influence_core::choi::{reconstruct_operator, state_eval, LinearMapChoi};
use influence_core::cones::{
    decomposable_sum_membership, extremality_probe, is_popt, popt_minimize, Certificate, ConeVerdict, DykstraConfig,
    ExtremalityConfig, ExtremalityVerdict, PoptConfig, SeesawConfig,
};
use influence_core::coupling::sampling::{free_state, ipf_state, random_test_space};
use influence_core::coupling::{backward_tests, forward_tests, fns_tests, Direction, ProductState, Side, DEFAULT_TWO_STAGE_CAP};
use influence_core::linalg::{swap_operator, vector, ComplexMatrix};
use influence_core::teleport::{
    antisymmetric_projector, corollary_check, pivot_alice, pivot_bob, pivot_general,
    sandwich_lemma_check, unnormalized_q, weyl_basis,
};
use influence_core::{random, BipartiteShape, HermitianOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub elapsed: Duration,
    pub limit: Duration,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {:<24} {:>8.3}s / {:>3}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn timed(id: u32, name: &'static str, limit_s: u64, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_s);
    let over = elapsed > limit;
    Outcome {
        id,
        name,
        passed: ok && !over,
        elapsed,
        limit,
        detail: if over { format!("{detail}; over time limit") } else { detail },
    }
}

fn two() -> BipartiteShape {
    BipartiteShape::bipartite(2, 2)
}

pub fn swap_dichotomy() -> (bool, String) {
    let s = swap_operator(2);
    let min_eig = s.min_eigenvalue();
    let floor = popt_minimize(&s, &two(), &SeesawConfig::new(SEED)).map(|r| r.min_value).unwrap_or(f64::NAN);
    let via_ppt = match is_popt(&s, &two(), &PoptConfig::new(SEED)) {
        Ok(v) => matches!(
            v.verdict,
            ConeVerdict::Member {
                certificate: Certificate::PartialTranspose { .. },
                ..
            }
        ),
        Err(_) => false,
    };
    let ok = (min_eig + 1.0).abs() <= 1e-9 && floor >= -1e-9 && via_ppt;
    (ok, format!("lambda_min(S) = {min_eig:.3e}, see-saw floor = {floor:.3e}, PPT certificate = {via_ppt}"))
}

pub fn pivot_identities() -> (bool, String) {
    let mut r = rng(2);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut summary = Vec::new();
    for n in [2usize, 3] {
        let mut alphas = Vec::new();
        for _ in 0..20 {
            let w = random::trace_one_hermitian(&mut r, n * n);
            let bound = 1e-9 * w.frobenius_norm().max(1.0);
            for rep in [pivot_alice(&w, n), pivot_bob(&w, n)] {
                match rep {
                    Ok(rep) => {
                        worst = worst.max(rep.frobenius_gap);
                        ok &= rep.frobenius_gap <= bound;
                        alphas.push(rep.alpha);
                    }
                    Err(_) => ok = false,
                }
            }
        }
        let spread = alphas.iter().map(|a| (a - alphas[0]).abs()).fold(0.0, f64::max);
        ok &= spread <= 1e-10;
        summary.push(format!("alpha(n={n}) = {:.12} (spread {spread:.1e})", alphas[0]));
    }
    (ok, format!("max gap {worst:.2e}; {}; alpha != 1", summary.join(", ")))
}

pub fn general_pivot() -> (bool, String) {
    let mut r = rng(3);
    let (mut worst, mut worst_adj, mut worst_tv): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut failing = 0;
    let mut total = 0;
    for n in [2usize, 3] {
        for _ in 0..5 {
            let w = random::trace_one_hermitian(&mut r, n * n);
            for v in weyl_basis(n) {
                total += 1;
                match pivot_general(&w, n, &v) {
                    Ok(g) => {
                        worst = worst.max(g.gap);
                        worst_adj = worst_adj.max(g.adjoint_gap);
                        worst_tv = worst_tv.max(g.alice_tv_gap);
                        if g.gap > 1e-9 {
                            failing += 1;
                        }
                    }
                    Err(_) => failing += 1,
                }
            }
        }
    }
    (
        failing == 0,
        format!(
            "V^t W V^*: {failing}/{total} over 1e-9 (max {worst:.2e}); V^† W V: max {worst_adj:.2e}; Alice keeps T_V: max {worst_tv:.2e}"
        ),
    )
}

pub fn corollary_witness() -> (bool, String) {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in [2usize, 3] {
        for _ in 0..10 {
            let w = random::trace_one_hermitian(&mut r, n * n);
            let b = random::density(&mut r, n * n, n * n).scale(r.random_range(0.5..3.0));
            match corollary_check(&w, &b, n) {
                Ok((l, rhs)) => worst = worst.max((l - rhs).abs()),
                Err(_) => ok = false,
            }
        }
    }
    let w = swap_operator(2).scale(0.5);
    let value = corollary_check(&w, &antisymmetric_projector(2), 2).map(|(l, _)| l).unwrap_or(f64::NAN);
    ok &= worst <= 1e-10 && value < -1e-6;
    (ok, format!("max |lhs - rhs| = {worst:.2e}; S/2 with antisymmetric effect = {value:.6}"))
}

/// The seeded ensemble for the equivalence and Bayes criteria.
pub fn equivalence_instances() -> Vec<ProductState> {
    let mut r = rng(5);
    let mut out = Vec::with_capacity(500);
    while out.len() < 500 {
        let a = random_test_space(&mut r, 6, 3);
        let b = random_test_space(&mut r, 6, 3);
        let s = if out.len() % 2 == 0 {
            let k = r.random_range(1..4);
            free_state(&mut r, &a, &b, k)
        } else {
            ipf_state(&mut r, &a, &b)
        };
        if let Some(s) = s {
            out.push(s);
        }
    }
    out
}

pub fn equivalence(instances: &[ProductState]) -> (bool, String) {
    let tol = 1e-10;
    let mut mismatches = 0;
    let mut free = 0;
    for s in instances {
        let (Ok(fwd), Ok(bwd), Ok(fns)) = (
            forward_tests(s.alice(), s.bob(), DEFAULT_TWO_STAGE_CAP),
            backward_tests(s.alice(), s.bob(), DEFAULT_TWO_STAGE_CAP),
            fns_tests(s.alice(), s.bob(), DEFAULT_TWO_STAGE_CAP),
        ) else {
            mismatches += 1;
            continue;
        };
        let no_ba = s.signalling(Direction::BobToAlice).deviation <= tol;
        let no_ab = s.signalling(Direction::AliceToBob).deviation <= tol;
        let is_free = s.is_influence_free(tol).is_free();
        free += usize::from(is_free);
        if s.is_state_on_two_stage(&fwd, tol) != no_ba
            || s.is_state_on_two_stage(&bwd, tol) != no_ab
            || s.is_state_on_two_stage(&fns, tol) != is_free
        {
            mismatches += 1;
        }
    }
    (
        mismatches == 0,
        format!("{} tables ({free} influence-free), {mismatches} mismatches", instances.len()),
    )
}

pub fn bayes(instances: &[ProductState]) -> (bool, String) {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut failed = false;
    for s in instances.iter().filter(|s| s.is_influence_free(s.tolerance()).is_free()) {
        checked += 1;
        for t in 0..s.alice().tests().len() {
            match s.bayes_mixture_check(t) {
                Ok(v) => worst = worst.max(v),
                Err(_) => failed = true,
            }
        }
        let wa = s.marginal(Side::Alice, 0).unwrap_or_default();
        let wb = s.marginal(Side::Bob, 0).unwrap_or_default();
        for a in 0..s.alice().outcome_count() {
            for b in 0..s.bob().outcome_count() {
                if wa[a] <= s.tolerance() || wb[b] <= s.tolerance() {
                    continue;
                }
                match s.operational_bayes_check(a, b) {
                    Ok(v) => worst = worst.max(v),
                    Err(_) => failed = true,
                }
            }
        }
    }
    (
        !failed && checked > 0 && worst <= 1e-12,
        format!("{checked} influence-free tables, max residual {worst:.2e}"),
    )
}

pub fn chk_theorem() -> (bool, String) {
    let mut r = rng(6);
    let mut agree = 0;
    let mut cp_count = 0;
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let din = r.random_range(2..4);
        let dout = r.random_range(2..4);
        let d = din * dout;
        let choi = match k % 3 {
            0 => random::hermitian(&mut r, d),
            1 => {
                let rank = r.random_range(1..=d);
                random::density(&mut r, d, rank).scale(din as f64)
            }
            _ => random::density(&mut r, d, d).sub(&HermitianOperator::identity(d).scale(r.random_range(0.0..0.2))),
        };
        let Ok(map) = LinearMapChoi::new(choi, din, dout) else { continue };
        let cp = map.is_cp(1e-9).is_member();
        let psd = map.choi().min_eigenvalue() >= -1e-9;
        let hk = match map.hk_representation(1e-9) {
            Ok(k) => {
                let e = k.reconstruction_error(&map);
                worst = worst.max(e);
                e <= 1e-10
            }
            Err(_) => false,
        };
        cp_count += usize::from(cp);
        if cp == psd && psd == hk {
            agree += 1;
        }
    }
    (
        agree == 50,
        format!("{agree}/50 agree ({cp_count} CP), max reconstruction error {worst:.2e}"),
    )
}

pub fn extremality() -> (bool, String) {
    let mut r = rng(7);
    let cfg = ExtremalityConfig::default();
    let mut rigid = 0;
    let mut split = 0;
    for k in 0..10 {
        let n = if k % 2 == 0 { 2 } else { 3 };
        let rank = r.random_range(2..=n);
        let a = random::matrix_with_rank(&mut r, n, rank, 0.3..1.0);
        if matches!(extremality_probe(&a, &cfg), Ok(v) if v.is_rigid()) {
            rigid += 1;
        }
    }
    for k in 0..10 {
        let n = if k % 2 == 0 { 2 } else { 3 };
        let a = random::matrix_with_rank(&mut r, n, 1, 0.3..1.0);
        if let Ok(ExtremalityVerdict::DecomposableNontrivially { eta, .. }) = extremality_probe(&a, &cfg) {
            let c = LinearMapChoi::from_conjugation(&a).choi().clone();
            let slack = cfg.feas_tol * c.trace().max(1.0);
            let co_cp = eta.is_co_cp(slack).is_member();
            let below = c.sub(eta.choi()).min_eigenvalue() >= -slack;
            let nonzero = eta.choi().trace() > 0.25 * c.trace();
            if co_cp && below && nonzero {
                split += 1;
            }
        }
    }
    (
        rigid == 10 && split == 10,
        format!("rank >= 2: {rigid}/10 rigid; rank 1: {split}/10 split with valid certificate"),
    )
}

pub fn two_qubit_completeness() -> (bool, String) {
    let mut r = rng(8);
    let cfg = DykstraConfig::default();
    let (mut agree, mut refuted, mut undecided) = (0, 0, 0);
    for k in 0..200u64 {
        let w = random::trace_one_hermitian(&mut r, 4);
        let Ok(s) = popt_minimize(&w, &two(), &SeesawConfig::new(SEED ^ k)) else { continue };
        let Ok(d) = decomposable_sum_membership(&w, &two(), &cfg) else { continue };
        let seesaw_refutes = s.min_value < -1e-9;
        match d.verdict {
            ConeVerdict::Inconclusive { .. } => undecided += 1,
            v => {
                refuted += usize::from(v.is_refuted());
                if v.is_refuted() == seesaw_refutes {
                    agree += 1;
                }
            }
        }
    }
    (
        agree + undecided == 200 && agree > 0,
        format!("{agree}/200 agree ({refuted} not POPT), {undecided} undecided"),
    )
}

pub fn reconstruction() -> (bool, String) {
    let mut r = rng(9);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for k in 0..20 {
        let d = if k % 2 == 0 { 2 } else { 3 };
        let w = random::trace_one_hermitian(&mut r, d * d);
        let shape = BipartiteShape::bipartite(d, d);
        match reconstruct_operator(|x, y| state_eval(&w, &shape, x, y).unwrap_or(f64::NAN), d, d, 1e-10) {
            Ok(got) => worst = worst.max(got.matrix().frobenius_distance(w.matrix())),
            Err(_) => ok = false,
        }
    }
    let mut swap_gap: f64 = 0.0;
    for d in [2usize, 3] {
        match reconstruct_operator(|x, y| vector::inner(x, y).norm_sqr(), d, d, 1e-10) {
            Ok(got) => swap_gap = swap_gap.max(got.matrix().frobenius_distance(swap_operator(d).matrix())),
            Err(_) => ok = false,
        }
    }
    ok &= worst <= 1e-8 && swap_gap <= 1e-8;
    (ok, format!("max roundtrip error {worst:.2e}; overlap evaluator vs S: {swap_gap:.2e}"))
}

pub fn sandwich_lemma() -> (bool, String) {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in [2usize, 3] {
        let q = unnormalized_q(n);
        let zero = ComplexMatrix::zeros(n * n, n * n);
        for x in 0..n {
            for y in 0..n {
                for u in 0..n {
                    for v in 0..n {
                        let want = if x == u && y == v { q.matrix() } else { &zero };
                        match sandwich_lemma_check(n, x, y, u, v) {
                            Ok(got) => worst = worst.max(got.matrix().frobenius_distance(want)),
                            Err(_) => ok = false,
                        }
                    }
                }
            }
        }
    }
    (ok && worst <= 1e-12, format!("97 index tuples, max gap {worst:.1e}"))
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<Outcome> {
    let mut out = vec![
        timed(1, "swap-dichotomy", 1, swap_dichotomy),
        timed(2, "pivot-identities", 10, pivot_identities),
        timed(3, "general-pivot", 30, general_pivot),
        timed(4, "corollary-witness", 1, corollary_witness),
    ];
    let mut instances = Vec::new();
    out.push(timed(5, "two-stage-equivalence", 10, || {
        instances = equivalence_instances();
        equivalence(&instances)
    }));
    out.push(timed(6, "choi-hellwig-kraus", 5, chk_theorem));
    out.push(timed(7, "extremality", 60, extremality));
    out.push(timed(8, "two-qubit-completeness", 60, two_qubit_completeness));
    out.push(timed(9, "product-reconstruction", 5, reconstruction));
    out.push(timed(10, "bayes-identities", 2, || bayes(&instances)));
    out.push(timed(11, "sandwich-lemma", 1, sandwich_lemma));
    out.sort_by_key(|o| o.id);
    out
}

