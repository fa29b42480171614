//! Products of two test spaces, influence-freedom, conditioning and the Bayes identities.
//!
//! A joint table is stored row-major: entry `(x, y)` lives at `x * |Y| + y`.

pub mod sampling;

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::test_space::TestSpace;
use crate::{Error, Result};

/// A joint outcome `(x, y)` by outcome positions.
pub type Pair = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Alice,
    Bob,
}

/// A table on `X × Y` that is a state on the Cartesian product tests.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    alice: TestSpace,
    bob: TestSpace,
    table: Vec<f64>,
    tolerance: f64,
}

impl ProductState {
    pub fn new(alice: TestSpace, bob: TestSpace, table: Vec<f64>, tolerance: f64) -> Result<Self> {
        let (nx, ny) = (alice.outcome_count(), bob.outcome_count());
        if table.len() != nx * ny {
            return Err(Error::TableLength {
                expected: nx * ny,
                found: table.len(),
            });
        }
        if let Some(k) = table.iter().position(|v| !(-tolerance..=1.0 + tolerance).contains(v)) {
            return Err(Error::ValueOutOfRange {
                outcome: alloc::format!("({}, {})", alice.label(k / ny), bob.label(k % ny)),
                value: table[k],
            });
        }
        let s = Self {
            alice,
            bob,
            table,
            tolerance,
        };
        for (e, fa) in s.alice.tests().iter().enumerate() {
            for (f, fb) in s.bob.tests().iter().enumerate() {
                let sum = s.block_sum(fa, fb);
                if (sum - 1.0).abs() > tolerance {
                    return Err(Error::NotAState {
                        alice_test: e,
                        bob_test: f,
                        sum,
                    });
                }
            }
        }
        Ok(s)
    }

    /// Builds the table from rows indexed by Alice's outcomes.
    pub fn from_rows(alice: TestSpace, bob: TestSpace, rows: &[Vec<f64>], tolerance: f64) -> Result<Self> {
        if rows.len() != alice.outcome_count() {
            return Err(Error::TableLength {
                expected: alice.outcome_count(),
                found: rows.len(),
            });
        }
        let mut table = Vec::with_capacity(rows.len() * bob.outcome_count());
        for r in rows {
            if r.len() != bob.outcome_count() {
                return Err(Error::TableLength {
                    expected: bob.outcome_count(),
                    found: r.len(),
                });
            }
            table.extend_from_slice(r);
        }
        Self::new(alice, bob, table, tolerance)
    }

    /// `μ × ν` for states on each side.
    pub fn product(alice: TestSpace, bob: TestSpace, mu: &[f64], nu: &[f64], tolerance: f64) -> Result<Self> {
        alice.check_len(mu)?;
        bob.check_len(nu)?;
        let table = mu.iter().flat_map(|a| nu.iter().map(move |b| a * b)).collect();
        Self::new(alice, bob, table, tolerance)
    }

    pub fn alice(&self) -> &TestSpace {
        &self.alice
    }

    pub fn bob(&self) -> &TestSpace {
        &self.bob
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.table.chunks(self.bob.outcome_count()).map(<[f64]>::to_vec).collect()
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.table[x * self.bob.outcome_count() + y]
    }

    fn block_sum(&self, xs: &[usize], ys: &[usize]) -> f64 {
        xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).map(|(x, y)| self.value(x, y)).sum()
    }

    /// Marginal on `side`, summing over `test` of the other side.
    pub fn marginal(&self, side: Side, test: usize) -> Result<Vec<f64>> {
        Ok(match side {
            Side::Alice => {
                let f = self.bob.test(test)?;
                (0..self.alice.outcome_count())
                    .map(|x| f.iter().map(|&y| self.value(x, y)).sum())
                    .collect()
            }
            Side::Bob => {
                let e = self.alice.test(test)?;
                (0..self.bob.outcome_count())
                    .map(|y| e.iter().map(|&x| self.value(x, y)).sum())
                    .collect()
            }
        })
    }

    fn marginals(&self, side: Side) -> Vec<Vec<f64>> {
        let count = match side {
            Side::Alice => self.bob.tests().len(),
            Side::Bob => self.alice.tests().len(),
        };
        (0..count).map(|t| self.marginal(side, t).expect("test in range")).collect()
    }

    /// Largest dependence of one side's marginal on the other side's test choice.
    pub fn signalling(&self, direction: Direction) -> Signal {
        let side = match direction {
            Direction::AliceToBob => Side::Bob,
            Direction::BobToAlice => Side::Alice,
        };
        let ms = self.marginals(side);
        let mut best = Signal {
            direction,
            tests: (0, 0),
            outcome: 0,
            deviation: 0.0,
        };
        for i in 0..ms.len() {
            for j in (i + 1)..ms.len() {
                for (o, (a, b)) in ms[i].iter().zip(&ms[j]).enumerate() {
                    let d = libm::fabs(a - b);
                    if d > best.deviation {
                        best = Signal {
                            direction,
                            tests: (i, j),
                            outcome: o,
                            deviation: d,
                        };
                    }
                }
            }
        }
        best
    }

    pub fn is_influence_free(&self, tol: f64) -> InfluenceVerdict {
        let ab = self.signalling(Direction::AliceToBob);
        let ba = self.signalling(Direction::BobToAlice);
        let worst = if ab.deviation >= ba.deviation { ab } else { ba };
        if worst.deviation <= tol {
            InfluenceVerdict::Free {
                deviation: worst.deviation,
            }
        } else {
            InfluenceVerdict::Signalling(worst)
        }
    }

    /// `Σ` over the outcome set of each test, checked against 1.
    pub fn is_state_on_two_stage(&self, tests: &[TwoStageTest], tol: f64) -> bool {
        tests.iter().all(|t| (self.sum_over(t.outcomes()) - 1.0).abs() <= tol)
    }

    pub fn sum_over(&self, outcomes: &[Pair]) -> f64 {
        outcomes.iter().map(|&(x, y)| self.value(x, y)).sum()
    }

    fn require_free(&self) -> Result<()> {
        match self.is_influence_free(self.tolerance) {
            InfluenceVerdict::Free { .. } => Ok(()),
            InfluenceVerdict::Signalling(s) => Err(Error::NotInfluenceFree {
                deviation: s.deviation,
            }),
        }
    }

    /// Conditional state on Bob's side given Alice's outcome `a`.
    pub fn condition(&self, a: usize) -> Result<Vec<f64>> {
        self.condition_on(Side::Alice, a)
    }

    /// Conditional state on the far side given an outcome of `side`.
    pub fn condition_on(&self, side: Side, outcome: usize) -> Result<Vec<f64>> {
        self.require_free()?;
        let (p, row): (f64, Vec<f64>) = match side {
            Side::Alice => {
                self.check_outcome(&self.alice, outcome)?;
                (
                    self.marginal(Side::Alice, 0)?[outcome],
                    (0..self.bob.outcome_count()).map(|y| self.value(outcome, y)).collect(),
                )
            }
            Side::Bob => {
                self.check_outcome(&self.bob, outcome)?;
                (
                    self.marginal(Side::Bob, 0)?[outcome],
                    (0..self.alice.outcome_count()).map(|x| self.value(x, outcome)).collect(),
                )
            }
        };
        if p <= self.tolerance {
            return Err(Error::ZeroProbability {
                outcome,
                probability: p,
            });
        }
        Ok(row.into_iter().map(|v| v / p).collect())
    }

    fn check_outcome(&self, ts: &TestSpace, i: usize) -> Result<()> {
        if i >= ts.outcome_count() {
            return Err(Error::IndexOutOfRange {
                index: i,
                bound: ts.outcome_count(),
            });
        }
        Ok(())
    }

    /// `max_y |Σ_{a∈E} ω^A(a) ω_a(y) − ω^B(y)|`; outcomes of zero probability contribute 0.
    pub fn bayes_mixture_check(&self, alice_test: usize) -> Result<f64> {
        let e = self.alice.test(alice_test)?;
        let wa = self.marginal(Side::Alice, 0)?;
        let wb = self.marginal(Side::Bob, 0)?;
        let mut worst: f64 = 0.0;
        for (y, &wby) in wb.iter().enumerate() {
            let mix: f64 = e
                .iter()
                .filter(|&&a| wa[a] > 0.0)
                .map(|&a| wa[a] * (self.value(a, y) / wa[a]))
                .sum();
            worst = worst.max(libm::fabs(mix - wby));
        }
        Ok(worst)
    }

    /// `|ω_a(b) ω^A(a) − ω_b(a) ω^B(b)|`; both products equal `ω(a, b)`.
    pub fn operational_bayes_check(&self, a: usize, b: usize) -> Result<f64> {
        let given_a = self.condition_on(Side::Alice, a)?;
        let given_b = self.condition_on(Side::Bob, b)?;
        let wa = self.marginal(Side::Alice, 0)?[a];
        let wb = self.marginal(Side::Bob, 0)?[b];
        Ok(libm::fabs(given_a[b] * wa - given_b[a] * wb))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Bob's marginal depends on Alice's test.
    AliceToBob,
    /// Alice's marginal depends on Bob's test.
    BobToAlice,
}

/// Witness for signalling: the test pair and outcome with the largest marginal gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Signal {
    pub direction: Direction,
    /// Indices of the two tests on the influencing side.
    pub tests: (usize, usize),
    /// Outcome on the influenced side.
    pub outcome: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InfluenceVerdict {
    Free { deviation: f64 },
    Signalling(Signal),
}

impl InfluenceVerdict {
    pub fn is_free(&self) -> bool {
        matches!(self, InfluenceVerdict::Free { .. })
    }
}

/// Cartesian products `E × F` for all test pairs, Alice's test index varying slowest.
pub fn cartesian_tests(a: &TestSpace, b: &TestSpace) -> Vec<Vec<Pair>> {
    let mut out = Vec::with_capacity(a.tests().len() * b.tests().len());
    for e in a.tests() {
        for f in b.tests() {
            let mut t: Vec<Pair> = e.iter().flat_map(|&x| f.iter().map(move |&y| (x, y))).collect();
            t.sort_unstable();
            out.push(t);
        }
    }
    out
}

/// Which side performs its test first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Alice tests first, Bob's test depends on her outcome.
    Forward,
    /// Bob tests first.
    Backward,
}

/// A compound test: a first test plus a choice of second test per first outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoStageTest {
    pub direction: Stage,
    /// Test index on the initiating side.
    pub first: usize,
    /// Test index on the responding side, one per outcome of `first` (in test order).
    pub assignment: Vec<usize>,
    outcomes: Vec<Pair>,
}

impl TwoStageTest {
    pub fn new(a: &TestSpace, b: &TestSpace, direction: Stage, first: usize, assignment: Vec<usize>) -> Result<Self> {
        let (init, resp) = match direction {
            Stage::Forward => (a, b),
            Stage::Backward => (b, a),
        };
        let e = init.test(first)?;
        if assignment.len() != e.len() {
            return Err(Error::DimensionMismatch {
                expected: e.len(),
                found: assignment.len(),
            });
        }
        let mut outcomes = Vec::new();
        for (&x, &t) in e.iter().zip(&assignment) {
            for &y in resp.test(t)? {
                outcomes.push(match direction {
                    Stage::Forward => (x, y),
                    Stage::Backward => (y, x),
                });
            }
        }
        outcomes.sort_unstable();
        Ok(Self {
            direction,
            first,
            assignment,
            outcomes,
        })
    }

    /// Sorted joint outcomes `(x, y)`.
    pub fn outcomes(&self) -> &[Pair] {
        &self.outcomes
    }

    pub fn is_constant(&self) -> bool {
        self.assignment.windows(2).all(|w| w[0] == w[1])
    }
}

fn count_two_stage(init: &TestSpace, resp: &TestSpace) -> u128 {
    let k = resp.tests().len() as u128;
    init.tests()
        .iter()
        .map(|e| {
            let mut c: u128 = 1;
            for _ in 0..e.len() {
                c = c.saturating_mul(k);
            }
            c
        })
        .fold(0u128, u128::saturating_add)
}

fn enumerate(a: &TestSpace, b: &TestSpace, direction: Stage) -> Vec<TwoStageTest> {
    let (init, resp) = match direction {
        Stage::Forward => (a, b),
        Stage::Backward => (b, a),
    };
    let k = resp.tests().len();
    let mut out = Vec::new();
    for (first, e) in init.tests().iter().enumerate() {
        let mut digits = vec![0usize; e.len()];
        loop {
            out.push(TwoStageTest::new(a, b, direction, first, digits.clone()).expect("indices in range"));
            // Odometer with the last outcome varying fastest.
            let mut carry = true;
            let mut i = digits.len();
            while carry && i > 0 {
                i -= 1;
                digits[i] += 1;
                if digits[i] == k {
                    digits[i] = 0;
                } else {
                    carry = false;
                }
            }
            if carry {
                break;
            }
        }
    }
    out
}

fn check_cap(required: u128, cap: u128) -> Result<()> {
    if required > cap {
        return Err(Error::CapExceeded { required, cap });
    }
    Ok(())
}

/// All forward two-stage tests (Alice first). Fails if more than `cap` would be produced.
pub fn forward_tests(a: &TestSpace, b: &TestSpace, cap: u128) -> Result<Vec<TwoStageTest>> {
    check_cap(count_two_stage(a, b), cap)?;
    Ok(enumerate(a, b, Stage::Forward))
}

/// All backward two-stage tests (Bob first).
pub fn backward_tests(a: &TestSpace, b: &TestSpace, cap: u128) -> Result<Vec<TwoStageTest>> {
    check_cap(count_two_stage(b, a), cap)?;
    Ok(enumerate(a, b, Stage::Backward))
}

/// Forward and backward tests with duplicate outcome sets removed (first occurrence kept).
pub fn fns_tests(a: &TestSpace, b: &TestSpace, cap: u128) -> Result<Vec<TwoStageTest>> {
    check_cap(count_two_stage(a, b).saturating_add(count_two_stage(b, a)), cap)?;
    let mut seen: BTreeSet<Vec<Pair>> = BTreeSet::new();
    Ok(enumerate(a, b, Stage::Forward)
        .into_iter()
        .chain(enumerate(a, b, Stage::Backward))
        .filter(|t| seen.insert(t.outcomes.clone()))
        .collect())
}

/// Default cap on two-stage enumeration.
pub const DEFAULT_TWO_STAGE_CAP: u128 = 1 << 20;

#[cfg(test)]
mod tests;
