//! Finite test spaces, E-test spaces, states and weights.
//!
//! Tables are dense `&[f64]` slices indexed by outcome position. Use
//! [`TestSpace::table`] to build one from `(label, value)` pairs.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::real;
use crate::{Error, Result};

/// Default cap on the number of outcomes for vertex enumeration.
pub const DEFAULT_VERTEX_CAP: usize = 16;

/// A finite outcome set together with a covering family of tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSpace {
    outcomes: Vec<String>,
    index: BTreeMap<String, usize>,
    tests: Vec<Vec<usize>>,
}

fn index_labels(outcomes: &[String]) -> Result<BTreeMap<String, usize>> {
    let mut index = BTreeMap::new();
    for (i, o) in outcomes.iter().enumerate() {
        if index.insert(o.clone(), i).is_some() {
            return Err(Error::DuplicateOutcome(o.clone()));
        }
    }
    Ok(index)
}

impl TestSpace {
    /// Builds a test space from labels. Repeated labels inside a test are
    /// collapsed, since tests are sets.
    pub fn new<S: AsRef<str>>(outcomes: &[S], tests: &[Vec<S>]) -> Result<Self> {
        let outcomes: Vec<String> = outcomes.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_labels(&outcomes)?;
        let mut resolved = Vec::with_capacity(tests.len());
        for (t, test) in tests.iter().enumerate() {
            let mut ids = Vec::with_capacity(test.len());
            for label in test {
                let label = label.as_ref();
                let &i = index
                    .get(label)
                    .ok_or_else(|| Error::UnknownOutcome(label.to_string()))?;
                if !ids.contains(&i) {
                    ids.push(i);
                }
            }
            if ids.is_empty() {
                return Err(Error::EmptyTest(t));
            }
            resolved.push(ids);
        }
        Self::from_indices(outcomes, resolved)
    }

    /// Builds a test space from outcome positions.
    pub fn from_indices(outcomes: Vec<String>, tests: Vec<Vec<usize>>) -> Result<Self> {
        let index = index_labels(&outcomes)?;
        let mut covered = vec![false; outcomes.len()];
        let mut clean = Vec::with_capacity(tests.len());
        for (t, test) in tests.into_iter().enumerate() {
            let mut ids: Vec<usize> = Vec::with_capacity(test.len());
            for i in test {
                if i >= outcomes.len() {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        bound: outcomes.len(),
                    });
                }
                if !ids.contains(&i) {
                    ids.push(i);
                }
                covered[i] = true;
            }
            if ids.is_empty() {
                return Err(Error::EmptyTest(t));
            }
            clean.push(ids);
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::UncoveredOutcome(outcomes[i].clone()));
        }
        Ok(Self {
            outcomes,
            index,
            tests: clean,
        })
    }

    /// Outcomes `"0".."n-1"` forming one test.
    pub fn simplex(n: usize) -> Self {
        let outcomes: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Self::from_indices(outcomes, vec![(0..n).collect()]).expect("valid simplex")
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn tests(&self) -> &[Vec<usize>] {
        &self.tests
    }

    pub fn test(&self, t: usize) -> Result<&[usize]> {
        self.tests.get(t).map(Vec::as_slice).ok_or(Error::UnknownTest(t))
    }

    pub fn outcome_index(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }

    pub fn label(&self, i: usize) -> &str {
        &self.outcomes[i]
    }

    /// Dense table from `(label, value)` pairs; every outcome must be present.
    pub fn table<S: AsRef<str>>(&self, pairs: &[(S, f64)]) -> Result<Vec<f64>> {
        let mut out: Vec<Option<f64>> = vec![None; self.outcomes.len()];
        for (label, v) in pairs {
            out[self.outcome_index(label.as_ref())?] = Some(*v);
        }
        out.iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| Error::MissingOutcome(self.outcomes[i].clone())))
            .collect()
    }

    pub(crate) fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.outcomes.len() {
            return Err(Error::TableLength {
                expected: self.outcomes.len(),
                found: f.len(),
            });
        }
        Ok(())
    }

    pub fn test_sum(&self, f: &[f64], t: usize) -> Result<f64> {
        self.check_len(f)?;
        Ok(self.test(t)?.iter().map(|&i| f[i]).sum())
    }

    /// First reason `f` fails to be a state, if any.
    pub fn state_violation(&self, f: &[f64], tol: f64) -> Result<Option<StateViolation>> {
        self.check_len(f)?;
        if let Some(i) = f.iter().position(|&v| !(-tol..=1.0 + tol).contains(&v)) {
            return Ok(Some(StateViolation::OutOfRange {
                outcome: i,
                value: f[i],
            }));
        }
        for (t, test) in self.tests.iter().enumerate() {
            let sum: f64 = test.iter().map(|&i| f[i]).sum();
            if (sum - 1.0).abs() > tol {
                return Ok(Some(StateViolation::TestSum { test: t, sum }));
            }
        }
        Ok(None)
    }

    pub fn is_state(&self, f: &[f64], tol: f64) -> Result<bool> {
        Ok(self.state_violation(f, tol)?.is_none())
    }

    /// The common test-sum `K` if `f` is a positive weight.
    pub fn is_positive_weight(&self, f: &[f64], tol: f64) -> Result<Option<f64>> {
        self.check_len(f)?;
        if f.iter().any(|&v| v < -tol) {
            return Ok(None);
        }
        let sums: Vec<f64> = self.tests.iter().map(|t| t.iter().map(|&i| f[i]).sum()).collect();
        let k = sums[0];
        if sums.iter().all(|s| (s - k).abs() <= tol) {
            Ok(Some(k))
        } else {
            Ok(None)
        }
    }

    /// `max_E Σ_{x∈E} |f(x)|`.
    pub fn variation_norm(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        Ok(self
            .tests
            .iter()
            .map(|t| t.iter().map(|&i| libm::fabs(f[i])).sum::<f64>())
            .fold(0.0, f64::max))
    }

    /// Dimension of the constant-test-sum space and the vertices of the state polytope.
    pub fn weight_space_dimension(&self, cap: usize) -> Result<StatePolytope> {
        let n = self.outcomes.len();
        if n > cap {
            return Err(Error::CapExceeded {
                required: n as u128,
                cap: cap as u128,
            });
        }
        let tol = 1e-10;
        let indicator = |t: &[usize]| {
            let mut row = vec![0.0; n];
            for &i in t {
                row[i] = 1.0;
            }
            row
        };
        let base = indicator(&self.tests[0]);
        let diffs: Vec<Vec<f64>> = self.tests[1..]
            .iter()
            .map(|t| indicator(t).iter().zip(&base).map(|(a, b)| a - b).collect())
            .collect();
        let constant_sum_dimension = n - real::rank(&diffs, n, tol);

        // A vertex is the unique solution on its support, so enumerate supports.
        let mut vertices = Vec::new();
        for mask in 1u32..(1u32 << n) {
            let support: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let a: Vec<Vec<f64>> = self
                .tests
                .iter()
                .map(|t| support.iter().map(|i| if t.contains(i) { 1.0 } else { 0.0 }).collect())
                .collect();
            if let Some(x) = real::solve_full_column_rank(&a, &vec![1.0; a.len()], tol) {
                if x.iter().all(|&v| v > tol) {
                    let mut f = vec![0.0; n];
                    for (&i, v) in support.iter().zip(x) {
                        f[i] = v;
                    }
                    vertices.push(f);
                }
            }
        }
        Ok(StatePolytope {
            constant_sum_dimension,
            vertices,
        })
    }
}

/// Why a table is not a state.
#[derive(Debug, Clone, PartialEq)]
pub enum StateViolation {
    OutOfRange { outcome: usize, value: f64 },
    TestSum { test: usize, sum: f64 },
}

/// Output of [`TestSpace::weight_space_dimension`].
#[derive(Debug, Clone, PartialEq)]
pub struct StatePolytope {
    pub constant_sum_dimension: usize,
    pub vertices: Vec<Vec<f64>>,
}

impl StatePolytope {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}

/// A table validated as a state on a given test space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTable {
    values: Vec<f64>,
    tolerance: f64,
}

impl StateTable {
    pub fn new(ts: &TestSpace, values: Vec<f64>, tolerance: f64) -> Result<Self> {
        match ts.state_violation(&values, tolerance)? {
            None => Ok(Self { values, tolerance }),
            Some(StateViolation::OutOfRange { outcome, value }) => Err(Error::ValueOutOfRange {
                outcome: ts.label(outcome).to_string(),
                value,
            }),
            Some(StateViolation::TestSum { test, sum }) => Err(Error::NotNormalized { test, sum }),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// A non-negative table with a common test-sum.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub values: Vec<f64>,
    pub constant: f64,
}

impl WeightTable {
    pub fn new(ts: &TestSpace, values: Vec<f64>, tol: f64) -> Result<Option<Self>> {
        Ok(ts
            .is_positive_weight(&values, tol)?
            .map(|constant| Self { values, constant }))
    }

    /// The normalized state `f / K`, absent for the zero weight.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        (self.constant > 0.0).then(|| self.values.iter().map(|v| v / self.constant).collect())
    }
}

/// Test space whose tests are multisets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ETestSpace {
    outcomes: Vec<String>,
    index: BTreeMap<String, usize>,
    tests: Vec<Vec<(usize, u32)>>,
}

impl ETestSpace {
    pub fn new<S: AsRef<str>>(outcomes: &[S], tests: &[Vec<(S, u32)>]) -> Result<Self> {
        let outcomes: Vec<String> = outcomes.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_labels(&outcomes)?;
        let mut resolved = Vec::with_capacity(tests.len());
        for (t, test) in tests.iter().enumerate() {
            let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
            for (label, m) in test {
                let label = label.as_ref();
                let &i = index
                    .get(label)
                    .ok_or_else(|| Error::UnknownOutcome(label.to_string()))?;
                *merged.entry(i).or_insert(0) += m;
            }
            merged.retain(|_, m| *m > 0);
            if merged.is_empty() {
                return Err(Error::EmptyTest(t));
            }
            resolved.push(merged.into_iter().collect());
        }
        Ok(Self {
            outcomes,
            index,
            tests: resolved,
        })
    }

    /// Embeds an ordinary test space as 0/1 multisets.
    pub fn from_test_space(ts: &TestSpace) -> Self {
        Self {
            outcomes: ts.outcomes.clone(),
            index: ts.index.clone(),
            tests: ts
                .tests
                .iter()
                .map(|t| {
                    let mut v: Vec<(usize, u32)> = t.iter().map(|&i| (i, 1)).collect();
                    v.sort_unstable();
                    v
                })
                .collect(),
        }
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn tests(&self) -> &[Vec<(usize, u32)>] {
        &self.tests
    }

    pub fn outcome_index(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }

    pub fn is_estate(&self, f: &[f64], tol: f64) -> Result<bool> {
        if f.len() != self.outcomes.len() {
            return Err(Error::TableLength {
                expected: self.outcomes.len(),
                found: f.len(),
            });
        }
        if f.iter().any(|&v| !(-tol..=1.0 + tol).contains(&v)) {
            return Ok(false);
        }
        Ok(self.tests.iter().all(|t| {
            let s: f64 = t.iter().map(|&(i, m)| m as f64 * f[i]).sum();
            (s - 1.0).abs() <= tol
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn firefly() -> TestSpace {
        TestSpace::new(
            &["a", "x", "b", "y"],
            &[vec!["a", "x"], vec!["x", "b"], vec!["b", "y"]],
        )
        .unwrap()
    }

    #[test]
    fn state_examples() {
        let abc = TestSpace::new(&["a", "b", "c"], &[vec!["a", "b", "c"]]).unwrap();
        assert!(abc.is_state(&[1.0 / 3.0; 3], 1e-9).unwrap());
        let ab = TestSpace::new(&["a", "b"], &[vec!["a", "b"]]).unwrap();
        assert!(!ab.is_state(&[0.5, 0.4], 1e-9).unwrap());
        assert_eq!(
            ab.state_violation(&[0.5, 0.4], 1e-9).unwrap(),
            Some(StateViolation::TestSum { test: 0, sum: 0.9 })
        );
        let xyz = TestSpace::new(&["x", "y", "z"], &[vec!["x", "y"], vec!["x", "z"]]).unwrap();
        let f = xyz.table(&[("x", 0.5), ("y", 0.5), ("z", 0.5)]).unwrap();
        assert!(xyz.is_state(&f, 1e-9).unwrap());
        assert_eq!(xyz.table(&[("x", 0.5)]), Err(Error::MissingOutcome("y".into())));
        assert!(matches!(xyz.is_state(&[0.5], 1e-9), Err(Error::TableLength { .. })));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            TestSpace::new(&["a", "a"], &[vec!["a"]]),
            Err(Error::DuplicateOutcome("a".into()))
        );
        assert_eq!(
            TestSpace::new(&["a", "b"], &[vec!["a"]]),
            Err(Error::UncoveredOutcome("b".into()))
        );
        assert_eq!(
            TestSpace::new(&["a"], &[vec!["a"], vec![]]),
            Err(Error::EmptyTest(1))
        );
        assert_eq!(
            TestSpace::new(&["a"], &[vec!["q"]]),
            Err(Error::UnknownOutcome("q".into()))
        );
    }

    #[test]
    fn estate_examples() {
        let e = ETestSpace::new(&["a"], &[vec![("a", 2)]]).unwrap();
        assert!(e.is_estate(&[0.5], 1e-9).unwrap());
        assert!(!e.is_estate(&[1.0], 1e-9).unwrap());
        assert!(matches!(ETestSpace::new(&["a"], &[vec![("a", 0)]]), Err(Error::EmptyTest(0))));
    }

    #[test]
    fn positive_weight_examples() {
        let ts = firefly();
        let state = [0.3, 0.7, 0.3, 0.7];
        let tripled: Vec<f64> = state.iter().map(|v| 3.0 * v).collect();
        let k = ts.is_positive_weight(&tripled, 1e-9).unwrap().unwrap();
        assert!((k - 3.0).abs() < 1e-12);
        assert_eq!(ts.is_positive_weight(&[0.0; 4], 1e-9).unwrap(), Some(0.0));
        let two = TestSpace::new(&["a", "b"], &[vec!["a"], vec!["b"]]).unwrap();
        assert_eq!(two.is_positive_weight(&[1.0, 2.0], 1e-9).unwrap(), None);
        let w = WeightTable::new(&ts, tripled, 1e-9).unwrap().unwrap();
        let back = w.normalized().unwrap();
        assert!(back.iter().zip(state).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn state_table_rejects_non_states() {
        let ab = TestSpace::simplex(2);
        assert!(StateTable::new(&ab, vec![0.25, 0.75], 1e-9).is_ok());
        assert!(matches!(
            StateTable::new(&ab, vec![-0.5, 1.5], 1e-9),
            Err(Error::ValueOutOfRange { .. })
        ));
        assert!(matches!(
            StateTable::new(&ab, vec![0.5, 0.4], 1e-9),
            Err(Error::NotNormalized { test: 0, .. })
        ));
    }

    #[test]
    fn variation_examples() {
        let ts = firefly();
        assert!((ts.variation_norm(&[0.3, 0.7, 0.3, 0.7]).unwrap() - 1.0).abs() < 1e-15);
        let ab = TestSpace::simplex(2);
        assert_eq!(ab.variation_norm(&[1.0 - 0.0, 0.0 - 1.0]).unwrap(), 2.0);
    }

    /// Independent vertex oracle: choose which outcomes are forced to zero,
    /// solve the remaining equalities by least-squares normal equations and
    /// keep unique, feasible, non-degenerate points (deduplicated by value).
    fn vertex_oracle(ts: &TestSpace) -> Vec<Vec<f64>> {
        let n = ts.outcome_count();
        let mut found: Vec<Vec<f64>> = Vec::new();
        for zeros in 0u32..(1 << n) {
            // Constraint matrix: test equalities followed by the active zeros.
            let mut rows: Vec<Vec<f64>> = ts
                .tests()
                .iter()
                .map(|t| (0..n).map(|i| if t.contains(&i) { 1.0 } else { 0.0 }).collect())
                .collect();
            let mut rhs = vec![1.0; rows.len()];
            for i in 0..n {
                if zeros & (1 << i) != 0 {
                    let mut r = vec![0.0; n];
                    r[i] = 1.0;
                    rows.push(r);
                    rhs.push(0.0);
                }
            }
            if real::rank(&rows, n, 1e-10) < n {
                continue;
            }
            let Some(x) = real::solve_full_column_rank(&rows, &rhs, 1e-10) else {
                continue;
            };
            if x.iter().any(|&v| v < -1e-10) {
                continue;
            }
            if !found.iter().any(|f| f.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-9)) {
                found.push(x);
            }
        }
        found
    }

    #[test]
    fn polytope_examples_against_oracle() {
        let simplex = TestSpace::simplex(4).weight_space_dimension(16).unwrap();
        assert_eq!((simplex.constant_sum_dimension, simplex.vertex_count()), (4, 4));

        let disjoint = TestSpace::new(&["a", "b", "c", "d"], &[vec!["a", "b"], vec!["c", "d"]]).unwrap();
        let p = disjoint.weight_space_dimension(16).unwrap();
        assert_eq!(p.constant_sum_dimension, 3);
        assert_eq!(p.vertex_count(), vertex_oracle(&disjoint).len());
        assert_eq!(p.vertex_count(), 4);

        let ff = firefly();
        let p = ff.weight_space_dimension(16).unwrap();
        assert_eq!(p.vertex_count(), vertex_oracle(&ff).len());
        assert_eq!((p.constant_sum_dimension, p.vertex_count()), (2, 2));

        // Pentagon: five binary tests in a cycle.
        let labels = ["0", "1", "2", "3", "4"];
        let tests: Vec<Vec<&str>> = (0..5).map(|i| vec![labels[i], labels[(i + 1) % 5]]).collect();
        let pent = TestSpace::new(&labels, &tests).unwrap();
        let p = pent.weight_space_dimension(16).unwrap();
        assert_eq!(p.vertex_count(), vertex_oracle(&pent).len());
        for v in &p.vertices {
            assert!(pent.is_state(v, 1e-12).unwrap());
        }
    }

    #[test]
    fn polytope_cap() {
        let big = TestSpace::simplex(17);
        assert_eq!(
            big.weight_space_dimension(16),
            Err(Error::CapExceeded { required: 17, cap: 16 })
        );
    }

    fn arb_space() -> impl Strategy<Value = TestSpace> {
        (2usize..6, proptest::collection::vec(proptest::collection::vec(any::<bool>(), 6), 1..4)).prop_map(
            |(n, masks)| {
                let outcomes: Vec<String> = (0..n).map(|i| i.to_string()).collect();
                let mut tests: Vec<Vec<usize>> = masks
                    .iter()
                    .map(|m| (0..n).filter(|&i| m[i]).collect::<Vec<_>>())
                    .filter(|t| !t.is_empty())
                    .collect();
                // Cover leftovers with one extra test.
                let left: Vec<usize> = (0..n).filter(|i| !tests.iter().any(|t| t.contains(i))).collect();
                if !left.is_empty() {
                    tests.push(left);
                }
                TestSpace::from_indices(outcomes, tests).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn estate_embedding_agrees(ts in arb_space(), raw in proptest::collection::vec(0.0f64..1.0, 6)) {
            let f = &raw[..ts.outcome_count()];
            let e = ETestSpace::from_test_space(&ts);
            prop_assert_eq!(e.is_estate(f, 1e-9).unwrap(), ts.is_state(f, 1e-9).unwrap());
            // Vertices are states, so they must agree too.
            for v in ts.weight_space_dimension(16).unwrap().vertices {
                prop_assert!(e.is_estate(&v, 1e-9).unwrap());
            }
        }

        #[test]
        fn uniform_on_single_test_is_state(n in 1usize..10) {
            prop_assert!(TestSpace::simplex(n).is_state(&vec![1.0 / n as f64; n], 1e-12).unwrap());
        }

        #[test]
        fn convex_combinations_of_vertices_are_states(ts in arb_space(), t in 0.0f64..1.0) {
            let vs = ts.weight_space_dimension(16).unwrap().vertices;
            prop_assume!(vs.len() >= 2);
            let mix: Vec<f64> = vs[0].iter().zip(&vs[1]).map(|(a, b)| t * a + (1.0 - t) * b).collect();
            prop_assert!(ts.is_state(&mix, 1e-12).unwrap());
        }

        #[test]
        fn variation_is_a_seminorm(
            ts in arb_space(),
            f in proptest::collection::vec(-2.0f64..2.0, 6),
            g in proptest::collection::vec(-2.0f64..2.0, 6),
            a in -3.0f64..3.0,
        ) {
            let n = ts.outcome_count();
            let (f, g) = (&f[..n], &g[..n]);
            let sum: Vec<f64> = f.iter().zip(g).map(|(x, y)| x + y).collect();
            let scaled: Vec<f64> = f.iter().map(|x| a * x).collect();
            let vf = ts.variation_norm(f).unwrap();
            prop_assert!(ts.variation_norm(&sum).unwrap() <= vf + ts.variation_norm(g).unwrap() + 1e-12);
            prop_assert!((ts.variation_norm(&scaled).unwrap() - a.abs() * vf).abs() <= 1e-12);
            // Oracle: the maximum over tests computed directly.
            let direct = ts.tests().iter()
                .map(|t| t.iter().map(|&i| f[i].abs()).sum::<f64>())
                .fold(f64::MIN, f64::max);
            prop_assert_eq!(vf, direct);
        }
    }
}
