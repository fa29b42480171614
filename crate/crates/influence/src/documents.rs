//! JSON interchange formats. Complex numbers are `[re, im]` pairs.

use influence_core::coupling::ProductState;
use influence_core::linalg::ComplexMatrix;
use influence_core::test_space::{ETestSpace, TestSpace};
use influence_core::{BipartiteShape, HermitianOperator, C64};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Input that parses as JSON but violates a document or library invariant.
#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("document: {0}")]
    Invalid(String),
    #[error("input: {0}")]
    Core(#[from] influence_core::Error),
}

pub type DocResult<T> = std::result::Result<T, DocumentError>;

fn invalid<T>(msg: impl Into<String>) -> DocResult<T> {
    Err(DocumentError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &ComplexMatrix, dims: Option<Vec<usize>>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.data().iter().map(|z| [z.re, z.im]).collect(),
            dims,
        }
    }

    pub fn from_operator(h: &HermitianOperator, dims: Option<&[usize]>) -> Self {
        Self::from_matrix(h.matrix(), dims.map(<[usize]>::to_vec))
    }

    pub fn to_matrix(&self) -> DocResult<ComplexMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return invalid(format!(
                "`entries` has {} values for a {}x{} matrix",
                self.entries.len(),
                self.rows,
                self.cols
            ));
        }
        if let Some(d) = &self.dims {
            if d.iter().product::<usize>() != self.rows || self.rows != self.cols {
                return invalid(format!("`dims` {d:?} do not multiply to {}x{}", self.rows, self.cols));
            }
        }
        if self.entries.iter().flatten().any(|v| !v.is_finite()) {
            return invalid("non-finite entry");
        }
        let data = self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        Ok(ComplexMatrix::new(self.rows, self.cols, data)?)
    }

    pub fn to_operator(&self) -> DocResult<HermitianOperator> {
        Ok(HermitianOperator::new(self.to_matrix()?)?)
    }

    /// Factor dimensions: `dims` if given, else `[n, n]` for an `n² × n²` matrix.
    pub fn shape(&self) -> DocResult<BipartiteShape> {
        let dims = match &self.dims {
            Some(d) => d.clone(),
            None => {
                let n = (self.rows as f64).sqrt().round() as usize;
                if n * n != self.rows {
                    return invalid(format!("no `dims` and {} is not a square", self.rows));
                }
                vec![n, n]
            }
        };
        Ok(BipartiteShape::new(dims)?)
    }

    /// Operator with a two-factor shape.
    pub fn bipartite(&self) -> DocResult<(HermitianOperator, BipartiteShape)> {
        let shape = self.shape()?;
        if shape.factors() != 2 {
            return invalid("expected two factors in `dims`");
        }
        Ok((self.to_operator()?, shape))
    }
}

pub fn vector_json(v: &[C64]) -> Value {
    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

pub fn vector_from_json(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TestEntry {
    Label(String),
    Weighted { outcome: String, multiplicity: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestSpaceDocument {
    pub outcomes: Vec<String>,
    pub tests: Vec<Vec<TestEntry>>,
}

/// A test space, or an E-test space when any entry carries a multiplicity.
pub enum Space {
    Plain(TestSpace),
    Weighted(ETestSpace),
}

impl TestSpaceDocument {
    pub fn from_space(ts: &TestSpace) -> Self {
        Self {
            outcomes: ts.outcomes().to_vec(),
            tests: ts
                .tests()
                .iter()
                .map(|t| t.iter().map(|&i| TestEntry::Label(ts.label(i).to_string())).collect())
                .collect(),
        }
    }

    pub fn to_space(&self) -> DocResult<Space> {
        let weighted = self.tests.iter().flatten().any(|e| matches!(e, TestEntry::Weighted { .. }));
        if weighted {
            let tests: Vec<Vec<(String, u32)>> = self
                .tests
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|e| match e {
                            TestEntry::Label(l) => (l.clone(), 1),
                            TestEntry::Weighted { outcome, multiplicity } => (outcome.clone(), *multiplicity),
                        })
                        .collect()
                })
                .collect();
            Ok(Space::Weighted(ETestSpace::new(&self.outcomes, &tests)?))
        } else {
            self.plain().map(Space::Plain)
        }
    }

    pub fn plain(&self) -> DocResult<TestSpace> {
        let tests: DocResult<Vec<Vec<String>>> = self
            .tests
            .iter()
            .map(|t| {
                t.iter()
                    .map(|e| match e {
                        TestEntry::Label(l) => Ok(l.clone()),
                        TestEntry::Weighted { .. } => invalid("multiplicities are not allowed here"),
                    })
                    .collect()
            })
            .collect();
        Ok(TestSpace::new(&self.outcomes, &tests?)?)
    }
}

/// A weight function on one test space, keyed by outcome label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDocument {
    pub space: TestSpaceDocument,
    pub values: std::collections::BTreeMap<String, f64>,
}

/// A joint table; `table[x][y]` follows the declared outcome orders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointDocument {
    pub alice: TestSpaceDocument,
    pub bob: TestSpaceDocument,
    pub table: Vec<Vec<f64>>,
}

impl JointDocument {
    pub fn from_state(s: &ProductState) -> Self {
        Self {
            alice: TestSpaceDocument::from_space(s.alice()),
            bob: TestSpaceDocument::from_space(s.bob()),
            table: s.rows(),
        }
    }

    pub fn to_state(&self, tol: f64) -> DocResult<ProductState> {
        Ok(ProductState::from_rows(self.alice.plain()?, self.bob.plain()?, &self.table, tol)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorollaryDocument {
    pub w: MatrixDocument,
    pub b: MatrixDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApplyDocument {
    pub choi: MatrixDocument,
    pub input: MatrixDocument,
}

/// Choi operators carry `dims = [din, dout]`; without it the map is square.
pub fn map_from(doc: &MatrixDocument) -> DocResult<influence_core::choi::LinearMapChoi> {
    let (op, shape) = doc.bipartite()?;
    let d = shape.dims();
    Ok(influence_core::choi::LinearMapChoi::new(op, d[0], d[1])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_invariants() {
        let doc: MatrixDocument =
            serde_json::from_str(r#"{"rows":4,"cols":4,"entries":[[1,0],[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[0,0],[1,0]]}"#).unwrap();
        assert_eq!(doc.shape().unwrap().dims(), &[2, 2]);
        let short = MatrixDocument { entries: vec![[1.0, 0.0]], ..doc.clone() };
        assert!(short.to_matrix().is_err());
        let bad_dims = MatrixDocument { dims: Some(vec![3]), ..doc.clone() };
        assert!(bad_dims.to_matrix().is_err());
        assert!(serde_json::from_str::<MatrixDocument>(r#"{"rows":1,"cols":1,"entries":[[1,0]],"extra":1}"#).is_err());
    }

    #[test]
    fn weighted_entries_select_e_test_spaces() {
        let doc: TestSpaceDocument =
            serde_json::from_str(r#"{"outcomes":["a","b"],"tests":[["a","b"],[{"outcome":"a","multiplicity":2}]]}"#).unwrap();
        assert!(matches!(doc.to_space().unwrap(), Space::Weighted(_)));
        assert!(doc.plain().is_err());
        let plain: TestSpaceDocument = serde_json::from_str(r#"{"outcomes":["a","b"],"tests":[["a","b"]]}"#).unwrap();
        assert!(matches!(plain.to_space().unwrap(), Space::Plain(_)));
        assert_eq!(TestSpaceDocument::from_space(&plain.plain().unwrap()), plain);
    }
}
