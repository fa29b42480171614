use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand sizes are incompatible.
    DimensionMismatch { expected: usize, found: usize },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Hermitian admission failed: the anti-Hermitian part is too large.
    NotHermitian { defect: f64, threshold: f64 },
    /// Factor dimensions must all be at least one.
    InvalidShape,
    /// A factor index is outside the shape.
    FactorOutOfRange { factor: usize, factors: usize },
    /// The permutation does not permute `0..len`.
    InvalidPermutation,
    /// A vector that must be normalized is not.
    NotUnitVector { norm: f64 },
    /// A matrix that must be unitary is not.
    NotUnitary { defect: f64 },
    /// A state value lies outside `[0, 1]`.
    ValueOutOfRange { outcome: String, value: f64 },
    /// A test-sum differs from 1.
    NotNormalized { test: usize, sum: f64 },
    /// A table does not cover every outcome.
    TableLength { expected: usize, found: usize },
    /// An outcome label is not part of the test space.
    UnknownOutcome(String),
    /// A table has no value for this outcome.
    MissingOutcome(String),
    /// A test index is out of range.
    UnknownTest(usize),
    /// Outcome labels must be unique.
    DuplicateOutcome(String),
    /// Tests must be non-empty.
    EmptyTest(usize),
    /// Every outcome must lie in some test.
    UncoveredOutcome(String),
    /// Combinatorial enumeration would exceed the configured cap.
    CapExceeded { required: u128, cap: u128 },
    /// A table is not a state on the product tests.
    NotAState { alice_test: usize, bob_test: usize, sum: f64 },
    /// A conditioning outcome has (numerically) zero probability.
    ZeroProbability { outcome: usize, probability: f64 },
    /// The operation needs an influence-free state.
    NotInfluenceFree { deviation: f64 },
    /// Kraus extraction needs a completely positive map.
    NotCompletelyPositive { min_eigenvalue: f64 },
    /// A trace-normalization precondition failed.
    TraceViolation { trace: f64 },
    /// Evaluations are not consistent with any Hermitian operator.
    InconsistentEvaluator { residual: f64 },
    /// Index arguments out of range.
    IndexOutOfRange { index: usize, bound: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            Error::NotHermitian { defect, threshold } => {
                write!(f, "hermiticity defect {defect:e} exceeds threshold {threshold:e}")
            }
            Error::InvalidShape => write!(f, "factor dimensions must be at least 1"),
            Error::FactorOutOfRange { factor, factors } => {
                write!(f, "factor {factor} out of range for {factors} factors")
            }
            Error::InvalidPermutation => write!(f, "invalid permutation"),
            Error::NotUnitVector { norm } => write!(f, "vector has norm {norm}, expected 1"),
            Error::NotUnitary { defect } => write!(f, "matrix is not unitary (defect {defect:e})"),
            Error::ValueOutOfRange { outcome, value } => {
                write!(f, "value {value} at outcome `{outcome}` is outside [0, 1]")
            }
            Error::NotNormalized { test, sum } => write!(f, "test {test} sums to {sum}, expected 1"),
            Error::MissingOutcome(label) => write!(f, "no value given for outcome `{label}`"),
            Error::TableLength { expected, found } => {
                write!(f, "table has {found} entries, expected {expected}")
            }
            Error::UnknownOutcome(label) => write!(f, "unknown outcome `{label}`"),
            Error::UnknownTest(i) => write!(f, "unknown test index {i}"),
            Error::DuplicateOutcome(label) => write!(f, "duplicate outcome `{label}`"),
            Error::EmptyTest(i) => write!(f, "test {i} is empty"),
            Error::UncoveredOutcome(label) => write!(f, "outcome `{label}` lies in no test"),
            Error::CapExceeded { required, cap } => {
                write!(f, "enumeration needs {required} items, cap is {cap}")
            }
            Error::NotAState { alice_test, bob_test, sum } => write!(
                f,
                "product test ({alice_test}, {bob_test}) sums to {sum}, expected 1"
            ),
            Error::ZeroProbability { outcome, probability } => {
                write!(f, "outcome {outcome} has probability {probability:e}")
            }
            Error::NotInfluenceFree { deviation } => {
                write!(f, "state is signalling (deviation {deviation:e})")
            }
            Error::NotCompletelyPositive { min_eigenvalue } => {
                write!(f, "map is not CP (Choi eigenvalue {min_eigenvalue:e})")
            }
            Error::TraceViolation { trace } => write!(f, "trace is {trace}, expected 1"),
            Error::InconsistentEvaluator { residual } => {
                write!(f, "evaluator is not representable (residual {residual:e})")
            }
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range (< {bound})")
            }
        }
    }
}

impl core::error::Error for Error {}
