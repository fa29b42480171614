//! Numerical core for influence-free (no-signalling) states on coupled systems.
//!
//! The crate is `no_std` and only needs an allocator. It covers:
//!
//! * [`linalg`]: dense complex matrices, Hermitian eigendecomposition,
//!   Kronecker products, partial transposes/traces and factor permutations.
//! * [`test_space`]: finite test spaces, E-test spaces, states and weights.
//! * [`coupling`]: Cartesian and two-stage (Foulis–Randall) products,
//!   influence-freedom, marginals, conditioning and the Bayes identities.
//! * [`choi`]: the operator/map correspondence (Choi matrices, Kraus
//!   extraction, CP/co-CP tests, tomographic reconstruction).
//! * [`cones`]: PSD, PPT, POPT (see-saw) and decomposable-cone membership,
//!   plus the extremality probe for conjugation maps.
//! * [`teleport`]: the four-party teleportation algebra and the product-state
//!   negativity witness.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod choi;
pub mod cones;
pub mod coupling;
mod error;
pub mod linalg;
pub mod random;
pub mod teleport;
pub mod test_space;

pub use error::{Error, Result};
pub use linalg::{BipartiteShape, ComplexMatrix, HermitianOperator, C64};

/// Default tolerance for eigenvalue signs and test-sum checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default feasibility tolerance for alternating-projection certificates.
pub const DEFAULT_FEAS_TOL: f64 = 1e-7;
