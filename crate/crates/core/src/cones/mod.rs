//! Cone membership: PSD, PPT, POPT (product-positive) and decomposable.

mod dykstra;
mod extremality;
mod seesaw;

use alloc::vec::Vec;

pub use dykstra::{decomposable_sum_membership, DecompositionCertificate, DykstraConfig, DykstraOutcome};
pub use extremality::{extremality_probe, ExtremalityConfig, ExtremalityVerdict, Infeasibility};
pub use seesaw::{popt_minimize, seesaw_descent, SeesawConfig, SeesawResult};

use crate::linalg::{partial_transpose, BipartiteShape, HermitianOperator, C64};
use crate::{Result, DEFAULT_FEAS_TOL, DEFAULT_TOL};

/// Why an operator belongs to a cone.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// The operator itself is PSD; carries its smallest eigenvalue.
    Psd { min_eigenvalue: f64 },
    /// The partial transpose is PSD; carries its smallest eigenvalue.
    PartialTranspose { min_eigenvalue: f64 },
    /// `W = P + Q` with `P ⪰ 0` and `Q^Γ ⪰ 0`.
    Decomposition(DecompositionCertificate),
}

/// Why an operator lies outside a cone.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// An eigenvector with negative eigenvalue (of `W`, or of `W^Γ` for PPT checks).
    Eigenvector { vector: Vec<C64>, eigenvalue: f64 },
    /// Product vectors with `<x y|W|x y> = value < 0`.
    ProductPair { x: Vec<C64>, y: Vec<C64>, value: f64 },
    /// `Z ⪰ 0`, `Z^Γ ⪰ 0` with `Tr(Z W) = value < 0`, which rules out `W ∈ PSD + PSD^Γ`.
    Separating { z: HermitianOperator, value: f64 },
    /// Alternating projections stalled with this persistent gap `W − P − Q`.
    /// Heuristic evidence only.
    Stall { gap: HermitianOperator },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConeVerdict {
    Member { certificate: Certificate, residual: f64 },
    Refuted { witness: Witness, residual: f64 },
    /// No violation found, but no certificate either.
    Likely { min_value: f64 },
    /// The numerical procedure neither converged nor stalled.
    Inconclusive { residual: f64 },
}

impl ConeVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, ConeVerdict::Member { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, ConeVerdict::Refuted { .. })
    }
}

/// PSD verdict from the smallest eigenpair.
pub(crate) fn psd_verdict(w: &HermitianOperator, tol: f64) -> ConeVerdict {
    let e = w.eig();
    let min = e.min_value();
    if min >= -tol {
        ConeVerdict::Member {
            certificate: Certificate::Psd { min_eigenvalue: min },
            residual: min,
        }
    } else {
        ConeVerdict::Refuted {
            witness: Witness::Eigenvector {
                vector: e.vector(e.values.len() - 1),
                eigenvalue: min,
            },
            residual: min,
        }
    }
}

pub fn is_psd(w: &HermitianOperator, tol: f64) -> ConeVerdict {
    psd_verdict(w, tol)
}

/// PPT test on the second factor; the witness is an eigenvector of `W^Γ`.
pub fn is_ppt(w: &HermitianOperator, shape: &BipartiteShape, tol: f64) -> Result<ConeVerdict> {
    let pt = partial_transpose(w, shape, 1)?;
    Ok(match psd_verdict(&pt, tol) {
        ConeVerdict::Member { residual, .. } => ConeVerdict::Member {
            certificate: Certificate::PartialTranspose {
                min_eigenvalue: residual,
            },
            residual,
        },
        other => other,
    })
}

/// Settings for [`is_popt`].
#[derive(Debug, Clone, PartialEq)]
pub struct PoptConfig {
    pub tol: f64,
    pub feas_tol: f64,
    pub seesaw: SeesawConfig,
    pub dykstra_max_iter: usize,
}

impl PoptConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            tol: DEFAULT_TOL,
            feas_tol: DEFAULT_FEAS_TOL,
            seesaw: SeesawConfig::new(seed),
            dykstra_max_iter: dykstra::DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoptVerdict {
    pub verdict: ConeVerdict,
    /// Whether `W` itself is PSD.
    pub psd: bool,
    /// True when the certified/refuted dichotomy is exhaustive (2 ⊗ 2).
    pub exact: bool,
    pub seesaw: SeesawResult,
}

/// Three-valued POPT decision: PSD and PPT certificates first, then a
/// see-saw search for a negative product value, then decomposability.
pub fn is_popt(w: &HermitianOperator, shape: &BipartiteShape, config: &PoptConfig) -> Result<PoptVerdict> {
    let seesaw = popt_minimize(w, shape, &config.seesaw)?;
    let exact = shape.dims() == [2, 2];
    let psd = psd_verdict(w, config.tol);
    let is_psd = psd.is_member();
    let done = |verdict| {
        Ok(PoptVerdict {
            verdict,
            psd: is_psd,
            exact,
            seesaw: seesaw.clone(),
        })
    };
    if is_psd {
        return done(psd);
    }
    let ppt = is_ppt(w, shape, config.tol)?;
    if ppt.is_member() {
        return done(ppt);
    }
    if seesaw.min_value < -config.tol {
        return done(ConeVerdict::Refuted {
            witness: Witness::ProductPair {
                x: seesaw.witness_x.clone(),
                y: seesaw.witness_y.clone(),
                value: seesaw.min_value,
            },
            residual: seesaw.min_value,
        });
    }
    let dcfg = DykstraConfig {
        tol: config.tol,
        feas_tol: config.feas_tol,
        max_iter: config.dykstra_max_iter,
    };
    match decomposable_sum_membership(w, shape, &dcfg)?.verdict {
        v @ ConeVerdict::Member { .. } => done(v),
        _ => done(ConeVerdict::Likely {
            min_value: seesaw.min_value,
        }),
    }
}
