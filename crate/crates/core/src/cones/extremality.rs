//! Can a co-CP part be split off the conjugation map `φ_A`?
//!
//! With `C` the Choi operator of `φ_A` and `Ĉ = 2C / Tr C`, look for `E` with
//! `E^Γ ⪰ 0`, `Ĉ − E ⪰ 0` and `Tr E = 1` by Dykstra's method over the two
//! cones and the trace slice. A hit gives the co-CP map `η` with Choi
//! operator `(Tr C / 2) E` and `φ_A − η` CP.
//!
//! Infeasibility is certified by `Z2 ⪰ 0` and a scalar `s` with
//! `Z1 = Z2^Γ + s I ⪰ 0` and `Tr(Z2 Ĉ) + s < 0`: any feasible `E` would give
//! `0 ≤ Tr(Z1 E^Γ) + Tr(Z2 (Ĉ − E)) = s + Tr(Z2 Ĉ)`.

use alloc::collections::VecDeque;

use crate::choi::LinearMapChoi;
use crate::linalg::{partial_transpose, BipartiteShape, ComplexMatrix, HermitianOperator};
use crate::{Error, Result, DEFAULT_FEAS_TOL, DEFAULT_TOL};

const STALL_WINDOW: usize = 500;
const STALL_RATIO: f64 = 1e-12;
const CERTIFY_EVERY: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalityConfig {
    pub tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for ExtremalityConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            feas_tol: DEFAULT_FEAS_TOL,
            max_iter: 20_000,
        }
    }
}

/// Dual certificate that no co-CP part splits off.
#[derive(Debug, Clone, PartialEq)]
pub struct Infeasibility {
    /// `Z2 ⪰ 0`, normalized to unit Frobenius norm.
    pub z2: HermitianOperator,
    pub s: f64,
    /// `Tr(Z2 Ĉ) + s`, negative.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExtremalityVerdict {
    /// No co-CP part splits off: either a dual certificate was found or the
    /// feasibility residual stalled above `feas_tol` (then `certificate` is `None`).
    Rigid {
        residual: f64,
        iterations: usize,
        certificate: Option<Infeasibility>,
    },
    /// `η` is co-CP, nonzero, and `φ_A − η` is CP (within `feas_tol`).
    DecomposableNontrivially {
        eta: LinearMapChoi,
        residual: f64,
        iterations: usize,
    },
    Inconclusive { residual: f64, iterations: usize },
}

impl ExtremalityVerdict {
    pub fn is_rigid(&self) -> bool {
        matches!(self, ExtremalityVerdict::Rigid { .. })
    }
}

/// Distance of `x` to `{E^Γ ⪰ 0}` and to `{Ĉ − E ⪰ 0}`, combined in quadrature.
fn residual(x: &HermitianOperator, c_hat: &HermitianOperator, shape: &BipartiteShape) -> f64 {
    let d1 = partial_transpose(x, shape, 1).expect("shape").psd_distance();
    let d2 = c_hat.sub(x).psd_distance();
    libm::sqrt(d1 * d1 + d2 * d2)
}

/// Checks the certificate built from a candidate `Z2` (clipped to its PSD part).
fn certify(z2: &HermitianOperator, c_hat: &HermitianOperator, shape: &BipartiteShape) -> Option<Infeasibility> {
    let z2 = z2.psd_part();
    let norm = z2.frobenius_norm();
    if norm == 0.0 {
        return None;
    }
    let z2 = z2.scale(1.0 / norm);
    let s = -partial_transpose(&z2, shape, 1).ok()?.min_eigenvalue() + 1e-12;
    let value = z2.trace_product(c_hat) + s;
    (value < -1e-12 * c_hat.frobenius_norm().max(1.0)).then_some(Infeasibility { z2, s, value })
}

impl Infeasibility {
    /// Smallest eigenvalues of `Z2` and `Z1 = Z2^Γ + s I`.
    pub fn margins(&self, shape: &BipartiteShape) -> Result<(f64, f64)> {
        let z1 = partial_transpose(&self.z2, shape, 1)?.min_eigenvalue() + self.s;
        Ok((self.z2.min_eigenvalue(), z1))
    }
}

pub fn extremality_probe(a: &ComplexMatrix, config: &ExtremalityConfig) -> Result<ExtremalityVerdict> {
    let n = a.require_square()?;
    let phi = LinearMapChoi::from_conjugation(a);
    let c = phi.choi();
    let tr = c.trace();
    if tr <= 0.0 {
        return Err(Error::TraceViolation { trace: tr });
    }
    let shape = BipartiteShape::bipartite(n, n);
    let d = n * n;
    let c_hat = c.scale(2.0 / tr);
    let identity = HermitianOperator::identity(d);

    let mut x = c.scale(1.0 / tr);
    let mut c1 = x.scale(0.0);
    let mut c2 = c1.clone();
    let mut history: VecDeque<f64> = VecDeque::new();
    let mut res = residual(&x, &c_hat, &shape);

    for it in 0..=config.max_iter {
        if res <= config.feas_tol {
            let eta = LinearMapChoi::new(x.scale(tr / 2.0), n, n)?;
            return Ok(ExtremalityVerdict::DecomposableNontrivially {
                eta,
                residual: res,
                iterations: it,
            });
        }
        history.push_back(res);
        if history.len() > STALL_WINDOW {
            let old = history.pop_front().expect("non-empty");
            if old - res < STALL_RATIO * old {
                return Ok(ExtremalityVerdict::Rigid {
                    residual: res,
                    iterations: it,
                    certificate: certify(&c2, &c_hat, &shape),
                });
            }
        }
        if it > 0 && it % CERTIFY_EVERY == 0 {
            if let Some(cert) = certify(&c2, &c_hat, &shape) {
                return Ok(ExtremalityVerdict::Rigid {
                    residual: res,
                    iterations: it,
                    certificate: Some(cert),
                });
            }
        }
        if it == config.max_iter {
            break;
        }
        // K1: partial transpose PSD.
        let z = x.add(&c1);
        let pt = partial_transpose(&z, &shape, 1)?;
        let y1 = partial_transpose(&pt.psd_part(), &shape, 1)?;
        c1 = z.sub(&y1);
        // K2: Ĉ − E PSD.
        let z = y1.add(&c2);
        let y2 = c_hat.sub(&c_hat.sub(&z).psd_part());
        c2 = z.sub(&y2);
        // Trace slice, no correction needed for an affine set.
        let shift = (1.0 - y2.trace()) / d as f64;
        x = y2.add(&identity.scale(shift));
        res = residual(&x, &c_hat, &shape);
    }
    Ok(ExtremalityVerdict::Inconclusive {
        residual: res,
        iterations: config.max_iter,
    })
}
