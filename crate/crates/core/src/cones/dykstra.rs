//! Membership in `PSD + PSD^Γ` by Dykstra's alternating projections.
//!
//! The pair `(P, Q)` alternates between the product cone
//! `{P ⪰ 0} × {Q^Γ ⪰ 0}` and the affine slice `{P + Q = W}`. If the sets meet
//! the residual `R = W − P − Q` goes to zero. Otherwise `−R` tends to a
//! separating operator, which is checked every few iterations.

use crate::cones::{Certificate, ConeVerdict, Witness};
use crate::linalg::{partial_transpose, BipartiteShape, HermitianOperator};
use crate::{Error, Result, DEFAULT_FEAS_TOL, DEFAULT_TOL};

pub const DEFAULT_MAX_ITER: usize = 20_000;
const STALL_WINDOW: usize = 500;
const STALL_RATIO: f64 = 1e-12;
const WITNESS_EVERY: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct DykstraConfig {
    /// Eigenvalue tolerance for the cone constraints.
    pub tol: f64,
    /// Residual bound for a member verdict.
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for DykstraConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            feas_tol: DEFAULT_FEAS_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// `P ⪰ 0` and `Q^Γ ⪰ 0` with `residual = |W − P − Q|_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCertificate {
    pub p: HermitianOperator,
    pub q: HermitianOperator,
    pub residual: f64,
}

impl DecompositionCertificate {
    /// Smallest eigenvalues of `P` and `Q^Γ`.
    pub fn cone_margins(&self, shape: &BipartiteShape) -> Result<(f64, f64)> {
        Ok((
            self.p.min_eigenvalue(),
            partial_transpose(&self.q, shape, 1)?.min_eigenvalue(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DykstraOutcome {
    pub verdict: ConeVerdict,
    /// The last cone point, valid for the cone constraints whatever the verdict.
    pub certificate: DecompositionCertificate,
    pub iterations: usize,
}

fn check_shape(w: &HermitianOperator, shape: &BipartiteShape) -> Result<()> {
    if shape.factors() != 2 {
        return Err(Error::InvalidShape);
    }
    if w.dim() != shape.total() {
        return Err(Error::DimensionMismatch {
            expected: shape.total(),
            found: w.dim(),
        });
    }
    Ok(())
}

fn project_ppt(x: &HermitianOperator, shape: &BipartiteShape) -> HermitianOperator {
    let pt = partial_transpose(x, shape, 1).expect("shape checked");
    partial_transpose(&pt.psd_part(), shape, 1).expect("shape checked")
}

/// Makes `Z` PSD and PPT by adding a multiple of the identity, then tests `Tr(Z W) < 0`.
fn separating(w: &HermitianOperator, z: &HermitianOperator, shape: &BipartiteShape) -> Option<(HermitianOperator, f64)> {
    let scale = z.frobenius_norm();
    if scale == 0.0 {
        return None;
    }
    let z = z.scale(1.0 / scale);
    let lo = z.min_eigenvalue();
    let lo_pt = partial_transpose(&z, shape, 1).expect("shape checked").min_eigenvalue();
    let shift = 0.0f64.max(-lo).max(-lo_pt) + 1e-12;
    let z = z.add(&HermitianOperator::identity(w.dim()).scale(shift));
    let value = z.trace_product(w);
    (value < -1e-12 * w.frobenius_norm().max(1.0)).then_some((z, value))
}

fn member(p: HermitianOperator, q: HermitianOperator, residual: f64, iterations: usize) -> DykstraOutcome {
    let certificate = DecompositionCertificate { p, q, residual };
    DykstraOutcome {
        verdict: ConeVerdict::Member {
            certificate: Certificate::Decomposition(certificate.clone()),
            residual,
        },
        certificate,
        iterations,
    }
}

/// Decides `W ∈ PSD + PSD^Γ`.
///
/// Member when the residual drops below `feas_tol`; refuted when a separating
/// operator is found or the residual stalls above `feas_tol`; inconclusive
/// after `max_iter` otherwise.
pub fn decomposable_sum_membership(
    w: &HermitianOperator,
    shape: &BipartiteShape,
    config: &DykstraConfig,
) -> Result<DykstraOutcome> {
    check_shape(w, shape)?;
    let zero = w.scale(0.0);
    if w.min_eigenvalue() >= -config.tol {
        return Ok(member(w.clone(), zero, 0.0, 0));
    }
    if partial_transpose(w, shape, 1)?.min_eigenvalue() >= -config.tol {
        return Ok(member(zero, w.clone(), 0.0, 0));
    }

    let mut xp = w.scale(0.5);
    let mut xq = w.scale(0.5);
    let mut cp = zero.clone();
    let mut cq = zero.clone();
    let mut history: alloc::collections::VecDeque<f64> = alloc::collections::VecDeque::new();
    let mut p = zero.clone();
    let mut q = zero;
    let mut residual = f64::INFINITY;

    for it in 1..=config.max_iter {
        // Cone step with Dykstra corrections.
        let yp_in = xp.add(&cp);
        let yq_in = xq.add(&cq);
        p = yp_in.psd_part();
        q = project_ppt(&yq_in, shape);
        cp = yp_in.sub(&p);
        cq = yq_in.sub(&q);
        // Affine step: split the residual evenly.
        let r = w.sub(&p.add(&q));
        residual = r.frobenius_norm();
        if residual <= config.feas_tol {
            return Ok(member(p, q, residual, it));
        }
        let half = r.scale(0.5);
        xp = p.add(&half);
        xq = q.add(&half);

        if it % WITNESS_EVERY == 0 {
            if let Some((z, value)) = separating(w, &r.scale(-1.0), shape) {
                return Ok(DykstraOutcome {
                    verdict: ConeVerdict::Refuted {
                        witness: Witness::Separating { z, value },
                        residual,
                    },
                    certificate: DecompositionCertificate { p, q, residual },
                    iterations: it,
                });
            }
        }
        history.push_back(residual);
        if history.len() > STALL_WINDOW {
            let old = history.pop_front().expect("non-empty");
            if old - residual < STALL_RATIO * old {
                let witness = match separating(w, &r.scale(-1.0), shape) {
                    Some((z, value)) => Witness::Separating { z, value },
                    None => Witness::Stall { gap: r },
                };
                return Ok(DykstraOutcome {
                    verdict: ConeVerdict::Refuted { witness, residual },
                    certificate: DecompositionCertificate { p, q, residual },
                    iterations: it,
                });
            }
        }
    }
    Ok(DykstraOutcome {
        verdict: ConeVerdict::Inconclusive { residual },
        certificate: DecompositionCertificate { p, q, residual },
        iterations: config.max_iter,
    })
}
