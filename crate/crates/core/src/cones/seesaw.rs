//! Alternating (see-saw) minimization of `<x y|W|x y>` over product unit vectors.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::choi::state_eval;
use crate::linalg::{BipartiteShape, ComplexMatrix, HermitianOperator, C64};
use crate::{random, Error, Result, DEFAULT_TOL};

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_SWEEPS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SeesawConfig {
    pub restarts: usize,
    /// Sweeps per restart.
    pub max_iter: usize,
    pub seed: u64,
    pub tol: f64,
}

impl SeesawConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            max_iter: DEFAULT_SWEEPS,
            seed,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeesawResult {
    pub min_value: f64,
    pub witness_x: Vec<C64>,
    pub witness_y: Vec<C64>,
    pub restarts_used: usize,
    /// Total sweeps over all restarts.
    pub iterations: usize,
    /// Whether the best restart reached a fixed point before running out of sweeps.
    pub converged: bool,
}

fn dims(shape: &BipartiteShape, w: &HermitianOperator) -> Result<(usize, usize)> {
    let d = shape.dims();
    if d.len() != 2 {
        return Err(Error::InvalidShape);
    }
    if w.dim() != shape.total() {
        return Err(Error::DimensionMismatch {
            expected: shape.total(),
            found: w.dim(),
        });
    }
    Ok((d[0], d[1]))
}

/// `(<x| ⊗ I) W (|x> ⊗ I)`.
fn contract_alice(w: &ComplexMatrix, da: usize, db: usize, x: &[C64]) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(db, db);
    for i in 0..da {
        for j in 0..da {
            let c = x[i].conj() * x[j];
            for k in 0..db {
                for l in 0..db {
                    m[(k, l)] += c * w[(i * db + k, j * db + l)];
                }
            }
        }
    }
    HermitianOperator::symmetrized(m).expect("square")
}

/// `(I ⊗ <y|) W (I ⊗ |y>)`.
fn contract_bob(w: &ComplexMatrix, da: usize, db: usize, y: &[C64]) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(da, da);
    for k in 0..db {
        for l in 0..db {
            let c = y[k].conj() * y[l];
            for i in 0..da {
                for j in 0..da {
                    m[(i, j)] += c * w[(i * db + k, j * db + l)];
                }
            }
        }
    }
    HermitianOperator::symmetrized(m).expect("square")
}

fn bottom(h: &HermitianOperator) -> (f64, Vec<C64>) {
    let e = h.eig();
    (e.min_value(), e.vector(e.values.len() - 1))
}

struct Run {
    value: f64,
    x: Vec<C64>,
    y: Vec<C64>,
    sweeps: usize,
    converged: bool,
    trace: Vec<f64>,
}

fn run(w: &HermitianOperator, da: usize, db: usize, mut x: Vec<C64>, max_iter: usize) -> Run {
    let m = w.matrix();
    let threshold = 1e-14 * w.frobenius_norm().max(1.0);
    let (mut value, mut y) = bottom(&contract_alice(m, da, db, &x));
    let mut trace = Vec::with_capacity(max_iter + 1);
    trace.push(value);
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_iter {
        sweeps += 1;
        let (_, nx) = bottom(&contract_bob(m, da, db, &y));
        x = nx;
        let (vx, ny) = bottom(&contract_alice(m, da, db, &x));
        y = ny;
        // Each half-step minimizes exactly, so the objective cannot rise
        // beyond rounding.
        debug_assert!(vx <= value + threshold, "see-saw increased: {value} -> {vx}");
        trace.push(vx);
        let improvement = value - vx;
        value = vx;
        if improvement <= threshold {
            converged = true;
            break;
        }
    }
    Run {
        value,
        x,
        y,
        sweeps,
        converged,
        trace,
    }
}

fn start_vector(seed: u64, restart: usize, da: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    random::unit_vector(&mut rng, da)
}

/// Best value over seeded restarts; an upper bound on `min <x y|W|x y>`.
///
/// Ties between restarts go to the lowest restart index.
pub fn popt_minimize(w: &HermitianOperator, shape: &BipartiteShape, config: &SeesawConfig) -> Result<SeesawResult> {
    let (da, db) = dims(shape, w)?;
    let mut best: Option<Run> = None;
    let mut iterations = 0;
    for r in 0..config.restarts.max(1) {
        let out = run(w, da, db, start_vector(config.seed, r, da), config.max_iter);
        iterations += out.sweeps;
        let better = match &best {
            None => true,
            Some(b) => out.value < b.value,
        };
        if better {
            best = Some(out);
        }
    }
    let best = best.expect("at least one restart");
    let min_value = state_eval(w, shape, &best.x, &best.y)?;
    Ok(SeesawResult {
        min_value,
        witness_x: best.x,
        witness_y: best.y,
        restarts_used: config.restarts.max(1),
        iterations,
        converged: best.converged,
    })
}

/// Objective after the initial Bob step and after every sweep, from a given start.
pub fn seesaw_descent(w: &HermitianOperator, shape: &BipartiteShape, x0: &[C64], max_iter: usize) -> Result<Vec<f64>> {
    let (da, db) = dims(shape, w)?;
    if x0.len() != da {
        return Err(Error::DimensionMismatch {
            expected: da,
            found: x0.len(),
        });
    }
    Ok(run(w, da, db, x0.to_vec(), max_iter).trace)
}
