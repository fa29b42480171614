//! Small helpers for complex vectors stored as slices.

use alloc::vec::Vec;

use super::{C64, ZERO};

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    libm::sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

/// Returns `a / |a|`, or `None` for a zero vector.
pub fn normalized(a: &[C64]) -> Option<Vec<C64>> {
    let n = norm(a);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(a.iter().map(|z| z / n).collect())
}

pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn basis(n: usize, i: usize) -> Vec<C64> {
    let mut v = alloc::vec![ZERO; n];
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Multiplies by a phase so the first largest-magnitude entry is real positive.
pub fn fix_phase(v: &mut [C64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        // A small relative margin keeps the choice stable under rounding.
        if m > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = m;
        }
    }
    if best_mag > 0.0 {
        let phase = v[best].conj() / best_mag;
        for z in v.iter_mut() {
            *z *= phase;
        }
        v[best] = C64::new(v[best].re, 0.0);
    }
}
