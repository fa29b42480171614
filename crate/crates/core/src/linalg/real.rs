//! Real Gaussian elimination for the small systems that arise on test spaces.

use alloc::vec::Vec;

/// Row-reduces `rows` in place and returns the indices of the pivot columns.
fn reduce(rows: &mut [Vec<f64>], ncols: usize, tol: f64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let (best, mag) = (r..rows.len())
            .map(|i| (i, libm::fabs(rows[i][c])))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= tol {
            continue;
        }
        rows.swap(r, best);
        let p = rows[r][c];
        for v in rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x -= f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Numerical rank of a row-list matrix with `ncols` columns.
pub fn rank(rows: &[Vec<f64>], ncols: usize, tol: f64) -> usize {
    let mut work = rows.to_vec();
    reduce(&mut work, ncols, tol).len()
}

/// Solves `A x = b` when `A` (m×k, row lists) has full column rank and the
/// system is consistent; `None` otherwise.
pub fn solve_full_column_rank(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let k = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    let pivots = reduce(&mut aug, k, tol);
    if pivots.len() != k {
        return None;
    }
    // Rows past the pivots must have a vanishing right-hand side.
    if aug[k..].iter().any(|row| libm::fabs(row[k]) > tol) {
        return None;
    }
    Some((0..k).map(|i| aug[i][k]).collect())
}
