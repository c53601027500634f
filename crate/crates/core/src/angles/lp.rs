//! A small dense two-phase simplex solver with Bland's rule.
//!
//! Solves `maximize c.x subject to A x = b, x >= 0` with `b >= 0`. Problem
//! sizes here are tiny (a few hundred variables), so a plain tableau with
//! anti-cycling pivoting is simple, deterministic, and fast enough.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("linear program is infeasible (phase-1 residual {0:.3e})")]
    Infeasible(f64),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex failed to terminate within {0} pivots")]
    PivotLimit(usize),
}

const PIVOT_TOL: f64 = 1e-9;

/// Maximize `c.x` over `A x = b, x >= 0`. Requires `b >= 0` componentwise.
pub fn maximize(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    c: &DVector<f64>,
) -> Result<(DVector<f64>, f64), LpError> {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    debug_assert!(b.iter().all(|&bi| bi >= 0.0));

    // Tableau columns: n structural variables, m artificials, rhs.
    let cols = n + m + 1;
    let mut t = DMatrix::<f64>::zeros(m, cols);
    t.view_mut((0, 0), (m, n)).copy_from(a);
    for i in 0..m {
        t[(i, n + i)] = 1.0;
        t[(i, cols - 1)] = b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: maximize minus the sum of artificials.
    let mut c1 = DVector::<f64>::zeros(n + m);
    for j in n..n + m {
        c1[j] = -1.0;
    }
    run(&mut t, &mut basis, &c1, n + m)?;
    let phase1 = basis
        .iter()
        .enumerate()
        .filter(|&(_, &bj)| bj >= n)
        .map(|(i, _)| t[(i, cols - 1)])
        .sum::<f64>();
    if phase1 > 1e-7 {
        return Err(LpError::Infeasible(phase1));
    }

    // Drive remaining (degenerate) artificials out of the basis where a
    // structural pivot exists; rows with none are redundant and harmless.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[(i, j)].abs() > PIVOT_TOL) {
                pivot(&mut t, &mut basis, i, j);
            }
        }
    }

    // Phase 2: the real objective; artificial columns may not re-enter.
    let mut c2 = DVector::<f64>::zeros(n + m);
    c2.rows_mut(0, n).copy_from(c);
    run(&mut t, &mut basis, &c2, n)?;

    let mut x = DVector::<f64>::zeros(n);
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[(i, cols - 1)];
        }
    }
    let objective = c.dot(&x);
    Ok((x, objective))
}

/// Simplex iterations with Bland's rule; only columns `< enterable` may
/// enter the basis.
fn run(
    t: &mut DMatrix<f64>,
    basis: &mut [usize],
    c: &DVector<f64>,
    enterable: usize,
) -> Result<(), LpError> {
    let m = t.nrows();
    let rhs = t.ncols() - 1;
    let limit = 50_000;
    for _ in 0..limit {
        // Reduced costs: r_j = c_j - sum_i c_{basis(i)} t_{ij}; entering
        // column = smallest index with r_j > 0 (Bland).
        let mut entering = None;
        for j in 0..enterable {
            if basis.contains(&j) {
                continue;
            }
            let mut r = c[j];
            for i in 0..m {
                r -= c[basis[i]] * t[(i, j)];
            }
            if r > PIVOT_TOL {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else {
            return Ok(());
        };

        // Ratio test; ties broken by smallest basis index (Bland).
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[(i, j)] > PIVOT_TOL {
                let ratio = t[(i, rhs)] / t[(i, j)];
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - 1e-12
                            || (ratio < lr + 1e-12 && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((i, _)) = leave else {
            return Err(LpError::Unbounded);
        };
        pivot(t, basis, i, j);
    }
    Err(LpError::PivotLimit(limit))
}

fn pivot(t: &mut DMatrix<f64>, basis: &mut [usize], row: usize, col: usize) {
    let p = t[(row, col)];
    let ncols = t.ncols();
    for j in 0..ncols {
        t[(row, j)] /= p;
    }
    for i in 0..t.nrows() {
        if i != row {
            let f = t[(i, col)];
            if f != 0.0 {
                for j in 0..ncols {
                    let v = t[(row, j)];
                    t[(i, j)] -= f * v;
                }
            }
        }
    }
    basis[row] = col;
}
