use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Outcome of [`maxvol`].
#[derive(Clone, Debug, PartialEq)]
pub struct MaxvolResult {
    /// `r` distinct row indices of the dominant submatrix.
    pub rows: Vec<usize>,
    /// `false` when `max_iter` was reached before every entry of
    /// `m * A_I^{-1}` dropped to at most `1 + tol` in magnitude.
    pub converged: bool,
    pub iterations: usize,
}

/// Greedy maximum-volume row selection for a tall `N x r` matrix.
///
/// Starts from the pivot rows of a partially pivoted LU factorization, then
/// repeatedly swaps in the row holding the largest entry of
/// `B = m * m[rows, :]^{-1}` until `max |B| <= 1 + tol`.
pub fn maxvol(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<MaxvolResult> {
    let (n, r) = m.shape();
    if r == 0 || n < r {
        return Err(Error::Dimension(format!("maxvol needs a tall matrix, got {n}x{r}")));
    }
    let mut rows = initial_pivots(m)?;

    let sub = m.select_rows(&rows);
    // B^T = A_I^{-T} m^T
    let lu = sub.transpose().lu();
    let mut b = lu
        .solve(&m.transpose())
        .ok_or(Error::SingularPivot { bond: None })?
        .transpose();

    let mut iterations = 0;
    loop {
        let (mut bi, mut bj, mut best) = (0, 0, 0.0f64);
        for j in 0..r {
            for i in 0..n {
                let v = b[(i, j)].abs();
                if v > best {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        if best <= 1.0 + tol {
            return Ok(MaxvolResult {
                rows,
                converged: true,
                iterations,
            });
        }
        if iterations >= max_iter {
            log::warn!("maxvol stopped after {max_iter} swaps with max |B| = {best:.4}");
            return Ok(MaxvolResult {
                rows,
                converged: false,
                iterations,
            });
        }
        // Rank-one update of B for the swap rows[bj] <- bi.
        let pivot = b[(bi, bj)];
        let col = b.column(bj).into_owned();
        let mut row = b.row(bi).into_owned();
        row[bj] -= 1.0;
        b -= (col * row) / pivot;
        rows[bj] = bi;
        iterations += 1;
    }
}

/// Row pivots of Gaussian elimination with partial pivoting.
fn initial_pivots(m: &DMatrix<f64>) -> Result<Vec<usize>> {
    let (n, r) = m.shape();
    let scale = m.amax();
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::SingularPivot { bond: None });
    }
    let mut work = m.clone();
    let mut used = vec![false; n];
    let mut rows = Vec::with_capacity(r);
    for j in 0..r {
        let (mut p, mut best) = (usize::MAX, 0.0f64);
        for i in 0..n {
            if !used[i] && work[(i, j)].abs() > best {
                best = work[(i, j)].abs();
                p = i;
            }
        }
        if p == usize::MAX || best <= 1e-14 * scale {
            return Err(Error::SingularPivot { bond: None });
        }
        used[p] = true;
        rows.push(p);
        let pivot_row = work.row(p).into_owned();
        for i in 0..n {
            if used[i] {
                continue;
            }
            let f = work[(i, j)] / pivot_row[j];
            if f != 0.0 {
                for c in j..r {
                    work[(i, c)] -= f * pivot_row[c];
                }
            }
        }
    }
    Ok(rows)
}

/// Skeleton (CUR) approximation `A[:, J] A[I, J]^{-1} A[I, :]`.
///
/// A singular intersection matrix gets one diagonal jitter of
/// `1e-12 * max|A[I, J]|` before giving up.
pub fn matrix_cross(a: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> Result<DMatrix<f64>> {
    if rows.len() != cols.len() || rows.is_empty() {
        return Err(Error::Dimension(format!(
            "cross needs equally many rows and columns, got {} and {}",
            rows.len(),
            cols.len()
        )));
    }
    if rows.iter().any(|&i| i >= a.nrows()) || cols.iter().any(|&j| j >= a.ncols()) {
        return Err(Error::OutOfBounds {
            index: rows.iter().chain(cols).copied().collect(),
            shape: vec![a.nrows(), a.ncols()],
        });
    }
    let c = a.select_columns(cols);
    let r = a.select_rows(rows);
    let hat = r.select_columns(cols);
    let x = solve_with_jitter(&hat, &r).ok_or(Error::SingularPivot { bond: None })?;
    Ok(c * x)
}

/// Solves `a x = b`, retrying once with a small diagonal jitter when `a` is
/// numerically singular.
pub(crate) fn solve_with_jitter(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if let Some(x) = solve_checked(a, b) {
        return Some(x);
    }
    let jitter = 1e-12 * a.amax();
    if jitter == 0.0 {
        return None;
    }
    let mut shifted = a.clone();
    for i in 0..shifted.nrows().min(shifted.ncols()) {
        shifted[(i, i)] += jitter;
    }
    solve_checked(&shifted, b)
}

fn solve_checked(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let lu = a.clone().lu();
    let u = lu.u();
    let diag = u.diagonal();
    let max = diag.amax();
    let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(max > 0.0) || min <= f64::EPSILON * max * a.nrows() as f64 {
        return None;
    }
    lu.solve(b).filter(|x| x.iter().all(|v| v.is_finite()))
}
