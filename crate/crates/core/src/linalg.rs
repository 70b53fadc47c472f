//! Small dense linear algebra: power iteration for the largest eigenvalue of
//! a symmetric PSD matrix and Gaussian elimination for the tiny least-squares
//! solves the brute-force oracle needs. Kept hand-rolled to avoid dragging in
//! a LAPACK backend for two constants and 15-variable systems.

use ndarray::{Array1, Array2};

use crate::error::DcError;
use crate::Result;

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration with a deterministic start. Converges for PSD input because the
/// start vector has a nonzero component on every coordinate direction.
pub fn sym_lambda_max(a: &Array2<f64>) -> Result<f64> {
    let (n, m) = a.dim();
    if n != m {
        return Err(DcError::DimensionMismatch { expected: n, got: m });
    }
    if n == 0 {
        return Err(DcError::EmptySequence("sym_lambda_max"));
    }
    // Slightly uneven start avoids starting orthogonal to the leading
    // eigenvector for structured matrices (e.g. constant row sums).
    let mut v = Array1::from_iter((0..n).map(|i| 1.0 + (i as f64 + 1.0) * 1e-3));
    let norm = v.dot(&v).sqrt();
    v /= norm;
    let mut lambda = 0.0f64;
    for _ in 0..1000 {
        let w = a.dot(&v);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            return Ok(0.0); // zero matrix
        }
        let next = w / norm;
        let rayleigh = next.dot(&a.dot(&next));
        if (rayleigh - lambda).abs() <= 1e-13 * rayleigh.abs().max(1.0) {
            return Ok(rayleigh);
        }
        lambda = rayleigh;
        v = next;
    }
    Ok(lambda)
}

/// Solve `A x = b` for small dense square `A` by Gaussian elimination with
/// partial pivoting. Returns an error on (numerically) singular input.
pub fn solve_dense(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let (n, m) = a.dim();
    if n != m || b.len() != n {
        return Err(DcError::DimensionMismatch { expected: n, got: m.min(b.len()) });
    }
    let mut aug = a.clone();
    let mut rhs = b.clone();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                aug[[i, col]]
                    .abs()
                    .partial_cmp(&aug[[j, col]].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        let pivot = aug[[pivot_row, col]];
        if pivot.abs() < 1e-12 {
            return Err(DcError::InvalidParam {
                name: "A",
                reason: format!("matrix singular at column {col} (pivot {pivot:.3e})"),
            });
        }
        if pivot_row != col {
            for j in 0..n {
                aug.swap([pivot_row, j], [col, j]);
            }
            rhs.swap(pivot_row, col);
        }
        for row in (col + 1)..n {
            let factor = aug[[row, col]] / aug[[col, col]];
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                aug[[row, j]] -= factor * aug[[col, j]];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = Array1::zeros(n);
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in (row + 1)..n {
            acc -= aug[[row, j]] * x[j];
        }
        x[row] = acc / aug[[row, row]];
    }
    Ok(x)
}

/// Least squares `min ||y - X b||^2` via the normal equations; adequate for
/// the well-conditioned spot solves used here (subset refits, s <= 15).
pub fn least_squares(x: &Array2<f64>, y: &Array1<f64>) -> Result<Array1<f64>> {
    let (n, _p) = x.dim();
    if y.len() != n {
        return Err(DcError::DimensionMismatch { expected: n, got: y.len() });
    }
    let xt = x.t();
    let gram = xt.dot(x);
    let rhs = xt.dot(y);
    solve_dense(&gram, &rhs)
}
