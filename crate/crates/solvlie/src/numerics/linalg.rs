//! Rank/span/nullspace helpers for the small subspace computations
//! (nilradical validation, generalized eigenspaces, complements).

use super::matrix::{symmetric_eigen, Matrix};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|v| v * s).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Numerical rank of the column span. The tolerance is relative to the
/// largest Gram eigenvalue (not squared: squaring would put the threshold
/// below the accuracy of the Jacobi eigensolver).
pub fn rank(columns: &[Vec<f64>], tol: f64) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let a = Matrix::from_columns(columns);
    let gram = a.transpose().mul(&a);
    let (eigs, _) = symmetric_eigen(&gram);
    let max = eigs.iter().fold(0.0f64, |m, &v| m.max(v));
    if max <= 0.0 {
        return 0;
    }
    eigs.iter().filter(|&&v| v > tol * max).count()
}

/// Orthonormal basis of the column span (modified Gram-Schmidt with
/// re-orthogonalization, dropping dependent columns).
pub fn orthonormal_basis(columns: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let scale = columns
        .iter()
        .map(|c| norm(c))
        .fold(0.0f64, f64::max)
        .max(1.0);
    for col in columns {
        let mut v = col.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                axpy(&mut v, -c, b);
            }
        }
        let n = norm(&v);
        if n > tol * scale {
            basis.push(scaled(&v, 1.0 / n));
        }
    }
    basis
}

/// Component of `v` orthogonal to the span of an orthonormal basis.
pub fn project_out(v: &[f64], orthonormal: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for b in orthonormal {
        let c = dot(&r, b);
        axpy(&mut r, -c, b);
    }
    r
}

/// Distance from `v` to the span of the (orthonormal) basis.
pub fn residual_to_span(v: &[f64], orthonormal: &[Vec<f64>]) -> f64 {
    norm(&project_out(v, orthonormal))
}

/// Is `v` in the span of `columns` (relative tolerance)?
pub fn in_span(v: &[f64], columns: &[Vec<f64>], tol: f64) -> bool {
    let basis = orthonormal_basis(columns, 1e-12);
    residual_to_span(v, &basis) <= tol * norm(v).max(1.0)
}

/// Orthonormal basis of the nullspace of a matrix. The tolerance is relative
/// to the largest Gram eigenvalue.
pub fn nullspace(a: &Matrix, tol: f64) -> Vec<Vec<f64>> {
    let gram = a.transpose().mul(&a);
    let (eigs, vecs) = symmetric_eigen(&gram);
    let max = eigs.iter().fold(0.0f64, |m, &v| m.max(v)).max(1e-300);
    let mut out = Vec::new();
    for (j, &e) in eigs.iter().enumerate() {
        if e <= tol * max {
            out.push(vecs.column(j));
        }
    }
    orthonormal_basis(&out, 1e-12)
}

/// Intersection of two column spans. Solves [A | -B] x = 0 and maps the A-part.
pub fn span_intersection(a_cols: &[Vec<f64>], b_cols: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    if a_cols.is_empty() || b_cols.is_empty() {
        return Vec::new();
    }
    let dim = a_cols[0].len();
    let mut stacked: Vec<Vec<f64>> = Vec::new();
    for c in a_cols {
        stacked.push(c.clone());
    }
    for c in b_cols {
        stacked.push(scaled(c, -1.0));
    }
    let m = Matrix::from_columns(&stacked);
    let kernel = nullspace(&m, tol);
    let mut result = Vec::new();
    for k in kernel {
        let mut v = vec![0.0; dim];
        for (i, c) in a_cols.iter().enumerate() {
            axpy(&mut v, k[i], c);
        }
        if norm(&v) > tol {
            result.push(v);
        }
    }
    orthonormal_basis(&result, tol)
}

/// Least-squares coordinates of `v` in the given basis (must be well
/// conditioned; used for expressing bracket results in subalgebra bases).
pub fn coordinates_in_basis(v: &[f64], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    if basis.is_empty() {
        return if norm(v) < 1e-10 {
            Some(Vec::new())
        } else {
            None
        };
    }
    let a = Matrix::from_columns(basis);
    let gram = a.transpose().mul(&a);
    let rhs = a.transpose().mul_vec(v);
    let coords = gram.solve(&rhs).ok()?;
    // residual check
    let mut recon = vec![0.0; v.len()];
    for (i, b) in basis.iter().enumerate() {
        axpy(&mut recon, coords[i], b);
    }
    let res = norm(&sub(v, &recon));
    if res <= 1e-8 * norm(v).max(1.0) {
        Some(coords)
    } else {
        None
    }
}
