//! Jacobi-preconditioned conjugate gradients and a dense Cholesky oracle.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative residual target `‖Ax − b‖ ≤ tol ‖b‖`.
    pub tol: f64,
    /// Iteration cap; `None` means `10 n + 100`.
    pub max_iter: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: DEFAULT_TOL, max_iter: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` for symmetric positive definite `A`, optionally warm
/// started from `x0`. On failure the best iterate rides along in
/// [`Error::NotConverged`].
pub fn solve_spd(a: &CsrMatrix, b: &[f64], x0: Option<&[f64]>, opts: SolverOptions) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], SolveStats { iterations: 0, residual: 0.0 }));
    }
    let target = opts.tol * bnorm;
    let max_iter = opts.max_iter.unwrap_or(10 * n + 100);
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { f64::NAN })
        .collect();
    if inv_diag.iter().any(|d| d.is_nan()) {
        return Err(Error::NonSpdDetected);
    }

    let mut x = match x0 {
        Some(x0) if x0.len() == n => x0.to_vec(),
        _ => vec![0.0; n],
    };
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut best = x.clone();
    let mut best_res = f64::INFINITY;
    let mut it = 0usize;

    // outer restarts recompute the true residual, so the returned iterate
    // satisfies the contract and not only the recursive estimate
    loop {
        a.mul_vec_into(&x, &mut ap);
        for i in 0..n {
            r[i] = b[i] - ap[i];
        }
        let true_res = norm(&r);
        if true_res < best_res {
            best_res = true_res;
            best.copy_from_slice(&x);
        }
        if true_res <= target {
            return Ok((x, SolveStats { iterations: it, residual: true_res / bnorm }));
        }
        if it >= max_iter {
            return Err(Error::NotConverged { iterations: it, residual: best_res / bnorm, best });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);
        let start = it;
        while it < max_iter {
            a.mul_vec_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                if pap <= 0.0 && norm(&p) > 0.0 {
                    return Err(Error::NonSpdDetected);
                }
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            it += 1;
            if norm(&r) <= 0.5 * target {
                break;
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        if it == start {
            return Err(Error::NotConverged { iterations: it, residual: best_res / bnorm, best });
        }
    }
}

/// Dense Cholesky factor-and-solve of a row-major SPD matrix. Meant as a
/// reference for small systems.
pub fn dense_cholesky_solve(a: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != n * n || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return Err(Error::NonSpdDetected);
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    Ok(y)
}
