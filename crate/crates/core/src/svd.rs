//! One-sided (Hestenes) Jacobi SVD for small dense matrices.
//!
//! Used for the `(ℓ+1)×ℓ` bidiagonal factor of the Lanczos process and for
//! the dense exact truncation of small matrices. Columns are rotated pairwise
//! until every pair is orthogonal to working precision; singular values come
//! out as column norms, which keeps small values relatively accurate.

use crate::dense::{dot, norm, DenseMatrix};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U diag(sigma) Vᵀ` with `k = min(m, n)` columns, sorted
/// descending. Columns of `u` belonging to zero singular values are completed
/// to an orthonormal set.
#[derive(Clone, Debug)]
pub struct ThinSvd {
    pub u: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
    pub v: Vec<Vec<f64>>,
}

/// Column-major input: `cols[j]` is column `j` of an `m×n` matrix.
pub(crate) fn jacobi_svd_cols(mut w: Vec<Vec<f64>>, m: usize) -> ThinSvd {
    let n = w.len();
    if n > m {
        // Work on the transpose so that columns are the long side.
        let t: Vec<Vec<f64>> = (0..m).map(|i| w.iter().map(|c| c[i]).collect()).collect();
        let ThinSvd { u, sigma, v } = jacobi_svd_cols(t, n);
        return ThinSvd { u: v, sigma, v: u };
    }
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let tol = f64::EPSILON * (m as f64).sqrt();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&w[p], &w[p]);
                let beta = dot(&w[q], &w[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&w[p], &w[q]);
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(f64, usize)> = w.iter().enumerate().map(|(j, c)| (norm(c), j)).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let sigma_max = order.first().map_or(0.0, |o| o.0);
    let negligible = sigma_max * f64::EPSILON * (m as f64);
    let mut u = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut v_sorted = Vec::with_capacity(n);
    let mut missing = Vec::new();
    for (k, &(s, j)) in order.iter().enumerate() {
        if s > negligible && s > 0.0 {
            u.push(w[j].iter().map(|x| x / s).collect());
        } else {
            u.push(vec![0.0; m]);
            missing.push(k);
        }
        sigma.push(s);
        v_sorted.push(v[j].clone());
    }
    for k in missing {
        u[k] = orthonormal_complement(&u, m);
    }
    ThinSvd {
        u,
        sigma,
        v: v_sorted,
    }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(q);
    let (cp, cq) = (&mut left[p], &mut right[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// A unit vector orthogonal to every nonzero vector in `basis`, built from the
/// canonical basis by twice-repeated Gram–Schmidt.
pub(crate) fn orthonormal_complement(basis: &[Vec<f64>], m: usize) -> Vec<f64> {
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = 0.0;
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let h = dot(b, &e);
                if h != 0.0 {
                    for (ek, bk) in e.iter_mut().zip(b) {
                        *ek -= h * bk;
                    }
                }
            }
        }
        let nrm = norm(&e);
        if nrm > 0.5 {
            return e.into_iter().map(|x| x / nrm).collect();
        }
        if nrm > best_norm {
            best_norm = nrm;
            best = Some(e);
        }
    }
    let e = best.expect("basis spans the whole space");
    e.into_iter().map(|x| x / best_norm).collect()
}

/// Thin SVD of a dense matrix.
pub fn dense_svd(a: &DenseMatrix) -> ThinSvd {
    let cols = (0..a.cols()).map(|j| a.column(j)).collect();
    jacobi_svd_cols(cols, a.rows())
}
