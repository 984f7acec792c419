//! Dense nalgebra oracles shared by the integration tests.
#![allow(dead_code)]

use altproj::dense::gaussian_matrix;
use altproj::{DenseMatrix, RngSpec};
use nalgebra::DMatrix;

pub fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

pub fn from_na(m: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn fro_sq(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum()
}

/// Singular values, descending.
pub fn sigmas(m: &DenseMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Rank-`r` truncation by a full dense SVD.
pub fn truncation(m: &DenseMatrix, r: usize) -> DenseMatrix {
    let svd = to_na(m).svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut out = DMatrix::zeros(m.rows(), m.cols());
    for &k in order.iter().take(r) {
        out += svd.singular_values[k] * u.column(k) * vt.row(k);
    }
    from_na(&out)
}

/// `U diag(spectrum) Vᵀ` with random orthonormal factors.
pub fn planted(n1: usize, n2: usize, spectrum: &[f64], seed: u64) -> DenseMatrix {
    let k = spectrum.len();
    let u = to_na(&gaussian_matrix(n1, k, RngSpec::new(seed, 100))).qr().q();
    let v = to_na(&gaussian_matrix(n2, k, RngSpec::new(seed, 101))).qr().q();
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(spectrum));
    from_na(&(u * s * v.transpose()))
}

pub fn dist(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.dist_sq(b).unwrap().sqrt()
}
