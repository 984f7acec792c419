//! Golub–Kahan (Lanczos) bidiagonalization with full reorthogonalization.
//!
//! Starting from a unit vector `p_1`, the recurrences
//!
//! ```text
//! α_ℓ q_ℓ     = Yᵀ p_ℓ − β_ℓ q_{ℓ−1}
//! β_{ℓ+1} p_{ℓ+1} = Y q_ℓ − α_ℓ p_ℓ
//! ```
//!
//! build orthonormal `P_{ℓ+1}`, `Q_ℓ` and the lower-bidiagonal
//! `B_ℓ = P_{ℓ+1}ᵀ Y Q_ℓ` of size `(ℓ+1)×ℓ`. The state also tracks
//! `ω_ℓ = ‖Y − G_ℓ‖²` with `G_ℓ = P_{ℓ+1} B_ℓ Q_ℓᵀ` through the recurrence
//! `ω_ℓ = ω_{ℓ−1} − α_ℓ² − β_{ℓ+1}²`, starting from `ω_0 = ‖Y‖²`.
//!
//! The coefficient `α_{ℓ+1}` of the next step is computed eagerly at the end of
//! step `ℓ` because the Ritz error bound needs it.
//!
//! When a coefficient falls below the breakdown threshold the Krylov space
//! is invariant. If that happens right after a random vector was fed in, or
//! once one of the bases spans its whole space, the factorization is exact:
//! `G_ℓ = Y` and [`BidiagState::is_breakdown`] reports it. Otherwise the
//! recurrence continues from a fresh random vector orthogonal to the current
//! basis (the coefficient stays 0 in `B_ℓ`), so repeated singular values are
//! not lost.

use rand_chacha::ChaCha20Rng;

use crate::dense::{axpy, dot, frobenius_norm_sq, gaussian_vector, matvec, norm, DenseMatrix, RngSpec};
use crate::error::{Error, Result};
use crate::svd::{jacobi_svd_cols, orthonormal_complement};

#[derive(Clone, Debug)]
struct Lookahead {
    alpha: f64,
    q: Vec<f64>,
    random: bool,
}

/// Incremental bidiagonalization of a fixed target matrix.
#[derive(Clone, Debug)]
pub struct BidiagState<'a> {
    target: &'a DenseMatrix,
    p: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    next: Option<Lookahead>,
    last_p_random: bool,
    omega: f64,
    norm_sq: f64,
    threshold: f64,
    breakdown: bool,
    restarts: usize,
    rng: ChaCha20Rng,
}

/// Starts a factorization of `target` from a seeded Gaussian unit vector.
pub fn init_bidiag(target: &DenseMatrix, rng: RngSpec) -> Result<BidiagState<'_>> {
    let mut gen = rng.rng();
    let start = gaussian_vector(target.rows(), &mut gen);
    BidiagState::build(target, start, true, gen)
}

impl<'a> BidiagState<'a> {
    /// Starts from a caller-supplied `p_1` (normalized here). Restart vectors,
    /// if any are needed, are drawn from `rng`.
    pub fn with_start(target: &'a DenseMatrix, p1: &[f64], rng: RngSpec) -> Result<Self> {
        if p1.len() != target.rows() {
            return Err(Error::DimensionMismatch {
                expected: target.rows(),
                found: p1.len(),
            });
        }
        Self::build(target, p1.to_vec(), false, rng.rng())
    }

    fn build(target: &'a DenseMatrix, mut p1: Vec<f64>, random: bool, rng: ChaCha20Rng) -> Result<Self> {
        let norm_sq = frobenius_norm_sq(target);
        if norm_sq == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let nrm = norm(&p1);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::InvalidParameter("start vector must be nonzero".into()));
        }
        p1.iter_mut().for_each(|x| *x /= nrm);
        let (n1, n2) = target.shape();
        let threshold = norm_sq.sqrt() * (n1.max(n2) as f64).sqrt() * f64::EPSILON;
        let mut state = Self {
            target,
            p: vec![p1],
            q: Vec::new(),
            alphas: Vec::new(),
            betas: Vec::new(),
            next: None,
            last_p_random: random,
            omega: norm_sq,
            norm_sq,
            threshold,
            breakdown: false,
            restarts: 0,
            rng,
        };
        state.compute_lookahead();
        Ok(state)
    }

    pub fn target(&self) -> &'a DenseMatrix {
        self.target
    }

    /// Current number of completed steps `ℓ`.
    pub fn ell(&self) -> usize {
        self.q.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// `β_2, …, β_{ℓ+1}`.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Left Lanczos vectors `p_1, …, p_{ℓ+1}` (only `ℓ` of them when the
    /// left basis already spans the whole space).
    pub fn p_vectors(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn q_vectors(&self) -> &[Vec<f64>] {
        &self.q
    }

    /// `ω_ℓ = ‖Y − G_ℓ‖²` from the recurrence, unclamped.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn target_norm_sq(&self) -> f64 {
        self.norm_sq
    }

    /// `α_{ℓ+1}`, or 0 once the factorization is exact.
    pub fn lookahead_alpha(&self) -> f64 {
        self.next.as_ref().map_or(0.0, |n| n.alpha)
    }

    /// True when `G_ℓ == Y` (exact invariant subspace or exhausted bases).
    pub fn is_breakdown(&self) -> bool {
        self.breakdown
    }

    /// Number of random restarts performed after non-terminal breakdowns.
    pub fn restarts(&self) -> usize {
        self.restarts
    }

    pub fn breakdown_threshold(&self) -> f64 {
        self.threshold
    }

    fn mark_exact(&mut self) {
        self.breakdown = true;
        self.next = None;
        self.omega = 0.0;
    }

    fn random_orthogonal(&mut self, basis: &[Vec<f64>], len: usize) -> Vec<f64> {
        self.restarts += 1;
        for _ in 0..8 {
            let mut v = gaussian_vector(len, &mut self.rng);
            reorthogonalize(&mut v, basis);
            let nrm = norm(&v);
            if nrm > 1e-8 {
                v.iter_mut().for_each(|x| *x /= nrm);
                return v;
            }
        }
        orthonormal_complement(basis, len)
    }

    fn compute_lookahead(&mut self) {
        let ell = self.q.len();
        if ell == self.target.cols() {
            self.mark_exact();
            return;
        }
        let p_last = self.p.last().expect("left basis is never empty");
        let mut z = matvec(self.target, p_last, true).expect("shape checked at construction");
        if let (Some(&beta), Some(q_prev)) = (self.betas.last(), self.q.last()) {
            axpy(-beta, q_prev, &mut z);
        }
        reorthogonalize(&mut z, &self.q);
        let alpha = norm(&z);
        if alpha > self.threshold {
            z.iter_mut().for_each(|x| *x /= alpha);
            self.next = Some(Lookahead {
                alpha,
                q: z,
                random: false,
            });
        } else if self.last_p_random {
            self.mark_exact();
        } else {
            let q = self.q.clone();
            let fresh = self.random_orthogonal(&q, self.target.cols());
            self.next = Some(Lookahead {
                alpha: 0.0,
                q: fresh,
                random: true,
            });
        }
    }

    /// Advances the factorization by one step.
    pub fn step(&mut self) -> Result<()> {
        if self.breakdown {
            return Err(Error::BidiagExhausted);
        }
        let Lookahead { alpha, q, random } = self.next.take().ok_or(Error::BidiagExhausted)?;
        let mut w = if self.p.len() < self.target.rows() {
            let mut w = matvec(self.target, &q, false).expect("shape checked at construction");
            axpy(-alpha, self.p.last().unwrap(), &mut w);
            reorthogonalize(&mut w, &self.p);
            Some(w)
        } else {
            None
        };
        self.q.push(q);
        self.alphas.push(alpha);

        let beta = w.as_ref().map_or(0.0, |w| norm(w));
        let mut exact = false;
        if beta > self.threshold {
            let w = w.as_mut().unwrap();
            w.iter_mut().for_each(|x| *x /= beta);
            self.p.push(w.clone());
            self.betas.push(beta);
            self.last_p_random = false;
        } else {
            self.betas.push(0.0);
            if w.is_none() || random {
                exact = true;
            } else {
                let p = self.p.clone();
                let fresh = self.random_orthogonal(&p, self.target.rows());
                self.p.push(fresh);
                self.last_p_random = true;
            }
        }
        let beta = *self.betas.last().unwrap();
        self.omega -= alpha * alpha + beta * beta;
        if exact {
            self.mark_exact();
        } else {
            self.compute_lookahead();
        }
        Ok(())
    }

    /// Dense `G_ℓ = P_{ℓ+1} B_ℓ Q_ℓᵀ`; test and diagnostic use only.
    pub fn dense_g(&self) -> DenseMatrix {
        let (n1, n2) = self.target.shape();
        let mut g = DenseMatrix::zeros(n1, n2);
        for (j, qj) in self.q.iter().enumerate() {
            // column j of B has α_j at row j and β_{j+1} at row j+1
            let mut left = self.p[j].iter().map(|x| x * self.alphas[j]).collect::<Vec<_>>();
            if let Some(pj1) = self.p.get(j + 1) {
                axpy(self.betas[j], pj1, &mut left);
            }
            for (i, &li) in left.iter().enumerate() {
                if li != 0.0 {
                    for (k, &qk) in qj.iter().enumerate() {
                        let cur = g.get(i, k);
                        g.set(i, k, cur + li * qk);
                    }
                }
            }
        }
        g
    }
}

/// Classical Gram–Schmidt against `basis`, applied twice.
fn reorthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        let coeffs: Vec<f64> = basis.iter().map(|b| dot(b, v)).collect();
        for (b, h) in basis.iter().zip(coeffs) {
            axpy(-h, b, v);
        }
    }
}

/// SVD `B_ℓ = U_B Σ_B V_Bᵀ` of the lower-bidiagonal factor.
#[derive(Clone, Debug)]
pub struct SmallSvd {
    /// Columns of the `(ℓ+1)×(ℓ+1)` orthogonal `U_B`.
    pub u: Vec<Vec<f64>>,
    /// `σ̃_{1,ℓ} ≥ … ≥ σ̃_{ℓ,ℓ} ≥ 0`.
    pub sigmas: Vec<f64>,
    /// Columns of the `ℓ×ℓ` orthogonal `V_B`.
    pub v: Vec<Vec<f64>>,
}

impl SmallSvd {
    pub fn ell(&self) -> usize {
        self.sigmas.len()
    }
}

/// Dense `(ℓ+1)×ℓ` lower-bidiagonal matrix from its coefficients.
pub fn bidiagonal_matrix(alphas: &[f64], betas: &[f64]) -> DenseMatrix {
    let ell = alphas.len();
    DenseMatrix::from_fn(ell + 1, ell, |i, j| {
        if i == j {
            alphas[j]
        } else if i == j + 1 {
            betas[j]
        } else {
            0.0
        }
    })
}

/// SVD of the `(ℓ+1)×ℓ` bidiagonal with diagonal `alphas` and subdiagonal
/// `betas` (`β_2..β_{ℓ+1}`).
pub fn small_svd(alphas: &[f64], betas: &[f64]) -> Result<SmallSvd> {
    let ell = alphas.len();
    if ell == 0 || betas.len() != ell {
        return Err(Error::DimensionMismatch {
            expected: ell.max(1),
            found: betas.len(),
        });
    }
    let cols: Vec<Vec<f64>> = (0..ell)
        .map(|j| {
            let mut c = vec![0.0; ell + 1];
            c[j] = alphas[j];
            c[j + 1] = betas[j];
            c
        })
        .collect();
    let thin = jacobi_svd_cols(cols, ell + 1);
    let mut u = thin.u;
    let extra = orthonormal_complement(&u, ell + 1);
    u.push(extra);
    Ok(SmallSvd {
        u,
        sigmas: thin.sigma,
        v: thin.v,
    })
}

/// `|α_{ℓ+1}| · |(U_B)_{ℓ+1, j}|` for `1 ≤ j ≤ ℓ`: a bound on the distance
/// from `σ̃_{j,ℓ}` to the spectrum of the target.
pub fn ritz_error_bound(state: &BidiagState<'_>, svd: &SmallSvd, j: usize) -> Result<f64> {
    let ell = svd.ell();
    if j == 0 || j > ell {
        return Err(Error::IndexOutOfRange { index: j, len: ell });
    }
    if state.is_breakdown() {
        return Ok(0.0);
    }
    Ok(state.lookahead_alpha().abs() * svd.u[j - 1][ell].abs())
}

/// Rank-`r` factors `U diag(σ) Vᵀ` with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFactors {
    rows: usize,
    cols: usize,
    /// Left singular vectors, one `Vec` of length `rows` per column.
    pub u: Vec<Vec<f64>>,
    pub sigmas: Vec<f64>,
    /// Right singular vectors, one `Vec` of length `cols` per column.
    pub v: Vec<Vec<f64>>,
    pub rank_bound: usize,
}

impl TruncatedFactors {
    pub fn new(
        rows: usize,
        cols: usize,
        u: Vec<Vec<f64>>,
        sigmas: Vec<f64>,
        v: Vec<Vec<f64>>,
        rank_bound: usize,
    ) -> Self {
        debug_assert!(u.len() == sigmas.len() && v.len() == sigmas.len());
        debug_assert!(sigmas.len() <= rank_bound);
        Self {
            rows,
            cols,
            u,
            sigmas,
            v,
            rank_bound,
        }
    }

    pub fn zeros(rows: usize, cols: usize, rank_bound: usize) -> Self {
        Self::new(rows, cols, Vec::new(), Vec::new(), Vec::new(), rank_bound)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Number of stored singular triplets (≤ `rank_bound`).
    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        let mut row = vec![0.0; self.cols];
        for i in 0..self.rows {
            row.iter_mut().for_each(|x| *x = 0.0);
            for k in 0..self.sigmas.len() {
                let c = self.sigmas[k] * self.u[k][i];
                if c != 0.0 {
                    axpy(c, &self.v[k], &mut row);
                }
            }
            for (j, &x) in row.iter().enumerate() {
                out.set(i, j, x);
            }
        }
        out
    }
}

/// `W^ℓ = [G_ℓ]_1 = (P_{ℓ+1} (U_B)_1) (Σ_B)_1 ((V_B)_1ᵀ Q_ℓᵀ)`.
///
/// Triplets whose singular value is numerically zero are omitted, so the
/// result may hold fewer than `r` columns.
pub fn assemble_truncated(state: &BidiagState<'_>, svd: &SmallSvd, r: usize) -> Result<TruncatedFactors> {
    let ell = svd.ell();
    if r > ell {
        return Err(Error::RankExceedsKrylov { rank: r, ell });
    }
    let (n1, n2) = state.target.shape();
    let negligible = svd.sigmas.first().copied().unwrap_or(0.0) * f64::EPSILON * (ell + 1) as f64;
    let mut u = Vec::with_capacity(r);
    let mut v = Vec::with_capacity(r);
    let mut sigmas = Vec::with_capacity(r);
    for k in 0..r {
        let s = svd.sigmas[k];
        if s <= negligible || s == 0.0 {
            break;
        }
        let mut uk = vec![0.0; n1];
        for (i, p) in state.p.iter().enumerate() {
            axpy(svd.u[k][i], p, &mut uk);
        }
        let mut vk = vec![0.0; n2];
        for (i, q) in state.q.iter().enumerate() {
            axpy(svd.v[k][i], q, &mut vk);
        }
        u.push(uk);
        v.push(vk);
        sigmas.push(s);
    }
    Ok(TruncatedFactors::new(n1, n2, u, sigmas, v, r))
}

/// `(‖Y − G_ℓ‖², ‖Y − W^ℓ‖²)` from the recurrence and the tail of the small
/// spectrum; no `n1×n2` matrix is formed.
pub fn residual_norms(state: &BidiagState<'_>, svd: &SmallSvd, r: usize) -> Result<(f64, f64)> {
    let ell = svd.ell();
    if r > ell {
        return Err(Error::RankExceedsKrylov { rank: r, ell });
    }
    let omega_g = state.omega().max(0.0);
    let tail: f64 = svd.sigmas[r..].iter().map(|s| s * s).sum();
    Ok((omega_g, omega_g + tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{frobenius_norm, gaussian_matrix};

    const S2: f64 = std::f64::consts::SQRT_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn upper_example() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn init_omega_is_squared_norm() {
        let y = upper_example();
        assert_eq!(init_bidiag(&y, RngSpec::new(1, 0)).unwrap().omega(), 3.0);
        let id = DenseMatrix::identity(4);
        assert_eq!(init_bidiag(&id, RngSpec::new(1, 0)).unwrap().omega(), 4.0);
        let a = init_bidiag(&y, RngSpec::new(5, 9)).unwrap();
        let b = init_bidiag(&y, RngSpec::new(5, 9)).unwrap();
        assert_eq!(a.p_vectors()[0], b.p_vectors()[0]);
        assert!(matches!(
            init_bidiag(&DenseMatrix::zeros(2, 2), RngSpec::new(1, 0)),
            Err(Error::ZeroMatrix)
        ));
    }

    #[test]
    fn hand_evaluated_two_by_two() {
        let y = upper_example();
        let mut st = BidiagState::with_start(&y, &[1.0, 0.0], RngSpec::new(0, 0)).unwrap();
        st.step().unwrap();
        assert!(close(st.alphas()[0], S2, 1e-15));
        assert!(close(st.q_vectors()[0][0], 1.0 / S2, 1e-15));
        assert!(close(st.q_vectors()[0][1], 1.0 / S2, 1e-15));
        assert!(close(st.betas()[0], 1.0 / S2, 1e-15));
        assert!(close(st.p_vectors()[1][0], 0.0, 1e-15));
        assert!(close(st.p_vectors()[1][1], 1.0, 1e-15));
        assert!(close(st.omega(), 0.5, 1e-14));
        let dense = y.dist_sq(&st.dense_g()).unwrap();
        assert!(close(dense, 0.5, 1e-14));

        st.step().unwrap();
        assert!(close(st.alphas()[1], 1.0 / S2, 1e-15));
        assert!(close(st.q_vectors()[1][0], -1.0 / S2, 1e-15));
        assert!(close(st.q_vectors()[1][1], 1.0 / S2, 1e-15));
        assert_eq!(st.betas()[1], 0.0);
        assert!(st.is_breakdown());
        assert_eq!(st.omega(), 0.0);
        assert!(matches!(st.step(), Err(Error::BidiagExhausted)));
    }

    #[test]
    fn diagonal_invariant_subspace_restarts() {
        let y = DenseMatrix::diag(2, 2, &[3.0, 1.0]);
        let mut st = BidiagState::with_start(&y, &[1.0, 0.0], RngSpec::new(0, 0)).unwrap();
        st.step().unwrap();
        assert_eq!(st.alphas(), &[3.0]);
        assert_eq!(st.q_vectors()[0], vec![1.0, 0.0]);
        assert_eq!(st.betas(), &[0.0]);
        assert_eq!(st.restarts(), 1);
        // G_1 captures only σ = 3, so ω stays at the true residual 1.
        assert!(close(st.omega(), 1.0, 1e-14));
        let svd = small_svd(st.alphas(), st.betas()).unwrap();
        assert_eq!(ritz_error_bound(&st, &svd, 1).unwrap(), 0.0);
        let w = assemble_truncated(&st, &svd, 1).unwrap().to_dense();
        let expected = DenseMatrix::diag(2, 2, &[3.0, 0.0]);
        assert!(frobenius_norm(&w.sub(&expected).unwrap()) < 1e-14);
        st.step().unwrap();
        assert!(st.is_breakdown());
    }

    #[test]
    fn identity_keeps_all_directions() {
        let id = DenseMatrix::identity(4);
        let mut st = init_bidiag(&id, RngSpec::new(3, 0)).unwrap();
        while !st.is_breakdown() {
            st.step().unwrap();
        }
        assert_eq!(st.ell(), 4);
        let svd = small_svd(st.alphas(), st.betas()).unwrap();
        for s in &svd.sigmas {
            assert!(close(*s, 1.0, 1e-13));
        }
        let w = assemble_truncated(&st, &svd, 4).unwrap().to_dense();
        assert!(frobenius_norm(&w.sub(&id).unwrap()) < 1e-12);
    }

    #[test]
    fn small_svd_examples() {
        let s = small_svd(&[2.0], &[0.0]).unwrap();
        assert_eq!(s.sigmas, vec![2.0]);
        assert!(close(s.v[0][0].abs(), 1.0, 0.0));
        assert!(close(s.u[0][0].abs(), 1.0, 0.0));

        let s = small_svd(&[S2, 1.0 / S2], &[1.0 / S2, 0.0]).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(close(s.sigmas[0] * s.sigmas[0], (3.0 + 5f64.sqrt()) / 2.0, 1e-14));
        assert!(close(s.sigmas[1] * s.sigmas[1], (3.0 - 5f64.sqrt()) / 2.0, 1e-14));
        assert!(close(s.sigmas[0], phi, 1e-14));
        assert!(close(s.sigmas[1], phi - 1.0, 1e-14));
    }

    #[test]
    fn small_svd_reconstructs_bidiagonal() {
        let g = gaussian_matrix(2, 9, RngSpec::new(17, 0));
        let alphas: Vec<f64> = g.row(0).iter().map(|x| x.abs()).collect();
        let betas: Vec<f64> = g.row(1).iter().map(|x| x.abs()).collect();
        let s = small_svd(&alphas, &betas).unwrap();
        let b = bidiagonal_matrix(&alphas, &betas);
        let rec = DenseMatrix::from_fn(10, 9, |i, j| {
            (0..9).map(|k| s.u[k][i] * s.sigmas[k] * s.v[k][j]).sum()
        });
        assert!(frobenius_norm(&rec.sub(&b).unwrap()) <= 1e-12 * frobenius_norm(&b));
        assert_eq!(s.u.len(), 10);
        for a in 0..10 {
            for c in 0..10 {
                let expect = if a == c { 1.0 } else { 0.0 };
                assert!(close(dot(&s.u[a], &s.u[c]), expect, 1e-13));
            }
        }
    }

    #[test]
    fn ritz_bound_index_checks() {
        let y = gaussian_matrix(5, 4, RngSpec::new(2, 0));
        let mut st = init_bidiag(&y, RngSpec::new(2, 1)).unwrap();
        st.step().unwrap();
        st.step().unwrap();
        let svd = small_svd(st.alphas(), st.betas()).unwrap();
        assert!(ritz_error_bound(&st, &svd, 0).is_err());
        assert!(ritz_error_bound(&st, &svd, 3).is_err());
        assert!(ritz_error_bound(&st, &svd, 2).unwrap() >= 0.0);
        assert!(matches!(
            assemble_truncated(&st, &svd, 3),
            Err(Error::RankExceedsKrylov { .. })
        ));
        assert!(residual_norms(&st, &svd, 3).is_err());
    }

    #[test]
    fn residual_norms_two_by_two() {
        let y = upper_example();
        let mut st = BidiagState::with_start(&y, &[1.0, 0.0], RngSpec::new(0, 0)).unwrap();
        st.step().unwrap();
        st.step().unwrap();
        let svd = small_svd(st.alphas(), st.betas()).unwrap();
        let (g, w) = residual_norms(&st, &svd, 1).unwrap();
        assert_eq!(g, 0.0);
        assert!(close(w, (3.0 - 5f64.sqrt()) / 2.0, 1e-14));
        let dense_w = assemble_truncated(&st, &svd, 1).unwrap().to_dense();
        assert!(close(y.dist_sq(&dense_w).unwrap(), w, 1e-14));
        let (g2, w2) = residual_norms(&st, &svd, 2).unwrap();
        assert_eq!(g2, w2);
    }

    #[test]
    fn wide_matrix_runs_to_exactness() {
        let y = gaussian_matrix(4, 9, RngSpec::new(8, 0));
        let mut st = init_bidiag(&y, RngSpec::new(8, 1)).unwrap();
        while !st.is_breakdown() {
            st.step().unwrap();
        }
        assert_eq!(st.ell(), 4);
        assert!(frobenius_norm(&y.sub(&st.dense_g()).unwrap()) < 1e-12 * frobenius_norm(&y));
    }
}
