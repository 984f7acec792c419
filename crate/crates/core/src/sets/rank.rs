//! Projections onto `{Z : rank Z ≤ r}`.
//!
//! The inexact projection stops the Lanczos process at the first `ℓ` where
//! the truncation `W^ℓ` of the current factorization satisfies
//!
//! ```text
//! ‖W^ℓ − Y_reg‖² ≤ ζ c^ℓ + (1 − ζ) ‖Y_prev − Y_reg‖²
//! a^ℓ ≤ sqrt(−(1 − ζ)/ζ · Q(W^ℓ))
//! ```
//!
//! where `c^ℓ = Σ_{i>r} σ̃_{i,ℓ}²` is a lower bound on the squared distance of
//! the exact projection and `a^ℓ = κ_ℓ ‖Y_reg − G_ℓ‖` bounds `‖W^ℓ − Ŷ‖`.
//! Every quantity comes from the small bidiagonal SVD and the `ω`
//! recurrence; no candidate matrix is formed.

use crate::dense::{DenseMatrix, RngSpec};
use crate::error::{Error, Result};
use crate::lanczos::{
    assemble_truncated, init_bidiag, residual_norms, ritz_error_bound, small_svd, BidiagState, SmallSvd,
    TruncatedFactors,
};
use crate::svd::dense_svd;

const DENSE_LIMIT: usize = 64;
const GAP_TOL: f64 = 1e-12;
const SLACK: f64 = 1e-12;

fn check_rank(g: &DenseMatrix, r: usize) -> Result<()> {
    let (n1, n2) = g.shape();
    if r == 0 || r > n1.min(n2) {
        return Err(Error::InvalidRank {
            rank: r,
            rows: n1,
            cols: n2,
        });
    }
    Ok(())
}

fn run_until(state: &mut BidiagState<'_>, ell: usize) -> Result<()> {
    while state.ell() < ell && !state.is_breakdown() {
        state.step()?;
    }
    Ok(())
}

/// The `r`-truncated SVD of `g` (Eckart–Young).
///
/// Small matrices go through a dense Jacobi SVD; larger ones run the Lanczos
/// process until it is exact.
pub fn project_rank_exact(g: &DenseMatrix, r: usize) -> Result<TruncatedFactors> {
    check_rank(g, r)?;
    let (n1, n2) = g.shape();
    if g.is_zero() {
        return Ok(TruncatedFactors::zeros(n1, n2, r));
    }
    if n1.min(n2) < DENSE_LIMIT {
        let svd = dense_svd(g);
        let negligible = svd.sigma[0] * f64::EPSILON * n1.max(n2) as f64;
        let keep = svd.sigma.iter().take(r).take_while(|&&s| s > negligible).count();
        return Ok(TruncatedFactors::new(
            n1,
            n2,
            svd.u[..keep].to_vec(),
            svd.sigma[..keep].to_vec(),
            svd.v[..keep].to_vec(),
            r,
        ));
    }
    let mut state = init_bidiag(g, RngSpec::new(0, u64::MAX))?;
    run_until(&mut state, usize::MAX)?;
    let svd = small_svd(state.alphas(), state.betas())?;
    assemble_truncated(&state, &svd, r.min(state.ell()))
}

/// Result of a rank projection under the standard Ritz stopping rule.
#[derive(Clone, Debug)]
pub struct RitzProjection {
    pub factors: TruncatedFactors,
    /// Krylov dimension at acceptance.
    pub ell_bar: usize,
    /// True when the dimension cap was reached before the rule held.
    pub forced: bool,
}

/// Rank-`r` truncation accepted once the Ritz bounds of the leading `r`
/// values are all below `tol_multiplier · ε · σ̃_1`.
pub fn project_rank_ritz(
    g: &DenseMatrix,
    r: usize,
    tol_multiplier: f64,
    rng: RngSpec,
    ell_cap: Option<usize>,
) -> Result<RitzProjection> {
    check_rank(g, r)?;
    if !(tol_multiplier > 0.0) {
        return Err(Error::InvalidParameter(format!("Ritz tolerance multiplier {tol_multiplier}")));
    }
    let (n1, n2) = g.shape();
    if g.is_zero() {
        return Ok(RitzProjection {
            factors: TruncatedFactors::zeros(n1, n2, r),
            ell_bar: r,
            forced: false,
        });
    }
    let cap = resolve_cap(ell_cap, r, n1.min(n2))?;
    let mut state = init_bidiag(g, rng)?;
    run_until(&mut state, r)?;
    loop {
        let svd = small_svd(state.alphas(), state.betas())?;
        let ell = state.ell();
        let tol = tol_multiplier * f64::EPSILON * svd.sigmas[0];
        let converged = state.is_breakdown()
            || (1..=r.min(ell)).try_fold(true, |acc, j| Ok::<_, Error>(acc && ritz_error_bound(&state, &svd, j)? <= tol))?;
        if converged || ell >= cap {
            return Ok(RitzProjection {
                factors: assemble_truncated(&state, &svd, r.min(ell))?,
                ell_bar: ell,
                forced: !converged,
            });
        }
        state.step()?;
    }
}

fn resolve_cap(ell_cap: Option<usize>, r: usize, min_dim: usize) -> Result<usize> {
    let cap = ell_cap.unwrap_or(min_dim).min(min_dim);
    if cap < r {
        return Err(Error::InvalidParameter(format!("dimension cap {cap} below rank {r}")));
    }
    Ok(cap)
}

/// `κ = 2/(1−γ) · ((1−γ)σ_r + γ σ_{r+1}) / (σ_r − σ_{r+1})`.
pub fn kappa(sigma_r: f64, sigma_r1: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} not in (0, 1)")));
    }
    if !(sigma_r > sigma_r1) || sigma_r1 < 0.0 {
        return Err(Error::NonpositiveGap { sigma_r, sigma_r1 });
    }
    Ok(2.0 / (1.0 - gamma) * ((1.0 - gamma) * sigma_r + gamma * sigma_r1) / (sigma_r - sigma_r1))
}

/// Parameters of the inexact rank projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InexactOptions {
    pub mu: f64,
    pub zeta: f64,
    pub gamma: f64,
    /// Largest Krylov dimension tried; `None` means `min(n1, n2)`.
    pub ell_cap: Option<usize>,
}

impl InexactOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("mu = {} must be positive", self.mu)));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(Error::InvalidParameter(format!("zeta = {} not in (0, 1]", self.zeta)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParameter(format!("gamma = {} not in (0, 1)", self.gamma)));
        }
        Ok(())
    }
}

/// Values proving that an inexact projection met both acceptance tests.
#[derive(Clone, Debug, PartialEq)]
pub struct InexactCertificate {
    pub ell_bar: usize,
    /// Lower bound `c` on the exact squared projection distance.
    pub c: f64,
    /// Upper bound `a` on the distance to the exact projection.
    pub a: f64,
    /// Gap constant; `None` on the exact branch.
    pub kappa: Option<f64>,
    pub q_value: f64,
    pub dist_w_sq: f64,
    pub dist_prev_sq: f64,
    pub zeta: f64,
    pub gamma: f64,
    pub mu: f64,
    /// Accepted without both inequalities holding.
    pub forced: bool,
}

impl InexactCertificate {
    /// Whether the first (distance) test holds as recorded.
    pub fn first_test(&self) -> bool {
        self.dist_w_sq <= self.zeta * self.c + (1.0 - self.zeta) * self.dist_prev_sq + SLACK * self.dist_prev_sq
    }

    /// Right-hand side `sqrt(−(1−ζ)/ζ · Q)` of the second test.
    pub fn bound_rhs(&self) -> f64 {
        (-(1.0 - self.zeta) / self.zeta * self.q_value).max(0.0).sqrt()
    }

    pub fn second_test(&self) -> bool {
        self.a <= self.bound_rhs()
    }
}

struct Evaluation {
    cert: InexactCertificate,
    svd: SmallSvd,
    accepted: bool,
}

fn evaluate(
    state: &BidiagState<'_>,
    r: usize,
    dist_prev_sq: f64,
    opts: &InexactOptions,
) -> Result<Evaluation> {
    let ell = state.ell();
    let exact = state.is_breakdown();
    let svd = small_svd(state.alphas(), state.betas())?;
    let rr = r.min(ell);
    let (omega_g, omega_w) = residual_norms(state, &svd, rr)?;
    let c: f64 = svd.sigmas[rr..].iter().map(|s| s * s).sum();
    let q_value = (1.0 + opts.mu) / (2.0 * opts.mu) * (omega_w - dist_prev_sq);
    let (a, kappa_value) = if exact {
        (0.0, None)
    } else if ell <= r {
        (f64::INFINITY, None)
    } else {
        let (sr, sr1) = (svd.sigmas[r - 1], svd.sigmas[r]);
        if sr - sr1 <= GAP_TOL * svd.sigmas[0] {
            (f64::INFINITY, None)
        } else {
            let k = kappa(sr, sr1, opts.gamma)?;
            (k * omega_g.sqrt(), Some(k))
        }
    };
    let cert = InexactCertificate {
        ell_bar: ell,
        c,
        a,
        kappa: kappa_value,
        q_value,
        dist_w_sq: omega_w,
        dist_prev_sq,
        zeta: opts.zeta,
        gamma: opts.gamma,
        mu: opts.mu,
        forced: false,
    };
    let accepted = cert.first_test() && cert.second_test();
    Ok(Evaluation { cert, svd, accepted })
}

/// Inexact projection of `y_reg` onto the rank-`r` set for the regularized
/// step whose previous iterate is `y_prev`.
///
/// After `r` unconditional Lanczos steps both tests are checked at every
/// `ℓ ≥ r + 1` (and at an exact breakdown). If `ell_cap` is reached first,
/// the current truncation is returned with `forced = true`.
pub fn inexact_project_rank(
    y_reg: &DenseMatrix,
    y_prev: &DenseMatrix,
    r: usize,
    opts: &InexactOptions,
    rng: RngSpec,
) -> Result<(TruncatedFactors, InexactCertificate)> {
    check_rank(y_reg, r)?;
    opts.validate()?;
    let dist_prev_sq = y_prev.dist_sq(y_reg)?;
    let (n1, n2) = y_reg.shape();
    if y_reg.is_zero() {
        let cert = InexactCertificate {
            ell_bar: r,
            c: 0.0,
            a: 0.0,
            kappa: None,
            q_value: -(1.0 + opts.mu) / (2.0 * opts.mu) * dist_prev_sq,
            dist_w_sq: 0.0,
            dist_prev_sq,
            zeta: opts.zeta,
            gamma: opts.gamma,
            mu: opts.mu,
            forced: false,
        };
        return Ok((TruncatedFactors::zeros(n1, n2, r), cert));
    }
    let cap = resolve_cap(opts.ell_cap, r, n1.min(n2))?;
    let mut state = init_bidiag(y_reg, rng)?;
    run_until(&mut state, r)?;
    loop {
        let ell = state.ell();
        let exact = state.is_breakdown();
        // With ζ = 1 the second test needs a = 0, which only the exact
        // branch (or a vanished residual) can give; skip the small SVD.
        let hopeless = !exact && opts.zeta == 1.0 && state.omega() > 0.0 && ell < cap;
        if (ell > r || exact) && !hopeless {
            let Evaluation { mut cert, svd, accepted } = evaluate(&state, r, dist_prev_sq, opts)?;
            if accepted || exact || ell >= cap {
                cert.forced = !accepted;
                let factors = assemble_truncated(&state, &svd, r.min(ell))?;
                return Ok((factors, cert));
            }
        } else if ell >= cap {
            let Evaluation { mut cert, svd, .. } = evaluate(&state, r, dist_prev_sq, opts)?;
            cert.forced = true;
            let factors = assemble_truncated(&state, &svd, r.min(ell))?;
            return Ok((factors, cert));
        }
        state.step()?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{frobenius_norm, gaussian_matrix};

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(2.0, 0.0, 0.3).unwrap(), 2.0);
        assert!((kappa(2.0, 1.0, 0.1).unwrap() - 2.0 / 0.9 * 1.9).abs() < 1e-14);
        assert!(kappa(1.0, 1.0 - 1e-9, 0.5).unwrap() > 1e9);
        assert!(matches!(kappa(1.0, 1.0, 0.5), Err(Error::NonpositiveGap { .. })));
        assert!(kappa(1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn exact_projection_of_diagonal() {
        let g = DenseMatrix::diag(3, 3, &[3.0, 2.0, 1.0]);
        let w = project_rank_exact(&g, 2).unwrap().to_dense();
        let expect = DenseMatrix::diag(3, 3, &[3.0, 2.0, 0.0]);
        assert!(frobenius_norm(&w.sub(&expect).unwrap()) < 1e-14);
        assert!(project_rank_exact(&g, 0).is_err());
        assert!(project_rank_exact(&g, 4).is_err());
    }

    #[test]
    fn lanczos_and_dense_exact_paths_agree() {
        let l = gaussian_matrix(70, 6, RngSpec::new(1, 1));
        let rt = gaussian_matrix(6, 66, RngSpec::new(1, 2));
        let noise = gaussian_matrix(70, 66, RngSpec::new(1, 3)).scale(1e-3);
        let g = l.matmul(&rt).unwrap().lincomb(1.0, &noise, 1.0).unwrap();
        let w = project_rank_exact(&g, 6).unwrap();
        assert_eq!(w.len(), 6);
        let svd = dense_svd(&g);
        let tail: f64 = svd.sigma[6..].iter().map(|s| s * s).sum();
        let d = g.dist_sq(&w.to_dense()).unwrap();
        assert!((d - tail).abs() <= 1e-9 * tail, "{d} vs {tail}");
    }

    #[test]
    fn ritz_projection_accepts_converged_values() {
        let g = gaussian_matrix(30, 20, RngSpec::new(4, 0));
        let p = project_rank_ritz(&g, 3, 16.0, RngSpec::new(4, 1), None).unwrap();
        assert!(!p.forced);
        assert!(p.ell_bar >= 3 && p.ell_bar <= 20);
        let exact = project_rank_exact(&g, 3).unwrap().to_dense();
        let d = frobenius_norm(&p.factors.to_dense().sub(&exact).unwrap());
        assert!(d < 1e-8 * frobenius_norm(&g), "{d}");
        let capped = project_rank_ritz(&g, 3, 16.0, RngSpec::new(4, 1), Some(4)).unwrap();
        assert!(capped.forced && capped.ell_bar == 4);
    }

    #[test]
    fn feasible_target_is_returned() {
        let l = gaussian_matrix(12, 3, RngSpec::new(9, 0));
        let rt = gaussian_matrix(3, 10, RngSpec::new(9, 1));
        let y_reg = l.matmul(&rt).unwrap();
        let y_prev = DenseMatrix::zeros(12, 10);
        let opts = InexactOptions {
            mu: 16.0,
            zeta: 1e-7,
            gamma: 0.1,
            ell_cap: None,
        };
        let (w, cert) = inexact_project_rank(&y_reg, &y_prev, 3, &opts, RngSpec::new(9, 2)).unwrap();
        assert!(!cert.forced);
        assert_eq!(cert.a, 0.0);
        assert!(cert.ell_bar <= 4);
        let scale = frobenius_norm(&y_reg);
        assert!(frobenius_norm(&w.to_dense().sub(&y_reg).unwrap()) < 1e-10 * scale);
        let expect_q = -(17.0 / 32.0) * cert.dist_prev_sq;
        assert!((cert.q_value - expect_q).abs() < 1e-10 * cert.dist_prev_sq);
    }

    #[test]
    fn zero_target_short_circuits() {
        let y_prev = DenseMatrix::diag(3, 3, &[1.0, 0.0, 0.0]);
        let opts = InexactOptions {
            mu: 1.0,
            zeta: 0.5,
            gamma: 0.1,
            ell_cap: None,
        };
        let (w, cert) = inexact_project_rank(&DenseMatrix::zeros(3, 3), &y_prev, 1, &opts, RngSpec::new(0, 0)).unwrap();
        assert!(w.is_empty());
        assert_eq!(cert.q_value, -1.0);
        assert!(inexact_project_rank(
            &y_prev,
            &y_prev,
            1,
            &InexactOptions { zeta: 0.0, ..opts },
            RngSpec::new(0, 0)
        )
        .is_err());
    }
}
