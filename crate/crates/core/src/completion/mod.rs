//! Low-rank matrix completion: find `Z` with `rank Z ≤ r` and `Z_Ω = M_Ω`.
//!
//! This module builds problem instances (Gaussian factors or an image
//! truncated to rank `r`), measures errors, runs campaigns over methods and
//! seeds, and renders the resulting traces.

mod campaign;
mod image_io;
mod plot;

use rand::Rng;

pub use campaign::{
    run_campaign, CampaignResult, CampaignSpec, CampaignSummary, CellResult, CellRun, MethodSpec, ProblemFamily,
    SummaryRow,
};
pub use image_io::{read_image_matrix, synthetic_scene, write_pgm};
pub use plot::{emit_plots, PlotGroup, PlotKind};

use crate::dense::{gaussian_matrix, DenseMatrix, RngSpec};
use crate::error::{Error, Result};
use crate::sets::{
    inexact_project_rank, project_affine_mask, project_rank_exact, project_rank_ritz, InexactCertificate,
    InexactOptions, ObservedData,
};
use crate::solver::{BStep, FeasibilityProblem, ProjectionContext};

/// Stream ids under a seed: factor generation, mask sampling, Lanczos.
pub const STREAM_FACTORS: u64 = 1;
pub const STREAM_MASK: u64 = 2;
pub const STREAM_LANCZOS: u64 = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Gaussian,
    Image(String),
}

#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub ground_truth: DenseMatrix,
    pub observed: ObservedData,
    pub rank: usize,
    pub oversampling: f64,
    pub provenance: Provenance,
    pub rng: RngSpec,
}

impl ProblemInstance {
    pub fn problem(&self) -> CompletionProblem<'_> {
        CompletionProblem {
            observed: &self.observed,
            rank: self.rank,
        }
    }
}

/// `round(oversampling · (n1 + n2 − r) · r)`.
pub fn sample_count(n1: usize, n2: usize, r: usize, oversampling: f64) -> Result<usize> {
    if r == 0 || r > n1.min(n2) {
        return Err(Error::InvalidRank {
            rank: r,
            rows: n1,
            cols: n2,
        });
    }
    let q = (oversampling * ((n1 + n2 - r) * r) as f64).round();
    if !(oversampling > 0.0) || q < 1.0 || q > (n1 * n2) as f64 {
        return Err(Error::InfeasibleSampling {
            requested: q.max(0.0) as usize,
            rows: n1,
            cols: n2,
        });
    }
    Ok(q as usize)
}

/// `count` distinct positions, uniformly without replacement (partial
/// Fisher–Yates over linear indices), returned in row-major order.
pub fn sample_mask(n1: usize, n2: usize, count: usize, rng: RngSpec) -> Result<Vec<(usize, usize)>> {
    let total = n1 * n2;
    if count > total {
        return Err(Error::InfeasibleSampling {
            requested: count,
            rows: n1,
            cols: n2,
        });
    }
    let mut gen = rng.rng();
    let mut idx: Vec<u64> = (0..total as u64).collect();
    for i in 0..count {
        let j = gen.random_range(i as u64..total as u64) as usize;
        idx.swap(i, j);
    }
    let mut chosen = idx[..count].to_vec();
    chosen.sort_unstable();
    Ok(chosen
        .into_iter()
        .map(|l| ((l as usize) / n2, (l as usize) % n2))
        .collect())
}

/// `M = L Rᵀ` with standard normal factors and a uniform mask.
pub fn generate_gaussian(n1: usize, n2: usize, r: usize, oversampling: f64, rng: RngSpec) -> Result<ProblemInstance> {
    let count = sample_count(n1, n2, r, oversampling)?;
    let factors = rng.derive(STREAM_FACTORS);
    let l = gaussian_matrix(n1, r, factors.derive(0));
    let rt = gaussian_matrix(r, n2, factors.derive(1));
    let m = l.matmul(&rt)?;
    instance_from_ground_truth(m, r, oversampling, Provenance::Gaussian, rng, count)
}

/// Image pixels (scaled to `[0, 1]`) replaced by their exact rank-`r`
/// truncation, then masked as in [`generate_gaussian`].
pub fn load_image_problem(
    path: &std::path::Path,
    r: usize,
    oversampling: f64,
    rng: RngSpec,
) -> Result<ProblemInstance> {
    let pixels = read_image_matrix(path)?;
    let truth = truncate_image(&pixels, r)?;
    image_instance(truth, r, oversampling, rng, path.display().to_string())
}

/// Exact rank-`r` truncation of a pixel matrix.
pub fn truncate_image(pixels: &DenseMatrix, r: usize) -> Result<DenseMatrix> {
    Ok(project_rank_exact(pixels, r)?.to_dense())
}

/// Masks an already truncated image.
pub fn image_instance(
    truth: DenseMatrix,
    r: usize,
    oversampling: f64,
    rng: RngSpec,
    source: String,
) -> Result<ProblemInstance> {
    let count = sample_count(truth.rows(), truth.cols(), r, oversampling)?;
    instance_from_ground_truth(truth, r, oversampling, Provenance::Image(source), rng, count)
}

fn instance_from_ground_truth(
    m: DenseMatrix,
    r: usize,
    oversampling: f64,
    provenance: Provenance,
    rng: RngSpec,
    count: usize,
) -> Result<ProblemInstance> {
    let positions = sample_mask(m.rows(), m.cols(), count, rng.derive(STREAM_MASK))?;
    let observed = ObservedData::from_matrix(&m, &positions)?;
    Ok(ProblemInstance {
        ground_truth: m,
        observed,
        rank: r,
        oversampling,
        provenance,
        rng,
    })
}

/// `‖M_Ω − Y_Ω‖ / ‖M_Ω‖`.
pub fn metric_e_omega(y: &DenseMatrix, observed: &ObservedData) -> Result<f64> {
    if y.shape() != observed.shape() {
        return Err(Error::ShapeMismatch {
            expected: observed.shape(),
            found: y.shape(),
        });
    }
    let denom = observed.norm();
    if denom == 0.0 {
        return Err(Error::ZeroObservations);
    }
    let num: f64 = observed
        .indices()
        .iter()
        .zip(observed.values())
        .map(|(&(i, j), &v)| (v - y.get(i, j)).powi(2))
        .sum();
    Ok(num.sqrt() / denom)
}

/// `‖M − Y‖² / (n1 n2)`.
pub fn metric_e_mse(y: &DenseMatrix, m: &DenseMatrix) -> Result<f64> {
    Ok(m.dist_sq(y)? / (m.rows() * m.cols()) as f64)
}

/// The completion problem as a pair of sets: `A` the mask set, `B` the rank
/// level set.
#[derive(Clone, Copy, Debug)]
pub struct CompletionProblem<'a> {
    pub observed: &'a ObservedData,
    pub rank: usize,
}

impl FeasibilityProblem for CompletionProblem<'_> {
    type Point = DenseMatrix;

    fn base_dim(&self) -> usize {
        self.rank
    }

    fn project_a(&self, z: &DenseMatrix) -> Result<DenseMatrix> {
        project_affine_mask(z, self.observed)
    }

    fn project_b(&self, z: &DenseMatrix, ctx: &ProjectionContext) -> Result<BStep<DenseMatrix>> {
        let p = project_rank_ritz(z, self.rank, ctx.ritz_tol_multiplier, ctx.rng, ctx.ell_cap)?;
        Ok(BStep {
            point: p.factors.to_dense(),
            ell_bar: p.ell_bar,
            forced: p.forced,
        })
    }

    fn project_b_inexact(
        &self,
        y_reg: &DenseMatrix,
        y_prev: &DenseMatrix,
        opts: &InexactOptions,
        ctx: &ProjectionContext,
    ) -> Result<(DenseMatrix, InexactCertificate)> {
        let (w, cert) = inexact_project_rank(y_reg, y_prev, self.rank, opts, ctx.rng)?;
        Ok((w.to_dense(), cert))
    }

    /// `X⁰ = (M)_Ω` and `Y⁰` its rank projection under the standard rule.
    fn initial(&self, ctx: &ProjectionContext) -> Result<(DenseMatrix, DenseMatrix)> {
        let x0 = self.observed.to_dense();
        let y0 = self.project_b(&x0, ctx)?.point;
        Ok((x0, y0))
    }

    fn residual(&self, y: &DenseMatrix) -> Result<f64> {
        metric_e_omega(y, self.observed)
    }
}
