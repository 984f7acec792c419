//! Alternating projection drivers for `min ½‖x − y‖²` over `x ∈ A`, `y ∈ B`.
//!
//! * APM: `x⁺ = P_A(y)`, `y⁺ = P_B(x⁺)`.
//! * RAPM: `x⁺ = P_A((x + λy)/(1+λ))`, `y⁺ = P_B((y + μx⁺)/(1+μ))`.
//! * iRAPM: as RAPM, with `P_B` replaced by any point of `B` that passes
//!   the two inexactness tests of [`crate::sets::InexactCertificate`].
//!
//! The projections are supplied by a [`FeasibilityProblem`]; the matrix
//! completion instance lives in [`crate::completion`], the one-dimensional
//! interval instance in [`IntervalProblem`].

mod toy;
mod trace;

use std::time::{Duration, Instant};

pub use toy::IntervalProblem;
pub use trace::write_trace_csv;

use crate::dense::{DenseMatrix, RngSpec};
use crate::error::{Error, Result};
use crate::sets::{InexactCertificate, InexactOptions};

/// Iterate type of a feasibility problem.
pub trait Point: Clone {
    fn dist_sq(&self, other: &Self) -> Result<f64>;
    /// `a·self + b·other`.
    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Result<Self>;
}

impl Point for f64 {
    fn dist_sq(&self, other: &Self) -> Result<f64> {
        Ok((self - other) * (self - other))
    }

    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        Ok(a * self + b * other)
    }
}

impl Point for DenseMatrix {
    fn dist_sq(&self, other: &Self) -> Result<f64> {
        DenseMatrix::dist_sq(self, other)
    }

    fn lincomb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        DenseMatrix::lincomb(self, a, other, b)
    }
}

/// Per-projection settings handed to [`FeasibilityProblem`] methods.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionContext {
    pub rng: RngSpec,
    pub ritz_tol_multiplier: f64,
    pub ell_cap: Option<usize>,
}

/// A point of `B` returned by a projection, with its Krylov dimension.
#[derive(Clone, Debug)]
pub struct BStep<P> {
    pub point: P,
    pub ell_bar: usize,
    pub forced: bool,
}

/// The pair of sets `(A, B)`: `A` is projected exactly, `B` exactly or
/// inexactly.
pub trait FeasibilityProblem {
    type Point: Point;

    /// Krylov steps every projection onto `B` performs unconditionally; the
    /// cost of an iteration is `ℓ̄ − base_dim`.
    fn base_dim(&self) -> usize;

    fn project_a(&self, z: &Self::Point) -> Result<Self::Point>;

    fn project_b(&self, z: &Self::Point, ctx: &ProjectionContext) -> Result<BStep<Self::Point>>;

    fn project_b_inexact(
        &self,
        y_reg: &Self::Point,
        y_prev: &Self::Point,
        opts: &InexactOptions,
        ctx: &ProjectionContext,
    ) -> Result<(Self::Point, InexactCertificate)>;

    /// Starting pair `(x⁰, y⁰)`.
    fn initial(&self, ctx: &ProjectionContext) -> Result<(Self::Point, Self::Point)>;

    /// Error measure recorded for `y^k` (relative observed-entry error for
    /// matrix completion).
    fn residual(&self, y: &Self::Point) -> Result<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Apm,
    Rapm,
    Irapm,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::Apm => "APM",
            Variant::Rapm => "RAPM",
            Variant::Irapm => "iRAPM",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "apm" => Ok(Variant::Apm),
            "rapm" => Ok(Variant::Rapm),
            "irapm" => Ok(Variant::Irapm),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// Regularization parameter sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    Constant(f64),
    /// Value for iteration `k` is entry `k − 1`.
    List(Vec<f64>),
}

impl Schedule {
    pub fn value(&self, k: usize) -> f64 {
        match self {
            Schedule::Constant(v) => *v,
            Schedule::List(vs) => vs[k - 1],
        }
    }

    fn validate(&self, name: &str, bounds: (f64, f64), max_iter: usize) -> Result<()> {
        let (lo, hi) = bounds;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} bounds [{lo}, {hi}]")));
        }
        let values: &[f64] = match self {
            Schedule::Constant(v) => std::slice::from_ref(v),
            Schedule::List(vs) => {
                if vs.len() < max_iter {
                    return Err(Error::InvalidParameter(format!(
                        "{name} schedule has {} values for {max_iter} iterations",
                        vs.len()
                    )));
                }
                vs
            }
        };
        if let Some(v) = values.iter().find(|&&v| !(lo <= v && v <= hi)) {
            return Err(Error::InvalidParameter(format!("{name} = {v} outside [{lo}, {hi}]")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    pub lambda: Schedule,
    pub lambda_bounds: (f64, f64),
    pub mu: Schedule,
    pub mu_bounds: (f64, f64),
    pub zeta: f64,
    pub gamma: f64,
    pub max_iter: usize,
    /// Standard stopping rule: Ritz bounds below this multiple of `ε · σ̃_1`.
    pub ritz_tol_multiplier: f64,
    pub ell_cap: Option<usize>,
    pub rng: RngSpec,
    /// Evaluate `½‖X^k − Y^k‖²` every iteration.
    pub record_l: bool,
    /// Stop early once the residual falls below this value.
    pub residual_exit: Option<f64>,
}

impl SolverConfig {
    /// Constant `λ = μ = reg`, `ζ = 1e-7`, `γ = 0.1`, 200 iterations.
    pub fn new(variant: Variant, reg: f64, rng: RngSpec) -> Self {
        Self {
            variant,
            lambda: Schedule::Constant(reg),
            lambda_bounds: (reg, reg),
            mu: Schedule::Constant(reg),
            mu_bounds: (reg, reg),
            zeta: 1e-7,
            gamma: 0.1,
            max_iter: 200,
            ritz_tol_multiplier: 16.0,
            ell_cap: None,
            rng,
            record_l: false,
            residual_exit: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(Error::InvalidParameter(format!("zeta = {} not in (0, 1]", self.zeta)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParameter(format!("gamma = {} not in (0, 1)", self.gamma)));
        }
        if !(self.ritz_tol_multiplier > 0.0) {
            return Err(Error::InvalidParameter("ritz_tol_multiplier must be positive".into()));
        }
        self.lambda.validate("lambda", self.lambda_bounds, self.max_iter)?;
        self.mu.validate("mu", self.mu_bounds, self.max_iter)?;
        Ok(())
    }

    /// `key=value` pairs describing every setting, in a fixed order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let sched = |s: &Schedule| match s {
            Schedule::Constant(v) => format!("{v:?}"),
            Schedule::List(vs) => vs.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(";"),
        };
        let mut out = vec![
            ("variant".to_string(), self.variant.label().to_string()),
            ("lambda".into(), sched(&self.lambda)),
            ("lambda_bounds".into(), format!("{:?};{:?}", self.lambda_bounds.0, self.lambda_bounds.1)),
            ("mu".into(), sched(&self.mu)),
            ("mu_bounds".into(), format!("{:?};{:?}", self.mu_bounds.0, self.mu_bounds.1)),
        ];
        if self.variant == Variant::Irapm {
            out.push(("zeta".into(), format!("{:?}", self.zeta)));
            out.push(("gamma".into(), format!("{:?}", self.gamma)));
        }
        out.extend([
            ("max_iter".into(), self.max_iter.to_string()),
            ("ritz_tol_multiplier".into(), format!("{:?}", self.ritz_tol_multiplier)),
            (
                "ell_cap".into(),
                self.ell_cap.map_or_else(|| "none".to_string(), |c| c.to_string()),
            ),
            ("seed".into(), self.rng.seed.to_string()),
            ("stream".into(), self.rng.stream.to_string()),
            ("record_l".into(), self.record_l.to_string()),
        ]);
        out
    }

    fn context(&self, k: u64) -> ProjectionContext {
        ProjectionContext {
            rng: self.rng.derive(k),
            ritz_tol_multiplier: self.ritz_tol_multiplier,
            ell_cap: self.ell_cap,
        }
    }
}

/// One outer iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub e_omega: f64,
    pub l_value: Option<f64>,
    /// `sqrt(‖Δx‖² + ‖Δy‖² − Q(y^k))` for iRAPM, `‖(Δx, Δy)‖` otherwise.
    pub d_k: f64,
    pub ell_bar: usize,
    pub cost: usize,
    /// `Q(y^k)` at the accepted point (iRAPM only).
    pub q_value: Option<f64>,
    pub forced: bool,
    pub cert: Option<InexactCertificate>,
}

#[derive(Clone, Debug)]
pub struct SolverTrace<P> {
    pub config: SolverConfig,
    pub records: Vec<IterationRecord>,
    /// `½‖x⁰ − y⁰‖²` when `record_l` is set.
    pub initial_l: Option<f64>,
    pub final_x: P,
    pub final_y: P,
    pub wall_time: Duration,
}

impl<P> SolverTrace<P> {
    pub fn final_cost(&self) -> usize {
        self.records.last().map_or(0, |r| r.cost)
    }

    pub fn final_residual(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.e_omega)
    }
}

/// `L(x, y) = ½‖x − y‖²` for `x ∈ A`, `y ∈ B`.
pub fn eval_l<P: Point>(x: &P, y: &P) -> Result<f64> {
    Ok(0.5 * x.dist_sq(y)?)
}

/// `Q(y) = ((1+μ)/(2μ)) (‖y − y_reg‖² − ‖y_prev − y_reg‖²)` with
/// `y_reg = (y_prev + μ x_next)/(1+μ)`. Equal to
/// `‖y − y_prev‖²/(2μ) + L(x_next, y) − L(x_next, y_prev)`.
pub fn eval_q<P: Point>(y: &P, y_prev: &P, x_next: &P, mu: f64) -> Result<f64> {
    let y_reg = regularize(y_prev, x_next, mu)?;
    Ok((1.0 + mu) / (2.0 * mu) * (y.dist_sq(&y_reg)? - y_prev.dist_sq(&y_reg)?))
}

/// `(base + weight·toward)/(1 + weight)`.
fn regularize<P: Point>(base: &P, toward: &P, weight: f64) -> Result<P> {
    base.lincomb(1.0 / (1.0 + weight), toward, weight / (1.0 + weight))
}

/// Result of one outer step.
#[derive(Clone, Debug)]
pub struct StepOutcome<P> {
    pub x: P,
    pub y: P,
    pub ell_bar: usize,
    pub forced: bool,
    pub cert: Option<InexactCertificate>,
}

pub fn step_apm<F: FeasibilityProblem>(
    problem: &F,
    y: &F::Point,
    ctx: &ProjectionContext,
) -> Result<StepOutcome<F::Point>> {
    let x = problem.project_a(y)?;
    let b = problem.project_b(&x, ctx)?;
    Ok(StepOutcome {
        x,
        y: b.point,
        ell_bar: b.ell_bar,
        forced: b.forced,
        cert: None,
    })
}

pub fn step_rapm<F: FeasibilityProblem>(
    problem: &F,
    x: &F::Point,
    y: &F::Point,
    lambda: f64,
    mu: f64,
    ctx: &ProjectionContext,
) -> Result<StepOutcome<F::Point>> {
    let x_next = problem.project_a(&regularize(x, y, lambda)?)?;
    let y_reg = regularize(y, &x_next, mu)?;
    let b = problem.project_b(&y_reg, ctx)?;
    Ok(StepOutcome {
        x: x_next,
        y: b.point,
        ell_bar: b.ell_bar,
        forced: b.forced,
        cert: None,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn step_irapm<F: FeasibilityProblem>(
    problem: &F,
    x: &F::Point,
    y: &F::Point,
    lambda: f64,
    mu: f64,
    zeta: f64,
    gamma: f64,
    ctx: &ProjectionContext,
) -> Result<StepOutcome<F::Point>> {
    let x_next = problem.project_a(&regularize(x, y, lambda)?)?;
    let y_reg = regularize(y, &x_next, mu)?;
    let opts = InexactOptions {
        mu,
        zeta,
        gamma,
        ell_cap: ctx.ell_cap,
    };
    let (y_next, cert) = problem.project_b_inexact(&y_reg, y, &opts, ctx)?;
    Ok(StepOutcome {
        x: x_next,
        y: y_next,
        ell_bar: cert.ell_bar,
        forced: cert.forced,
        cert: Some(cert),
    })
}

/// Runs `config.max_iter` iterations of the configured variant from
/// `problem.initial`. Projection randomness for iteration `k` comes from
/// `config.rng.derive(k)` (`k = 0` for the starting point).
pub fn run<F: FeasibilityProblem>(problem: &F, config: &SolverConfig) -> Result<SolverTrace<F::Point>> {
    config.validate()?;
    let start = Instant::now();
    let (mut x, mut y) = problem.initial(&config.context(0))?;
    let initial_l = if config.record_l { Some(eval_l(&x, &y)?) } else { None };
    let mut records = Vec::with_capacity(config.max_iter);
    let mut cost = 0usize;
    for k in 1..=config.max_iter {
        let ctx = config.context(k as u64);
        let (lambda, mu) = (config.lambda.value(k), config.mu.value(k));
        let out = match config.variant {
            Variant::Apm => step_apm(problem, &y, &ctx)?,
            Variant::Rapm => step_rapm(problem, &x, &y, lambda, mu, &ctx)?,
            Variant::Irapm => step_irapm(problem, &x, &y, lambda, mu, config.zeta, config.gamma, &ctx)?,
        };
        cost += out.ell_bar.saturating_sub(problem.base_dim());
        let step_sq = out.x.dist_sq(&x)? + out.y.dist_sq(&y)?;
        let q_value = out.cert.as_ref().map(|c| c.q_value);
        let d_k = (step_sq + q_value.map_or(0.0, |q| (-q).max(0.0))).sqrt();
        let e_omega = problem.residual(&out.y)?;
        let l_value = if config.record_l { Some(eval_l(&out.x, &out.y)?) } else { None };
        records.push(IterationRecord {
            k,
            e_omega,
            l_value,
            d_k,
            ell_bar: out.ell_bar,
            cost,
            q_value,
            forced: out.forced,
            cert: out.cert,
        });
        x = out.x;
        y = out.y;
        if config.residual_exit.is_some_and(|t| e_omega <= t) {
            break;
        }
    }
    Ok(SolverTrace {
        config: config.clone(),
        records,
        initial_l,
        final_x: x,
        final_y: y,
        wall_time: start.elapsed(),
    })
}
