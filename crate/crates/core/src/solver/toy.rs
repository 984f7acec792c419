use super::{eval_q, BStep, FeasibilityProblem, ProjectionContext};
use crate::error::Result;
use crate::sets::{project_interval_union, InexactCertificate, InexactOptions, IntervalUnion};

const GRID_POINTS: usize = 10_000;

/// Feasibility between two interval unions on the real line.
///
/// The inexact projection onto `B` searches the exact projections onto each
/// interval of `B` plus a uniform grid over its hull, and returns the
/// passing candidate with the largest `Q` (the least accurate acceptable
/// point). Intended for small illustrative studies.
#[derive(Clone, Debug)]
pub struct IntervalProblem {
    pub a: IntervalUnion,
    pub b: IntervalUnion,
    pub x0: f64,
    pub y0: f64,
}

impl IntervalProblem {
    /// Candidate points of `B` considered by the inexact projection.
    pub fn candidates(&self, y_reg: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self.b.intervals().iter().map(|&(lo, hi)| y_reg.clamp(lo, hi)).collect();
        let (lo, hi) = self.b.hull();
        for i in 0..GRID_POINTS {
            let t = lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64;
            if self.b.contains(t) {
                out.push(t);
            }
        }
        out
    }
}

impl FeasibilityProblem for IntervalProblem {
    type Point = f64;

    fn base_dim(&self) -> usize {
        0
    }

    fn project_a(&self, z: &f64) -> Result<f64> {
        Ok(project_interval_union(&self.a, *z))
    }

    fn project_b(&self, z: &f64, _ctx: &ProjectionContext) -> Result<BStep<f64>> {
        Ok(BStep {
            point: project_interval_union(&self.b, *z),
            ell_bar: 0,
            forced: false,
        })
    }

    fn project_b_inexact(
        &self,
        y_reg: &f64,
        y_prev: &f64,
        opts: &InexactOptions,
        _ctx: &ProjectionContext,
    ) -> Result<(f64, InexactCertificate)> {
        opts.validate()?;
        let mu = opts.mu;
        // x_next recovered from y_reg = (y_prev + μ x_next)/(1+μ)
        let x_next = ((1.0 + mu) * y_reg - y_prev) / mu;
        let y_hat = project_interval_union(&self.b, *y_reg);
        let q_hat = eval_q(&y_hat, y_prev, &x_next, mu)?;
        let factor = (1.0 - opts.zeta) / opts.zeta;
        let mut best: Option<(f64, f64)> = None;
        for y in self.candidates(*y_reg) {
            let q = eval_q(&y, y_prev, &x_next, mu)?;
            let inexact = q <= opts.zeta * q_hat;
            let bound = (y - y_hat) * (y - y_hat) <= -factor * q;
            if inexact && bound && best.is_none_or(|(by, bq)| q > bq || (q == bq && y < by)) {
                best = Some((y, q));
            }
        }
        // y_hat itself always passes; the fallback only guards against NaN input.
        let (y, q) = best.unwrap_or((y_hat, q_hat));
        let cert = InexactCertificate {
            ell_bar: 0,
            c: (y_hat - y_reg) * (y_hat - y_reg),
            a: (y - y_hat).abs(),
            kappa: None,
            q_value: q,
            dist_w_sq: (y - y_reg) * (y - y_reg),
            dist_prev_sq: (y_prev - y_reg) * (y_prev - y_reg),
            zeta: opts.zeta,
            gamma: opts.gamma,
            mu,
            forced: false,
        };
        Ok((y, cert))
    }

    fn initial(&self, _ctx: &ProjectionContext) -> Result<(f64, f64)> {
        Ok((self.x0, self.y0))
    }

    /// Distance from `y` to `A`.
    fn residual(&self, y: &f64) -> Result<f64> {
        Ok((project_interval_union(&self.a, *y) - y).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::RngSpec;
    use crate::solver::{step_apm, step_irapm, step_rapm};

    fn toy() -> IntervalProblem {
        IntervalProblem {
            a: IntervalUnion::new(vec![(0.0, 2.0)]).unwrap(),
            b: IntervalUnion::new(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap(),
            x0: 0.0,
            y0: 3.0,
        }
    }

    fn ctx() -> ProjectionContext {
        ProjectionContext {
            rng: RngSpec::new(0, 0),
            ritz_tol_multiplier: 16.0,
            ell_cap: None,
        }
    }

    #[test]
    fn apm_steps() {
        let p = toy();
        let s = step_apm(&p, &3.0, &ctx()).unwrap();
        assert_eq!((s.x, s.y), (2.0, 2.0));
        let s = step_apm(&p, &0.5, &ctx()).unwrap();
        assert_eq!((s.x, s.y), (0.5, 0.5));
    }

    #[test]
    fn rapm_step_from_the_toy_start() {
        let p = toy();
        let s = step_rapm(&p, &0.0, &3.0, 1.0, 10.0, &ctx()).unwrap();
        assert_eq!(s.x, 1.5);
        assert_eq!(s.y, 2.0);
        let s = step_rapm(&p, &0.5, &0.5, 1.0, 10.0, &ctx()).unwrap();
        assert_eq!((s.x, s.y), (0.5, 0.5));
    }

    #[test]
    fn inexact_step_rejects_the_near_interval() {
        let p = toy();
        let opts = InexactOptions {
            mu: 10.0,
            zeta: 0.5,
            gamma: 0.1,
            ell_cap: None,
        };
        let y_reg = 18.0 / 11.0;
        assert!(p.candidates(y_reg).contains(&1.0));
        let (y, cert) = p.project_b_inexact(&y_reg, &3.0, &opts, &ctx()).unwrap();
        assert!((2.0..=3.0).contains(&y), "{y}");
        assert!(cert.q_value <= 0.5 * -0.95 + 1e-12);
        assert!(cert.a * cert.a <= -cert.q_value + 1e-12);

        let s = step_irapm(&p, &0.0, &3.0, 1.0, 10.0, 1.0, 0.1, &ctx()).unwrap();
        assert_eq!(s.y, 2.0);
    }
}
