//! One-dimensional example separating the two inexactness conditions.
//!
//! `A = [0, 2]`, `B = [0, 1] ∪ [2, 3]`, start `(x⁰, y⁰) = (0, 3)`,
//! `λ = 1`, `μ = 10`, `ζ = 1/2`. All quantities are exact rationals.

use std::fmt::Write as _;

use altproj::sets::IntervalUnion;
use altproj::solver::{step_irapm, IntervalProblem, ProjectionContext};
use altproj::RngSpec;
use num_rational::Rational64;

type Q = Rational64;

fn r(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn f(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn clamp(t: Q, lo: Q, hi: Q) -> Q {
    t.max(lo).min(hi)
}

/// Nearest point of an ascending interval list, ties to the smaller point.
fn project(intervals: &[(Q, Q)], t: Q) -> Q {
    let mut best = clamp(t, intervals[0].0, intervals[0].1);
    for &(lo, hi) in &intervals[1..] {
        let p = clamp(t, lo, hi);
        if (p - t) * (p - t) < (best - t) * (best - t) {
            best = p;
        }
    }
    best
}

pub struct Report {
    pub text: String,
    pub svg: String,
}

struct Data {
    y0: Q,
    mu: Q,
    zeta: Q,
    y_reg: Q,
    y_hat: Q,
}

impl Data {
    fn q(&self, y: Q) -> Q {
        (Q::from(1) + self.mu) / (Q::from(2) * self.mu)
            * ((y - self.y_reg) * (y - self.y_reg) - (self.y0 - self.y_reg) * (self.y0 - self.y_reg))
    }

    fn q_f64(&self, y: f64) -> f64 {
        let (mu, yr, y0) = (f(self.mu), f(self.y_reg), f(self.y0));
        (1.0 + mu) / (2.0 * mu) * ((y - yr).powi(2) - (y0 - yr).powi(2))
    }

    fn inexact(&self, y: Q) -> bool {
        self.q(y) <= self.zeta * self.q(self.y_hat)
    }

    /// `|y − ŷ| ≤ sqrt(−(1−ζ)/ζ · Q(y))`, compared as squares.
    fn bound(&self, y: Q) -> bool {
        let rhs = -(Q::from(1) - self.zeta) / self.zeta * self.q(y);
        (y - self.y_hat) * (y - self.y_hat) <= rhs.max(Q::from(0))
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn report() -> anyhow::Result<Report> {
    let a = [(r(0, 1), r(2, 1))];
    let b = [(r(0, 1), r(1, 1)), (r(2, 1), r(3, 1))];
    let (x0, y0) = (r(0, 1), r(3, 1));
    let (lambda, mu, zeta) = (r(1, 1), r(10, 1), r(1, 2));
    let one = Q::from(1);

    let x_reg = (x0 + lambda * y0) / (one + lambda);
    let x1 = project(&a, x_reg);
    let y_reg = (y0 + mu * x1) / (one + mu);
    let y_hat = project(&b, y_reg);
    let d = Data {
        y0,
        mu,
        zeta,
        y_reg,
        y_hat,
    };

    let mut t = String::new();
    writeln!(t, "A=[0,2] B=[0,1]u[2,3] x0={x0} y0={y0} lambda={lambda} mu={mu} zeta={zeta}")?;
    writeln!(t, "x_reg={:?} ({x_reg})", f(x_reg))?;
    writeln!(t, "x1={:?} ({x1})", f(x1))?;
    writeln!(t, "y_reg={:?} ({y_reg})", f(y_reg))?;
    writeln!(t, "yhat={y_hat}")?;
    for y in [r(2, 1), r(1, 1)] {
        writeln!(t, "Q({y})={:?} ({})", f(d.q(y)), d.q(y))?;
    }
    writeln!(t, "zeta*Q(yhat)={:?}", f(zeta * d.q(y_hat)))?;
    for y in [r(1, 1), r(2, 1)] {
        writeln!(t, "y={y} inexact:{} bound:{}", verdict(d.inexact(y)), verdict(d.bound(y)))?;
    }

    // Same step through the floating-point solver.
    let problem = IntervalProblem {
        a: IntervalUnion::new(vec![(0.0, 2.0)])?,
        b: IntervalUnion::new(vec![(0.0, 1.0), (2.0, 3.0)])?,
        x0: f(x0),
        y0: f(y0),
    };
    let ctx = ProjectionContext {
        rng: RngSpec::new(0, 0),
        ritz_tol_multiplier: 16.0,
        ell_cap: None,
    };
    let step = step_irapm(&problem, &f(x0), &f(y0), f(lambda), f(mu), f(zeta), 0.1, &ctx)?;
    writeln!(t, "solver irapm step: x1={:?} y1={:?}", step.x, step.y)?;

    Ok(Report {
        text: t,
        svg: svg(&d),
    })
}

fn svg(d: &Data) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    let (x_lo, x_hi) = (-0.25, 3.25);
    let qs: Vec<(f64, f64)> = (0..=280)
        .map(|i| {
            let y = x_lo + (x_hi - x_lo) * i as f64 / 280.0;
            (y, d.q_f64(y))
        })
        .collect();
    let (q_lo, q_hi) = (-1.2, 1.6);
    let px = |y: f64| 60.0 + (y - x_lo) / (x_hi - x_lo) * (W - 90.0);
    let py = |q: f64| 30.0 + (q_hi - q) / (q_hi - q_lo) * (H - 80.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (lo, hi) in [(0.0, 1.0), (2.0, 3.0)] {
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="30" width="{:.2}" height="{}" fill="#9ecae1" fill-opacity="0.35"/>"##,
            px(lo),
            px(hi) - px(lo),
            H - 80.0
        );
    }
    let level = f(d.zeta * d.q(d.y_hat));
    let _ = writeln!(
        s,
        r##"<line x1="60" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#d62728" stroke-dasharray="5,4"/><text x="{2}" y="{3:.2}" fill="#d62728">ζ·Q(ŷ)</text>"##,
        py(level),
        W - 30.0,
        W - 80.0,
        py(level) - 5.0
    );
    let _ = writeln!(
        s,
        r##"<line x1="60" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#888"/>"##,
        py(0.0),
        W - 30.0
    );
    let pts: Vec<String> = qs.iter().map(|&(y, q)| format!("{:.2},{:.2}", px(y), py(q))).collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="2"/>"##,
        pts.join(" ")
    );
    for (y, label, color) in [(1.0, "y=1: inexact PASS, bound FAIL", "#ff7f0e"), (2.0, "ŷ=2", "#2ca02c")] {
        let qv = d.q_f64(y);
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="5" fill="{color}"/><text x="{:.2}" y="{:.2}">{label}</text>"#,
            px(y),
            py(qv),
            px(y) + 8.0,
            py(qv) + 18.0
        );
    }
    let yr = f(d.y_reg);
    let _ = writeln!(
        s,
        r##"<line x1="{0:.2}" y1="30" x2="{0:.2}" y2="{1}" stroke="#555" stroke-dasharray="2,3"/><text x="{2:.2}" y="{3}">y_reg=18/11</text>"##,
        px(yr),
        H - 50.0,
        px(yr) + 4.0,
        H - 55.0
    );
    for t in 0..=3 {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{t}</text>"#,
            px(t as f64),
            H - 32.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="14">Q(y) with B = [0,1] ∪ [2,3] shaded</text>"#,
        W / 2.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values() {
        let rep = report().unwrap();
        assert!(rep.text.contains("x_reg=1.5 (3/2)"));
        assert!(rep.text.contains("y_reg=1.636363"));
        assert!(rep.text.contains("(18/11)"));
        assert!(rep.text.contains("yhat=2\n"));
        assert!(rep.text.contains("Q(2)=-0.95 (-19/20)"));
        assert!(rep.text.contains("Q(1)=-0.8 (-4/5)"));
        assert!(rep.text.contains("y=1 inexact:PASS bound:FAIL"));
        assert!(rep.text.contains("y=2 inexact:PASS bound:PASS"));
        assert!(rep.svg.starts_with("<svg"));
    }
}
