//! Self-contained SVG line charts of solver traces.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::IterationRecord;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Traces of one method over several seeds.
#[derive(Clone, Debug)]
pub struct PlotGroup {
    pub label: String,
    pub runs: Vec<Vec<IterationRecord>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    /// Mean `e_Ω` with the min–max band over seeds, log scale.
    EOmegaBand,
    /// Mean `cost(k)` divided by the APM mean `cost(k)`.
    CostRatioVsApm,
    /// Mean accepted Krylov dimension per iteration.
    KrylovDims,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [PlotKind::EOmegaBand, PlotKind::CostRatioVsApm, PlotKind::KrylovDims];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::EOmegaBand => "e_omega_band",
            PlotKind::CostRatioVsApm => "cost_ratio_vs_apm",
            PlotKind::KrylovDims => "krylov_dims",
        }
    }
}

struct Series {
    label: String,
    line: Vec<(f64, f64)>,
    band: Option<Vec<(f64, f64, f64)>>,
}

fn per_k(group: &PlotGroup, f: impl Fn(&IterationRecord) -> f64) -> Vec<(f64, Vec<f64>)> {
    let len = group.runs.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|i| {
            let k = group.runs[0][i].k as f64;
            (k, group.runs.iter().map(|run| f(&run[i])).collect())
        })
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Renders `kind` for `groups` into an SVG file at `path`.
pub fn emit_plots(groups: &[PlotGroup], kind: PlotKind, path: &Path) -> Result<()> {
    std::fs::write(path, render(groups, kind)?)?;
    Ok(())
}

/// The SVG document for `kind`.
pub fn render(groups: &[PlotGroup], kind: PlotKind) -> Result<String> {
    if groups.is_empty() || groups.iter().any(|g| g.runs.is_empty() || g.runs.iter().any(Vec::is_empty)) {
        return Err(Error::InvalidParameter("plot needs at least one nonempty trace per method".into()));
    }
    let series: Vec<Series> = match kind {
        PlotKind::EOmegaBand => groups
            .iter()
            .map(|g| {
                let rows = per_k(g, |r| r.e_omega);
                Series {
                    label: g.label.clone(),
                    line: rows.iter().map(|(k, v)| (*k, mean(v))).collect(),
                    band: Some(
                        rows.iter()
                            .map(|(k, v)| {
                                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                                let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                                (*k, lo, hi)
                            })
                            .collect(),
                    ),
                }
            })
            .collect(),
        PlotKind::CostRatioVsApm => {
            let apm = groups
                .iter()
                .find(|g| g.label == "APM")
                .ok_or_else(|| Error::InvalidParameter("cost ratio plot needs an APM trace".into()))?;
            let base = per_k(apm, |r| r.cost as f64);
            groups
                .iter()
                .map(|g| {
                    let rows = per_k(g, |r| r.cost as f64);
                    let line = rows
                        .iter()
                        .zip(&base)
                        .filter_map(|((k, v), (_, b))| {
                            let denom = mean(b);
                            (denom > 0.0).then(|| (*k, mean(v) / denom))
                        })
                        .collect();
                    Series {
                        label: g.label.clone(),
                        line,
                        band: None,
                    }
                })
                .collect()
        }
        PlotKind::KrylovDims => groups
            .iter()
            .map(|g| Series {
                label: g.label.clone(),
                line: per_k(g, |r| r.ell_bar as f64).iter().map(|(k, v)| (*k, mean(v))).collect(),
                band: None,
            })
            .collect(),
    };
    let (title, ylabel, log) = match kind {
        PlotKind::EOmegaBand => ("Relative error on observed entries", "e_Ω", true),
        PlotKind::CostRatioVsApm => ("Cumulative Lanczos cost relative to APM", "cost(k) / cost_APM(k)", false),
        PlotKind::KrylovDims => ("Accepted Krylov dimension", "ℓ̄_k", false),
    };
    Ok(chart(title, "iteration k", ylabel, log, &series))
}

fn chart(title: &str, xlabel: &str, ylabel: &str, log: bool, series: &[Series]) -> String {
    let tf = |y: f64| if log { y.log10() } else { y };
    let usable = |y: f64| y.is_finite() && (!log || y > 0.0);
    let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
    let mut see = |x: f64, y: f64| {
        if usable(y) {
            xs = (xs.0.min(x), xs.1.max(x));
            ys = (ys.0.min(tf(y)), ys.1.max(tf(y)));
        }
    };
    for s in series {
        s.line.iter().for_each(|&(x, y)| see(x, y));
        if let Some(b) = &s.band {
            b.iter().for_each(|&(x, lo, hi)| {
                see(x, lo);
                see(x, hi);
            });
        }
    }
    if !xs.0.is_finite() {
        xs = (0.0, 1.0);
        ys = (0.0, 1.0);
    }
    if xs.1 - xs.0 < 1e-12 {
        xs = (xs.0 - 0.5, xs.1 + 0.5);
    }
    if log {
        ys = (ys.0.floor(), ys.1.ceil());
    } else {
        let pad = ((ys.1 - ys.0) * 0.05).max(1e-9 * ys.1.abs()).max(1e-12);
        ys = ((ys.0 - pad).min(if ys.0 >= 0.0 { 0.0 } else { ys.0 }), ys.1 + pad);
    }
    if ys.1 - ys.0 < 1e-12 {
        ys = (ys.0 - 1.0, ys.1 + 1.0);
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - xs.0) / (xs.1 - xs.0) * pw;
    let py = |y: f64| TOP + ph - (tf(y) - ys.0) / (ys.1 - ys.0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    );

    for i in 0..=5 {
        let x = xs.0 + (xs.1 - xs.0) * i as f64 / 5.0;
        let _ = writeln!(
            s,
            r##"<line x1="{0:.2}" y1="{1}" x2="{0:.2}" y2="{2}" stroke="#ddd"/><text x="{0:.2}" y="{3}" text-anchor="middle">{4}</text>"##,
            px(x),
            TOP,
            TOP + ph,
            TOP + ph + 18.0,
            fmt_tick(x)
        );
    }
    let yticks: Vec<f64> = if log {
        let (a, b) = (ys.0 as i64, ys.1 as i64);
        let step = ((b - a) / 8).max(1);
        (a..=b).step_by(step as usize).map(|e| 10f64.powi(e as i32)).collect()
    } else {
        (0..=5).map(|i| ys.0 + (ys.1 - ys.0) * i as f64 / 5.0).collect()
    };
    for y in yticks {
        let label = if log { format!("1e{}", y.log10().round()) } else { fmt_tick(y) };
        let _ = writeln!(
            s,
            r##"<line x1="{0}" y1="{1:.2}" x2="{2}" y2="{1:.2}" stroke="#ddd"/><text x="{3}" y="{4:.2}" text-anchor="end">{5}</text>"##,
            LEFT,
            py(y),
            LEFT + pw,
            LEFT - 6.0,
            py(y) + 4.0,
            label
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(ylabel)
    );

    for (idx, ser) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        if let Some(band) = &ser.band {
            let pts: Vec<&(f64, f64, f64)> = band.iter().filter(|b| usable(b.1) && usable(b.2)).collect();
            if !pts.is_empty() {
                let mut d = String::new();
                for (x, _, hi) in &pts {
                    let _ = write!(d, "{:.2},{:.2} ", px(*x), py(*hi));
                }
                for (x, lo, _) in pts.iter().rev() {
                    let _ = write!(d, "{:.2},{:.2} ", px(*x), py(*lo));
                }
                let _ = writeln!(
                    s,
                    r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
                    d.trim_end()
                );
            }
        }
        let mut d = String::new();
        for &(x, y) in ser.line.iter().filter(|p| usable(p.1)) {
            let _ = write!(d, "{:.2},{:.2} ", px(x), py(y));
        }
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
            d.trim_end()
        );
        let ly = TOP + 14.0 + 20.0 * idx as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        let t = format!("{v:.2}");
        t.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: usize, e: f64, ell: usize, cost: usize) -> IterationRecord {
        IterationRecord {
            k,
            e_omega: e,
            l_value: None,
            d_k: 0.0,
            ell_bar: ell,
            cost,
            q_value: None,
            forced: false,
            cert: None,
        }
    }

    fn group(label: &str, scale: f64) -> PlotGroup {
        PlotGroup {
            label: label.into(),
            runs: vec![(1..=5).map(|k| rec(k, scale / k as f64, 4 + k % 2, 2 * k)).collect()],
        }
    }

    #[test]
    fn single_trace_band_is_the_line() {
        let svg = render(&[group("APM", 1.0)], PlotKind::EOmegaBand).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<polyline").count(), 1);
    }

    #[test]
    fn cost_ratio_needs_apm() {
        assert!(render(&[group("RAPM", 1.0)], PlotKind::CostRatioVsApm).is_err());
        let svg = render(&[group("APM", 1.0)], PlotKind::CostRatioVsApm).unwrap();
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let ys: Vec<&str> = line.split('"').nth(1).unwrap().split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert!(ys.windows(2).all(|w| w[0] == w[1]), "self ratio must be flat");
    }

    #[test]
    fn three_methods_three_lines_with_legend() {
        let groups = [group("APM", 1.0), group("RAPM", 2.0), group("iRAPM(ζ=1e-7)", 3.0)];
        for kind in PlotKind::ALL {
            let svg = render(&groups, kind).unwrap();
            assert_eq!(svg.matches("<polyline").count(), 3);
            for g in &groups {
                assert!(svg.contains(&format!(">{}</text>", g.label)));
            }
        }
        assert!(render(&[], PlotKind::KrylovDims).is_err());
    }
}
