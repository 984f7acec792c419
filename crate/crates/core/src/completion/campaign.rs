//! Campaigns: every (method, seed) cell on a common problem family, with
//! aggregated statistics and on-disk artifacts.
//!
//! Output directory layout: `summary.csv`, `trace_<method>_<zeta>_<seed>.csv`,
//! `fig_<kind>.svg` and `manifest`. Nothing time-dependent is written, so
//! identical specs give byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::plot::{emit_plots, PlotGroup, PlotKind};
use super::{
    generate_gaussian, image_instance, metric_e_mse, read_image_matrix, synthetic_scene, truncate_image,
    ProblemInstance, STREAM_FACTORS, STREAM_LANCZOS, STREAM_MASK,
};
use crate::dense::RngSpec;
use crate::error::{Error, Result};
use crate::solver::{run, write_trace_csv, IterationRecord, SolverConfig, Variant};

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemFamily {
    Gaussian {
        n1: usize,
        n2: usize,
        rank: usize,
        oversampling: f64,
    },
    /// An image file, or the built-in synthetic scene of the given size
    /// when `path` is `None`.
    Image {
        path: Option<PathBuf>,
        size: (usize, usize),
        rank: usize,
        oversampling: f64,
    },
}

impl ProblemFamily {
    pub fn rank(&self) -> usize {
        match self {
            ProblemFamily::Gaussian { rank, .. } | ProblemFamily::Image { rank, .. } => *rank,
        }
    }

    fn echo(&self) -> Vec<(String, String)> {
        match self {
            ProblemFamily::Gaussian {
                n1,
                n2,
                rank,
                oversampling,
            } => vec![
                ("family".into(), "gaussian".into()),
                ("n1".into(), n1.to_string()),
                ("n2".into(), n2.to_string()),
                ("rank".into(), rank.to_string()),
                ("oversampling".into(), format!("{oversampling:?}")),
            ],
            ProblemFamily::Image {
                path,
                size,
                rank,
                oversampling,
            } => vec![
                ("family".into(), "image".into()),
                (
                    "image".into(),
                    path.as_ref().map_or_else(|| "synthetic".to_string(), |p| p.display().to_string()),
                ),
                ("n1".into(), size.0.to_string()),
                ("n2".into(), size.1.to_string()),
                ("rank".into(), rank.to_string()),
                ("oversampling".into(), format!("{oversampling:?}")),
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodSpec {
    pub variant: Variant,
    /// Inexactness parameter; only meaningful for iRAPM.
    pub zeta: Option<f64>,
}

impl MethodSpec {
    pub fn new(variant: Variant, zeta: Option<f64>) -> Self {
        Self { variant, zeta }
    }

    /// `APM`, `RAPM` or `iRAPM(ζ=1e-7)`.
    pub fn label(&self) -> String {
        match self.zeta {
            Some(z) if self.variant == Variant::Irapm => format!("iRAPM(ζ={z:e})"),
            _ => self.variant.label().to_string(),
        }
    }

    pub fn file_key(&self) -> String {
        let z = self.zeta.map_or_else(|| "none".to_string(), |z| format!("{z:e}"));
        format!("{}_{z}", self.variant.label().to_ascii_lowercase())
    }

    fn validate(&self) -> Result<()> {
        match (self.variant, self.zeta) {
            (Variant::Irapm, Some(z)) if z > 0.0 && z <= 1.0 => Ok(()),
            (Variant::Irapm, _) => Err(Error::InvalidParameter("iRAPM needs zeta in (0, 1]".into())),
            (_, None) => Ok(()),
            (v, Some(_)) => Err(Error::InvalidParameter(format!("zeta is meaningless for {}", v.label()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignSpec {
    pub name: String,
    pub family: ProblemFamily,
    pub methods: Vec<MethodSpec>,
    pub seeds: Vec<u64>,
    /// `λ_k = μ_k` for all `k`.
    pub reg: f64,
    pub gamma: f64,
    pub max_iter: usize,
    pub ritz_tol_multiplier: f64,
    pub ell_cap: Option<usize>,
    pub record_l: bool,
}

impl CampaignSpec {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.seeds.is_empty() {
            return Err(Error::InvalidParameter("campaign needs at least one method and one seed".into()));
        }
        for m in &self.methods {
            m.validate()?;
        }
        self.solver_config(&self.methods[0], self.seeds[0]).validate()
    }

    pub fn solver_config(&self, method: &MethodSpec, seed: u64) -> SolverConfig {
        let mut cfg = SolverConfig::new(method.variant, self.reg, RngSpec::new(seed, 0).derive(STREAM_LANCZOS));
        if let Some(z) = method.zeta {
            cfg.zeta = z;
        }
        cfg.gamma = self.gamma;
        cfg.max_iter = self.max_iter;
        cfg.ritz_tol_multiplier = self.ritz_tol_multiplier;
        cfg.ell_cap = self.ell_cap;
        cfg.record_l = self.record_l;
        cfg
    }

    /// `key=value` lines sufficient to rerun every cell.
    pub fn manifest(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name={}", self.name);
        for (k, v) in self.family.echo() {
            let _ = writeln!(s, "{k}={v}");
        }
        let methods: Vec<String> = self.methods.iter().map(|m| m.label()).collect();
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "methods={}", methods.join(","));
        let _ = writeln!(s, "seeds={}", seeds.join(","));
        let _ = writeln!(s, "lambda_mu={:?}", self.reg);
        let _ = writeln!(s, "gamma={:?}", self.gamma);
        let _ = writeln!(s, "max_iter={}", self.max_iter);
        let _ = writeln!(s, "ritz_tol_multiplier={:?}", self.ritz_tol_multiplier);
        let _ = writeln!(
            s,
            "ell_cap={}",
            self.ell_cap.map_or_else(|| "none".to_string(), |c| c.to_string())
        );
        let _ = writeln!(s, "record_l={}", self.record_l);
        let _ = writeln!(
            s,
            "streams=factors:{STREAM_FACTORS},mask:{STREAM_MASK},lanczos:{STREAM_LANCZOS}"
        );
        s
    }
}

/// Outcome of one successful cell.
#[derive(Clone, Debug)]
pub struct CellRun {
    pub records: Vec<IterationRecord>,
    pub e_omega: f64,
    pub e_mse: f64,
    pub cost: usize,
    pub trace_csv: String,
}

#[derive(Clone, Debug)]
pub struct CellResult {
    pub method: MethodSpec,
    pub seed: u64,
    pub outcome: std::result::Result<CellRun, String>,
}

/// Statistics of one method over all seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub method: MethodSpec,
    pub runs: usize,
    pub failed: usize,
    pub e_omega: f64,
    pub e_mse: f64,
    /// Sample standard deviation; `None` with a single seed.
    pub e_mse_std: Option<f64>,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignSummary {
    pub rows: Vec<SummaryRow>,
}

impl CampaignSummary {
    pub fn row(&self, variant: Variant, zeta: Option<f64>) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.method.variant == variant && (zeta.is_none() || r.method.zeta == zeta))
    }

    /// `method,zeta,e_omega,e_mse,e_mse_std,cost`; a method with failed
    /// cells reports `failed:<count>` in every statistic.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("method,zeta,e_omega,e_mse,e_mse_std,cost\n");
        for r in &self.rows {
            let zeta = r.method.zeta.map_or_else(String::new, |z| format!("{z:e}"));
            let name = r.method.variant.label();
            if r.failed > 0 {
                let f = format!("failed:{}", r.failed);
                let _ = writeln!(s, "{name},{zeta},{f},{f},{f},{f}");
            } else {
                let std = r.e_mse_std.map_or_else(String::new, |v| format!("{v:e}"));
                let _ = writeln!(s, "{name},{zeta},{:e},{:e},{std},{:e}", r.e_omega, r.e_mse, r.cost);
            }
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct CampaignResult {
    pub summary: CampaignSummary,
    pub cells: Vec<CellResult>,
}

impl CampaignResult {
    pub fn any_failed(&self) -> bool {
        self.cells.iter().any(|c| c.outcome.is_err())
    }

    /// Successful runs grouped by method, in campaign order.
    pub fn plot_groups(&self, methods: &[MethodSpec]) -> Vec<PlotGroup> {
        methods
            .iter()
            .map(|m| PlotGroup {
                label: m.label(),
                runs: self
                    .cells
                    .iter()
                    .filter(|c| c.method == *m)
                    .filter_map(|c| c.outcome.as_ref().ok().map(|r| r.records.clone()))
                    .collect(),
            })
            .filter(|g| !g.runs.is_empty())
            .collect()
    }
}

fn build_instances(spec: &CampaignSpec) -> Result<Vec<ProblemInstance>> {
    match &spec.family {
        ProblemFamily::Gaussian {
            n1,
            n2,
            rank,
            oversampling,
        } => spec
            .seeds
            .par_iter()
            .map(|&s| generate_gaussian(*n1, *n2, *rank, *oversampling, RngSpec::new(s, 0)))
            .collect(),
        ProblemFamily::Image {
            path,
            size,
            rank,
            oversampling,
        } => {
            let (pixels, source) = match path {
                Some(p) => (read_image_matrix(p)?, p.display().to_string()),
                None => (synthetic_scene(size.0, size.1), "synthetic".to_string()),
            };
            let truth = truncate_image(&pixels, *rank)?;
            spec.seeds
                .iter()
                .map(|&s| image_instance(truth.clone(), *rank, *oversampling, RngSpec::new(s, 0), source.clone()))
                .collect()
        }
    }
}

fn run_cell(spec: &CampaignSpec, inst: &ProblemInstance, method: &MethodSpec, seed: u64) -> Result<CellRun> {
    let cfg = spec.solver_config(method, seed);
    let trace = run(&inst.problem(), &cfg)?;
    let e_mse = metric_e_mse(&trace.final_y, &inst.ground_truth)?;
    let mut extra = vec![("campaign".to_string(), spec.name.clone())];
    extra.extend(spec.family.echo());
    extra.push(("method".into(), method.label()));
    extra.push(("problem_seed".into(), seed.to_string()));
    let mut buf = Vec::new();
    write_trace_csv(&trace, &extra, &mut buf)?;
    Ok(CellRun {
        e_omega: trace.final_residual(),
        e_mse,
        cost: trace.final_cost(),
        records: trace.records,
        trace_csv: String::from_utf8(buf).expect("trace CSV is UTF-8"),
    })
}

fn summarize(spec: &CampaignSpec, cells: &[CellResult]) -> CampaignSummary {
    let rows = spec
        .methods
        .iter()
        .map(|m| {
            let mine: Vec<&CellResult> = cells.iter().filter(|c| c.method == *m).collect();
            let ok: Vec<&CellRun> = mine.iter().filter_map(|c| c.outcome.as_ref().ok()).collect();
            let n = ok.len() as f64;
            let avg = |f: &dyn Fn(&CellRun) -> f64| ok.iter().map(|r| f(r)).sum::<f64>() / n;
            let e_mse = avg(&|r| r.e_mse);
            let e_mse_std = (ok.len() > 1).then(|| {
                (ok.iter().map(|r| (r.e_mse - e_mse).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            });
            SummaryRow {
                method: *m,
                runs: ok.len(),
                failed: mine.len() - ok.len(),
                e_omega: avg(&|r| r.e_omega),
                e_mse,
                e_mse_std,
                cost: avg(&|r| r.cost as f64),
            }
        })
        .collect();
    CampaignSummary { rows }
}

/// Runs every (method, seed) cell, in parallel, and writes the artifacts to
/// `out_dir` when given. A failing cell is recorded, not propagated.
pub fn run_campaign(spec: &CampaignSpec, out_dir: Option<&Path>) -> Result<CampaignResult> {
    spec.validate()?;
    let instances = build_instances(spec)?;
    let jobs: Vec<(MethodSpec, usize)> = spec
        .methods
        .iter()
        .flat_map(|m| (0..spec.seeds.len()).map(move |i| (*m, i)))
        .collect();
    let cells: Vec<CellResult> = jobs
        .par_iter()
        .map(|(m, i)| CellResult {
            method: *m,
            seed: spec.seeds[*i],
            outcome: run_cell(spec, &instances[*i], m, spec.seeds[*i]).map_err(|e| e.to_string()),
        })
        .collect();
    let result = CampaignResult {
        summary: summarize(spec, &cells),
        cells,
    };
    if let Some(dir) = out_dir {
        write_artifacts(spec, &result, dir)?;
    }
    Ok(result)
}

fn write_artifacts(spec: &CampaignSpec, result: &CampaignResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("manifest"), spec.manifest())?;
    std::fs::write(dir.join("summary.csv"), result.summary.to_csv())?;
    for cell in &result.cells {
        if let Ok(run) = &cell.outcome {
            let name = format!("trace_{}_{}.csv", cell.method.file_key(), cell.seed);
            std::fs::write(dir.join(name), &run.trace_csv)?;
        }
    }
    let groups = result.plot_groups(&spec.methods);
    if !groups.is_empty() {
        for kind in PlotKind::ALL {
            if kind == PlotKind::CostRatioVsApm && !groups.iter().any(|g| g.label == "APM") {
                continue;
            }
            emit_plots(&groups, kind, &dir.join(format!("fig_{}.svg", kind.name())))?;
        }
    }
    Ok(())
}
