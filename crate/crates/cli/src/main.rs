#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod figure1;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altproj::completion::{
    generate_gaussian, image_instance, metric_e_mse, read_image_matrix, run_campaign, synthetic_scene,
    truncate_image, CampaignSpec, ProblemFamily, ProblemInstance, STREAM_LANCZOS,
};
use altproj::dense::{write_csv, write_dmat};
use altproj::solver::{run, write_trace_csv, SolverConfig, Variant};
use altproj::RngSpec;
use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use config::{resolve_method, resolve_methods, usage, Common, Settings, UsageError};

#[derive(Parser)]
#[command(name = "altproj", version, about = "Alternating projections for low-rank matrix completion")]
struct Cli {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one (method, zeta, seed) cell and write its trace.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        /// apm, rapm or irapm.
        #[arg(long)]
        method: Option<String>,
        /// Inexactness parameter in (0, 1]; iRAPM only.
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a campaign preset and write summary, traces and figures.
    Replicate {
        /// gauss-table or image-table.
        preset: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
        /// Number of seeds; seeds 1..=S are used.
        #[arg(long)]
        seeds: Option<u64>,
        /// Comma-separated methods, e.g. `apm,rapm,irapm`.
        #[arg(long)]
        methods: Option<String>,
        /// Comma-separated zeta values for iRAPM.
        #[arg(long)]
        zetas: Option<String>,
    },
    /// Print the one-dimensional inexactness example and write its plot.
    Figure1 {
        /// SVG output path.
        #[arg(long, default_value = "figure1.svg")]
        svg: PathBuf,
    },
    /// Write a problem instance (ground truth and observations) to disk.
    Generate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// gaussian or image.
    #[arg(long)]
    family: Option<String>,
    /// PGM or CSV image for the image family (default: built-in scene).
    #[arg(long)]
    image: Option<PathBuf>,
    /// Square size; sets both n1 and n2.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    oversampling: Option<f64>,
    /// Shrinks n1, n2 and rank by this factor.
    #[arg(long)]
    scale: Option<f64>,
    /// Common value of lambda and mu.
    #[arg(long, alias = "lambda_mu")]
    lambda_mu: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, alias = "max_iter")]
    max_iter: Option<usize>,
    #[arg(long, alias = "ell_cap")]
    ell_cap: Option<usize>,
    /// Ritz tolerance multiplier of machine epsilon for exact projections.
    #[arg(long, alias = "ritz_tol")]
    ritz_tol: Option<f64>,
    /// Record the objective every iteration.
    #[arg(long, alias = "record_l")]
    record_l: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn apply(&self, s: &mut Settings) {
        s.set("family", self.family.as_ref());
        s.set("image", self.image.as_ref().map(|p| p.display()));
        s.set("n", self.n);
        s.set("n1", self.n1);
        s.set("n2", self.n2);
        s.set("rank", self.rank);
        s.set("oversampling", self.oversampling);
        s.set("scale", self.scale);
        s.set("lambda_mu", self.lambda_mu);
        s.set("gamma", self.gamma);
        s.set("max_iter", self.max_iter);
        s.set("ell_cap", self.ell_cap);
        s.set("ritz_tol", self.ritz_tol);
        s.set("record_l", self.record_l.then_some(true));
        s.set("out", self.out.as_ref().map(|p| p.display()));
    }
}

fn load_settings(path: Option<&Path>) -> anyhow::Result<Settings> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            Settings::parse(&text)
        }
        None => Ok(Settings::default()),
    }
}

fn write_manifest(dir: &Path, command: &str, lines: &[(String, String)]) -> anyhow::Result<()> {
    let mut text = format!("# altproj {command}\n");
    for (k, v) in lines {
        text.push_str(&format!("{k} = {v}\n"));
    }
    fs::write(dir.join("manifest"), text)?;
    Ok(())
}

fn build_instance(c: &Common, seed: u64) -> anyhow::Result<ProblemInstance> {
    let rng = RngSpec::new(seed, 0);
    match c.family() {
        ProblemFamily::Gaussian {
            n1,
            n2,
            rank,
            oversampling,
        } => Ok(generate_gaussian(n1, n2, rank, oversampling, rng)?),
        ProblemFamily::Image {
            path,
            size,
            rank,
            oversampling,
        } => {
            let (pixels, source) = match path {
                Some(p) => (
                    read_image_matrix(&p).with_context(|| format!("reading {}", p.display()))?,
                    p.display().to_string(),
                ),
                None => (synthetic_scene(size.0, size.1), "synthetic".to_string()),
            };
            let truth = truncate_image(&pixels, rank)?;
            Ok(image_instance(truth, rank, oversampling, rng, source)?)
        }
    }
}

fn cmd_solve(s: &mut Settings, args: &CommonArgs, method: Option<String>, zeta: Option<f64>, seed: Option<u64>) -> anyhow::Result<()> {
    args.apply(s);
    s.set("method", method);
    s.set("zeta", zeta);
    s.set("seed", seed);
    let c = Common::resolve(s, "out/solve")?;
    let m = resolve_method(s)?;
    let seed: u64 = s.get_or("seed", 1)?;
    let inst = build_instance(&c, seed)?;
    let mut cfg = SolverConfig::new(m.variant, c.lambda_mu, RngSpec::new(seed, 0).derive(STREAM_LANCZOS));
    if let Some(z) = m.zeta {
        cfg.zeta = z;
    }
    cfg.gamma = c.gamma;
    cfg.max_iter = c.max_iter;
    cfg.ritz_tol_multiplier = c.ritz_tol;
    cfg.ell_cap = c.ell_cap;
    cfg.record_l = c.record_l;
    let trace = run(&inst.problem(), &cfg)?;
    let e_mse = metric_e_mse(&trace.final_y, &inst.ground_truth)?;

    fs::create_dir_all(&c.out)?;
    let mut echo = c.echo();
    echo.push(("method".into(), m.variant.label().to_ascii_lowercase()));
    if let Some(z) = m.zeta {
        echo.push(("zeta".into(), format!("{z:e}")));
    }
    echo.push(("seed".into(), seed.to_string()));
    let trace_path = c.out.join(format!("trace_{}_{seed}.csv", m.file_key()));
    // The output directory is left out so traces compare byte-for-byte
    // across locations.
    let header: Vec<_> = echo.iter().filter(|(k, _)| k != "out").cloned().collect();
    let mut buf = Vec::new();
    write_trace_csv(&trace, &header, &mut buf)?;
    fs::write(&trace_path, buf)?;
    write_manifest(&c.out, "solve", &echo)?;
    let zeta = m.zeta.map_or_else(|| "none".to_string(), |z| format!("{z:e}"));
    println!(
        "method={} zeta={zeta} seed={seed} e_omega={:e} e_mse={:e} cost={} trace={}",
        m.variant.label(),
        trace.final_residual(),
        e_mse,
        trace.final_cost(),
        trace_path.display()
    );
    Ok(())
}

struct ReplicateArgs {
    preset: Option<String>,
    seeds: Option<u64>,
    methods: Option<String>,
    zetas: Option<String>,
}

fn cmd_replicate(s: &mut Settings, args: &CommonArgs, r: ReplicateArgs) -> anyhow::Result<bool> {
    args.apply(s);
    s.set("preset", r.preset);
    s.set("seeds", r.seeds);
    s.set("methods", r.methods);
    s.set("zetas", r.zetas);
    let preset = s.raw("preset").unwrap_or("gauss-table").to_string();
    let default_zetas: &[f64] = match preset.as_str() {
        "gauss-table" => &[1e-7],
        "image-table" => {
            if s.raw("family").is_none() {
                s.set("family", Some("image"));
            }
            &[1e-9, 1e-7, 1e-5]
        }
        other => return Err(usage(format!("unknown preset {other:?} (gauss-table, image-table)"))),
    };
    let c = Common::resolve(s, &format!("out/{preset}"))?;
    let methods = resolve_methods(s, &[Variant::Apm, Variant::Rapm, Variant::Irapm], default_zetas)?;
    let count: u64 = s.get_or("seeds", 5)?;
    if count == 0 {
        return Err(usage("seeds must be at least 1"));
    }
    let spec = CampaignSpec {
        name: preset.clone(),
        family: c.family(),
        methods: methods.clone(),
        seeds: (1..=count).collect(),
        reg: c.lambda_mu,
        gamma: c.gamma,
        max_iter: c.max_iter,
        ritz_tol_multiplier: c.ritz_tol,
        ell_cap: c.ell_cap,
        record_l: c.record_l,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let result = run_campaign(&spec, Some(&c.out))?;

    let mut echo = vec![("preset".to_string(), preset)];
    echo.extend(c.echo());
    let names: Vec<String> = methods.iter().map(|m| m.variant.label().to_ascii_lowercase()).collect();
    let mut dedup = names.clone();
    dedup.dedup();
    echo.push(("methods".into(), dedup.join(",")));
    let zetas: Vec<String> = methods.iter().filter_map(|m| m.zeta).map(|z| format!("{z:e}")).collect();
    if !zetas.is_empty() {
        echo.push(("zetas".into(), zetas.join(",")));
    }
    echo.push(("seeds".into(), count.to_string()));
    let mut text = String::from("# altproj replicate\n");
    for (k, v) in &echo {
        text.push_str(&format!("{k} = {v}\n"));
    }
    for line in spec.manifest().lines() {
        text.push_str(&format!("# {line}\n"));
    }
    fs::write(c.out.join("manifest"), text)?;

    print!("{}", result.summary.to_csv());
    for cell in &result.cells {
        if let Err(e) = &cell.outcome {
            eprintln!("cell {} seed {} failed: {e}", cell.method.label(), cell.seed);
        }
    }
    Ok(!result.any_failed())
}

fn cmd_generate(s: &mut Settings, args: &CommonArgs, seed: Option<u64>) -> anyhow::Result<()> {
    args.apply(s);
    s.set("seed", seed);
    let c = Common::resolve(s, "out/instance")?;
    let seed: u64 = s.get_or("seed", 1)?;
    let inst = build_instance(&c, seed)?;
    fs::create_dir_all(&c.out)?;
    write_csv(&inst.ground_truth, fs::File::create(c.out.join("ground_truth.csv"))?)?;
    write_dmat(&inst.ground_truth, fs::File::create(c.out.join("ground_truth.dmat"))?)?;
    inst.observed.write_csv(fs::File::create(c.out.join("observed.csv"))?)?;
    let mut echo = c.echo();
    echo.push(("seed".into(), seed.to_string()));
    write_manifest(&c.out, "generate", &echo)?;
    println!(
        "wrote {}x{} rank-{} instance with {} observations to {}",
        c.n1,
        c.n2,
        c.rank,
        inst.observed.len(),
        c.out.display()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    let mut s = load_settings(cli.config.as_deref())?;
    match cli.command {
        Command::Solve {
            common,
            method,
            zeta,
            seed,
        } => cmd_solve(&mut s, &common, method, zeta, seed).map(|_| true),
        Command::Replicate {
            preset,
            common,
            seeds,
            methods,
            zetas,
        } => cmd_replicate(
            &mut s,
            &common,
            ReplicateArgs {
                preset,
                seeds,
                methods,
                zetas,
            },
        ),
        Command::Figure1 { svg } => {
            let rep = figure1::report()?;
            print!("{}", rep.text);
            fs::write(&svg, rep.svg).with_context(|| format!("writing {}", svg.display()))?;
            Ok(true)
        }
        Command::Generate { common, seed } => cmd_generate(&mut s, &common, seed).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("usage error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
