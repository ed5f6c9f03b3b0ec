use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use spectra::harness::{self, Backend, SweepConfig};
use spectra::radial::{
    correction_constant_radial, effective_condition_constant_radial, richardson, robin_mu1, solve_two_phase_radial,
    RadialGrid, RadialProblem, RadialResolution,
};
use spectra::{Error, Result};

#[derive(Parser)]
#[command(name = "spectra", version, about = "Thin-coating eigenvalue sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the sweep points.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct RadialArgs {
    /// Optional radial config supplying defaults for the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long = "R")]
    radius: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Interior elements of the coarse grid; a second grid doubles it.
    #[arg(long)]
    elements: Option<usize>,
    #[arg(long)]
    grading: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// One radial two-phase solve with Richardson extrapolation.
    Radial(RadialArgs),
    /// 2D FEM eigenvalues per eps on the resolution ladder.
    Solve2d(Common),
    /// Robin limit problem: mu1 and the first-order coefficients.
    Robin(Common),
    /// First-order prediction mu1 - eps C* per eps.
    Predict(Common),
    /// Diagnostics table per eps.
    Diagnose(Common),
    /// Full sweep with slope fit and internal checks.
    Sweep(Common),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn out_dir(common: &Common, cfg: &SweepConfig) -> PathBuf {
    common.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn emit(dir: &Path, file: &str, value: &serde_json::Value) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    harness::write_json(&dir.join(file), value)?;
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Radial(args) => radial(args).map(|_| true),
        Command::Solve2d(c) => {
            let cfg = SweepConfig::load(&c.config)?;
            if !matches!(cfg.backend, Backend::Fem { .. }) {
                return Err(Error::Config("solve2d needs a fem backend".into()));
            }
            let dir = out_dir(&c, &cfg);
            let res = harness::run_sweep_with(&cfg, c.workers, Some(&dir))?;
            let points: Vec<_> = res
                .points
                .iter()
                .map(|p| json!({
                    "eps": p.row.eps,
                    "lambda1": p.row.lambda1,
                    "lambda_levels": p.lambda_levels,
                    "error_estimate": p.error_estimate,
                }))
                .collect();
            emit(&dir, "solve2d.json", &json!({ "points": points }))?;
            Ok(true)
        }
        Command::Robin(c) => {
            let cfg = SweepConfig::load(&c.config)?;
            let lim = harness::limit_problem(&cfg)?;
            let v = json!({
                "mu1": lim.mu1,
                "mu_levels": lim.mu_levels,
                "Cstar": lim.c_star,
                "C_effective": lim.c_effective,
            });
            emit(&out_dir(&c, &cfg), "robin.json", &v)?;
            Ok(true)
        }
        Command::Predict(c) => {
            let cfg = SweepConfig::load(&c.config)?;
            let lim = harness::limit_problem(&cfg)?;
            let predicted: Vec<_> = cfg
                .eps
                .iter()
                .map(|&e| json!({
                    "eps": e,
                    "lambda": spectra::asymptotics::predicted_lambda(lim.mu1, lim.c_star, e),
                    "lambda_effective": spectra::asymptotics::predicted_lambda(lim.mu1, lim.c_effective, e),
                }))
                .collect();
            let v = json!({ "mu1": lim.mu1, "Cstar": lim.c_star, "C_effective": lim.c_effective, "predicted": predicted });
            emit(&out_dir(&c, &cfg), "predict.json", &v)?;
            Ok(true)
        }
        Command::Diagnose(c) => {
            let cfg = SweepConfig::load(&c.config)?;
            let dir = out_dir(&c, &cfg);
            std::fs::create_dir_all(&dir)?;
            let res = harness::run_sweep_with(&cfg, c.workers, Some(&dir))?;
            let reports: Vec<_> = res.points.iter().map(|p| p.diagnostics).collect();
            harness::write_diagnostics_csv(&dir.join("diagnostics.csv"), &reports)?;
            println!("wrote {}", dir.join("diagnostics.csv").display());
            Ok(true)
        }
        Command::Sweep(c) => {
            let cfg = SweepConfig::load(&c.config)?;
            let dir = out_dir(&c, &cfg);
            let res = harness::run_and_write(&cfg, &dir, c.workers)?;
            println!("{}", serde_json::to_string_pretty(&res.summary())?);
            for ch in &res.checks {
                println!("{} {}: {}", if ch.passed { "PASS" } else { "FAIL" }, ch.name, ch.detail);
            }
            Ok(res.all_passed())
        }
    }
}

fn radial(args: RadialArgs) -> Result<()> {
    let mut dim = 3;
    let mut radius = 1.0;
    let mut alpha = 1.0;
    let mut eps = 0.01;
    let mut res = RadialResolution { interior_elements: 800, layer_elements: 32, grading: 8.0 };
    let mut out = None;
    if let Some(path) = &args.config {
        let cfg = SweepConfig::load(path)?;
        alpha = cfg.alpha;
        eps = *cfg.eps.last().expect("validated");
        out = cfg.output.dir.clone();
        match cfg.backend {
            Backend::Radial { dim: d, radius: r, interior_elements, layer_elements, grading, .. } => {
                dim = d;
                radius = r;
                res = RadialResolution { interior_elements, layer_elements, grading };
            }
            Backend::Fem { .. } => return Err(Error::Config("radial needs a radial backend".into())),
        }
    }
    dim = args.dim.unwrap_or(dim);
    radius = args.radius.unwrap_or(radius);
    alpha = args.alpha.unwrap_or(alpha);
    eps = args.eps.unwrap_or(eps);
    res.interior_elements = args.elements.unwrap_or(res.interior_elements);
    res.grading = args.grading.unwrap_or(res.grading);
    out = args.out.or(out);

    let p = RadialProblem::new(radius, dim, alpha, eps)?;
    let coarse = solve_two_phase_radial(&p, &RadialGrid::two_phase(&p, &res)?, 1e-10)?;
    let fine = solve_two_phase_radial(&p, &RadialGrid::two_phase(&p, &res.refined())?, 1e-10)?;
    let lambda1 = richardson(coarse.value, fine.value);
    let limit = p.with_eps(0.0)?;
    let mu1 = robin_mu1(&limit)?.mu1;
    let v = json!({
        "mu1": mu1,
        "lambda1": lambda1,
        "slope": (mu1 - lambda1) / eps,
        "Cstar": correction_constant_radial(&limit)?,
        "C_effective": effective_condition_constant_radial(&limit)?,
    });
    match out {
        Some(dir) => emit(&dir, "radial.json", &v),
        None => {
            println!("{}", serde_json::to_string(&v)?);
            Ok(())
        }
    }
}
