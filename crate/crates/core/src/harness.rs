//! ε sweeps: Richardson extrapolation in `h` at every `ε`, slope extraction,
//! comparison with the predicted coefficient and machine-readable reports.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_two_phase, solve_two_phase_with};
use crate::asymptotics::{
    correction_integral, effective_condition_integral, solve_robin_with, test_function_quotient, RobinSolution,
};
use crate::diagnostics::{diagnose, diagnose_radial, DiagnosticsReport};
use crate::eigensolver::EigenOptions;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, CurveSpec, LayerChart};
use crate::mesh::{build_interior_mesh, build_mesh, Mesh2D, MeshResolution};
use crate::radial::{
    correction_constant_radial, effective_condition_constant_radial, radial_test_function_quotient, richardson,
    robin_mu1, solve_two_phase_radial_with, RadialGrid, RadialProblem, RadialResolution,
};

pub const SCHEMA_VERSION: u32 = 1;

fn default_alpha() -> f64 {
    1.0
}
fn default_eps() -> Vec<f64> {
    vec![0.04, 0.02, 0.01, 0.005]
}
fn default_tol() -> f64 {
    1e-10
}
fn default_seed() -> u64 {
    EigenOptions::<f64>::default().seed
}

/// Sweep description, read from TOML.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_tol")]
    pub eig_tol: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub backend: Backend,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Backend {
    /// 1D reduction on the disk (`dim = 2`) or ball (`dim = 3`).
    Radial {
        dim: usize,
        #[serde(rename = "R")]
        radius: f64,
        interior_elements: usize,
        layer_elements: usize,
        grading: f64,
        levels: usize,
    },
    /// P1 triangles on a star-shaped curve.
    Fem {
        curve: CurveSpec,
        n_boundary: usize,
        n_layer: usize,
        interior_levels: usize,
        levels: usize,
    },
}

/// Thresholds of the internal assertions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Checks {
    /// Allowed `|s₀ − C*| / C*`.
    pub slope_tolerance: f64,
    /// `layer_mass ≤ margin · ε · layer_energy`.
    pub layer_mass_margin: f64,
    /// Allowed growth of a scaled diagnostic across the sweep.
    pub band_factor: f64,
    /// Allowed spread of the upper-bound constant around its median.
    pub bound_stability: f64,
    /// Agreement of successive Richardson values (radial backend).
    pub richardson_tolerance: f64,
    /// Extra refinement levels allowed when the error estimate is too large.
    pub max_extra_levels: usize,
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            slope_tolerance: 0.01,
            layer_mass_margin: 2.0,
            band_factor: 3.0,
            bound_stability: 1.2,
            richardson_tolerance: 1e-8,
            max_extra_levels: 2,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: Option<PathBuf>,
    /// Write `nodes.csv`/`triangles.csv` of the finest mesh per `ε`.
    pub mesh_dump: bool,
    /// Write the finest reduced pencil per `ε` in coordinate format.
    pub matrix_dump: bool,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.eps.len() < 3 {
            return Err(Error::Config("need at least 3 eps values for the slope fit".into()));
        }
        if self.eps.iter().any(|&e| !(e > 0.0)) || self.eps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("eps values must be positive and strictly decreasing".into()));
        }
        if !(self.eig_tol > 0.0) {
            return Err(Error::Config("eig_tol must be positive".into()));
        }
        let levels = match &self.backend {
            Backend::Radial { dim, levels, .. } => {
                if *dim != 2 && *dim != 3 {
                    return Err(Error::Config(format!("dim must be 2 or 3, got {dim}")));
                }
                *levels
            }
            Backend::Fem { levels, .. } => *levels,
        };
        if levels < 2 {
            return Err(Error::Config("need at least 2 resolution levels for Richardson extrapolation".into()));
        }
        Ok(())
    }

    fn eigen_options(&self) -> EigenOptions<f64> {
        EigenOptions { tol: self.eig_tol, seed: self.seed, ..EigenOptions::default() }
    }
}

/// One `sweep.csv` row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub lambda1: f64,
    pub mu1_minus_lambda1: f64,
    pub slope: f64,
    pub tan_energy: f64,
    pub robin_residual: f64,
    pub c1: f64,
    pub layer_mass: f64,
}

/// Everything computed at one `ε`.
#[derive(Debug, Clone, Serialize)]
pub struct PointResult {
    pub row: SweepRow,
    /// Discrete `λ₁` on each resolution level.
    pub lambda_levels: Vec<f64>,
    /// Error estimate of the extrapolated `λ₁`: the change between the last
    /// two Richardson values, or `|λ_finest − λ_extrapolated|` with two levels.
    pub error_estimate: f64,
    /// Difference of the last two Richardson values, when three levels exist.
    pub richardson_change: Option<f64>,
    /// Rayleigh quotient of `w₁ φ` on the finest level.
    pub quotient: f64,
    /// Richardson value of the quotient over the last two levels.
    pub quotient_extrapolated: f64,
    pub diagnostics: DiagnosticsReport<f64>,
    pub extra_levels: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub s0: f64,
    /// Coefficient of `ε²`.
    pub d: f64,
    /// Slope of the one-term model `s ε`.
    pub s0_linear: f64,
    /// `(μ₁ − λ₁(ε))/ε` per row.
    pub pairwise: Vec<f64>,
}

/// Least squares for `(μ₁ − λ₁) = s₀ ε + D ε²`.
pub fn fit_slope(rows: &[(f64, f64)]) -> Result<SlopeFit> {
    if rows.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 rows, got {}", rows.len())));
    }
    let scale = rows.iter().map(|r| r.0.abs()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::Fit("all eps are zero".into()));
    }
    // scaled columns x and x², x = ε/scale
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(e, y) in rows {
        let x = e / scale;
        a11 += x * x;
        a12 += x * x * x;
        a22 += x * x * x * x;
        b1 += x * y;
        b2 += x * x * y;
    }
    let det = a11 * a22 - a12 * a12;
    if !(det.abs() > 1e-12 * a11 * a22) {
        return Err(Error::Fit("rank-deficient design: eps values are not distinct".into()));
    }
    let c1 = (b1 * a22 - b2 * a12) / det;
    let c2 = (a11 * b2 - a12 * b1) / det;
    Ok(SlopeFit {
        s0: c1 / scale,
        d: c2 / (scale * scale),
        s0_linear: b1 / a11 / scale,
        pairwise: rows.iter().map(|&(e, y)| y / e).collect(),
    })
}

/// Outcome of one internal assertion.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, detail }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub name: Option<String>,
    pub alpha: f64,
    pub mu1: f64,
    /// Coefficient `∫_Γ (αH + μ₁/3) w₁²`.
    pub c_star: f64,
    /// Coefficient `∫_Γ (μ₁/3 − αH/2) w₁²` of the effective boundary condition.
    pub c_effective: f64,
    pub fit: SlopeFit,
    pub discrepancy: f64,
    pub discrepancy_effective: f64,
    pub points: Vec<PointResult>,
    pub checks: Vec<Check>,
}

impl SweepResult {
    pub fn rows(&self) -> Vec<SweepRow> {
        self.points.iter().map(|p| p.row).collect()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> Summary {
        Summary {
            name: self.name.clone(),
            s0: self.fit.s0,
            cstar: self.c_star,
            discrepancy: self.discrepancy,
            mu1: self.mu1,
            d: self.fit.d,
            s0_linear: self.fit.s0_linear,
            c_effective: self.c_effective,
            discrepancy_effective: self.discrepancy_effective,
            checks: self.checks.clone(),
            all_passed: self.all_passed(),
        }
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub name: Option<String>,
    pub s0: f64,
    #[serde(rename = "Cstar")]
    pub cstar: f64,
    pub discrepancy: f64,
    pub mu1: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub s0_linear: f64,
    #[serde(rename = "C_effective")]
    pub c_effective: f64,
    pub discrepancy_effective: f64,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

/// `ε`-independent ingredients of a sweep.
#[derive(Debug, Clone)]
pub struct LimitProblem {
    pub mu1: f64,
    pub c_star: f64,
    pub c_effective: f64,
    /// `μ₁` per resolution level (FEM backend).
    pub mu_levels: Vec<f64>,
    robins: Vec<RobinSolution<f64>>,
}

fn fem_resolutions(n_boundary: usize, n_layer: usize, interior_levels: usize, count: usize) -> Vec<MeshResolution> {
    let mut r = MeshResolution { n_boundary, n_layer, interior_levels };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(r);
        r = r.refined();
    }
    out
}

/// Robin eigenvalue, predicted coefficient and effective-condition coefficient.
pub fn limit_problem(cfg: &SweepConfig) -> Result<LimitProblem> {
    match &cfg.backend {
        Backend::Radial { dim, radius, .. } => {
            let p = RadialProblem::new(*radius, *dim, cfg.alpha, 0.0)?;
            Ok(LimitProblem {
                mu1: robin_mu1(&p)?.mu1,
                c_star: correction_constant_radial(&p)?,
                c_effective: effective_condition_constant_radial(&p)?,
                mu_levels: Vec::new(),
                robins: Vec::new(),
            })
        }
        Backend::Fem { curve, n_boundary, n_layer, interior_levels, levels } => {
            let curve = BoundaryCurve::from_spec(curve)?;
            let opts = cfg.eigen_options();
            let robins = fem_resolutions(*n_boundary, *n_layer, *interior_levels, *levels)
                .par_iter()
                .map(|r| {
                    let mesh = build_interior_mesh(&curve, r.n_boundary, r.interior_levels)?;
                    solve_robin_with(&mesh, &curve, cfg.alpha, &opts)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut cs = Vec::new();
            let mut ce = Vec::new();
            for r in &robins {
                cs.push(correction_integral(r, &curve)?);
                ce.push(effective_condition_integral(r, &curve)?);
            }
            let n = robins.len();
            let mu_levels: Vec<f64> = robins.iter().map(|r| r.mu1).collect();
            Ok(LimitProblem {
                mu1: richardson(mu_levels[n - 2], mu_levels[n - 1]),
                c_star: richardson(cs[n - 2], cs[n - 1]),
                c_effective: richardson(ce[n - 2], ce[n - 1]),
                mu_levels,
                robins,
            })
        }
    }
}

fn dump_dir(out: Option<&Path>, eps: f64) -> Option<PathBuf> {
    out.map(|d| d.join(format!("eps_{eps}")))
}

fn solve_point(cfg: &SweepConfig, limit: &LimitProblem, eps: f64, out: Option<&Path>) -> Result<PointResult> {
    let opts = cfg.eigen_options();
    let target = 0.1 * eps * limit.c_star.abs();
    match &cfg.backend {
        Backend::Radial { dim, radius, interior_elements, layer_elements, grading, levels } => {
            let p = RadialProblem::new(*radius, *dim, cfg.alpha, eps)?;
            let mut res = RadialResolution {
                interior_elements: *interior_elements,
                layer_elements: *layer_elements,
                grading: *grading,
            };
            let mut lambdas = Vec::new();
            let mut quotients = Vec::new();
            let mut extra = 0;
            let pair = loop {
                let grid = RadialGrid::two_phase(&p, &res)?;
                let pair = solve_two_phase_radial_with(&p, &grid, &opts)?;
                lambdas.push(pair.value);
                quotients.push(radial_test_function_quotient(&p, &grid)?);
                res = res.refined();
                let n = lambdas.len();
                if n < *levels {
                    continue;
                }
                let err = error_estimate(&lambdas);
                if err < target || extra >= cfg.checks.max_extra_levels {
                    break pair;
                }
                warn!("eps = {eps}: error estimate {err:.3e} exceeds {target:.3e}, refining");
                extra += 1;
            };
            let robin = robin_mu1(&p.with_eps(0.0)?)?;
            let diagnostics = diagnose_radial(&pair, &robin, cfg.alpha, eps)?;
            Ok(point(limit.mu1, eps, lambdas, &quotients, diagnostics, extra))
        }
        Backend::Fem { curve, n_boundary, n_layer, interior_levels, levels } => {
            let curve = BoundaryCurve::from_spec(curve)?;
            let ladder = fem_resolutions(*n_boundary, *n_layer, *interior_levels, levels + cfg.checks.max_extra_levels);
            let mut lambdas = Vec::new();
            let mut extra = 0;
            let mut quotients = Vec::new();
            let mut finest: Option<(Mesh2D<f64>, _, _)> = None;
            for (l, r) in ladder.iter().enumerate() {
                let mesh = build_mesh(&curve, eps, r.n_boundary, r.n_layer, r.interior_levels)?;
                let sol = solve_two_phase_with(&mesh, cfg.alpha, eps, &opts)?;
                lambdas.push(sol.value);
                let robin = match limit.robins.get(l) {
                    Some(r) => r.clone(),
                    None => solve_robin_with(&mesh.interior(), &curve, cfg.alpha, &opts)?,
                };
                quotients.push(test_function_quotient(&robin, &mesh, cfg.alpha, eps)?);
                finest = Some((mesh, sol, robin));
                let n = lambdas.len();
                if n < *levels {
                    continue;
                }
                let err = error_estimate(&lambdas);
                if err < target || l + 1 == ladder.len() {
                    break;
                }
                warn!("eps = {eps}: error estimate {err:.3e} exceeds {target:.3e}, refining");
                extra += 1;
            }
            let (mesh, sol, robin) = finest.expect("at least one level");
            let chart = LayerChart::new(curve.clone(), eps)?;
            let diagnostics = diagnose(&sol, &robin, &mesh, &chart)?;
            if let Some(dir) = dump_dir(out, eps) {
                if cfg.output.mesh_dump {
                    mesh.write_csv(&dir)?;
                }
                if cfg.output.matrix_dump {
                    std::fs::create_dir_all(&dir)?;
                    let sys = assemble_two_phase(&mesh, cfg.alpha, eps)?;
                    sys.stiffness.write_coordinate(BufWriter::new(File::create(dir.join("stiffness.mtx"))?))?;
                    sys.mass.write_coordinate(BufWriter::new(File::create(dir.join("mass.mtx"))?))?;
                }
            }
            Ok(point(limit.mu1, eps, lambdas, &quotients, diagnostics, extra))
        }
    }
}

fn error_estimate(lambdas: &[f64]) -> f64 {
    let n = lambdas.len();
    let last = richardson(lambdas[n - 2], lambdas[n - 1]);
    if n >= 3 {
        (last - richardson(lambdas[n - 3], lambdas[n - 2])).abs()
    } else {
        (lambdas[n - 1] - last).abs()
    }
}

fn point(
    mu1: f64,
    eps: f64,
    lambdas: Vec<f64>,
    quotients: &[f64],
    diagnostics: DiagnosticsReport<f64>,
    extra_levels: usize,
) -> PointResult {
    let n = lambdas.len();
    let lambda1 = richardson(lambdas[n - 2], lambdas[n - 1]);
    let richardson_change =
        (n >= 3).then(|| (lambda1 - richardson(lambdas[n - 3], lambdas[n - 2])).abs());
    let row = SweepRow {
        eps,
        lambda1,
        mu1_minus_lambda1: mu1 - lambda1,
        slope: (mu1 - lambda1) / eps,
        tan_energy: diagnostics.tangential_energy,
        robin_residual: diagnostics.robin_residual,
        c1: diagnostics.c1,
        layer_mass: diagnostics.layer_mass,
    };
    PointResult {
        row,
        error_estimate: richardson_change.unwrap_or((lambdas[n - 1] - lambda1).abs()),
        lambda_levels: lambdas,
        richardson_change,
        quotient: quotients[n - 1],
        quotient_extrapolated: richardson(quotients[n - 2], quotients[n - 1]),
        diagnostics,
        extra_levels,
    }
}

/// Sweep with an optional dump directory; points run on up to `workers` threads
/// and rows are returned in `ε` order.
pub fn run_sweep_with(cfg: &SweepConfig, workers: Option<usize>, out: Option<&Path>) -> Result<SweepResult> {
    let (points, failure) = solve_points(cfg, workers, out)?;
    if let Some(e) = failure {
        return Err(e);
    }
    finish_sweep(cfg, points.0, points.1)
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    run_sweep_with(cfg, None, None)
}

type Solved = (LimitProblem, Vec<PointResult>);

fn solve_points(cfg: &SweepConfig, workers: Option<usize>, out: Option<&Path>) -> Result<(Solved, Option<Error>)> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        let limit = limit_problem(cfg)?;
        info!("mu1 = {:.12}, C* = {:.6}", limit.mu1, limit.c_star);
        let results: Vec<Result<PointResult>> =
            cfg.eps.par_iter().map(|&e| solve_point(cfg, &limit, e, out)).collect();
        let mut points = Vec::new();
        let mut failure = None;
        for r in results {
            match r {
                Ok(p) if failure.is_none() => points.push(p),
                Ok(_) => {}
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        Ok(((limit, points), failure))
    })
}

fn finish_sweep(cfg: &SweepConfig, limit: LimitProblem, points: Vec<PointResult>) -> Result<SweepResult> {
    let tail: Vec<(f64, f64)> =
        points.iter().rev().take(3).rev().map(|p| (p.row.eps, p.row.mu1_minus_lambda1)).collect();
    let fit = fit_slope(&tail)?;
    let discrepancy = (fit.s0 - limit.c_star).abs() / limit.c_star.abs();
    let discrepancy_effective = (fit.s0 - limit.c_effective).abs() / limit.c_effective.abs();
    let checks = sweep_checks(cfg, &limit, &points, &fit, discrepancy);
    for c in checks.iter().filter(|c| !c.passed) {
        warn!("check {} failed: {}", c.name, c.detail);
    }
    Ok(SweepResult {
        name: cfg.name.clone(),
        alpha: cfg.alpha,
        mu1: limit.mu1,
        c_star: limit.c_star,
        c_effective: limit.c_effective,
        fit,
        discrepancy,
        discrepancy_effective,
        points,
        checks,
    })
}

/// Passes when no ratio exceeds `factor` times the ratio at the largest `ε`
/// (values below `floor` count as zero).
pub fn growth_band(ratios: &[f64], factor: f64, floor: f64) -> bool {
    let first = ratios[0].max(floor);
    ratios.iter().all(|&r| r <= factor * first)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn sweep_checks(
    cfg: &SweepConfig,
    limit: &LimitProblem,
    points: &[PointResult],
    fit: &SlopeFit,
    discrepancy: f64,
) -> Vec<Check> {
    let ck = &cfg.checks;
    let mut out = Vec::new();
    out.push(Check::new(
        "slope_vs_cstar",
        discrepancy <= ck.slope_tolerance,
        format!("s0 = {:.6}, C* = {:.6}, rel = {discrepancy:.3e}", fit.s0, limit.c_star),
    ));
    let below: Vec<bool> = points.iter().map(|p| p.row.lambda1 < limit.mu1).collect();
    out.push(Check::new(
        "lambda_below_mu",
        below.iter().all(|&b| b),
        format!("lambda1 < mu1 per eps: {below:?}"),
    ));
    let upper = points.iter().all(|p| p.lambda_levels[p.lambda_levels.len() - 1] <= p.quotient);
    out.push(Check::new("upper_bound", upper, "finest lambda1 <= test-function quotient".into()));
    let bound: Vec<f64> = points.iter().map(|p| (p.quotient_extrapolated - limit.mu1) / p.row.eps).collect();
    let med = median(&bound);
    let max = bound.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // `factor × median`, read as `median + (factor − 1)|median|` when the median is negative
    let cap = med + (ck.bound_stability - 1.0) * med.abs();
    out.push(Check::new(
        "upper_bound_stability",
        max <= cap,
        format!("(quotient - mu1)/eps: {bound:?}, cap {cap:.6e}"),
    ));
    let estimate_ok = points.iter().all(|p| p.error_estimate < 0.1 * p.row.eps * limit.c_star.abs());
    out.push(Check::new(
        "discretization_error",
        estimate_ok,
        format!("estimates {:?}", points.iter().map(|p| p.error_estimate).collect::<Vec<_>>()),
    ));
    if matches!(cfg.backend, Backend::Radial { .. }) {
        let changes: Vec<f64> = points.iter().filter_map(|p| p.richardson_change).collect();
        if !changes.is_empty() {
            out.push(Check::new(
                "richardson_agreement",
                changes.iter().all(|&c| c <= ck.richardson_tolerance),
                format!("successive extrapolations differ by {changes:?}"),
            ));
        }
        let h2: Vec<f64> = points.iter().filter_map(|p| p.diagnostics.h2_energy).collect();
        let (lo, hi) = h2.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        out.push(Check::new("h2_bounded", hi <= 2.0 * lo, format!("h2 energies {h2:?}")));
    }
    let ineq = points
        .iter()
        .all(|p| p.diagnostics.layer_mass <= ck.layer_mass_margin * p.row.eps * p.diagnostics.layer_energy);
    out.push(Check::new("layer_mass_inequality", ineq, format!("margin {}", ck.layer_mass_margin)));
    let c1: Vec<f64> = points.iter().map(|p| (p.row.c1 - 1.0).abs()).collect();
    out.push(Check::new(
        "c1_decreasing",
        c1.windows(2).all(|w| w[1] < w[0]),
        format!("|c1 - 1| = {c1:?}"),
    ));
    for (name, vals, floor) in [
        ("tangential_band", points.iter().map(|p| p.row.tan_energy / p.row.eps).collect::<Vec<_>>(), 1e-12),
        ("robin_residual_band", points.iter().map(|p| p.row.robin_residual / p.row.eps).collect(), 1e-12),
        ("layer_mass_band", points.iter().map(|p| p.row.layer_mass / (p.row.eps * p.row.eps)).collect(), 0.0),
    ] {
        out.push(Check::new(
            name,
            growth_band(&vals, ck.band_factor, floor),
            format!("scaled values {vals:?}"),
        ));
    }
    out
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Diagnostics table, one row per `ε`.
#[derive(Debug, Clone, Serialize)]
struct DiagnosticsRow {
    eps: f64,
    lambda1: f64,
    tangential_energy: f64,
    tangential_projected: f64,
    normal_energy: f64,
    layer_energy: f64,
    layer_mass: f64,
    robin_residual: f64,
    c1: f64,
    total_energy: f64,
    h2_energy: Option<f64>,
}

pub fn write_diagnostics_csv(path: &Path, reports: &[DiagnosticsReport<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for d in reports {
        w.serialize(DiagnosticsRow {
            eps: d.eps,
            lambda1: d.lambda1,
            tangential_energy: d.tangential_energy,
            tangential_projected: d.tangential_projected,
            normal_energy: d.normal_energy,
            layer_energy: d.layer_energy,
            layer_mass: d.layer_mass,
            robin_residual: d.robin_residual,
            c1: d.c1,
            total_energy: d.total_energy,
            h2_energy: d.h2_energy,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}

/// Runs a sweep and writes `sweep.csv` and `summary.json` into `out`. On a
/// solver failure the rows solved so far and `error.json` are written before
/// the error is returned.
pub fn run_and_write(cfg: &SweepConfig, out: &Path, workers: Option<usize>) -> Result<SweepResult> {
    std::fs::create_dir_all(out)?;
    let ((limit, points), failure) = solve_points(cfg, workers, Some(out))?;
    let rows: Vec<SweepRow> = points.iter().map(|p| p.row).collect();
    write_sweep_csv(&out.join("sweep.csv"), &rows)?;
    if let Some(e) = failure {
        write_json(&out.join("error.json"), &serde_json::json!({ "error": e.to_string(), "rows_written": rows.len() }))?;
        return Err(e);
    }
    let result = finish_sweep(cfg, limit, points)?;
    write_json(&out.join("summary.json"), &result.summary())?;
    Ok(result)
}
