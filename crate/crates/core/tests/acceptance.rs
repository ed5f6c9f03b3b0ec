//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectra::eigensolver::smallest_eigenpair;
use spectra::harness::{run_sweep, SweepResult};
use spectra::{BoundaryCurve, LayerChart};

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(id: usize, name: &str, o: &Outcome) {
    println!("{} {id} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
}

fn timed_sweep(name: &str) -> (SweepResult, Duration) {
    let cfg = common::shipped_config(name);
    let start = Instant::now();
    let res = run_sweep(&cfg).unwrap_or_else(|e| panic!("{name} sweep failed: {e}"));
    (res, start.elapsed())
}

fn check<'a>(res: &'a SweepResult, name: &str) -> &'a spectra::harness::Check {
    res.checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ball(res: &SweepResult, t: Duration) -> Outcome {
    let c_star = 4.0 + PI * PI / 6.0;
    let mu_err = (res.mu1 - PI * PI / 4.0).abs();
    let slope = rel(res.fit.s0, c_star);
    let chain = (res.c_star - c_star).abs();
    Outcome {
        passed: mu_err <= 1e-10 && slope < 0.01 && chain < 1e-10 && t < Duration::from_secs(10),
        detail: format!(
            "|mu1 - pi^2/4| = {mu_err:.2e}, s0 = {:.6}, C* = {c_star:.6} (rel {slope:.3e}, tol 1e-2), \
             effective-condition constant {:.6} (rel {:.2e}), {:.2} s",
            res.fit.s0,
            res.c_effective,
            rel(res.fit.s0, res.c_effective),
            t.as_secs_f64()
        ),
    }
}

fn disk(res: &SweepResult, t: Duration) -> Outcome {
    let oracle = common::disk_mu1_oracle(1.0);
    let mu_err = (res.mu1 - oracle).abs();
    let slope = rel(res.fit.s0, res.c_star);
    Outcome {
        passed: mu_err <= 1e-10 && slope < 0.01 && t < Duration::from_secs(10),
        detail: format!(
            "|mu1 - bisection| = {mu_err:.2e}, s0 = {:.6}, C* = {:.6} (rel {slope:.3e}, tol 1e-2), \
             effective-condition constant {:.6} (rel {:.2e}), {:.2} s",
            res.fit.s0,
            res.c_star,
            res.c_effective,
            rel(res.fit.s0, res.c_effective),
            t.as_secs_f64()
        ),
    }
}

fn cross_backend(fem: &SweepResult, radial: &SweepResult, t: Duration) -> Outcome {
    let worst = fem
        .points
        .iter()
        .zip(&radial.points)
        .map(|(f, r)| {
            assert_eq!(f.row.eps, r.row.eps);
            rel(f.row.lambda1, r.row.lambda1)
        })
        .fold(0.0, f64::max);
    Outcome {
        passed: worst < 2e-3 && t < Duration::from_secs(300),
        detail: format!("max relative lambda1 gap {worst:.3e} (tol 2e-3), {:.1} s", t.as_secs_f64()),
    }
}

fn ellipse(res: &SweepResult, t: Duration) -> Outcome {
    let slope = rel(res.fit.s0, res.c_star);
    Outcome {
        passed: slope < 0.05 && t < Duration::from_secs(900),
        detail: format!(
            "s0 = {:.6}, C* = {:.6} (rel {slope:.3e}, tol 5e-2), effective-condition constant {:.6} (rel {:.2e}), {:.1} s",
            res.fit.s0,
            res.c_star,
            res.c_effective,
            rel(res.fit.s0, res.c_effective),
            t.as_secs_f64()
        ),
    }
}

fn upper_bound(sweeps: &[(&str, &SweepResult)]) -> Outcome {
    let mut failed = Vec::new();
    for (name, res) in sweeps {
        for c in ["upper_bound", "upper_bound_stability"] {
            if !check(res, c).passed {
                failed.push(format!("{name}/{c}"));
            }
        }
    }
    let points: usize = sweeps.iter().map(|(_, r)| r.points.len()).sum();
    Outcome {
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{points} sweep points, inequality and factor-1.2 stability hold")
        } else {
            format!("failing: {}", failed.join(", "))
        },
    }
}

fn scaling(sweeps: &[(&str, &SweepResult)]) -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for (name, res) in sweeps {
        for c in ["tangential_band", "robin_residual_band", "c1_decreasing", "layer_mass_band", "h2_bounded"] {
            if let Some(ch) = res.checks.iter().find(|x| x.name == c) {
                passed &= ch.passed;
                if !ch.passed {
                    lines.push(format!("{name}/{c} {}", ch.detail));
                }
            }
        }
    }
    Outcome { passed, detail: if lines.is_empty() { "all bands hold".into() } else { lines.join("; ") } }
}

fn eigensolver() -> Outcome {
    let pencils = common::oracle_pencils();
    let (mut worst_val, mut worst_angle, mut max_dim) = (0.0f64, 0.0f64, 0);
    for (_, a, b) in &pencils {
        let got = smallest_eigenpair(a, b, 1e-12).expect("sparse solve");
        let (want, vec) = common::dense_smallest(a, b);
        worst_val = worst_val.max(rel(got.value, want));
        worst_angle = worst_angle.max(common::angle(&got.vector, &vec));
        max_dim = max_dim.max(a.dim());
    }
    Outcome {
        passed: pencils.len() >= 5 && max_dim <= 200 && worst_val < 1e-8 && worst_angle < 1e-6,
        detail: format!(
            "{} pencils (largest {max_dim}), max eigenvalue error {worst_val:.2e}, max angle {worst_angle:.2e}",
            pencils.len()
        ),
    }
}

fn geometry() -> Outcome {
    let curves = [
        ("circle", BoundaryCurve::circle(1.0).unwrap()),
        ("ellipse", BoundaryCurve::ellipse(1.5, 1.0).unwrap()),
        ("star", common::fourier_star()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_jac = 0.0f64;
    for _ in 0..1000 {
        let (_, c) = &curves[rng.gen_range(0..curves.len())];
        let eps = 0.3 / c.max_abs_curvature();
        let chart = LayerChart::new(c.clone(), eps).unwrap();
        let (t, tau) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..=eps));
        let j = chart.layer_jacobian(t, tau).unwrap();
        let formula = c.surface_measure(t) * (1.0 + c.curvature(t).unwrap() * tau);
        worst_jac = worst_jac.max(rel(j, formula)).max(rel(j, common::offset_jacobian(c, t, tau)));
    }
    let mut worst_gb = 0.0f64;
    for (_, c) in &curves {
        let total = common::periodic_integral(4096, |t| c.curvature(t).unwrap() * c.surface_measure(t));
        worst_gb = worst_gb.max((total - TAU).abs());
    }
    Outcome {
        passed: worst_jac <= 1e-12 && worst_gb <= 1e-8,
        detail: format!(
            "jacobian vs |p'|(1 + kappa tau) and the cross-product oracle over 1000 samples: max rel {worst_jac:.2e}; \
             total curvature error {worst_gb:.2e} (circle, ellipse, star)"
        ),
    }
}

fn main() {
    let (ball_res, ball_t) = timed_sweep("ball");
    let (disk_res, disk_t) = timed_sweep("disk_radial");
    let (fem_res, fem_t) = timed_sweep("disk_fem");
    let (ell_res, ell_t) = timed_sweep("ellipse_fem");

    let sweeps = [("ball", &ball_res), ("disk_radial", &disk_res), ("disk_fem", &fem_res), ("ellipse_fem", &ell_res)];
    let outcomes = [
        ("ball benchmark", ball(&ball_res, ball_t)),
        ("disk benchmark", disk(&disk_res, disk_t)),
        ("cross-backend consistency", cross_backend(&fem_res, &disk_res, fem_t)),
        ("curvature sensitivity", ellipse(&ell_res, ell_t)),
        ("upper-bound suite", upper_bound(&sweeps)),
        ("scaling suite", scaling(&sweeps[1..])),
        ("eigensolver oracle", eigensolver()),
        ("geometry identities", geometry()),
    ];
    for (i, (name, o)) in outcomes.iter().enumerate() {
        report(i + 1, name, o);
    }
    let failed = outcomes.iter().filter(|(_, o)| !o.passed).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
