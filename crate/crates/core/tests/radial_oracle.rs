mod common;

use std::f64::consts::PI;

use spectra::harness::run_sweep;
use spectra::radial::{correction_constant_radial, effective_condition_constant_radial, robin_mu1};
use spectra::RadialProblem;

use common::bessel_series;

#[test]
fn ball_robin_eigenvalue_is_quarter_period() {
    let p = RadialProblem::new(1.0, 3, 1.0, 0.0).unwrap();
    let r = robin_mu1(&p).unwrap();
    assert!((r.k - PI / 2.0).abs() < 1e-12);
    assert!((r.mu1 - PI * PI / 4.0).abs() < 1e-11);
    // ∫ (sin(kr)/(kr))² over the unit ball is 8/π at k = π/2
    assert!((r.amplitude.powi(2) - PI / 8.0).abs() < 1e-12);
}

#[test]
fn ball_constants_in_closed_form() {
    let p = RadialProblem::new(1.0, 3, 1.0, 0.0).unwrap();
    let c = correction_constant_radial(&p).unwrap();
    let e = effective_condition_constant_radial(&p).unwrap();
    assert!((c - (4.0 + PI * PI / 6.0)).abs() < 1e-11);
    assert!((e - (PI * PI / 6.0 - 2.0)).abs() < 1e-11);
}

#[test]
fn disk_robin_root_matches_series_bisection() {
    for alpha in [0.25, 1.0, 4.0] {
        let p = RadialProblem::new(1.0, 2, alpha, 0.0).unwrap();
        let got = robin_mu1(&p).unwrap();
        let k = common::disk_mu1_oracle(alpha).sqrt();
        assert!((got.mu1 - k * k).abs() < 1e-10, "alpha {alpha}: {} vs {}", got.mu1, k * k);
        let (j0, j1) = (bessel_series(0, k), bessel_series(1, k));
        let a2 = 1.0 / (PI * (j0 * j0 + j1 * j1));
        assert!((got.amplitude.powi(2) - a2).abs() < 1e-10);
    }
}

#[test]
fn disk_constants_are_frozen() {
    let p = RadialProblem::new(1.0, 2, 1.0, 0.0).unwrap();
    let mu = robin_mu1(&p).unwrap().mu1;
    assert!((mu - 1.576_992_730_8).abs() < 1e-9, "{mu}");
    assert!((correction_constant_radial(&p).unwrap() - 1.867_263).abs() < 1e-6);
    assert!((effective_condition_constant_radial(&p).unwrap() - 0.031_411).abs() < 1e-6);
}

#[test]
fn ball_sweep_slope_is_frozen() {
    let res = run_sweep(&common::shipped_config("ball")).unwrap();
    assert!((res.mu1 - PI * PI / 4.0).abs() < 1e-10);
    assert!((res.fit.s0 - (-0.355_027)).abs() < 2e-6, "s0 = {}", res.fit.s0);
    assert!((res.fit.s0 - res.c_effective).abs() / res.c_effective.abs() < 1e-3);
}

#[test]
fn disk_radial_sweep_slope_is_frozen() {
    let res = run_sweep(&common::shipped_config("disk_radial")).unwrap();
    assert!((res.fit.s0 - 0.031_424).abs() < 2e-6, "s0 = {}", res.fit.s0);
    assert!((res.fit.s0 - res.c_effective).abs() / res.c_effective.abs() < 1e-3);
}
