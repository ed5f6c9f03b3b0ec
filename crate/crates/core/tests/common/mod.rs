#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use spectra::harness::SweepConfig;
use spectra::SparseSymmetric;

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn shipped_config(name: &str) -> SweepConfig {
    SweepConfig::load(&configs_dir().join(format!("{name}.toml"))).expect("shipped config loads")
}

fn dense(m: &SparseSymmetric) -> DMatrix<f64> {
    let rows = m.to_dense();
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Smallest eigenpair of `Ax = λBx` from the full dense spectrum.
/// The pencil is reduced to `L⁻¹AL⁻ᵀ` with `B = LLᵀ`.
pub fn dense_smallest(a: &SparseSymmetric, b: &SparseSymmetric) -> (f64, Vec<f64>) {
    let (a, b) = (dense(a), dense(b));
    let l = b.cholesky().expect("mass matrix is SPD").l();
    let linv = l.clone().try_inverse().expect("triangular factor is invertible");
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let (k, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty spectrum");
    let z: DVector<f64> = eig.eigenvectors.column(k).into_owned();
    let x = linv.transpose() * z;
    (lambda, x.iter().copied().collect())
}

/// Angle between two vectors as lines (sign ignored).
pub fn angle(x: &[f64], y: &[f64]) -> f64 {
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let s = dot.signum();
    let d = x.iter().zip(y).map(|(a, b)| (a / nx - s * b / ny).powi(2)).sum::<f64>().sqrt();
    2.0 * (d / 2.0).asin()
}

/// Periodic trapezoid rule for `∮ f(t) dt` over `[0, 2π)`.
pub fn periodic_integral(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = std::f64::consts::TAU / n as f64;
    (0..n).map(|i| f(h * i as f64)).sum::<f64>() * h
}

pub fn fourier_star() -> spectra::BoundaryCurve {
    spectra::BoundaryCurve::fourier(1.0, vec![0.0, 0.12], vec![0.0, 0.0, 0.06]).expect("valid star curve")
}

/// Small pencils from the real assemblies, every one under 200 unknowns.
pub fn oracle_pencils() -> Vec<(String, SparseSymmetric, SparseSymmetric)> {
    use spectra::assembly::{assemble_robin, assemble_two_phase};
    use spectra::mesh::{build_interior_mesh, build_mesh};
    use spectra::radial::{assemble_radial, RadialGrid, RadialProblem, RadialResolution};
    use spectra::BoundaryCurve;

    let circle = BoundaryCurve::circle(1.0).unwrap();
    let ellipse = BoundaryCurve::ellipse(1.5, 1.0).unwrap();
    let star = fourier_star();
    let mut out = Vec::new();
    for (name, curve, nb, levels) in [("robin circle", &circle, 16, 4), ("robin ellipse", &ellipse, 20, 5), ("robin star", &star, 24, 4)] {
        let mesh = build_interior_mesh(curve, nb, levels).unwrap();
        let sys = assemble_robin(&mesh, curve, 1.0).unwrap();
        out.push((name.to_string(), sys.stiffness, sys.mass));
    }
    for (name, curve, eps, nb) in [("two-phase disk", &circle, 0.05, 16), ("two-phase ellipse", &ellipse, 0.04, 20)] {
        let mesh = build_mesh(curve, eps, nb, 4, 4).unwrap();
        let sys = assemble_two_phase(&mesh, 1.0, eps).unwrap();
        out.push((name.to_string(), sys.stiffness, sys.mass));
    }
    for dim in [2, 3] {
        let p = RadialProblem::new(1.0, dim, 1.0, 0.02).unwrap();
        let res = RadialResolution { interior_elements: 60, layer_elements: 12, grading: 4.0 };
        let grid = RadialGrid::two_phase(&p, &res).unwrap();
        let (k, m) = assemble_radial(&grid, dim);
        let free: Vec<usize> = (0..grid.nodes().len() - 1).collect();
        out.push((format!("radial two-phase n={dim}"), k.restrict(&free), m.restrict(&free)));
    }
    out
}

/// `J_n(x)` from its power series; plenty for `x < 3`.
pub fn bessel_series(n: i32, x: f64) -> f64 {
    let mut term = (x / 2.0).powi(n) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for m in 1..60 {
        term *= -(x * x / 4.0) / (m as f64 * (m + n) as f64);
        sum += term;
    }
    sum
}

pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Robin `μ₁` of the disk of radius 1 by bisection on `k J₁(k) = α J₀(k)`.
pub fn disk_mu1_oracle(alpha: f64) -> f64 {
    let k = bisect(|k| k * bessel_series(1, k) - alpha * bessel_series(0, k), 1e-12, 2.404_825_557_695_773);
    k * k
}

/// `|∂_t X × ∂_τ X|` for `X = p + τν`, with `ν'` from the analytic derivatives.
pub fn offset_jacobian(c: &spectra::BoundaryCurve, t: f64, tau: f64) -> f64 {
    let (d, dd) = (c.derivative(t), c.second_derivative(t));
    let s = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let ds = (d[0] * dd[0] + d[1] * dd[1]) / s;
    let nu = [d[1] / s, -d[0] / s];
    let dnu = [dd[1] / s - d[1] * ds / (s * s), -dd[0] / s + d[0] * ds / (s * s)];
    let dx = [d[0] + tau * dnu[0], d[1] + tau * dnu[1]];
    (dx[0] * nu[1] - dx[1] * nu[0]).abs()
}
