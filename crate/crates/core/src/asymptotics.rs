//! Robin limit problem on general curves and the first-order prediction
//! `λ₁(ε) ≈ μ₁ − ε C*`.

use serde::Serialize;

use crate::assembly::{assemble_robin, assemble_two_phase};
use crate::eigensolver::{rayleigh_quotient, smallest_eigenpair_with, EigenOptions};
use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::mesh::{Mesh2D, Region};
use crate::scalar::Real;

/// Discrete principal Robin eigenpair on the interior mesh.
#[derive(Debug, Clone, Serialize)]
pub struct RobinSolution<T> {
    pub mu1: T,
    /// `w₁` at every interior-mesh node, `∫_Ω w₁² = 1`.
    pub coefficients: Vec<T>,
    /// `w₁` at the interface nodes, in interface order.
    pub trace: Vec<T>,
    /// Curve parameters of the interface nodes.
    pub params: Vec<T>,
    pub alpha: T,
    pub residual: T,
}

pub fn solve_robin<T: Real>(mesh_interior: &Mesh2D<T>, curve: &BoundaryCurve<T>, alpha: T, tol: T) -> Result<RobinSolution<T>> {
    solve_robin_with(mesh_interior, curve, alpha, &EigenOptions::with_tol(tol))
}

pub fn solve_robin_with<T: Real>(
    mesh_interior: &Mesh2D<T>,
    curve: &BoundaryCurve<T>,
    alpha: T,
    opts: &EigenOptions<T>,
) -> Result<RobinSolution<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::Config(format!("Robin parameter must be positive, got {alpha}")));
    }
    let sys = assemble_robin(mesh_interior, curve, alpha)?;
    let pair = smallest_eigenpair_with(&sys.stiffness, &sys.mass, opts)?;
    let trace = mesh_interior.interface_nodes().iter().map(|&i| pair.vector[i]).collect();
    Ok(RobinSolution {
        mu1: pair.value,
        coefficients: pair.vector,
        trace,
        params: mesh_interior.interface_params().to_vec(),
        alpha,
        residual: pair.residual,
    })
}

/// Trapezoid weights in `t` for a cyclic, increasing parameter list on `[0, 2π)`.
pub(crate) fn periodic_trapezoid_weights<T: Real>(params: &[T]) -> Vec<T> {
    let n = params.len();
    (0..n)
        .map(|i| {
            let next = if i + 1 == n { params[0] + T::TAU() } else { params[i + 1] };
            let prev = if i == 0 { params[n - 1] - T::TAU() } else { params[i - 1] };
            (next - prev) / T::lit(2.0)
        })
        .collect()
}

fn boundary_sum<T: Real>(
    sol: &RobinSolution<T>,
    curve: &BoundaryCurve<T>,
    density: impl Fn(T, T) -> T,
) -> Result<T> {
    let weights = periodic_trapezoid_weights(&sol.params);
    let mut total = T::zero();
    for ((&t, &w), &dt) in sol.params.iter().zip(&sol.trace).zip(&weights) {
        let kappa = curve.curvature(t)?;
        total += density(kappa, sol.mu1) * w * w * curve.surface_measure(t) * dt;
    }
    Ok(total)
}

/// `∮ (ακ + μ₁/3) w₁² √G₀ dt` by the trapezoid rule over interface nodes.
pub fn correction_integral<T: Real>(sol: &RobinSolution<T>, curve: &BoundaryCurve<T>) -> Result<T> {
    let alpha = sol.alpha;
    boundary_sum(sol, curve, |kappa, mu| alpha * kappa + mu / T::lit(3.0))
}

/// `∮ (μ₁/3 − ακ/2) w₁² √G₀ dt`, the coefficient obtained from the
/// effective boundary condition `α_ε = α + ε(ακ/2 − μ₁/3)`.
pub fn effective_condition_integral<T: Real>(sol: &RobinSolution<T>, curve: &BoundaryCurve<T>) -> Result<T> {
    let alpha = sol.alpha;
    boundary_sum(sol, curve, |kappa, mu| mu / T::lit(3.0) - alpha * kappa / T::lit(2.0))
}

/// `μ₁ − ε C*`.
pub fn predicted_lambda<T: Real>(mu1: T, c_star: T, eps: T) -> T {
    mu1 - eps * c_star
}

/// Parts of the Rayleigh quotient of `ũ = w₁ φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestFunctionQuotient<T> {
    pub quotient: T,
    /// `∫_Ω |∇ũ|²`.
    pub interior_energy: T,
    /// `σ_ε ∫_Σ |∇ũ|²`.
    pub layer_energy: T,
    /// `∫_{Ω_ε} ũ²`.
    pub mass: T,
}

/// Nodal interpolant of `w₁(t)(1 − τ/ε)` extended by `w₁` inside `Ω`.
pub fn test_function<T: Real>(sol: &RobinSolution<T>, mesh: &Mesh2D<T>, eps: T) -> Result<Vec<T>> {
    let n_int = mesh.interior_node_count();
    if sol.coefficients.len() != n_int || sol.params.len() != mesh.interface_params().len() {
        return Err(Error::Config("Robin solution does not match the mesh".into()));
    }
    let mut u = vec![T::zero(); mesh.node_count()];
    u[..n_int].copy_from_slice(&sol.coefficients);
    for (node, slot) in u.iter_mut().enumerate().skip(n_int) {
        let (_, tau) = mesh
            .chart_coords(node)
            .ok_or_else(|| Error::Mesh(format!("layer node {node} has no chart coordinates")))?;
        let i = mesh
            .interface_ordinal(node)
            .ok_or_else(|| Error::Mesh(format!("layer node {node} is off the interface grid")))?;
        *slot = sol.trace[i] * (T::one() - tau / eps);
    }
    Ok(u)
}

pub fn test_function_breakdown<T: Real>(
    sol: &RobinSolution<T>,
    mesh: &Mesh2D<T>,
    alpha: T,
    eps: T,
) -> Result<TestFunctionQuotient<T>> {
    let u = test_function(sol, mesh, eps)?;
    let sys = assemble_two_phase(mesh, alpha, eps)?;
    let ur = sys.restrict(&u);
    let quotient = rayleigh_quotient(&sys.stiffness, &sys.mass, &ur)?;
    let (ki, _) = crate::assembly::assemble_region(mesh, Region::Interior);
    let (kl, _) = crate::assembly::assemble_region(mesh, Region::Layer);
    Ok(TestFunctionQuotient {
        quotient,
        interior_energy: ki.quadratic_form(&u),
        layer_energy: sys.sigma * kl.quadratic_form(&u),
        mass: sys.mass.quadratic_form(&ur),
    })
}

/// Rayleigh quotient of the two-phase pencil at `ũ = w₁ φ`, an upper bound for `λ₁(ε)`.
pub fn test_function_quotient<T: Real>(sol: &RobinSolution<T>, mesh: &Mesh2D<T>, alpha: T, eps: T) -> Result<T> {
    Ok(test_function_breakdown(sol, mesh, alpha, eps)?.quotient)
}
