//! Intermediate estimates behind the first-order expansion: layer energy
//! split, Robin residual on `Γ`, Fourier coefficient `c₁`, layer mass and a
//! radial second-derivative energy.

use serde::Serialize;

use crate::assembly::{assemble_region, boundary_mass, element_points, p1_mass, TwoPhaseSolution};
use crate::asymptotics::RobinSolution;
use crate::cholesky::Cholesky;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, LayerChart};
use crate::mesh::{Mesh2D, Region};
use crate::quadrature::GaussRule;
use crate::radial::{RadialEigenPair, RadialGrid, RobinRadial};
use crate::scalar::{dot, Real};

/// Layer energy split into tangential and normal parts.
///
/// `tangential`/`normal` project each element's Cartesian gradient on the
/// frame at its chart centroid, so they add up to `total` exactly. That
/// projection inherits an `O(κh)` tilt of the large normal gradient, which
/// leaves an `ε`-independent floor of order `α κ² h²` in the tangential part.
/// `tangential_chart` differentiates the linear interpolant in `(t, τ)`
/// instead, `σ_ε ∫ (∂_tΦ / |∂_t x|)²`, which has no such floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerEnergy<T> {
    pub tangential: T,
    pub normal: T,
    /// `σ_ε ∫_Σ |∇Φ|²` summed directly.
    pub total: T,
    pub tangential_chart: T,
}

fn gradient<T: Real>(p: [[T; 2]; 3], v: [T; 3]) -> [T; 2] {
    let (x1, y1) = (p[1][0] - p[0][0], p[1][1] - p[0][1]);
    let (x2, y2) = (p[2][0] - p[0][0], p[2][1] - p[0][1]);
    let det = x1 * y2 - x2 * y1;
    let (d1, d2) = (v[1] - v[0], v[2] - v[0]);
    [(d1 * y2 - d2 * y1) / det, (x1 * d2 - x2 * d1) / det]
}

/// Chart coordinates of a layer element's vertices, unwrapping the `2π` seam.
fn chart_vertices<T: Real>(mesh: &Mesh2D<T>, tri: [usize; 3]) -> Result<[[T; 2]; 3]> {
    let mut out = [[T::zero(); 2]; 3];
    for (k, &n) in tri.iter().enumerate() {
        let (t, d) = mesh
            .chart_coords(n)
            .ok_or_else(|| Error::Mesh(format!("layer node {n} has no chart coordinates")))?;
        out[k] = [t, d];
    }
    let hi = out.iter().map(|c| c[0]).fold(T::neg_infinity(), T::max);
    for c in &mut out {
        if hi - c[0] > T::PI() {
            c[0] += T::TAU();
        }
    }
    Ok(out)
}

/// Projects each layer element's gradient onto the tangent at its chart centroid.
pub fn layer_energy_split<T: Real>(sol: &TwoPhaseSolution<T>, mesh: &Mesh2D<T>, chart: &LayerChart<T>) -> Result<LayerEnergy<T>> {
    let sigma = sol.sigma();
    let mut out = LayerEnergy { tangential: T::zero(), normal: T::zero(), total: T::zero(), tangential_chart: T::zero() };
    let three = T::lit(3.0);
    for (e, &tri) in mesh.triangles().iter().enumerate() {
        if mesh.regions()[e] != Region::Layer {
            continue;
        }
        let v = [sol.values[tri[0]], sol.values[tri[1]], sol.values[tri[2]]];
        let g = gradient(element_points(mesh, e), v);
        let cv = chart_vertices(mesh, tri)?;
        let (t, tau) = ((cv[0][0] + cv[1][0] + cv[2][0]) / three, (cv[0][1] + cv[1][1] + cv[2][1]) / three);
        let dt = gradient(cv, v)[0] / chart.layer_jacobian(t, tau)?;
        out.tangential_chart += sigma * mesh.triangle_area(e) * dt * dt;
        let nu = chart.curve().normal(t);
        let gn = dot(g, nu);
        let gt = [g[0] - gn * nu[0], g[1] - gn * nu[1]];
        let w = sigma * mesh.triangle_area(e);
        out.tangential += w * dot(gt, gt);
        out.normal += w * gn * gn;
        out.total += w * dot(g, g);
    }
    Ok(out)
}

/// `σ_ε ∫_Σ |∇_tan Φ|²` from chart-coordinate derivatives.
pub fn tangential_energy<T: Real>(sol: &TwoPhaseSolution<T>, mesh: &Mesh2D<T>, chart: &LayerChart<T>) -> Result<T> {
    Ok(layer_energy_split(sol, mesh, chart)?.tangential_chart)
}

/// `‖Φ + ∂_νΦ/α‖²_{L²(Γ)}` for nodal values `values` (at least the interior
/// nodes) with eigenvalue `lambda`, the normal derivative recovered from
/// `∮ g ζ = ∫_Ω ∇Φ·∇ζ − λ ∫_Ω Φ ζ` over interface hat functions `ζ`.
pub fn robin_residual_of<T: Real>(
    values: &[T],
    lambda: T,
    mesh: &Mesh2D<T>,
    curve: &BoundaryCurve<T>,
    alpha: T,
) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(Error::Config(format!("Robin parameter must be positive, got {alpha}")));
    }
    let n = mesh.node_count();
    if values.len() < mesh.interior_node_count() {
        return Err(Error::Config("nodal vector shorter than the interior mesh".into()));
    }
    let mut phi = vec![T::zero(); n];
    let m = values.len().min(n);
    phi[..m].copy_from_slice(&values[..m]);
    let (k, mm) = assemble_region(mesh, Region::Interior);
    let (kp, mp) = (k.mul_vec(&phi), mm.mul_vec(&phi));
    let iface = mesh.interface_nodes();
    let rhs: Vec<T> = iface.iter().map(|&i| kp[i] - lambda * mp[i]).collect();
    let gamma = boundary_mass(mesh, curve)?;
    let g = Cholesky::factor(&gamma)
        .map_err(|e| Error::Mesh(format!("singular boundary mass: {e}")))?
        .solve(&rhs);
    let v: Vec<T> = iface.iter().zip(&g).map(|(&i, &gi)| phi[i] + gi / alpha).collect();
    Ok(gamma.quadratic_form(&v))
}

pub fn robin_residual<T: Real>(sol: &TwoPhaseSolution<T>, mesh: &Mesh2D<T>, curve: &BoundaryCurve<T>, alpha: T) -> Result<T> {
    robin_residual_of(&sol.values, sol.value, mesh, curve, alpha)
}

/// `∫_Ω Φ w` for nodal `Φ` on the full mesh and `w` on the interior nodes.
pub fn fourier_coefficient<T: Real>(values: &[T], w: &[T], mesh: &Mesh2D<T>) -> Result<T> {
    let n_int = mesh.interior_node_count();
    if w.len() != n_int || values.len() != mesh.node_count() {
        return Err(Error::Config("fields do not live on the same mesh".into()));
    }
    let (_, m) = assemble_region(mesh, Region::Interior);
    let mut wf = vec![T::zero(); mesh.node_count()];
    wf[..n_int].copy_from_slice(w);
    Ok(m.bilinear(values, &wf))
}

/// `c₁ = ∫_Ω Φ_ε w₁`.
pub fn fourier_c1<T: Real>(sol: &TwoPhaseSolution<T>, robin: &RobinSolution<T>, mesh: &Mesh2D<T>) -> Result<T> {
    fourier_coefficient(&sol.values, &robin.coefficients, mesh)
}

/// `∫_Σ |Φ|²` with the exact P1 mass form.
pub fn layer_mass<T: Real>(values: &[T], mesh: &Mesh2D<T>) -> T {
    let mut total = T::zero();
    for (e, tri) in mesh.triangles().iter().enumerate() {
        if mesh.regions()[e] != Region::Layer {
            continue;
        }
        let me = p1_mass(mesh.triangle_area(e));
        for i in 0..3 {
            for j in 0..3 {
                total += me[i][j] * values[tri[i]] * values[tri[j]];
            }
        }
    }
    total
}

/// Per-`ε` diagnostics of a two-phase eigenpair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsReport<T> {
    pub eps: T,
    /// Chart-coordinate tangential energy.
    pub tangential_energy: T,
    /// Tangential part of the Cartesian projection split.
    pub tangential_projected: T,
    /// `layer_energy` minus `tangential_projected`.
    pub normal_energy: T,
    pub layer_energy: T,
    pub layer_mass: T,
    pub robin_residual: T,
    pub c1: T,
    /// `∫_Ω|∇Φ|² + σ_ε∫_Σ|∇Φ|²` for the `B`-normalized eigenfunction.
    pub total_energy: T,
    pub lambda1: T,
    /// Second-derivative energy; available for radial solutions only.
    pub h2_energy: Option<T>,
}

pub fn diagnose<T: Real>(
    sol: &TwoPhaseSolution<T>,
    robin: &RobinSolution<T>,
    mesh: &Mesh2D<T>,
    chart: &LayerChart<T>,
) -> Result<DiagnosticsReport<T>> {
    let split = layer_energy_split(sol, mesh, chart)?;
    let (ki, mi) = assemble_region(mesh, Region::Interior);
    let (_, ml) = assemble_region(mesh, Region::Layer);
    let mass = mi.quadratic_form(&sol.values) + ml.quadratic_form(&sol.values);
    let interior = ki.quadratic_form(&sol.values);
    Ok(DiagnosticsReport {
        eps: sol.eps,
        tangential_energy: split.tangential_chart,
        tangential_projected: split.tangential,
        normal_energy: split.normal,
        layer_energy: split.total,
        layer_mass: layer_mass(&sol.values, mesh),
        robin_residual: robin_residual(sol, mesh, chart.curve(), sol.alpha)?,
        c1: fourier_c1(sol, robin, mesh)?,
        total_energy: (interior + split.total) / mass,
        lambda1: sol.value,
        h2_energy: None,
    })
}

/// Radial analogue of [`diagnose`]; the tangential energy vanishes identically.
pub fn diagnose_radial<T: Real>(pair: &RadialEigenPair<T>, robin: &RobinRadial<T>, alpha: T, eps: T) -> Result<DiagnosticsReport<T>> {
    let grid = &pair.grid;
    let (r, v) = (grid.nodes(), &pair.values);
    let ir = grid.interface_index();
    let rule = GaussRule::<T>::new(4);
    let p = pair.dim as i32 - 1;
    let sphere = sphere_measure::<T>(pair.dim);
    let sigma = alpha * eps;

    let (mut k_row, mut m_row) = (T::zero(), T::zero());
    let (mut interior, mut layer, mut lmass, mut mass, mut c1) = (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for e in 0..grid.element_count() {
        let (a, b) = (r[e], r[e + 1]);
        let h = b - a;
        let lin = |x: T| (v[e] * (b - x) + v[e + 1] * (x - a)) / h;
        let d = (v[e + 1] - v[e]) / h;
        let w = rule.integrate(a, b, |x| x.powi(p)) * sphere;
        let m2 = rule.integrate(a, b, |x| lin(x) * lin(x) * x.powi(p)) * sphere;
        mass += m2;
        if e < ir {
            interior += d * d * w;
            c1 += sphere * rule.integrate(a, b, |x| lin(x) * robin.w1(x) * x.powi(p));
            if e + 1 == ir {
                // interface row of the interior stiffness and mass
                k_row = d * w / h;
                m_row = sphere * rule.integrate(a, b, |x| lin(x) * (x - a) / h * x.powi(p));
            }
        } else {
            layer += sigma * d * d * w;
            lmass += m2;
        }
    }
    let gamma = sphere * r[ir].powi(p);
    let g = (k_row - pair.value * m_row) / gamma;
    let res = v[ir] + g / alpha;
    Ok(DiagnosticsReport {
        eps,
        tangential_energy: T::zero(),
        tangential_projected: T::zero(),
        normal_energy: layer,
        layer_energy: layer,
        layer_mass: lmass,
        robin_residual: res * res * gamma,
        c1,
        total_energy: (interior + layer) / mass,
        lambda1: pair.value,
        h2_energy: Some(h2_energy(grid, v, pair.dim)?),
    })
}

fn sphere_measure<T: Real>(dim: usize) -> T {
    if dim == 2 {
        T::TAU()
    } else {
        T::lit(4.0) * T::PI()
    }
}

/// Derivative at `x[1]`-centred (or one-sided) three-point stencil of the
/// interpolating quadratic, evaluated at `at`.
fn quadratic_slope<T: Real>(x: [T; 3], y: [T; 3], at: T) -> T {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let c = (d12 - d01) / (x[2] - x[0]);
    d01 + c * ((at - x[0]) + (at - x[1]))
}

/// `Σ_e Q_e ∫_e |Φ″ + (n−1)Φ′/r|² r^{n−1} dr |S^{n−1}|` for the `C¹` cubic
/// Hermite fit of nodal values, built separately on each coefficient region
/// so the interface kink is preserved.
pub fn h2_energy<T: Real>(grid: &RadialGrid<T>, values: &[T], dim: usize) -> Result<T> {
    let r = grid.nodes();
    if values.len() != r.len() {
        return Err(Error::Config("values do not match the radial grid".into()));
    }
    let q = grid.coeffs();
    // regions are maximal runs of equal coefficient
    let mut slopes = vec![T::zero(); r.len()];
    let mut side = vec![T::zero(); r.len()];
    let mut start = 0;
    while start < q.len() {
        let mut end = start;
        while end + 1 < q.len() && q[end + 1] == q[start] {
            end += 1;
        }
        let (lo, hi) = (start, end + 1);
        if hi - lo < 2 {
            return Err(Error::Numerical(format!("region of {} element(s) is too short for a spline fit", hi - lo)));
        }
        for i in lo..=hi {
            let c = i.clamp(lo + 1, hi - 1);
            let s = quadratic_slope([r[c - 1], r[c], r[c + 1]], [values[c - 1], values[c], values[c + 1]], r[i]);
            if i == lo {
                side[i] = s;
            } else {
                slopes[i] = s;
            }
        }
        start = end + 1;
    }
    slopes[0] = T::zero();

    let rule = GaussRule::<T>::new(4);
    let p = dim as i32 - 1;
    let n1 = T::from_usize_lossy(dim - 1);
    let mut total = T::zero();
    for e in 0..q.len() {
        let (a, b) = (r[e], r[e + 1]);
        let h = b - a;
        let d0 = if e > 0 && q[e] != q[e - 1] { side[e] } else { slopes[e] };
        let d1 = slopes[e + 1];
        let (f0, f1) = (values[e], values[e + 1]);
        let six = T::lit(6.0);
        let val = rule.integrate(a, b, |x| {
            let s = (x - a) / h;
            let dd = ((-six + T::lit(12.0) * s) * f0
                + h * (T::lit(-4.0) + six * s) * d0
                + (six - T::lit(12.0) * s) * f1
                + h * (T::lit(-2.0) + six * s) * d1)
                / (h * h);
            let s2 = s * s;
            let d = ((six * s2 - six * s) * f0
                + h * (T::lit(3.0) * s2 - T::lit(4.0) * s + T::one()) * d0
                + (six * s - six * s2) * f1
                + h * (T::lit(3.0) * s2 - T::lit(2.0) * s) * d1)
                / h;
            let lap = dd + n1 * d / x;
            lap * lap * x.powi(p)
        });
        total += q[e] * val;
    }
    if !total.is_finite() {
        return Err(Error::Numerical("non-finite second-derivative energy".into()));
    }
    Ok(total * sphere_measure::<T>(dim))
}
