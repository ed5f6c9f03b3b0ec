//! Radially symmetric reductions: the disk (`n = 2`) and the ball (`n = 3`).
//!
//! The Robin ground state is semi-analytic (a Bessel or trigonometric root),
//! and the two-phase problem reduces to a 1D weighted eigenproblem on
//! `(0, R + ε)` solved with linear elements whose `r^{n−1}`-weighted
//! integrals are exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;
use crate::roots::find_root;
use crate::scalar::Real;
use crate::sparse::{SparseSymmetric, TripletBuilder};
use crate::special::{bessel_j0, bessel_j0_first_zero, bessel_j1};
use crate::eigensolver::{smallest_eigenpair_with, EigenOptions, EigenPair};

/// Interface radius, dimension, Robin parameter and layer thickness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProblem<T> {
    pub radius: T,
    pub dim: usize,
    pub alpha: T,
    pub eps: T,
}

impl<T: Real> RadialProblem<T> {
    pub fn new(radius: T, dim: usize, alpha: T, eps: T) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Config(format!("dimension must be 2 or 3, got {dim}")));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::Config(format!("radius must be positive, got {radius}")));
        }
        if !(alpha >= T::zero()) || !alpha.is_finite() {
            return Err(Error::Config(format!("alpha must be non-negative, got {alpha}")));
        }
        if !(eps >= T::zero()) || eps >= radius {
            return Err(Error::Config(format!("need 0 <= eps < R, got eps = {eps}")));
        }
        Ok(Self { radius, dim, alpha, eps })
    }

    pub fn with_eps(&self, eps: T) -> Result<Self> {
        Self::new(self.radius, self.dim, self.alpha, eps)
    }

    /// Layer conductivity `σ_ε = αε`.
    pub fn sigma(&self) -> T {
        self.alpha * self.eps
    }

    /// Measure of the unit sphere `S^{n−1}`.
    pub fn sphere_measure(&self) -> T {
        if self.dim == 2 {
            T::TAU()
        } else {
            T::lit(4.0) * T::PI()
        }
    }

    /// `|Γ|`.
    pub fn interface_measure(&self) -> T {
        self.sphere_measure() * self.radius.powi(self.dim as i32 - 1)
    }

    /// Mean curvature of the sphere, `(n − 1)/R`.
    pub fn mean_curvature(&self) -> T {
        T::from_usize_lossy(self.dim - 1) / self.radius
    }
}

/// Principal Robin eigenpair of the ball, `μ₁ = k²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobinRadial<T> {
    pub mu1: T,
    pub k: T,
    /// Normalization constant: `∫_Ω w₁² dx = 1`.
    pub amplitude: T,
    pub radius: T,
    pub dim: usize,
    pub alpha: T,
}

impl<T: Real> RobinRadial<T> {
    /// Profile `w₁(r)`.
    pub fn w1(&self, r: T) -> T {
        let kr = self.k * r;
        match self.dim {
            2 => self.amplitude * bessel_j0(kr),
            _ => self.amplitude * sinc(kr),
        }
    }

    /// `w₁'(r)`.
    pub fn w1_derivative(&self, r: T) -> T {
        let kr = self.k * r;
        match self.dim {
            2 => -self.amplitude * self.k * bessel_j1(kr),
            _ => {
                if kr.abs() < T::lit(1e-4) {
                    -self.amplitude * self.k * kr / T::lit(3.0)
                } else {
                    self.amplitude * (kr.cos() * kr - kr.sin()) / (kr * r)
                }
            }
        }
    }

    /// Residual of the defining transcendental equation at the returned root.
    pub fn root_residual(&self) -> T {
        let (k, r, a) = (self.k, self.radius, self.alpha);
        match self.dim {
            2 => k * bessel_j1(k * r) - a * bessel_j0(k * r),
            _ => r * (k * r).cos() - (T::one() - a * r) * r * sinc(k * r),
        }
    }
}

fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        T::one() - x * x / T::lit(6.0)
    } else {
        x.sin() / x
    }
}

/// Robin ground state `αw + ∂_ν w = 0` on the sphere of radius `R`.
///
/// `n = 2`: `k J₁(kR) = α J₀(kR)` with `k ∈ (0, j₀,₁/R)`.
/// `n = 3`: `k cot(kR) = (1 − αR)/R` with `k ∈ (0, π/R)`.
pub fn robin_mu1<T: Real>(problem: &RadialProblem<T>) -> Result<RobinRadial<T>> {
    let (r, alpha) = (problem.radius, problem.alpha);
    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(8.0)) / r;
    let k = if alpha == T::zero() {
        T::zero()
    } else if problem.dim == 2 {
        let j01 = bessel_j0_first_zero::<T>()?;
        find_root(
            |k| k * bessel_j1(k * r) - alpha * bessel_j0(k * r),
            |k| k * r * bessel_j0(k * r) + alpha * r * bessel_j1(k * r),
            T::zero(),
            j01 / r,
            tol,
        )?
    } else {
        // k cot(kR) − (1 − αR)/R, multiplied by sin(kR)/k > 0 on the bracket
        let c = T::one() - alpha * r;
        let g = move |k: T| r * (k * r).cos() - c * r * sinc(k * r);
        let dg = move |k: T| {
            let kr = k * r;
            let dsinc = if kr.abs() < T::lit(1e-4) { -kr / T::lit(3.0) } else { (kr * kr.cos() - kr.sin()) / (kr * kr) };
            -r * r * kr.sin() - c * r * r * dsinc
        };
        find_root(g, dg, T::zero(), T::PI() / r, tol)?
    };

    let amplitude = if problem.dim == 2 {
        let (j0, j1) = (bessel_j0(k * r), bessel_j1(k * r));
        (T::one() / (T::PI() * r * r * (j0 * j0 + j1 * j1))).sqrt()
    } else {
        // ∫_Ω (sin(kr)/(kr))² dx = 4π ∫₀^R sinc²(kr) r² dr
        let kr = k * r;
        let integral = if kr < T::lit(1e-3) {
            r.powi(3) / T::lit(3.0) * (T::one() - kr * kr / T::lit(5.0))
        } else {
            (r / T::lit(2.0) - (T::lit(2.0) * kr).sin() / (T::lit(4.0) * k)) / (k * k)
        };
        (T::one() / (T::lit(4.0) * T::PI() * integral)).sqrt()
    };
    Ok(RobinRadial { mu1: k * k, k, amplitude, radius: r, dim: problem.dim, alpha })
}

/// Predicted first-order coefficient `(αH + μ₁/3) w₁(R)² |Γ|` with `H = (n−1)/R`.
pub fn correction_constant_radial<T: Real>(problem: &RadialProblem<T>) -> Result<T> {
    let robin = robin_mu1(problem)?;
    let w = robin.w1(problem.radius);
    Ok((problem.alpha * problem.mean_curvature() + robin.mu1 / T::lit(3.0)) * w * w * problem.interface_measure())
}

/// First-order coefficient from matching the layer expansion against the
/// Robin condition: `λ₁(ε) = μ₁ − ε (μ₁/3 − αH/2) ∫_Γ w₁² + o(ε)`.
pub fn effective_condition_constant_radial<T: Real>(problem: &RadialProblem<T>) -> Result<T> {
    let robin = robin_mu1(problem)?;
    let w = robin.w1(problem.radius);
    let h = problem.mean_curvature();
    Ok((robin.mu1 / T::lit(3.0) - problem.alpha * h / T::lit(2.0)) * w * w * problem.interface_measure())
}

/// Grid resolution of the radial solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialResolution {
    pub interior_elements: usize,
    pub layer_elements: usize,
    /// Ratio of the largest to the smallest element on each side of `R`.
    pub grading: f64,
}

impl RadialResolution {
    pub fn refined(self) -> Self {
        Self {
            interior_elements: 2 * self.interior_elements,
            layer_elements: 2 * self.layer_elements,
            grading: self.grading,
        }
    }
}

impl Default for RadialResolution {
    fn default() -> Self {
        Self { interior_elements: 400, layer_elements: 16, grading: 8.0 }
    }
}

/// Nodes `0 = r₀ < … < r_M` with a node at `R` and per-element coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid<T> {
    nodes: Vec<T>,
    coeffs: Vec<T>,
    interface: usize,
}

impl<T: Real> RadialGrid<T> {
    /// Graded grid on `(0, R + ε)`: `Q = 1` inside, `Q = σ_ε` in the layer,
    /// elements shrinking geometrically toward `R` from both sides.
    pub fn two_phase(problem: &RadialProblem<T>, res: &RadialResolution) -> Result<Self> {
        if !(problem.eps > T::zero()) {
            return Err(Error::Config("two-phase grid needs eps > 0".into()));
        }
        if res.interior_elements < 2 || !(res.grading >= 1.0) {
            return Err(Error::Config(format!("invalid radial resolution {res:?}")));
        }
        let m = res.layer_elements.max(8);
        let g = T::lit(res.grading);
        let (r, e) = (problem.radius, problem.eps);
        let mut nodes = Vec::with_capacity(res.interior_elements + m + 1);
        for i in 0..=res.interior_elements {
            let s = T::from_usize_lossy(i) / T::from_usize_lossy(res.interior_elements);
            nodes.push(r * (T::one() - graded(T::one() - s, g)));
        }
        for j in 1..=m {
            let s = T::from_usize_lossy(j) / T::from_usize_lossy(m);
            nodes.push(r + e * graded(s, g));
        }
        let mut coeffs = vec![T::one(); res.interior_elements];
        coeffs.extend(std::iter::repeat_n(problem.sigma(), m));
        Self::from_parts(nodes, coeffs, res.interior_elements)
    }

    /// Uniform grid on `(0, radius)` with `Q ≡ 1`.
    pub fn uniform(radius: T, elements: usize) -> Result<Self> {
        let nodes = (0..=elements)
            .map(|i| radius * T::from_usize_lossy(i) / T::from_usize_lossy(elements))
            .collect();
        Self::from_parts(nodes, vec![T::one(); elements], elements)
    }

    pub fn from_parts(nodes: Vec<T>, coeffs: Vec<T>, interface: usize) -> Result<Self> {
        if nodes.len() < 2 || coeffs.len() + 1 != nodes.len() || interface >= nodes.len() {
            return Err(Error::Config("inconsistent radial grid".into()));
        }
        if nodes[0] != T::zero() || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("radial nodes must start at 0 and increase".into()));
        }
        if coeffs.iter().any(|&q| !(q > T::zero())) {
            return Err(Error::Config("element coefficients must be positive".into()));
        }
        Ok(Self { nodes, coeffs, interface })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Index of the interface node `r = R`.
    pub fn interface_index(&self) -> usize {
        self.interface
    }

    pub fn element_count(&self) -> usize {
        self.coeffs.len()
    }
}

/// `s ↦ (g^s − 1)/(g − 1)` on `[0, 1]`; element sizes vary by the factor `g`,
/// finest at `s = 0`.
fn graded<T: Real>(s: T, g: T) -> T {
    if (g - T::one()).abs() < T::lit(1e-12) {
        s
    } else {
        (g.powf(s) - T::one()) / (g - T::one())
    }
}

/// Weighted stiffness and mass `|S^{n−1}| ∫ (·) r^{n−1} dr`, unconstrained.
pub fn assemble_radial<T: Real>(grid: &RadialGrid<T>, dim: usize) -> (SparseSymmetric<T>, SparseSymmetric<T>) {
    let n = grid.nodes.len();
    let sphere = if dim == 2 { T::TAU() } else { T::lit(4.0) * T::PI() };
    let rule = GaussRule::<T>::new(3);
    let mut k = TripletBuilder::with_capacity(n, 4 * n);
    let mut m = TripletBuilder::with_capacity(n, 4 * n);
    let p = dim as i32 - 1;
    for e in 0..grid.coeffs.len() {
        let (a, b) = (grid.nodes[e], grid.nodes[e + 1]);
        let h = b - a;
        let w = rule.integrate(a, b, |r| r.powi(p));
        let s = sphere * grid.coeffs[e] * w / (h * h);
        k.add_block(&[e, e + 1], &[[s, -s], [-s, s]]);
        let phi0 = |r: T| (b - r) / h;
        let phi1 = |r: T| (r - a) / h;
        let m00 = rule.integrate(a, b, |r| phi0(r) * phi0(r) * r.powi(p));
        let m01 = rule.integrate(a, b, |r| phi0(r) * phi1(r) * r.powi(p));
        let m11 = rule.integrate(a, b, |r| phi1(r) * phi1(r) * r.powi(p));
        m.add_block(&[e, e + 1], &[[sphere * m00, sphere * m01], [sphere * m01, sphere * m11]]);
    }
    (k.build(), m.build())
}

/// `|S^{n−1}| Σ_e Q_e ∫_e |Φ'|² r^{n−1} dr`.
pub fn radial_energy<T: Real>(grid: &RadialGrid<T>, dim: usize, values: &[T]) -> T {
    let rule = GaussRule::<T>::new(3);
    let p = dim as i32 - 1;
    let sphere = if dim == 2 { T::TAU() } else { T::lit(4.0) * T::PI() };
    (0..grid.coeffs.len())
        .map(|e| {
            let (a, b) = (grid.nodes[e], grid.nodes[e + 1]);
            let d = (values[e + 1] - values[e]) / (b - a);
            grid.coeffs[e] * d * d * rule.integrate(a, b, |r| r.powi(p))
        })
        .sum::<T>()
        * sphere
}

/// Discrete radial eigenfunction on a grid (zero at the outer node).
#[derive(Debug, Clone, Serialize)]
pub struct RadialEigenPair<T> {
    pub value: T,
    pub values: Vec<T>,
    pub grid: RadialGrid<T>,
    pub dim: usize,
    pub residual: T,
    pub iterations: usize,
}

/// Smallest eigenpair of the weighted 1D pencil with `Φ(r_M) = 0`.
pub fn solve_radial_pencil<T: Real>(grid: &RadialGrid<T>, dim: usize, tol: T) -> Result<RadialEigenPair<T>> {
    solve_radial_pencil_with(grid, dim, &EigenOptions::with_tol(tol))
}

pub fn solve_radial_pencil_with<T: Real>(
    grid: &RadialGrid<T>,
    dim: usize,
    opts: &EigenOptions<T>,
) -> Result<RadialEigenPair<T>> {
    let (k, m) = assemble_radial(grid, dim);
    let free: Vec<usize> = (0..grid.nodes.len() - 1).collect();
    let (kr, mr) = (k.restrict(&free), m.restrict(&free));
    let EigenPair { vector, residual, iterations, .. } = smallest_eigenpair_with(&kr, &mr, opts)?;
    let mut values = vector;
    values.push(T::zero());
    // the element-wise energy avoids the cancellation in xᵀKx on fine grids
    let value = radial_energy(grid, dim, &values) / m.quadratic_form(&values);
    Ok(RadialEigenPair { value, values, grid: grid.clone(), dim, residual, iterations })
}

/// `λ₁(ε)` of the radial two-phase problem.
pub fn solve_two_phase_radial<T: Real>(
    problem: &RadialProblem<T>,
    grid: &RadialGrid<T>,
    tol: T,
) -> Result<RadialEigenPair<T>> {
    solve_two_phase_radial_with(problem, grid, &EigenOptions::with_tol(tol))
}

pub fn solve_two_phase_radial_with<T: Real>(
    problem: &RadialProblem<T>,
    grid: &RadialGrid<T>,
    opts: &EigenOptions<T>,
) -> Result<RadialEigenPair<T>> {
    if !(problem.sigma() > T::zero()) {
        return Err(Error::Config("two-phase problem needs alpha > 0 and eps > 0".into()));
    }
    let outer = *grid.nodes.last().expect("grid has nodes");
    let target = problem.radius + problem.eps;
    if (outer - target).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(16.0)) * target
        || (grid.nodes[grid.interface] - problem.radius).abs() > T::epsilon() * T::lit(16.0) * target
    {
        return Err(Error::Config("grid does not match the problem geometry".into()));
    }
    solve_radial_pencil_with(grid, problem.dim, opts)
}

/// Rayleigh quotient of the radial pencil at the interpolant of
/// `w₁(r)` on `(0, R)` and `w₁(R)(1 − (r − R)/ε)` on the layer.
pub fn radial_test_function_quotient<T: Real>(problem: &RadialProblem<T>, grid: &RadialGrid<T>) -> Result<T> {
    let robin = robin_mu1(problem)?;
    let (r, eps) = (problem.radius, problem.eps);
    let wr = robin.w1(r);
    let u: Vec<T> = grid
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| if i <= grid.interface { robin.w1(x) } else { wr * (T::one() - (x - r) / eps) })
        .collect();
    let (_, m) = assemble_radial(grid, problem.dim);
    let mass = m.quadratic_form(&u);
    if !(mass > T::zero()) {
        return Err(Error::Domain("test function has zero mass".into()));
    }
    Ok(radial_energy(grid, problem.dim, &u) / mass)
}

/// `(4λ_fine − λ_coarse)/3` for a mesh-size halving.
pub fn richardson<T: Real>(coarse: T, fine: T) -> T {
    (T::lit(4.0) * fine - coarse) / T::lit(3.0)
}

/// `σ Φ'(R⁺) − Φ'(R⁻)` from the element gradients adjacent to the interface.
pub fn interface_flux_jump<T: Real>(pair: &RadialEigenPair<T>, sigma: T) -> T {
    let (r, v) = (pair.grid.nodes(), &pair.values);
    let i = pair.grid.interface_index();
    let inner = (v[i] - v[i - 1]) / (r[i] - r[i - 1]);
    let outer = (v[i + 1] - v[i]) / (r[i + 1] - r[i]);
    sigma * outer - inner
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type RadialProblem = super::RadialProblem<f64>;

    #[test]
    fn ball_root_is_forced() {
        let p = RadialProblem::new(1.0, 3, 1.0, 0.0).unwrap();
        let r = robin_mu1(&p).unwrap();
        assert!((r.k - PI / 2.0).abs() < 1e-14);
        assert!((r.mu1 - PI * PI / 4.0).abs() < 1e-13);
        // w1(1)^2 = 1/(2π)
        assert!((r.w1(1.0).powi(2) - 1.0 / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn disk_root_residual() {
        let p = RadialProblem::new(1.0, 2, 1.0, 0.0).unwrap();
        let r = robin_mu1(&p).unwrap();
        assert!(r.root_residual().abs() < 1e-12);
        assert!(r.k > 0.0 && r.k < 2.405);
    }

    #[test]
    fn neumann_limit() {
        let p = RadialProblem::new(1.0, 2, 1e-6, 0.0).unwrap();
        let r = robin_mu1(&p).unwrap();
        assert!(r.mu1 < 1e-5);
        assert!((r.w1(0.3) - 1.0 / PI.sqrt()).abs() < 1e-6);
        let z = RadialProblem::new(1.0, 3, 0.0, 0.0).unwrap();
        assert_eq!(correction_constant_radial(&z).unwrap(), 0.0);
    }

    #[test]
    fn ball_constant_chain() {
        let p = RadialProblem::new(1.0, 3, 1.0, 0.0).unwrap();
        let c = correction_constant_radial(&p).unwrap();
        assert!((c - (4.0 + PI * PI / 6.0)).abs() < 1e-12);
        let e = effective_condition_constant_radial(&p).unwrap();
        assert!((e - (PI * PI / 6.0 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn grid_properties() {
        let p = RadialProblem::new(1.0, 3, 1.0, 0.01).unwrap();
        let res = RadialResolution { interior_elements: 50, layer_elements: 2, grading: 4.0 };
        let g = RadialGrid::two_phase(&p, &res).unwrap();
        assert_eq!(g.nodes()[g.interface_index()], 1.0);
        assert_eq!(g.element_count(), 50 + 8);
        assert!((g.nodes().last().unwrap() - 1.01).abs() < 1e-15);
        let h: Vec<f64> = g.nodes().windows(2).map(|w| w[1] - w[0]).collect();
        assert!((h[0] / h[49] - 4.0).abs() < 0.2);
    }

    #[test]
    fn dirichlet_disk_tends_to_bessel_zero() {
        let j01: f64 = bessel_j0_first_zero().unwrap();
        let l1 = solve_radial_pencil(&RadialGrid::uniform(1.0, 200).unwrap(), 2, 1e-12).unwrap().value;
        let l2 = solve_radial_pencil(&RadialGrid::uniform(1.0, 400).unwrap(), 2, 1e-12).unwrap().value;
        assert!(l2 < l1);
        assert!((richardson(l1, l2) - j01 * j01).abs() < 1e-7);
    }

    #[test]
    fn eigenfunction_is_positive_and_normalized() {
        let p = RadialProblem::new(1.0, 2, 1.0, 0.02).unwrap();
        let g = RadialGrid::two_phase(&p, &RadialResolution::default()).unwrap();
        let pair = solve_two_phase_radial(&p, &g, 1e-11).unwrap();
        assert!(pair.values.iter().all(|&v| v >= 0.0));
        assert_eq!(*pair.values.last().unwrap(), 0.0);
        let (_, m) = assemble_radial(&g, 2);
        assert!((m.quadratic_form(&pair.values) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let p = RadialProblem::new(1.0, 2, 1.0, 0.02).unwrap();
        let q = p.with_eps(0.03).unwrap();
        let g = RadialGrid::two_phase(&q, &RadialResolution::default()).unwrap();
        assert!(matches!(solve_two_phase_radial(&p, &g, 1e-10), Err(Error::Config(_))));
        assert!(RadialProblem::new(1.0, 4, 1.0, 0.0).is_err());
        assert!(RadialProblem::new(1.0, 2, 1.0, 1.0).is_err());
    }
}
