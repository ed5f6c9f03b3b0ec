//! P1 stiffness and mass matrices for the two-phase and Robin weak forms.
//!
//! The transmission condition needs no interface term: layer and interior
//! elements share the interface nodes, so continuity is built into the space
//! and flux continuity is the natural condition of the summed forms.

use serde::Serialize;

use crate::eigensolver::{smallest_eigenpair_with, EigenOptions};
use crate::error::{Error, Result};
use crate::geometry::BoundaryCurve;
use crate::mesh::{Mesh2D, Region};
use crate::scalar::{Real, Vec2};
use crate::sparse::{SparseSymmetric, TripletBuilder};

/// Exact element stiffness `∫ ∇φ_i · ∇φ_j` of a linear triangle.
pub fn p1_stiffness<T: Real>(p: [Vec2<T>; 3]) -> [[T; 3]; 3] {
    let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
    let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
    let area = (c[2] * b[1] - c[1] * b[2]) * T::lit(0.5);
    let s = T::one() / (T::lit(4.0) * area);
    let mut k = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) * s;
        }
    }
    k
}

/// Exact element mass `∫ φ_i φ_j = |e|/12 (1 + δ_ij)`.
pub fn p1_mass<T: Real>(area: T) -> [[T; 3]; 3] {
    let off = area / T::lit(12.0);
    let diag = off + off;
    [[diag, off, off], [off, diag, off], [off, off, diag]]
}

/// Mass matrix of a linear segment of length `len`.
pub fn edge_mass<T: Real>(len: T) -> [[T; 2]; 2] {
    let off = len / T::lit(6.0);
    [[off + off, off], [off, off + off]]
}

pub(crate) fn element_points<T: Real>(mesh: &Mesh2D<T>, e: usize) -> [Vec2<T>; 3] {
    let t = mesh.triangles()[e];
    [mesh.nodes()[t[0]], mesh.nodes()[t[1]], mesh.nodes()[t[2]]]
}

/// Stiffness weighted by `coeff(region)` and mass, over elements of the
/// selected regions, in the full node numbering of `dim` nodes.
fn assemble_regions<T: Real>(
    mesh: &Mesh2D<T>,
    dim: usize,
    coeff: impl Fn(Region) -> Option<T>,
) -> (TripletBuilder<T>, TripletBuilder<T>) {
    let cap = 9 * mesh.triangles().len();
    let mut k = TripletBuilder::with_capacity(dim, cap);
    let mut m = TripletBuilder::with_capacity(dim, cap);
    for (e, tri) in mesh.triangles().iter().enumerate() {
        let Some(q) = coeff(mesh.regions()[e]) else { continue };
        let mut ke = p1_stiffness(element_points(mesh, e));
        ke.iter_mut().flatten().for_each(|v| *v *= q);
        k.add_block(tri, &ke);
        m.add_block(tri, &p1_mass(mesh.triangle_area(e)));
    }
    (k, m)
}

/// Reduced pencil of the two-phase problem with `∂Ω_ε` eliminated.
#[derive(Debug, Clone)]
pub struct TwoPhaseSystem<T> {
    pub stiffness: SparseSymmetric<T>,
    pub mass: SparseSymmetric<T>,
    /// Full node index of each reduced unknown.
    pub free_nodes: Vec<usize>,
    pub node_count: usize,
    pub sigma: T,
}

impl<T: Real> TwoPhaseSystem<T> {
    /// Full nodal vector with zeros on the Dirichlet nodes.
    pub fn expand(&self, reduced: &[T]) -> Vec<T> {
        let mut full = vec![T::zero(); self.node_count];
        for (&node, &v) in self.free_nodes.iter().zip(reduced) {
            full[node] = v;
        }
        full
    }

    pub fn restrict(&self, full: &[T]) -> Vec<T> {
        self.free_nodes.iter().map(|&n| full[n]).collect()
    }
}

/// Assembles `∫_Ω ∇Φ·∇φ + σ_ε ∫_Σ ∇Φ·∇φ` and `∫_{Ω_ε} Φφ` with `σ_ε = αε`.
pub fn assemble_two_phase<T: Real>(mesh: &Mesh2D<T>, alpha: T, eps: T) -> Result<TwoPhaseSystem<T>> {
    let sigma = alpha * eps;
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::Config(format!("sigma = alpha * eps must be positive, got {sigma}")));
    }
    if !mesh.has_layer() {
        return Err(Error::Config("two-phase assembly needs a mesh with a layer".into()));
    }
    let n = mesh.node_count();
    let (k, m) = assemble_regions(mesh, n, |r| Some(if r == Region::Layer { sigma } else { T::one() }));
    let (k, m) = (k.build(), m.build());
    check_mass_total(&m, mesh.area())?;

    let mut fixed = vec![false; n];
    for &o in mesh.outer_nodes() {
        fixed[o] = true;
    }
    let free_nodes: Vec<usize> = (0..n).filter(|&i| !fixed[i]).collect();
    Ok(TwoPhaseSystem {
        stiffness: k.restrict(&free_nodes).mark_constrained(),
        mass: m.restrict(&free_nodes).mark_constrained(),
        free_nodes,
        node_count: n,
        sigma,
    })
}

fn check_mass_total<T: Real>(m: &SparseSymmetric<T>, area: T) -> Result<()> {
    let total = m.total_sum();
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(1e3));
    if (total - area).abs() > tol * area {
        return Err(Error::Assembly(format!("mass total {total} differs from mesh area {area}")));
    }
    Ok(())
}

/// Mass matrix of `Γ` in interface-ordinal numbering (cyclic), using the
/// exact arclength of each parameter interval.
pub fn boundary_mass<T: Real>(mesh: &Mesh2D<T>, curve: &BoundaryCurve<T>) -> Result<SparseSymmetric<T>> {
    let params = mesh.interface_params();
    let nb = params.len();
    if nb < 3 {
        return Err(Error::Mesh(format!("interface has only {nb} nodes")));
    }
    let mut b = TripletBuilder::with_capacity(nb, 4 * nb);
    for i in 0..nb {
        let j = (i + 1) % nb;
        let t1 = if j == 0 { T::TAU() } else { params[j] };
        let len = curve.arc_length(params[i], t1);
        if !(len > T::zero()) {
            return Err(Error::Mesh(format!("boundary edge {i} has zero length")));
        }
        b.add_block(&[i, j], &edge_mass(len));
    }
    Ok(b.build())
}

/// Robin pencil on `Ω`.
#[derive(Debug, Clone)]
pub struct RobinSystem<T> {
    pub stiffness: SparseSymmetric<T>,
    pub mass: SparseSymmetric<T>,
    /// Boundary mass in interface-ordinal numbering.
    pub boundary_mass: SparseSymmetric<T>,
    pub alpha: T,
}

/// Assembles `∫_Ω ∇Φ·∇ζ + α∮_Γ Φζ` and `∫_Ω Φζ` on the interior nodes.
pub fn assemble_robin<T: Real>(
    mesh_interior: &Mesh2D<T>,
    curve: &BoundaryCurve<T>,
    alpha: T,
) -> Result<RobinSystem<T>> {
    if mesh_interior.interface_nodes().is_empty() {
        return Err(Error::Mesh("mesh has no interface nodes".into()));
    }
    let n = mesh_interior.interior_node_count();
    let (mut k, m) = assemble_regions(mesh_interior, n, |r| (r == Region::Interior).then_some(T::one()));
    let gamma = boundary_mass(mesh_interior, curve)?;
    let iface = mesh_interior.interface_nodes();
    for i in 0..gamma.dim() {
        for (j, v) in gamma.row(i) {
            k.add(iface[i], iface[j], alpha * v);
        }
    }
    let mass = m.build();
    check_mass_total(&mass, mesh_interior.region_area(Region::Interior))?;
    Ok(RobinSystem { stiffness: k.build(), mass, boundary_mass: gamma, alpha })
}

/// Stiffness and mass of one region in the full node numbering, unconstrained.
pub fn assemble_region<T: Real>(mesh: &Mesh2D<T>, region: Region) -> (SparseSymmetric<T>, SparseSymmetric<T>) {
    let (k, m) = assemble_regions(mesh, mesh.node_count(), |r| (r == region).then_some(T::one()));
    (k.build(), m.build())
}

/// Principal two-phase eigenpair as a full nodal vector.
#[derive(Debug, Clone, Serialize)]
pub struct TwoPhaseSolution<T> {
    pub value: T,
    /// Nodal values on every mesh node, zero on `∂Ω_ε`.
    pub values: Vec<T>,
    pub residual: T,
    pub iterations: usize,
    pub alpha: T,
    pub eps: T,
}

impl<T: Real> TwoPhaseSolution<T> {
    pub fn sigma(&self) -> T {
        self.alpha * self.eps
    }
}

/// Assembles and solves the two-phase pencil on `mesh`.
pub fn solve_two_phase<T: Real>(mesh: &Mesh2D<T>, alpha: T, eps: T, tol: T) -> Result<TwoPhaseSolution<T>> {
    solve_two_phase_with(mesh, alpha, eps, &EigenOptions::with_tol(tol))
}

pub fn solve_two_phase_with<T: Real>(
    mesh: &Mesh2D<T>,
    alpha: T,
    eps: T,
    opts: &EigenOptions<T>,
) -> Result<TwoPhaseSolution<T>> {
    let sys = assemble_two_phase(mesh, alpha, eps)?;
    let pair = smallest_eigenpair_with(&sys.stiffness, &sys.mass, opts)?;
    Ok(TwoPhaseSolution {
        value: pair.value,
        values: sys.expand(&pair.vector),
        residual: pair.residual,
        iterations: pair.iterations,
        alpha,
        eps,
    })
}
