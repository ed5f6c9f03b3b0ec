//! Structured triangulations of the coated domain.
//!
//! Node numbering is fixed: the center first, then the interior rings from
//! the inside out (the last one is the interface), then the layer rings.
//! Every interior-domain node therefore precedes every layer node, and the
//! restriction to the interior keeps node indices unchanged.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, LayerChart};
use crate::scalar::{cross, Real, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Interior,
    Layer,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::Interior => "INTERIOR",
            Region::Layer => "LAYER",
        }
    }
}

/// Mesh resolution parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshResolution {
    pub n_boundary: usize,
    pub n_layer: usize,
    pub interior_levels: usize,
}

impl MeshResolution {
    /// Doubles the tangential and radial counts; the layer slab count is kept.
    pub fn refined(self) -> Self {
        Self { n_boundary: 2 * self.n_boundary, n_layer: self.n_layer, interior_levels: 2 * self.interior_levels }
    }
}

/// Conforming triangulation with region tags and chart coordinates.
#[derive(Debug, Clone)]
pub struct Mesh2D<T> {
    nodes: Vec<Vec2<T>>,
    triangles: Vec<[usize; 3]>,
    regions: Vec<Region>,
    /// `(t, τ)` for interface and layer nodes.
    chart: Vec<Option<(T, T)>>,
    interface: Vec<usize>,
    outer: Vec<usize>,
    params: Vec<T>,
    interior_node_count: usize,
    thickness: Option<T>,
}

/// Triangulates `Ω ∪ Σ_ε` for a star-shaped curve.
pub fn build_mesh<T: Real>(
    curve: &BoundaryCurve<T>,
    thickness: T,
    n_boundary: usize,
    n_layer: usize,
    interior_levels: usize,
) -> Result<Mesh2D<T>> {
    if n_layer < 4 {
        return Err(Error::Config(format!("n_layer must be at least 4, got {n_layer}")));
    }
    let chart = LayerChart::new(curve.clone(), thickness)?;
    build(curve, Some((&chart, n_layer)), n_boundary, interior_levels)
}

/// Triangulates `Ω` alone (no layer); used by the Robin problem.
pub fn build_interior_mesh<T: Real>(
    curve: &BoundaryCurve<T>,
    n_boundary: usize,
    interior_levels: usize,
) -> Result<Mesh2D<T>> {
    build(curve, None, n_boundary, interior_levels)
}

fn build<T: Real>(
    curve: &BoundaryCurve<T>,
    layer: Option<(&LayerChart<T>, usize)>,
    n_boundary: usize,
    levels: usize,
) -> Result<Mesh2D<T>> {
    if n_boundary < 3 || levels < 1 {
        return Err(Error::Config(format!(
            "need n_boundary >= 3 and interior_levels >= 1, got {n_boundary}, {levels}"
        )));
    }
    if !curve.is_star_shaped() {
        return Err(Error::Config("curve is not star-shaped about the origin".into()));
    }
    let nb = n_boundary;
    let params: Vec<T> =
        (0..nb).map(|i| T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(nb)).collect();
    let boundary: Vec<Vec2<T>> = params.iter().map(|&t| curve.point(t)).collect();

    let n_layer = layer.map_or(0, |(_, m)| m);
    let total = 1 + levels * nb + n_layer * nb;
    let mut nodes = Vec::with_capacity(total);
    let mut chart = Vec::with_capacity(total);
    nodes.push([T::zero(), T::zero()]);
    chart.push(None);
    for k in 1..=levels {
        let s = T::from_usize_lossy(k) / T::from_usize_lossy(levels);
        for (i, p) in boundary.iter().enumerate() {
            if k == levels {
                nodes.push(*p);
                chart.push(Some((params[i], T::zero())));
            } else {
                nodes.push([s * p[0], s * p[1]]);
                chart.push(None);
            }
        }
    }
    if let Some((lc, m)) = layer {
        for j in 1..=m {
            let tau = lc.thickness() * T::from_usize_lossy(j) / T::from_usize_lossy(m);
            for &t in &params {
                nodes.push(lc.offset_point(t, tau)?);
                chart.push(Some((t, tau)));
            }
        }
    }

    let ring = |k: usize, i: usize| 1 + (k - 1) * nb + (i % nb);
    let mut triangles = Vec::with_capacity(nb * (2 * (levels + n_layer) - 1));
    let mut regions = Vec::with_capacity(triangles.capacity());
    for i in 0..nb {
        triangles.push([0, ring(1, i), ring(1, i + 1)]);
        regions.push(Region::Interior);
    }
    for k in 1..levels + n_layer {
        let region = if k < levels { Region::Interior } else { Region::Layer };
        for i in 0..nb {
            let (a, b, c, d) = (ring(k, i), ring(k, i + 1), ring(k + 1, i + 1), ring(k + 1, i));
            triangles.push([a, d, c]);
            triangles.push([a, c, b]);
            regions.push(region);
            regions.push(region);
        }
    }

    let interface: Vec<usize> = (0..nb).map(|i| ring(levels, i)).collect();
    let outer = if n_layer > 0 { (0..nb).map(|i| ring(levels + n_layer, i)).collect() } else { interface.clone() };
    let mesh = Mesh2D {
        nodes,
        triangles,
        regions,
        chart,
        interface,
        outer,
        params,
        interior_node_count: 1 + levels * nb,
        thickness: layer.map(|(lc, _)| lc.thickness()),
    };
    for (e, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(e);
        if !(area > T::zero()) {
            return Err(Error::Geometry(format!(
                "inverted element {e} (nodes {tri:?}, signed area {area})"
            )));
        }
    }
    Ok(mesh)
}

impl<T: Real> Mesh2D<T> {
    pub fn nodes(&self) -> &[Vec2<T>] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes of `Ω̄`; they are numbered `0..interior_node_count()`.
    pub fn interior_node_count(&self) -> usize {
        self.interior_node_count
    }

    /// Interface nodes ordered by increasing parameter.
    pub fn interface_nodes(&self) -> &[usize] {
        &self.interface
    }

    /// Parameters `t_i` of the interface nodes.
    pub fn interface_params(&self) -> &[T] {
        &self.params
    }

    /// Index into [`Self::interface_params`] of the chart parameter of `node`.
    pub fn interface_ordinal(&self, node: usize) -> Option<usize> {
        let (t, _) = self.chart_coords(node)?;
        self.params.binary_search_by(|p| p.partial_cmp(&t).expect("finite parameters")).ok()
    }

    /// Nodes on the outer boundary (`∂Ω_ε`, or `Γ` for an interior-only mesh).
    pub fn outer_nodes(&self) -> &[usize] {
        &self.outer
    }

    pub fn chart_coords(&self, node: usize) -> Option<(T, T)> {
        self.chart[node]
    }

    pub fn thickness(&self) -> Option<T> {
        self.thickness
    }

    pub fn has_layer(&self) -> bool {
        self.thickness.is_some()
    }

    pub fn triangle_area(&self, e: usize) -> T {
        let [a, b, c] = self.triangles[e];
        let (pa, pb, pc) = (self.nodes[a], self.nodes[b], self.nodes[c]);
        cross([pb[0] - pa[0], pb[1] - pa[1]], [pc[0] - pa[0], pc[1] - pa[1]]) * T::lit(0.5)
    }

    pub fn area(&self) -> T {
        (0..self.triangles.len()).map(|e| self.triangle_area(e)).sum()
    }

    pub fn region_area(&self, region: Region) -> T {
        (0..self.triangles.len())
            .filter(|&e| self.regions[e] == region)
            .map(|e| self.triangle_area(e))
            .sum()
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = HashSet::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    /// `V − E + F` counting the unbounded face; 2 for a triangulated disk.
    pub fn euler_characteristic(&self) -> i64 {
        self.node_count() as i64 - self.edge_count() as i64 + self.triangles.len() as i64 + 1
    }

    /// The sub-mesh on `Ω`, with identical node indices.
    pub fn interior(&self) -> Mesh2D<T> {
        let keep: Vec<usize> =
            (0..self.triangles.len()).filter(|&e| self.regions[e] == Region::Interior).collect();
        let n = self.interior_node_count;
        Mesh2D {
            nodes: self.nodes[..n].to_vec(),
            triangles: keep.iter().map(|&e| self.triangles[e]).collect(),
            regions: vec![Region::Interior; keep.len()],
            chart: self.chart[..n].to_vec(),
            interface: self.interface.clone(),
            outer: self.interface.clone(),
            params: self.params.clone(),
            interior_node_count: n,
            thickness: None,
        }
    }

    /// Writes `nodes.csv` (`id,x,y`) and `triangles.csv` (`id,n0,n1,n2,tag`).
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = BufWriter::new(File::create(dir.join("nodes.csv"))?);
        writeln!(w, "id,x,y")?;
        for (i, p) in self.nodes.iter().enumerate() {
            writeln!(w, "{i},{:.17e},{:.17e}", p[0].to_f64_lossy(), p[1].to_f64_lossy())?;
        }
        let mut w = BufWriter::new(File::create(dir.join("triangles.csv"))?);
        writeln!(w, "id,n0,n1,n2,tag")?;
        for (e, t) in self.triangles.iter().enumerate() {
            writeln!(w, "{e},{},{},{},{}", t[0], t[1], t[2], self.regions[e].as_str())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type BoundaryCurve = super::BoundaryCurve<f64>;

    #[test]
    fn disk_areas() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        let m = build_mesh(&c, 0.1, 64, 4, 12).unwrap();
        let exact = PI * 1.1 * 1.1;
        assert!((m.area() - exact).abs() / exact < 5e-3);
        let layer = 0.21 * PI;
        assert!((m.region_area(Region::Layer) - layer).abs() / layer < 5e-3);
        let fine = build_mesh(&c, 0.1, 128, 4, 24).unwrap();
        let ratio = (m.area() - exact).abs() / (fine.area() - exact).abs();
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn structure_and_numbering() {
        let e = BoundaryCurve::ellipse(1.5, 1.0).unwrap();
        let m = build_mesh(&e, 0.05, 40, 5, 7).unwrap();
        assert_eq!(m.euler_characteristic(), 2);
        assert!((0..m.triangles().len()).all(|t| m.triangle_area(t) > 0.0));
        assert_eq!(m.interior_node_count(), 1 + 7 * 40);
        assert!(m.interface_nodes().iter().all(|&i| i < m.interior_node_count()));
        assert!(m.outer_nodes().iter().all(|&i| i >= m.interior_node_count()));
        let t = m.interface_params();
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(t[0], 0.0);
        assert!(*t.last().unwrap() < 2.0 * PI);
        for n in 0..m.node_count() {
            if let Some((_, tau)) = m.chart_coords(n) {
                assert!(tau <= 0.05 + 1e-12 && tau >= 0.0);
            }
        }
        let int = m.interior();
        assert_eq!(int.euler_characteristic(), 2);
        assert!((int.area() - m.region_area(Region::Interior)).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        assert!(matches!(build_mesh(&c, 0.1, 32, 3, 4), Err(Error::Config(_))));
        assert!(build_mesh(&c, 1.5, 32, 4, 4).is_err());
    }

    #[test]
    fn csv_dump() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        let m = build_mesh(&c, 0.1, 8, 4, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        m.write_csv(dir.path()).unwrap();
        let nodes = std::fs::read_to_string(dir.path().join("nodes.csv")).unwrap();
        assert_eq!(nodes.lines().count(), m.node_count() + 1);
        let tris = std::fs::read_to_string(dir.path().join("triangles.csv")).unwrap();
        assert!(tris.lines().nth(1).unwrap().ends_with("INTERIOR"));
        assert!(tris.lines().last().unwrap().ends_with("LAYER"));
    }

    #[test]
    fn single_precision_mesh() {
        let c = super::BoundaryCurve::<f32>::circle(1.0).unwrap();
        let m = build_mesh(&c, 0.1, 32, 4, 6).unwrap();
        assert!((m.area() - std::f32::consts::PI * 1.21).abs() < 0.05);
    }
}
