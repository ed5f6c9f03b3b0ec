//! Numerical laboratory for the principal eigenvalue of a domain wrapped in a
//! thin, poorly conducting coating.
//!
//! The coating `Σ_ε` of thickness `ε` around `Ω` has conductivity `σ_ε = αε`.
//! As `ε → 0` the principal eigenvalue `λ₁(ε)` tends to the principal Robin
//! eigenvalue `μ₁` of `Ω` with parameter `α`. The crate computes both sides
//! (radially symmetric 1D reductions and 2D P1 finite elements), the
//! curvature-weighted first-order correction, and the intermediate estimates
//! of the limit argument, and sweeps `ε` to compare measured slopes against
//! the predicted constant.
//!
//! Numerical modules are generic over [`Real`] (`f32`/`f64`); the aliases
//! below fix the scalar to `f64`, which the harness and CLI use.

pub mod assembly;
pub mod asymptotics;
pub mod cholesky;
pub mod diagnostics;
pub mod eigensolver;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod mesh;
pub mod quadrature;
pub mod radial;
pub mod roots;
pub mod scalar;
pub mod sparse;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

pub type BoundaryCurve = geometry::BoundaryCurve<f64>;
pub type LayerChart = geometry::LayerChart<f64>;
pub type Mesh2D = mesh::Mesh2D<f64>;
pub type SparseSymmetric = sparse::SparseSymmetric<f64>;
pub type EigenPair = eigensolver::EigenPair<f64>;
pub type RadialProblem = radial::RadialProblem<f64>;
pub type RadialGrid = radial::RadialGrid<f64>;
pub type RadialEigenPair = radial::RadialEigenPair<f64>;
pub type RobinSolution = asymptotics::RobinSolution<f64>;
pub type TwoPhaseSolution = assembly::TwoPhaseSolution<f64>;
pub type DiagnosticsReport = diagnostics::DiagnosticsReport<f64>;
