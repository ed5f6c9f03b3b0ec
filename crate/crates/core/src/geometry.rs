//! Closed interface curves and the tubular chart of the coating layer.
//!
//! A [`BoundaryCurve`] is a smooth, simple, positively oriented closed curve
//! `p: [0, 2π) → ℝ²`. Derivatives are analytic for every supported shape.
//! The outward unit normal is `ν = (y', −x') / |p'|` and the signed
//! curvature `κ = (p' × p'') / |p'|³` is positive on convex arcs, so a circle
//! of radius `R` has `κ = 1/R`.
//!
//! A [`LayerChart`] parametrizes the coating `{p(t) + τ ν(t) : 0 < τ < ε}`.
//! Its exact volume element is `|p'(t)| (1 + κ(t) τ)`: the layer grows away
//! from the enclosed region, so on a convex arc the offset curve is longer
//! than the interface.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::scalar::{cross, norm, Real, Vec2};

const SAMPLES: usize = 2048;

/// Curve description as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CurveSpec {
    Circle {
        #[serde(rename = "R", alias = "r")]
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// Star-shaped curve `ρ(t) (cos t, sin t)` with
    /// `ρ(t) = rho0 + Σ_k cos_coeffs[k-1] cos(kt) + sin_coeffs[k-1] sin(kt)`.
    Fourier {
        rho0: f64,
        #[serde(default)]
        cos_coeffs: Vec<f64>,
        #[serde(default)]
        sin_coeffs: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Shape<T> {
    Circle { radius: T },
    Ellipse { a: T, b: T },
    Fourier { rho0: T, cos: Vec<T>, sin: Vec<T> },
}

/// Smooth closed interface curve with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve<T> {
    shape: Shape<T>,
}

impl<T: Real> BoundaryCurve<T> {
    pub fn circle(radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::Config(format!("circle radius must be positive, got {radius}")));
        }
        Self::validated(Shape::Circle { radius })
    }

    pub fn ellipse(a: T, b: T) -> Result<Self> {
        if !(a > T::zero() && b > T::zero()) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Config(format!("ellipse semi-axes must be positive, got ({a}, {b})")));
        }
        Self::validated(Shape::Ellipse { a, b })
    }

    /// Star-shaped curve from a Fourier radial profile; `ρ` must stay positive.
    pub fn fourier(rho0: T, cos: Vec<T>, sin: Vec<T>) -> Result<Self> {
        let curve = Self { shape: Shape::Fourier { rho0, cos, sin } };
        for i in 0..SAMPLES {
            let t = sample_param::<T>(i, SAMPLES);
            let (rho, _, _) = curve.radial_profile(t);
            if !(rho > T::zero()) || !rho.is_finite() {
                return Err(Error::Config(format!(
                    "fourier profile must be positive (rho({t}) = {rho})"
                )));
            }
        }
        Self::validated(curve.shape)
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Self> {
        match spec {
            CurveSpec::Circle { radius } => Self::circle(T::lit(*radius)),
            CurveSpec::Ellipse { a, b } => Self::ellipse(T::lit(*a), T::lit(*b)),
            CurveSpec::Fourier { rho0, cos_coeffs, sin_coeffs } => Self::fourier(
                T::lit(*rho0),
                cos_coeffs.iter().map(|&c| T::lit(c)).collect(),
                sin_coeffs.iter().map(|&c| T::lit(c)).collect(),
            ),
        }
    }

    fn validated(shape: Shape<T>) -> Result<Self> {
        let curve = Self { shape };
        for i in 0..SAMPLES {
            let t = sample_param::<T>(i, SAMPLES);
            let speed = norm(curve.derivative(t));
            if !(speed > T::zero()) || !speed.is_finite() {
                return Err(Error::Geometry(format!("curve is not regular at t = {t}")));
            }
        }
        if !(curve.signed_area() > T::zero()) {
            return Err(Error::Geometry("curve must be positively oriented".into()));
        }
        Ok(curve)
    }

    /// `(ρ, ρ', ρ'')` of a star-shaped representation, when the shape has one.
    fn radial_profile(&self, t: T) -> (T, T, T) {
        match &self.shape {
            Shape::Fourier { rho0, cos, sin } => {
                let (mut r, mut r1, mut r2) = (*rho0, T::zero(), T::zero());
                for (k, &c) in cos.iter().enumerate() {
                    let kf = T::from_usize_lossy(k + 1);
                    let (s, co) = (kf * t).sin_cos();
                    r += c * co;
                    r1 -= c * kf * s;
                    r2 -= c * kf * kf * co;
                }
                for (k, &c) in sin.iter().enumerate() {
                    let kf = T::from_usize_lossy(k + 1);
                    let (s, co) = (kf * t).sin_cos();
                    r += c * s;
                    r1 += c * kf * co;
                    r2 -= c * kf * kf * s;
                }
                (r, r1, r2)
            }
            Shape::Circle { radius } => (*radius, T::zero(), T::zero()),
            Shape::Ellipse { .. } => unreachable!("ellipse uses its own parametrization"),
        }
    }

    pub fn point(&self, t: T) -> Vec2<T> {
        let (s, c) = t.sin_cos();
        match &self.shape {
            Shape::Circle { radius } => [*radius * c, *radius * s],
            Shape::Ellipse { a, b } => [*a * c, *b * s],
            Shape::Fourier { .. } => {
                let (r, _, _) = self.radial_profile(t);
                [r * c, r * s]
            }
        }
    }

    pub fn derivative(&self, t: T) -> Vec2<T> {
        let (s, c) = t.sin_cos();
        match &self.shape {
            Shape::Circle { radius } => [-*radius * s, *radius * c],
            Shape::Ellipse { a, b } => [-*a * s, *b * c],
            Shape::Fourier { .. } => {
                let (r, r1, _) = self.radial_profile(t);
                [r1 * c - r * s, r1 * s + r * c]
            }
        }
    }

    pub fn second_derivative(&self, t: T) -> Vec2<T> {
        let (s, c) = t.sin_cos();
        match &self.shape {
            Shape::Circle { radius } => [-*radius * c, -*radius * s],
            Shape::Ellipse { a, b } => [-*a * c, -*b * s],
            Shape::Fourier { .. } => {
                let (r, r1, r2) = self.radial_profile(t);
                let two = T::lit(2.0);
                [r2 * c - two * r1 * s - r * c, r2 * s + two * r1 * c - r * s]
            }
        }
    }

    /// Outward unit normal.
    pub fn normal(&self, t: T) -> Vec2<T> {
        let d = self.derivative(t);
        let len = norm(d);
        [d[1] / len, -d[0] / len]
    }

    /// Unit tangent in the direction of increasing `t`.
    pub fn tangent(&self, t: T) -> Vec2<T> {
        let d = self.derivative(t);
        let len = norm(d);
        [d[0] / len, d[1] / len]
    }

    /// Signed curvature, positive where the curve bends toward the enclosed region.
    pub fn curvature(&self, t: T) -> Result<T> {
        let d1 = self.derivative(t);
        let d2 = self.second_derivative(t);
        let speed = norm(d1);
        let k = cross(d1, d2) / (speed * speed * speed);
        if !k.is_finite() {
            return Err(Error::Numerical(format!("non-finite curvature at t = {t}")));
        }
        Ok(k)
    }

    /// Arclength density `|p'(t)|`.
    pub fn surface_measure(&self, t: T) -> T {
        norm(self.derivative(t))
    }

    /// Arclength of the parameter interval `[t0, t1]`.
    pub fn arc_length(&self, t0: T, t1: T) -> T {
        let scale = (t1 - t0).abs() * self.surface_measure(t0);
        let tol = (T::epsilon() * T::lit(64.0)).max(T::lit(1e-14)) * (scale + T::one());
        integrate_adaptive(|t| self.surface_measure(t), t0, t1, tol)
    }

    pub fn length(&self) -> T {
        self.arc_length(T::zero(), T::TAU())
    }

    /// Enclosed area, `½∮ p × p' dt`. Positive for counterclockwise curves.
    pub fn signed_area(&self) -> T {
        let n = 512;
        let h = T::TAU() / T::from_usize_lossy(n);
        (0..n)
            .map(|i| {
                let t = h * T::from_usize_lossy(i);
                cross(self.point(t), self.derivative(t))
            })
            .sum::<T>()
            * h
            * T::lit(0.5)
    }

    /// Largest `|κ|` over a dense parameter sample.
    pub fn max_abs_curvature(&self) -> T {
        (0..SAMPLES)
            .filter_map(|i| self.curvature(sample_param(i, SAMPLES)).ok())
            .fold(T::zero(), |m, k| m.max(k.abs()))
    }

    /// True when every ray from the origin meets the curve once.
    pub fn is_star_shaped(&self) -> bool {
        (0..SAMPLES).all(|i| {
            let t = sample_param(i, SAMPLES);
            cross(self.point(t), self.derivative(t)) > T::zero()
        })
    }
}

fn sample_param<T: Real>(i: usize, n: usize) -> T {
    T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(n)
}

/// Tubular coordinates `(t, τ) ↦ p(t) + τ ν(t)` of a layer of thickness `ε`.
#[derive(Debug, Clone)]
pub struct LayerChart<T> {
    curve: BoundaryCurve<T>,
    thickness: T,
}

impl<T: Real> LayerChart<T> {
    /// Requires `ε · max|κ| < 1`, which keeps the offset map injective.
    pub fn new(curve: BoundaryCurve<T>, thickness: T) -> Result<Self> {
        if !(thickness > T::zero()) || !thickness.is_finite() {
            return Err(Error::Domain(format!("layer thickness must be positive, got {thickness}")));
        }
        let kmax = curve.max_abs_curvature();
        if thickness * kmax >= T::one() {
            return Err(Error::Geometry(format!(
                "layer too thick: eps = {thickness} but max |curvature| = {kmax}"
            )));
        }
        Ok(Self { curve, thickness })
    }

    pub fn curve(&self) -> &BoundaryCurve<T> {
        &self.curve
    }

    pub fn thickness(&self) -> T {
        self.thickness
    }

    fn check_depth(&self, depth: T) -> Result<()> {
        if depth < T::zero() || depth > self.thickness || !depth.is_finite() {
            return Err(Error::Domain(format!(
                "depth {depth} outside [0, {}]",
                self.thickness
            )));
        }
        Ok(())
    }

    /// Volume element `|p'(t)| (1 + κ(t) τ)` of the chart.
    pub fn layer_jacobian(&self, t: T, depth: T) -> Result<T> {
        self.check_depth(depth)?;
        let stretch = T::one() + self.curve.curvature(t)? * depth;
        if !(stretch > T::zero()) {
            return Err(Error::Geometry(format!(
                "layer too thick at t = {t}: 1 + kappa * tau = {stretch}"
            )));
        }
        Ok(self.curve.surface_measure(t) * stretch)
    }

    pub fn offset_point(&self, t: T, depth: T) -> Result<Vec2<T>> {
        self.check_depth(depth)?;
        Ok(self.offset_point_unchecked(t, depth))
    }

    /// Offset map without the depth range check (negative depths allowed).
    pub fn offset_point_unchecked(&self, t: T, depth: T) -> Vec2<T> {
        let p = self.curve.point(t);
        let n = self.curve.normal(t);
        [p[0] + depth * n[0], p[1] + depth * n[1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    type BoundaryCurve = super::BoundaryCurve<f64>;
    type LayerChart = super::LayerChart<f64>;

    fn ellipse21() -> BoundaryCurve {
        BoundaryCurve::ellipse(2.0, 1.0).unwrap()
    }

    #[test]
    fn circle_curvature_and_measure() {
        let c1 = BoundaryCurve::circle(1.0).unwrap();
        let c2 = BoundaryCurve::circle(2.0).unwrap();
        let c3 = BoundaryCurve::circle(3.0).unwrap();
        for &t in &[0.0, 0.3, 2.0, 5.9] {
            assert!((c1.curvature(t).unwrap() - 1.0).abs() < 1e-14);
            assert!((c2.curvature(t).unwrap() - 0.5).abs() < 1e-14);
            assert!((c3.surface_measure(t) - 3.0).abs() < 1e-14);
        }
        assert!((c1.length() - TAU).abs() < 1e-12);
        assert!((c3.length() - 6.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn ellipse_vertex_curvature_matches_closed_form() {
        // kappa(t) = ab / (a^2 sin^2 t + b^2 cos^2 t)^{3/2}; at t = 0 this is a / b^2
        let e = ellipse21();
        assert!((e.curvature(0.0).unwrap() - 2.0).abs() < 1e-14);
        for &t in &[0.4, 1.3, 3.0] {
            let (s, c) = f64::sin_cos(t);
            let exact = 2.0 / (4.0 * s * s + c * c).powf(1.5);
            assert!((e.curvature(t).unwrap() - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn ellipse_curvature_matches_tangent_angle_rate() {
        let e = ellipse21();
        let h = 1e-5;
        for &t in &[0.0, 0.7, 2.2] {
            let angle = |s: f64| {
                let d = e.derivative(s);
                d[1].atan2(d[0])
            };
            let dtheta = (angle(t + h) - angle(t - h)) / (2.0 * h);
            let k_fd = dtheta / e.surface_measure(t);
            assert!((e.curvature(t).unwrap() - k_fd).abs() < 1e-8);
        }
    }

    #[test]
    fn normal_is_unit_and_orthogonal() {
        let curves = [
            ellipse21(),
            BoundaryCurve::fourier(1.0, vec![0.1, 0.05], vec![0.0, 0.08]).unwrap(),
        ];
        for curve in &curves {
            for i in 0..97 {
                let t = TAU * i as f64 / 97.0;
                let n = curve.normal(t);
                assert!((norm(n) - 1.0).abs() < 1e-12);
                assert!(crate::scalar::dot(n, curve.derivative(t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn outward_offset_increases_enclosed_area() {
        let e = ellipse21();
        let chart = LayerChart::new(e.clone(), 0.05).unwrap();
        let n = 2000;
        let h = TAU / n as f64;
        let area: f64 = (0..n)
            .map(|i| {
                let t = i as f64 * h;
                let a = chart.offset_point(t, 0.05).unwrap();
                let b = chart.offset_point(t + h, 0.05).unwrap();
                cross(a, b)
            })
            .sum::<f64>()
            * 0.5;
        assert!(area > e.signed_area());
    }

    #[test]
    fn layer_jacobian_examples() {
        let c = BoundaryCurve::circle(1.0).unwrap();
        let chart = LayerChart::new(c, 0.2).unwrap();
        // offset circle of radius 1.1: arclength density 1.1
        assert!((chart.layer_jacobian(0.7, 0.1).unwrap() - 1.1).abs() < 1e-15);
        let e = LayerChart::new(ellipse21(), 0.1).unwrap();
        assert!((e.layer_jacobian(0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        // sqrt(G0)(0) = b = 1, kappa(0) = 2
        assert!((e.layer_jacobian(0.0, 0.05).unwrap() - 1.1).abs() < 1e-14);
        assert!(matches!(e.layer_jacobian(0.0, 0.2), Err(Error::Domain(_))));
        assert!(matches!(e.layer_jacobian(0.0, -0.01), Err(Error::Domain(_))));
    }

    #[test]
    fn too_thick_layer_is_rejected() {
        assert!(matches!(LayerChart::new(ellipse21(), 0.6), Err(Error::Geometry(_))));
    }

    #[test]
    fn offset_point_examples() {
        let c = LayerChart::new(BoundaryCurve::circle(1.0).unwrap(), 0.3).unwrap();
        let p = c.offset_point(0.0, 0.2).unwrap();
        assert!((p[0] - 1.2).abs() < 1e-15 && p[1].abs() < 1e-15);
        let e = LayerChart::new(ellipse21(), 0.2).unwrap();
        let q = e.offset_point(PI / 2.0, 0.1).unwrap();
        assert!(q[0].abs() < 1e-15 && (q[1] - 1.1).abs() < 1e-15);
        let r = e.offset_point(1.0, 0.0).unwrap();
        assert_eq!(r, e.curve().point(1.0));
        assert!(e.offset_point(1.0, 0.3).is_err());
    }

    #[test]
    fn bad_inputs() {
        assert!(BoundaryCurve::circle(0.0).is_err());
        assert!(BoundaryCurve::ellipse(1.0, -1.0).is_err());
        assert!(BoundaryCurve::fourier(0.5, vec![0.7], vec![]).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"kind": "circle", "R": 1.5}"#;
        let spec: CurveSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec, CurveSpec::Circle { radius: 1.5 });
        let c = BoundaryCurve::from_spec(&spec).unwrap();
        assert!((c.curvature(1.0).unwrap() - 1.0 / 1.5).abs() < 1e-14);
        let f: CurveSpec =
            serde_json::from_str(r#"{"kind":"fourier","rho0":1.0,"cos_coeffs":[0.1]}"#).unwrap();
        assert!(BoundaryCurve::from_spec(&f).unwrap().is_star_shaped());
    }

    #[test]
    fn works_in_single_precision() {
        let c = super::BoundaryCurve::<f32>::ellipse(2.0, 1.0).unwrap();
        assert!((c.curvature(0.0).unwrap() - 2.0).abs() < 1e-5);
        assert!((c.length() - 9.688_448).abs() < 1e-4);
    }
}
