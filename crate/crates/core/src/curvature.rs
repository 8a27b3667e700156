//! Curvature of plane curves in the four classical presentations, sphere
//! profiles, and the curvature scaling under `L^{aa}_ε`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Curvature, SpherePoint, Vec2};
use crate::models::NormModel;
use crate::numeric::{angle_grid, TAU};
use crate::semigroup::make_l_ab;

/// Symmetric 2×2 second-derivative matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hessian {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Hessian {
    pub fn diag(xx: f64, yy: f64) -> Self {
        Self { xx, xy: 0.0, yy }
    }
    pub fn scaled(self, t: f64) -> Self {
        Self {
            xx: self.xx * t,
            xy: self.xy * t,
            yy: self.yy * t,
        }
    }
}

/// Curvature of the graph of `f` where `f' = fp`, `f'' = fpp`.
pub fn curvature_graph(fp: f64, fpp: f64) -> f64 {
    fpp.abs() / (1.0 + fp * fp).powf(1.5)
}

/// Curvature of the level set `f = c` through a point with the given
/// gradient and Hessian of `f`.
pub fn curvature_implicit(grad: Vec2, h: Hessian) -> Result<f64> {
    let g = grad.norm2();
    if g < 1e-12 {
        return Err(Error::SingularPoint);
    }
    let (fx, fy) = (grad.x1, grad.x2);
    let num = h.xx * fy * fy - 2.0 * h.xy * fx * fy + h.yy * fx * fx;
    Ok(num.abs() / (g * g * g))
}

/// Curvature of a parametric curve from its first and second derivatives.
pub fn curvature_parametric(d1: Vec2, d2: Vec2) -> Result<f64> {
    let s = d1.norm2();
    if s < 1e-12 {
        return Err(Error::SingularPoint);
    }
    // |d1 × d2| is the stable form of sqrt(|d1|²|d2|² − ⟨d1,d2⟩²).
    Ok(d1.cross(d2).abs() / (s * s * s))
}

/// Curvature of the polar curve `r = g(θ)`.
pub fn curvature_polar(g: f64, gp: f64, gpp: f64) -> f64 {
    (2.0 * gp * gp + g * g - g * gpp).abs() / (g * g + gp * gp).powf(1.5)
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureProfile {
    pub model: String,
    pub thetas: Vec<f64>,
    pub kappas: Vec<Curvature>,
    /// Smallest one-sided curvature on the grid.
    pub kappa_min: f64,
    /// Largest one-sided curvature on the grid (`inf` when any point is flagged).
    pub kappa_max: f64,
}

impl CurvatureProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,kappa\n");
        for (t, k) in self.thetas.iter().zip(&self.kappas) {
            match k {
                Curvature::Finite(v) => out.push_str(&format!("{t},{v}\n")),
                Curvature::Infinite => out.push_str(&format!("{t},inf\n")),
            }
        }
        out
    }
}

/// Curvature of the unit sphere on an `n`-point angle grid.
pub fn profile(model: &NormModel, n: usize) -> CurvatureProfile {
    let thetas = angle_grid(n);
    let pts: Vec<SpherePoint> = thetas.par_iter().map(|&t| model.sphere_point(t)).collect();
    let kappa_min = pts.iter().map(|p| p.kappa_lo()).fold(f64::INFINITY, f64::min);
    let kappa_max = pts.iter().map(|p| p.kappa_hi()).fold(0.0, f64::max);
    CurvatureProfile {
        model: model.name(),
        kappas: pts.iter().map(|p| p.curvature).collect(),
        thetas,
        kappa_min,
        kappa_max,
    }
}

/// Relative tolerance for [`scale_law_check`].
pub const SCALE_LAW_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleLawCheck {
    pub kappa_before: f64,
    pub kappa_after: f64,
    pub ratio: f64,
    /// `(1 − ε)^{-2}`.
    pub expected: f64,
    pub holds: bool,
}

/// Numeric curvature at `t` of the curve `s ↦ map(s)` from five-point
/// central differences with step `h`.
pub fn numeric_curvature<F: Fn(f64) -> Vec2>(map: F, t: f64, h: f64) -> Result<f64> {
    let (m2, m1, z, p1, p2) = (map(t - 2.0 * h), map(t - h), map(t), map(t + h), map(t + 2.0 * h));
    let d1 = (m2 - p2 + (p1 - m1) * 8.0) * (1.0 / (12.0 * h));
    let d2 = ((p1 + m1) * 16.0 - (p2 + m2) - z * 30.0) * (1.0 / (12.0 * h * h));
    curvature_parametric(d1, d2)
}

/// Compares the curvature of `L^{aa}_ε[S]` at `a`, measured numerically on
/// the mapped sphere, with `(1 − ε)^{-2} κ(S, a)`.
pub fn scale_law_check(model: &NormModel, a: &SpherePoint, eps: f64) -> Result<ScaleLawCheck> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::BadEps(eps));
    }
    a.require_smooth()?;
    let kappa_before = match a.curvature {
        Curvature::Finite(k) => k,
        Curvature::Infinite => return Err(Error::NonSmoothPoint { theta: a.theta }),
    };
    let l = make_l_ab(model, a, a, eps)?;
    let kappa_after = numeric_curvature(|s| l.apply(model.radial_point(s)), a.theta, TAU / 8192.0)?;
    let expected = 1.0 / ((1.0 - eps) * (1.0 - eps));
    let ratio = kappa_after / kappa_before;
    let holds = (kappa_after - expected * kappa_before).abs() <= SCALE_LAW_TOL * expected * kappa_before;
    Ok(ScaleLawCheck {
        kappa_before,
        kappa_after,
        ratio,
        expected,
        holds,
    })
}

/// Sampled local inclusion `A ∩ U ⊂ B ∩ U` for directions within `window`
/// radians of `theta`: the radial function of `a` never exceeds that of `b`.
pub fn local_inclusion(a: &NormModel, b: &NormModel, theta: f64, window: f64) -> bool {
    (0..=200).all(|k| {
        let t = theta - window + 2.0 * window * k as f64 / 200.0;
        let u = Vec2::from_angle(t);
        a.gauge(u) >= b.gauge(u) * (1.0 - 1e-12)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::FourierTerm;
    use crate::tangency::Ellipse;
    use std::f64::consts::PI;

    #[test]
    fn graph_formula() {
        assert_eq!(curvature_graph(0.0, 2.0), 2.0);
        assert_eq!(curvature_graph(0.0, 1.0), 1.0);
        assert!((curvature_graph(1.0, 1.0) - 2f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn implicit_formula() {
        let k = curvature_implicit(Vec2::new(2.0, 0.0), Hessian::diag(2.0, 2.0)).unwrap();
        assert!((k - 1.0).abs() < 1e-15);
        let k = curvature_implicit(Vec2::new(1.0, 0.0), Hessian::diag(0.5, 2.0)).unwrap();
        assert!((k - 2.0).abs() < 1e-15);
        // 5x² + 4y² − 8xy at (1,1): gradient (2, 0); near the point x ≈ 1 − 2(y − 1)².
        let h = Hessian { xx: 10.0, xy: -8.0, yy: 8.0 };
        let k = curvature_implicit(Vec2::new(2.0, 0.0), h).unwrap();
        assert!((k - 4.0).abs() < 1e-15);
        assert_eq!(
            curvature_implicit(Vec2::ZERO, h),
            Err(Error::SingularPoint)
        );
    }

    #[test]
    fn parametric_formula() {
        let k = curvature_parametric(Vec2::new(1.0, 0.0), Vec2::new(0.0, 2.0)).unwrap();
        assert!((k - 2.0).abs() < 1e-15);
        let k = curvature_parametric(Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)).unwrap();
        assert!((k - curvature_graph(1.0, 1.0)).abs() < 1e-15);
        // Graph of f with f'(0) = m, f''(0) = 1, after x ↦ (1−ε)x along the tangent.
        let (m, eps) = (1.0, 0.5);
        let before = curvature_parametric(Vec2::new(1.0, m), Vec2::new(0.0, 1.0)).unwrap();
        let after =
            curvature_parametric(Vec2::new(1.0 - eps, m * (1.0 - eps)), Vec2::new(0.0, 1.0)).unwrap();
        assert!((after / before - 4.0).abs() < 1e-12);
    }

    #[test]
    fn polar_formula() {
        assert_eq!(curvature_polar(1.0, 0.0, 0.0), 1.0);
        let k = curvature_polar(18.0 / 17.0, 0.0, -16.0 / 17.0);
        assert!((k - 289.0 / 162.0).abs() < 1e-14);
        assert!((curvature_polar(3.0, 0.0, 0.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn profiles() {
        let e = profile(&NormModel::euclidean(), 64);
        assert!((e.kappa_min - 1.0).abs() < 1e-12 && (e.kappa_max - 1.0).abs() < 1e-12);
        let l4 = profile(&NormModel::lp(4.0).unwrap(), 4096);
        assert!(l4.kappa_min < 1e-12);
        let csv = e.to_csv();
        assert_eq!(csv.lines().count(), 65);
    }

    #[test]
    fn ellipse_major_end_curvature() {
        let m = NormModel::ellipse_intersection(vec![Ellipse::from_semi_axes(2.0, 1.0)]).unwrap();
        let sp = m.sphere_point(0.0);
        assert!((sp.point - Vec2::new(2.0, 0.0)).norm2() < 1e-14);
        assert!((sp.curvature.value() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polar_and_parametric_agree() {
        let m = NormModel::polar(vec![FourierTerm::constant(1.0), FourierTerm::cos(2, 0.1)]).unwrap();
        for t in angle_grid(256) {
            let analytic = m.sphere_point(t).curvature.value();
            let numeric = numeric_curvature(|s| m.radial_point(s), t, 1e-3).unwrap();
            assert!((analytic - numeric).abs() < 1e-6, "θ={t}: {analytic} vs {numeric}");
        }
    }

    #[test]
    fn scale_law_euclidean() {
        let e = NormModel::euclidean();
        let a = e.sphere_point(PI / 2.0);
        let c = scale_law_check(&e, &a, 0.5).unwrap();
        assert!(c.holds, "{c:?}");
        assert!((c.ratio - 4.0).abs() < 1e-4);
        let c0 = scale_law_check(&e, &a, 0.0).unwrap();
        assert!((c0.ratio - 1.0).abs() < 1e-6);
    }

    #[test]
    fn higher_curvature_body_sits_inside() {
        // Ellipse with semi-axes (1, 1/2) has curvature 4 at e₁; the disc has 1.
        let thin = NormModel::ellipse_intersection(vec![Ellipse::from_semi_axes(1.0, 0.5)]).unwrap();
        let disc = NormModel::euclidean();
        assert!(local_inclusion(&thin, &disc, 0.0, 1e-2));
        assert!(!local_inclusion(&disc, &thin, 0.0, 1e-2));
    }
}
