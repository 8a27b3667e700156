//! Contractive automorphisms: the `L^{ab}_ε` family, the ellipse route
//! between an outer ellipse at `x` and an inner ellipse at `y`, transport
//! onto flat points, and orbit reports.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{LinearMap2, SpherePoint, Vec2};
use crate::models::{Family, NormModel};
use crate::numeric::{angle_grid, TAU};
use crate::tangency::{tangency_report, Ellipse};

/// Slack on `‖T‖ ≤ 1` accepted by [`certify`].
pub const CERTIFY_TOL: f64 = 1e-7;
/// Required accuracy of `T x = y` for orbit witnesses.
pub const HIT_TOL: f64 = 1e-9;
/// Half-width (in cache steps) of the flatness probe window.
const FLAT_WINDOW: i32 = 4;

/// Operator norms of `T` and `T⁻¹` with the contractivity verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionCertificate {
    #[serde(rename = "T")]
    pub t: LinearMap2,
    pub op_norm: f64,
    pub inv_norm: f64,
    pub is_contractive: bool,
    /// Contractive only thanks to the tolerance: `1 < ‖T‖ ≤ 1 + tol`.
    pub boundary: bool,
    pub witness_angle: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reachable {
    AllSphere,
    AllButSet(Vec<Vec2>),
    DenseCandidate,
    Restricted(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitWitness {
    pub y: Vec2,
    pub certificate: ContractionCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub x: SpherePoint,
    pub reachable: Reachable,
    pub witnesses: Vec<OrbitWitness>,
    /// Largest inverse norm among the witnesses, when any were found.
    pub bound_k: Option<f64>,
}

/// `a^⊥`: the gauge-one tangent with `(a, a^⊥, −a)` counterclockwise.
pub fn perp(a: &SpherePoint) -> Result<Vec2> {
    a.require_smooth()?;
    Ok(a.tangent)
}

/// The map with `a ↦ b` and `a^⊥ ↦ (1 − ε) b^⊥`.
pub fn make_l_ab(_model: &NormModel, a: &SpherePoint, b: &SpherePoint, eps: f64) -> Result<LinearMap2> {
    if eps == 1.0 {
        return Err(Error::Degenerate("eps = 1 collapses the tangent direction".into()));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::BadEps(eps));
    }
    let (ap, bp) = (perp(a)?, perp(b)?);
    let src = LinearMap2::from_columns(a.point, ap);
    let dst = LinearMap2::from_columns(b.point, bp * (1.0 - eps));
    Ok(dst.compose(&src.inverse()?))
}

/// Operator norms of `T` and its inverse; contractive iff `‖T‖ ≤ 1 + 1e-7`.
pub fn certify(model: &NormModel, t: &LinearMap2) -> Result<ContractionCertificate> {
    let inv = t.inverse()?;
    let op = model.operator_norm(t);
    let inv_norm = model.operator_norm(&inv).value;
    Ok(ContractionCertificate {
        t: *t,
        op_norm: op.value,
        inv_norm,
        is_contractive: op.value <= 1.0 + CERTIFY_TOL,
        boundary: op.value > 1.0 && op.value <= 1.0 + CERTIFY_TOL,
        witness_angle: op.witness_angle,
        tolerance: CERTIFY_TOL,
    })
}

fn hits(model: &NormModel, c: &ContractionCertificate, x: Vec2, y: Vec2) -> bool {
    c.is_contractive && model.gauge(c.t.apply(x) - y) <= HIT_TOL
}

/// Whether `y` sits in the relative interior of a segment of the sphere:
/// nine consecutive cache-spaced points on one supporting line, with zero
/// curvature on both sides.
pub fn is_flat(model: &NormModel, y: &SpherePoint) -> bool {
    if !y.smooth {
        return false;
    }
    let n = y.normal();
    let h = TAU / model.cache_points().len() as f64;
    (-FLAT_WINDOW..=FLAT_WINDOW).all(|k| {
        let t = y.theta + k as f64 * h;
        let p = model.radial_point(t);
        if (p - y.point).dot(n).abs() > 1e-9 {
            return false;
        }
        let sp = model.sphere_point(t);
        sp.smooth && sp.kappa_cw < 1e-12 && sp.kappa_ccw < 1e-12
    })
}

/// `T(c x + u) = c y + ε L u` for `u` in the kernel of `x*`, halving `ε`
/// from `eps` until `T` certifies as contractive.
pub fn flat_transport(model: &NormModel, x: &SpherePoint, y: &SpherePoint, eps: f64) -> Result<ContractionCertificate> {
    if !is_flat(model, y) {
        return Err(Error::NotFlat { theta: y.theta });
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::BadEps(eps));
    }
    let src = LinearMap2::from_columns(x.point, x.tangent);
    let src_inv = src.inverse()?;
    let mut e = eps;
    let mut last = None;
    for _ in 0..60 {
        let t = LinearMap2::from_columns(y.point, y.tangent * e).compose(&src_inv);
        let c = certify(model, &t)?;
        if hits(model, &c, x.point, y.point) {
            return Ok(c);
        }
        last = Some(c);
        e *= 0.5;
    }
    Err(Error::Degenerate(format!(
        "no contractive transport found (last norm {:?})",
        last.map(|c| c.op_norm)
    )))
}

/// A contractive `T` with `T x = y`, if the ellipse or flat-point route finds one.
pub fn orbit_map(model: &NormModel, x: &SpherePoint, y: &SpherePoint) -> Option<ContractionCertificate> {
    let outer = tangency_report(model, x).outer_ellipse;
    orbit_map_with_outer(model, x, outer.as_ref(), y)
}

/// [`orbit_map`] with the outer ellipse at `x` supplied by the caller, so
/// sweeps over many targets compute it once.
pub(crate) fn orbit_map_with_outer(
    model: &NormModel,
    x: &SpherePoint,
    outer: Option<&Ellipse>,
    y: &SpherePoint,
) -> Option<ContractionCertificate> {
    outer
        .and_then(|f| ellipse_route(model, x, f, y))
        .or_else(|| is_flat(model, y).then(|| flat_transport(model, x, y, 1.0).ok()).flatten())
}

fn ellipse_route(model: &NormModel, x: &SpherePoint, f: &Ellipse, y: &SpherePoint) -> Option<ContractionCertificate> {
    let e = tangency_report(model, y).inner_ellipse?;
    let (f_half, _) = f.sqrt_forms();
    let (e_half, e_inv_half) = e.sqrt_forms();
    let u = f_half.apply(x.point);
    let v = e_half.apply(y.point);
    let q = LinearMap2::rotation(v.angle() - u.angle());
    let t = e_inv_half.compose(&q).compose(&f_half);
    let c = certify(model, &t).ok()?;
    hits(model, &c, x.point, y.point).then_some(c)
}

/// Orbit of `x` in `ℓ₁²`: the whole sphere from `±e_i`, everything but
/// `±e_i` from any other point.
pub fn l1_orbit(model: &NormModel, x: &SpherePoint) -> Result<OrbitReport> {
    if !matches!(model.family(), Family::Lp { p } if *p == 1.0) {
        return Err(Error::WrongModel { expected: "l1" });
    }
    let swap = LinearMap2::new(0.0, 1.0, 1.0, 0.0);
    let mut witnesses = Vec::new();
    let mut push = |c: ContractionCertificate| {
        let y = c.t.apply(x.point);
        witnesses.push(OrbitWitness { y, certificate: c });
    };
    push(certify(model, &swap)?);
    let at_vertex = x.point.x1.abs() < 1e-12 || x.point.x2.abs() < 1e-12;
    let reachable = if at_vertex {
        let mid = model.sphere_point_at(Vec2::new(0.5, 0.5));
        push(flat_transport(model, x, &mid, 1.0)?);
        Reachable::AllSphere
    } else {
        if (x.point - Vec2::new(0.5, 0.5)).norm2() < 1e-12 {
            push(certify(model, &figure_maps().0)?);
        }
        Reachable::AllButSet(vec![Vec2::E1, Vec2::E2, -Vec2::E1, -Vec2::E2])
    };
    let bound_k = witnesses.iter().map(|w| w.certificate.inv_norm).reduce(f64::max);
    Ok(OrbitReport {
        x: *x,
        reachable,
        witnesses,
        bound_k,
    })
}

/// `T₁ = ½[[1,0],[1,2]]` and `T₂ = ⅓[[3,1],[0,2]]`, which move `(½,½)` and
/// `(¼,¾)` into each other inside `ℓ₁²`.
pub fn figure_maps() -> (LinearMap2, LinearMap2) {
    (
        LinearMap2::new(0.5, 0.0, 0.5, 1.0),
        LinearMap2::new(1.0, 1.0 / 3.0, 0.0, 2.0 / 3.0),
    )
}

/// Orbit of `x` sampled on an `n`-point target grid.
pub fn orbit_report(model: &NormModel, x: &SpherePoint, n: usize) -> OrbitReport {
    let outer = tangency_report(model, x).outer_ellipse;
    let results: Vec<(Vec2, Option<ContractionCertificate>)> = angle_grid(n)
        .par_iter()
        .map(|&t| {
            let y = model.sphere_point(t);
            (y.point, orbit_map_with_outer(model, x, outer.as_ref(), &y))
        })
        .collect();
    let missed: Vec<Vec2> = results.iter().filter(|r| r.1.is_none()).map(|r| r.0).collect();
    let witnesses: Vec<OrbitWitness> = results
        .into_iter()
        .filter_map(|(y, c)| c.map(|certificate| OrbitWitness { y, certificate }))
        .collect();
    let reachable = if missed.is_empty() {
        Reachable::AllSphere
    } else if missed.len() <= 8 {
        Reachable::AllButSet(missed)
    } else if missed.len() * 100 <= n {
        Reachable::DenseCandidate
    } else {
        Reachable::Restricted(format!("{} of {n} sampled targets unreachable", missed.len()))
    };
    let bound_k = witnesses.iter().map(|w| w.certificate.inv_norm).reduce(f64::max);
    OrbitReport {
        x: *x,
        reachable,
        witnesses,
        bound_k,
    }
}

/// Squared ratio of the largest to smallest Euclidean radius of the sphere:
/// the distortion between the gauge and Euclidean operator norms.
pub fn equivalence_constant(model: &NormModel) -> f64 {
    let (lo, hi) = model
        .cache_points()
        .iter()
        .map(|p| p.norm2())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    (hi / lo).powi(2)
}

/// Heuristic lower bound `max(1, sqrt(κ(y) / (c κ(x))))` on `‖T⁻¹‖` over
/// contractive `T` with `T x = y`.
pub fn inv_norm_lower_bound(model: &NormModel, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    let (kx, ky) = (x.curvature.value(), y.curvature.value());
    if !kx.is_finite() {
        return Err(Error::NonSmoothPoint { theta: x.theta });
    }
    if !ky.is_finite() {
        return Err(Error::NonSmoothPoint { theta: y.theta });
    }
    if !(kx > 0.0) || !(ky > 0.0) {
        return Err(Error::Degenerate("curvature must be positive at both points".into()));
    }
    let c = equivalence_constant(model);
    Ok((ky / (c * kx)).sqrt().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn perp_examples() {
        let e = NormModel::euclidean();
        let t = perp(&e.sphere_point(0.0)).unwrap();
        assert!((t - Vec2::E2).norm2() < 1e-12);
        let l1 = NormModel::lp(1.0).unwrap();
        let t = perp(&l1.sphere_point_at(Vec2::new(0.5, 0.5))).unwrap();
        assert!((t - Vec2::new(-0.5, 0.5)).norm2() < 1e-12);
        assert!(perp(&l1.sphere_point(0.0)).is_err());
        let gp = crate::gallery::grandpa_pig();
        let a = gp.sphere_point(0.0);
        assert!(a.support.dot(perp(&a).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn l_ab_examples() {
        let e = NormModel::euclidean();
        let (a, b) = (e.sphere_point(0.0), e.sphere_point(PI / 2.0));
        let id = make_l_ab(&e, &a, &a, 0.0).unwrap();
        assert!(id.max_abs_diff(&LinearMap2::IDENTITY) < 1e-15);
        let rot = make_l_ab(&e, &a, &b, 0.0).unwrap();
        assert!(rot.max_abs_diff(&LinearMap2::rotation(PI / 2.0)) < 1e-12);
        assert!((certify(&e, &rot).unwrap().op_norm - 1.0).abs() < 1e-9);
        let d = make_l_ab(&e, &a, &a, 0.3).unwrap();
        assert!(d.max_abs_diff(&LinearMap2::diag(1.0, 0.7)) < 1e-15);
        assert!(matches!(make_l_ab(&e, &a, &a, 1.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn l_ab_factorizes() {
        let m = NormModel::lp(3.0).unwrap();
        let (a, b) = (m.sphere_point(0.3), m.sphere_point(1.9));
        let eps = 0.4;
        let full = make_l_ab(&m, &a, &b, eps).unwrap();
        let ab = make_l_ab(&m, &a, &b, 0.0).unwrap();
        let left = make_l_ab(&m, &b, &b, eps).unwrap().compose(&ab);
        let right = ab.compose(&make_l_ab(&m, &a, &a, eps).unwrap());
        assert!(full.max_abs_diff(&left) < 1e-12);
        assert!(full.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn figure_maps_are_contractive() {
        let l1 = NormModel::lp(1.0).unwrap();
        let (t1, t2) = figure_maps();
        assert_eq!(t1.apply(Vec2::new(0.5, 0.5)), Vec2::new(0.25, 0.75));
        assert_eq!(t2.apply(Vec2::new(0.25, 0.75)), Vec2::new(0.5, 0.5));
        assert!(certify(&l1, &t1).unwrap().is_contractive);
        assert!(certify(&l1, &t2).unwrap().is_contractive);
        let c = certify(&l1, &LinearMap2::diag(2.0, 2.0)).unwrap();
        assert!(!c.is_contractive && (c.op_norm - 2.0).abs() < 1e-12);
        assert!(matches!(certify(&l1, &LinearMap2::diag(1.0, 0.0)), Err(Error::Singular { .. })));
    }

    #[test]
    fn euclidean_orbit_is_rotation() {
        let e = NormModel::euclidean();
        let c = orbit_map(&e, &e.sphere_point(0.2), &e.sphere_point(2.5)).unwrap();
        assert!((c.inv_norm - 1.0).abs() < 1e-6);
        assert!((c.t.det() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn flat_points() {
        let l1 = NormModel::lp(1.0).unwrap();
        let x = l1.sphere_point(0.0);
        let y = l1.sphere_point_at(Vec2::new(0.5, 0.5));
        assert!(is_flat(&l1, &y) && !is_flat(&l1, &x));
        let c = flat_transport(&l1, &x, &y, 1.0).unwrap();
        assert!(c.is_contractive);
        let linf = NormModel::lp(f64::INFINITY).unwrap();
        let c = flat_transport(&linf, &linf.sphere_point_at(Vec2::new(1.0, 1.0)), &linf.sphere_point_at(Vec2::new(1.0, 0.3)), 1.0)
            .unwrap();
        assert!(c.is_contractive);
        let e = NormModel::euclidean();
        assert!(matches!(
            flat_transport(&e, &e.sphere_point(0.0), &e.sphere_point(1.0), 1.0),
            Err(Error::NotFlat { .. })
        ));
        let z = l1.sphere_point_at(Vec2::new(0.25, 0.75));
        let c = orbit_map(&l1, &y, &z).unwrap();
        assert!(l1.gauge(c.t.apply(y.point) - z.point) <= HIT_TOL);
    }

    #[test]
    fn l1_orbits() {
        let l1 = NormModel::lp(1.0).unwrap();
        let r = l1_orbit(&l1, &l1.sphere_point(0.0)).unwrap();
        assert_eq!(r.reachable, Reachable::AllSphere);
        let r = l1_orbit(&l1, &l1.sphere_point_at(Vec2::new(0.5, 0.5))).unwrap();
        assert!(matches!(r.reachable, Reachable::AllButSet(ref s) if s.len() == 4));
        assert!(r.witnesses.iter().any(|w| (w.y - Vec2::new(0.25, 0.75)).norm2() < 1e-12));
        for w in &r.witnesses {
            assert!(w.certificate.is_contractive);
        }
        let r = l1_orbit(&l1, &l1.sphere_point_at(Vec2::new(0.3, 0.7))).unwrap();
        assert!(matches!(r.reachable, Reachable::AllButSet(_)));
        let e = NormModel::euclidean();
        assert!(matches!(l1_orbit(&e, &e.sphere_point(0.0)), Err(Error::WrongModel { .. })));
    }

    #[test]
    fn inverse_bound_trivial_cases() {
        let e = NormModel::euclidean();
        let b = inv_norm_lower_bound(&e, &e.sphere_point(0.1), &e.sphere_point(2.0)).unwrap();
        assert_eq!(b, 1.0);
        let gp = crate::gallery::grandpa_pig();
        let x = gp.sphere_point(0.1);
        assert_eq!(inv_norm_lower_bound(&gp, &x, &x).unwrap(), 1.0);
    }
}
