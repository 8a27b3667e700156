//! Inner and outer discs and ellipses at sphere points.
//!
//! Discs tangent at `x` are searched along the inward normal. For a disc of
//! radius `r` centered at `x − r·n`, a point `p` lies inside iff
//! `|p − x|² ≤ 2r⟨x − p, n⟩`, so the admissible radii are cut out by the
//! per-point ratios `|p − x|² / (2⟨x − p, n⟩)`: the inner radius is their
//! minimum and the outer radius their maximum, together with the osculating
//! bound `1/κ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Disc, LinearMap2, SpherePoint, Vec2};
use crate::models::NormModel;
use crate::numeric::{golden_max, golden_min, TAU};

/// Curvature below this has no outer disc.
pub const KAPPA_FLOOR: f64 = 1e-6;
/// Outer discs larger than this count as absent.
pub const OUTER_RADIUS_CAP: f64 = 1e6;
/// Inner discs smaller than this count as absent.
pub const INNER_RADIUS_FLOOR: f64 = 1e-6;
/// Containment tolerance for certified tangent sets.
pub const CONTAIN_TOL: f64 = 1e-9;
/// Sphere points closer than this to `x` are covered by the osculating bound.
/// Closer points lose the ratio to cancellation in the depth `⟨x − p, n⟩ ~ |p − x|²`.
const NEAR: f64 = 1e-3;
/// Grid candidates refined by golden-section search.
const REFINE: usize = 8;

/// Origin-centered ellipse `{z : zᵀ M z ≤ 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", try_from = "[f64; 3]")]
pub struct Ellipse {
    m: LinearMap2,
}

impl From<Ellipse> for [f64; 3] {
    fn from(e: Ellipse) -> Self {
        e.coeffs()
    }
}

impl TryFrom<[f64; 3]> for Ellipse {
    type Error = Error;
    fn try_from(c: [f64; 3]) -> Result<Self> {
        Ellipse::from_coeffs(c[0], c[1], c[2])
    }
}

impl Ellipse {
    /// From a symmetric positive-definite form.
    pub fn new(m: LinearMap2) -> Result<Self> {
        if (m.m12 - m.m21).abs() > 1e-12 * (m.m12.abs() + m.m21.abs()).max(1.0) {
            return Err(Error::BadParameter("ellipse form must be symmetric".into()));
        }
        Self::from_coeffs(m.m11, m.m22, m.m12 + m.m21)
    }

    /// `Ax² + By² + Cxy ≤ 1`.
    pub fn from_coeffs(a: f64, b: f64, c: f64) -> Result<Self> {
        let disc = 4.0 * a * b - c * c;
        if !(a > 0.0) || !(disc > 0.0) || !disc.is_finite() {
            return Err(Error::NotPositiveDefinite { disc });
        }
        Ok(Self {
            m: LinearMap2::new(a, 0.5 * c, 0.5 * c, b),
        })
    }

    /// Axis-aligned ellipse with semi-axes `a` (along x₁) and `b`.
    pub fn from_semi_axes(a: f64, b: f64) -> Self {
        Self::from_coeffs(1.0 / (a * a), 1.0 / (b * b), 0.0).expect("positive semi-axes")
    }

    pub fn unit_disc() -> Self {
        Self::from_semi_axes(1.0, 1.0)
    }

    pub fn form(&self) -> &LinearMap2 {
        &self.m
    }
    /// `[A, B, C]` with `A = M₁₁`, `B = M₂₂`, `C = 2M₁₂`.
    pub fn coeffs(&self) -> [f64; 3] {
        [self.m.m11, self.m.m22, 2.0 * self.m.m12]
    }
    pub fn quad(&self, v: Vec2) -> f64 {
        v.dot(self.m.apply(v))
    }
    /// Its own gauge `sqrt(zᵀMz)`.
    pub fn gauge(&self, v: Vec2) -> f64 {
        self.quad(v).max(0.0).sqrt()
    }
    /// `(major, minor)` semi-axes.
    pub fn semi_axes(&self) -> (f64, f64) {
        let (small, big, _) = self.m.sym_eigen();
        (1.0 / small.sqrt(), 1.0 / big.sqrt())
    }
    pub fn area(&self) -> f64 {
        PI / self.m.det().sqrt()
    }
    /// The polar ellipse `{f : fᵀ M⁻¹ f ≤ 1}`.
    pub fn dual(&self) -> Ellipse {
        let inv = self.m.inverse().expect("positive-definite form is invertible");
        Ellipse {
            m: LinearMap2::new(inv.m11, 0.5 * (inv.m12 + inv.m21), 0.5 * (inv.m12 + inv.m21), inv.m22),
        }
    }
    pub fn scaled_form(&self, t: f64) -> Ellipse {
        Ellipse { m: self.m.scale(t) }
    }
    pub fn max_abs_diff(&self, other: &Ellipse) -> f64 {
        self.m.max_abs_diff(&other.m)
    }
    /// Boundary point at parameter φ.
    pub fn boundary(&self, phi: f64) -> Vec2 {
        let (small, big, v) = self.m.sym_eigen();
        let w = v.rot90();
        v * (phi.cos() / big.sqrt()) + w * (phi.sin() / small.sqrt())
    }
    /// `M^{1/2}` and `M^{-1/2}`.
    pub fn sqrt_forms(&self) -> (LinearMap2, LinearMap2) {
        (self.m.sym_fn(f64::sqrt), self.m.sym_fn(|l| 1.0 / l.sqrt()))
    }
    /// Whether the ellipse lies inside the model's unit ball.
    pub fn inside_ball(&self, model: &NormModel, tol: f64) -> bool {
        (0..1024).all(|k| model.gauge(self.boundary(TAU * k as f64 / 1024.0)) <= 1.0 + tol)
    }
    /// Whether the model's unit ball lies inside the ellipse.
    pub fn contains_ball(&self, model: &NormModel, tol: f64) -> bool {
        model.cache_points().iter().all(|&p| self.quad(p) <= 1.0 + tol)
    }
}

/// Inner/outer discs and ellipses at one sphere point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangencyReport {
    pub point: SpherePoint,
    pub inner_disc: Option<Disc>,
    pub outer_disc: Option<Disc>,
    pub inner_ellipse: Option<Ellipse>,
    pub outer_ellipse: Option<Ellipse>,
}

/// `|p − x|² / (2⟨x − p, n⟩)`, or `None` when `p` is too close to `x`.
fn disc_ratio(x: Vec2, n: Vec2, p: Vec2) -> Option<f64> {
    let d = p - x;
    if d.norm2() < NEAR {
        return None;
    }
    let depth = -d.dot(n);
    Some(if depth <= 0.0 {
        f64::INFINITY
    } else {
        d.norm2_sq() / (2.0 * depth)
    })
}

/// Extremal ratio over the cached sphere, refined around the best candidates.
fn extremal_ratio(model: &NormModel, x: Vec2, n: Vec2, largest: bool) -> f64 {
    let pts = model.cache_points();
    let m = pts.len();
    let mut cand: Vec<(usize, f64)> = pts
        .iter()
        .enumerate()
        .filter_map(|(i, &p)| disc_ratio(x, n, p).map(|r| (i, r)))
        .collect();
    if cand.is_empty() {
        return if largest { 0.0 } else { f64::INFINITY };
    }
    if largest {
        cand.sort_by(|a, b| b.1.total_cmp(&a.1));
    } else {
        cand.sort_by(|a, b| a.1.total_cmp(&b.1));
    }
    let mut best = cand[0].1;
    if best.is_infinite() {
        return best;
    }
    let h = TAU / m as f64;
    let f = |t: f64| disc_ratio(x, n, model.radial_point(t)).unwrap_or(if largest { 0.0 } else { f64::INFINITY });
    for &(i, _) in cand.iter().take(REFINE) {
        let t0 = model.cache_angle(i);
        let v = if largest {
            golden_max(f, t0 - h, t0 + h, 1e-10).1
        } else {
            golden_min(f, t0 - h, t0 + h, 1e-10).1
        };
        best = if largest { best.max(v) } else { best.min(v) };
    }
    best
}

/// Largest inner disc tangent at `x`, if any.
pub fn inner_disc(model: &NormModel, x: &SpherePoint) -> Option<Disc> {
    let k = x.kappa_hi();
    if !k.is_finite() {
        return None;
    }
    let n = x.normal();
    let r = (1.0 / k).min(extremal_ratio(model, x.point, n, false));
    (r >= INNER_RADIUS_FLOOR && r.is_finite()).then(|| Disc {
        center: x.point - n * r,
        radius: r,
    })
}

/// Smallest outer disc tangent at `x`, if any.
pub fn outer_disc(model: &NormModel, x: &SpherePoint) -> Option<Disc> {
    let k = x.kappa_lo();
    if k < KAPPA_FLOOR {
        return None;
    }
    let n = x.normal();
    let r = (1.0 / k).max(extremal_ratio(model, x.point, n, true));
    (r <= OUTER_RADIUS_CAP).then(|| Disc {
        center: x.point - n * r,
        radius: r,
    })
}

/// The ellipse `Ax² + By² + Cxy = 1` through `(1, h)` with a vertical
/// tangent there and curvature `kappa_target` at that point.
///
/// With `B = −C/(2h)` and `A = 1 − Ch/2` the gradient at `(1, h)` is `(2, 0)`
/// and the curvature there is `B = |C|/(2h)`, so `C = −2hκ`. Then
/// `4AB − C² = 4κ`, positive exactly when `κ > 0`.
pub fn build_inner_ellipse(h: f64, kappa_target: f64) -> Result<Ellipse> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::BadParameter(format!("h must be positive, got {h}")));
    }
    let c = -2.0 * h * kappa_target;
    let b = -c / (2.0 * h);
    let a = 1.0 - c * h / 2.0;
    Ellipse::from_coeffs(a, b, c)
}

/// Inner ellipse at `x` through the tangent-frame construction, raising the
/// target curvature until the ellipse fits inside the ball.
fn inner_ellipse(model: &NormModel, x: &SpherePoint, disc: &Disc) -> Option<Ellipse> {
    let n = x.normal();
    let hn = x.point.dot(n);
    let mut tau = n.rot90();
    let mut h = x.point.dot(tau) / hn;
    if h < 0.0 {
        tau = -tau;
        h = -h;
    }
    // z ↦ (⟨z,n⟩, ⟨z,τ⟩)/hn is a similarity taking x to (1, h).
    let r = LinearMap2::new(n.x1, n.x2, tau.x1, tau.x2);
    let mut kappa = (1.0 / disc.radius).max(1.0);
    for _ in 0..60 {
        let kf = kappa * hn;
        let frame = if h < 1e-9 {
            Ellipse::from_coeffs(1.0, kf, 0.0)
        } else {
            build_inner_ellipse(h, kf)
        };
        if let Ok(fe) = frame {
            let world = r.transpose().compose(fe.form()).compose(&r).scale(1.0 / (hn * hn));
            if let Ok(e) = Ellipse::new(world) {
                if e.inside_ball(model, CONTAIN_TOL) {
                    return Some(e);
                }
            }
        }
        kappa *= 2.0;
    }
    None
}

/// Minimal-area origin-centered ellipse containing the unit ball.
///
/// Wolfe–Atwood iteration with Todd–Yıldırım away steps on the cached sphere,
/// then rescaled so the refined sphere fits.
pub fn john_ellipse(model: &NormModel) -> Ellipse {
    *model.john_cache().get_or_init(|| compute_john(model))
}

fn compute_john(model: &NormModel) -> Ellipse {
    let all = model.cache_points();
    let pts: Vec<Vec2> = all[..all.len() / 2].to_vec();
    let m = pts.len();
    let mut u = vec![1.0 / m as f64; m];
    let moment = |u: &[f64]| {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for (w, p) in u.iter().zip(&pts) {
            a += w * p.x1 * p.x1;
            b += w * p.x1 * p.x2;
            c += w * p.x2 * p.x2;
        }
        LinearMap2::new(a, b, b, c)
    };
    let mut x = moment(&u);
    for _ in 0..100_000 {
        let xi = x.inverse().expect("moment matrix of a spanning set");
        let omega: Vec<f64> = pts.iter().map(|&p| p.dot(xi.apply(p))).collect();
        let (jp, wp) = omega
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &w)| if w > acc.1 { (i, w) } else { acc });
        let (jm, wm) = omega
            .iter()
            .enumerate()
            .filter(|(i, _)| u[*i] > 0.0)
            .fold((0, f64::INFINITY), |acc, (i, &w)| if w < acc.1 { (i, w) } else { acc });
        let eps_plus = wp / 2.0 - 1.0;
        let eps_minus = 1.0 - wm / 2.0;
        if eps_plus.max(eps_minus) <= 1e-10 {
            break;
        }
        if eps_plus > eps_minus {
            let lam = (wp - 2.0) / (2.0 * (wp - 1.0));
            for w in u.iter_mut() {
                *w *= 1.0 - lam;
            }
            u[jp] += lam;
        } else {
            let uj = u[jm];
            let lam = ((2.0 - wm) / (2.0 * (wm - 1.0))).min(uj / (1.0 - uj));
            for w in u.iter_mut() {
                *w *= 1.0 + lam;
            }
            u[jm] -= lam;
            if u[jm] < 1e-300 {
                u[jm] = 0.0;
            }
        }
        x = moment(&u);
    }
    let form = x.inverse().expect("invertible moment").scale(0.5);
    let e = Ellipse::new(LinearMap2::new(form.m11, form.m12, form.m12, form.m22)).expect("PD form");
    // Rescale so the true sphere, not just the grid, is inside.
    let h = TAU / all.len() as f64;
    let mut worst: f64 = 0.0;
    let mut order: Vec<usize> = (0..all.len()).collect();
    order.sort_by(|&a, &b| e.quad(all[b]).total_cmp(&e.quad(all[a])));
    for &i in order.iter().take(REFINE) {
        let t0 = model.cache_angle(i);
        let (_, v) = golden_max(|t| e.quad(model.radial_point(t)), t0 - h, t0 + h, 1e-12);
        worst = worst.max(v).max(e.quad(all[i]));
    }
    e.scaled_form(1.0 / worst)
}

/// `{z : ⟨x*, z⟩² + b²|z − ⟨x*, z⟩x|² ≤ 1}` with `|·|` the norm of the
/// John ellipse.
pub fn outer_family(model: &NormModel, x: &SpherePoint, b: f64) -> Result<Ellipse> {
    x.require_smooth()?;
    if !(b >= 1e-6) || !b.is_finite() {
        return Err(Error::BadParameter(format!("b must be at least 1e-6, got {b}")));
    }
    Ok(family_form(x.point, x.support, &john_ellipse(model), b))
}

fn family_form(x: Vec2, s: Vec2, john: &Ellipse, b: f64) -> Ellipse {
    // P = I − x sᵀ projects onto ker s along x.
    let p = LinearMap2::new(1.0 - x.x1 * s.x1, -x.x1 * s.x2, -x.x2 * s.x1, 1.0 - x.x2 * s.x2);
    let ss = LinearMap2::new(s.x1 * s.x1, s.x1 * s.x2, s.x1 * s.x2, s.x2 * s.x2);
    let q = p.transpose().compose(john.form()).compose(&p).scale(b * b);
    let m = LinearMap2::new(ss.m11 + q.m11, ss.m12 + q.m12, ss.m12 + q.m12, ss.m22 + q.m22);
    Ellipse::new(m).expect("family form is positive definite")
}

/// Largest `b` with the ball inside `E_b^x`, or `None` at flat points.
fn outer_family_b(model: &NormModel, x: &SpherePoint) -> Option<f64> {
    let john = john_ellipse(model);
    let s = x.support;
    let bound = |p: Vec2| {
        let t = s.dot(p);
        let u = p - x.point * t;
        let uu = john.quad(u);
        // Near ±x both numerator and denominator cancel; by symmetry the
        // local bound covers the antipode as well.
        if (p - x.point).norm2() < NEAR || (p + x.point).norm2() < NEAR || uu <= 0.0 {
            f64::INFINITY
        } else {
            ((1.0 - t * t).max(0.0) / uu).sqrt()
        }
    };
    let tau = s.rot90().normalized();
    let local = (x.kappa_lo() * s.norm2() / john.quad(tau)).sqrt();
    let pts = model.cache_points();
    let mut cand: Vec<(usize, f64)> = pts.iter().enumerate().map(|(i, &p)| (i, bound(p))).collect();
    cand.sort_by(|a, b| a.1.total_cmp(&b.1));
    let h = TAU / pts.len() as f64;
    let mut best = local.min(cand[0].1);
    for &(i, _) in cand.iter().take(REFINE) {
        let t0 = model.cache_angle(i);
        best = best.min(golden_min(|t| bound(model.radial_point(t)), t0 - h, t0 + h, 1e-10).1);
    }
    (best >= 1e-6 && best.is_finite()).then_some(best * (1.0 - 1e-9))
}

/// Discs and ellipses at `x`. Ellipses are built only where the matching disc exists.
pub fn tangency_report(model: &NormModel, x: &SpherePoint) -> TangencyReport {
    let inner = inner_disc(model, x);
    let outer = outer_disc(model, x);
    let inner_ellipse = inner.as_ref().and_then(|d| inner_ellipse(model, x, d));
    let outer_ellipse = outer
        .as_ref()
        .and_then(|_| outer_family_b(model, x))
        .map(|b| family_form(x.point, x.support, &john_ellipse(model), b));
    TangencyReport {
        point: *x,
        inner_disc: inner,
        outer_disc: outer,
        inner_ellipse,
        outer_ellipse,
    }
}

/// Transfers a report at `x` to the dual point `x*` on `dual`: `E ↦ E*`
/// swaps inner and outer. The transferred ellipses are re-verified.
pub fn dual_transfer(report: &TangencyReport, dual: &NormModel) -> Result<TangencyReport> {
    report.point.require_smooth()?;
    let xs = report.point.support;
    let point = dual.sphere_point_at(xs);
    let outer_ellipse = report.inner_ellipse.map(|e| e.dual());
    let inner_ellipse = report.outer_ellipse.map(|e| e.dual());
    if let Some(f) = &outer_ellipse {
        if (f.quad(point.point) - 1.0).abs() > 1e-6 || !f.contains_ball(dual, 1e-6) {
            return Err(Error::Degenerate("transferred outer ellipse fails on the dual sphere".into()));
        }
    }
    if let Some(e) = &inner_ellipse {
        if (e.quad(point.point) - 1.0).abs() > 1e-6 || !e.inside_ball(dual, 1e-6) {
            return Err(Error::Degenerate("transferred inner ellipse fails on the dual sphere".into()));
        }
    }
    Ok(TangencyReport {
        inner_disc: inner_disc(dual, &point),
        outer_disc: outer_disc(dual, &point),
        point,
        inner_ellipse,
        outer_ellipse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{curvature_implicit, Hessian};

    #[test]
    fn euclidean_discs_are_the_ball() {
        let e = NormModel::euclidean();
        let x = e.sphere_point(0.7);
        let inner = inner_disc(&e, &x).unwrap();
        let outer = outer_disc(&e, &x).unwrap();
        assert!((inner.radius - 1.0).abs() < 1e-9 && inner.center.norm2() < 1e-9);
        assert!((outer.radius - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lp_axis_points() {
        let l15 = NormModel::lp(1.5).unwrap();
        assert!(inner_disc(&l15, &l15.sphere_point(0.0)).is_none());
        let l4 = NormModel::lp(4.0).unwrap();
        assert!(outer_disc(&l4, &l4.sphere_point(0.0)).is_none());
        assert!(inner_disc(&l4, &l4.sphere_point(0.0)).is_some());
    }

    #[test]
    fn ellipse_major_end_inner_disc() {
        // Semi-axes (1, 2): the major end is (0, 2) and a²/b = 1/2.
        let m = NormModel::ellipse_intersection(vec![Ellipse::from_semi_axes(1.0, 2.0)]).unwrap();
        let x = m.sphere_point(PI / 2.0);
        let d = inner_disc(&m, &x).unwrap();
        assert!(d.radius >= 0.5 - 1e-7, "{}", d.radius);
    }

    fn implicit_curvature(e: &Ellipse, p: Vec2) -> f64 {
        let f = e.form();
        let grad = f.apply(p) * 2.0;
        let h = Hessian { xx: 2.0 * f.m11, xy: 2.0 * f.m12, yy: 2.0 * f.m22 };
        curvature_implicit(grad, h).unwrap()
    }

    #[test]
    fn build_inner_ellipse_example() {
        let e = build_inner_ellipse(1.0, 2.0).unwrap();
        assert_eq!(e.coeffs(), [3.0, 2.0, -4.0]);
        let p = Vec2::new(1.0, 1.0);
        assert!((e.quad(p) - 1.0).abs() < 1e-15);
        assert!(e.form().apply(p).x2.abs() < 1e-15, "vertical tangent");
        assert!((implicit_curvature(&e, p) - 2.0).abs() < 1e-14);
        // (5, 4, −8) is the C = −4hκ variant: same point and tangent, twice the curvature.
        let doubled = Ellipse::from_coeffs(5.0, 4.0, -8.0).unwrap();
        assert!((doubled.quad(p) - 1.0).abs() < 1e-15);
        assert!((implicit_curvature(&doubled, p) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn build_inner_ellipse_curvature_identity() {
        for &(h, k) in &[(0.3, 0.1), (1.0, 0.1), (2.5, 7.0)] {
            let e = build_inner_ellipse(h, k).unwrap();
            let [_, _, c] = e.coeffs();
            let kappa = implicit_curvature(&e, Vec2::new(1.0, h));
            assert!((kappa - k).abs() < 1e-12 * k.max(1.0));
            assert!((kappa - c.abs() / (2.0 * h)).abs() < 1e-12 * kappa.max(1.0));
        }
        assert!(matches!(build_inner_ellipse(1.0, 0.0), Err(Error::NotPositiveDefinite { .. })));
        assert!(matches!(build_inner_ellipse(1.0, -1.0), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn john_ellipses() {
        let e = john_ellipse(&NormModel::euclidean());
        assert!(e.max_abs_diff(&Ellipse::unit_disc()) < 1e-8);
        let linf = john_ellipse(&NormModel::lp(f64::INFINITY).unwrap());
        let (a, b) = linf.semi_axes();
        assert!((a - 2f64.sqrt()).abs() < 1e-6 && (b - 2f64.sqrt()).abs() < 1e-6);
        let l1 = john_ellipse(&NormModel::lp(1.0).unwrap());
        let (a, b) = l1.semi_axes();
        assert!((a - 1.0).abs() < 1e-6 && (b - 1.0).abs() < 1e-6);
    }

    #[test]
    fn outer_family_examples() {
        let e = NormModel::euclidean();
        let x = e.sphere_point(1.1);
        let f = outer_family(&e, &x, 1.0).unwrap();
        assert!(f.max_abs_diff(&Ellipse::unit_disc()) < 1e-8);
        assert!(outer_family(&e, &x, 0.0).is_err());
        let c = 1.0 / 8f64.sqrt();
        for k in 0..32 {
            let x = e.sphere_point(TAU * k as f64 / 32.0);
            assert!(outer_family(&e, &x, c).unwrap().contains_ball(&e, 1e-9));
        }
    }

    #[test]
    fn report_ellipses_are_tangent() {
        let m = NormModel::lp(3.0).unwrap();
        let x = m.sphere_point(0.4);
        let r = tangency_report(&m, &x);
        let inner = r.inner_ellipse.unwrap();
        let outer = r.outer_ellipse.unwrap();
        assert!((inner.quad(x.point) - 1.0).abs() < 1e-9);
        assert!((outer.quad(x.point) - 1.0).abs() < 1e-9);
        assert!(inner.inside_ball(&m, 1e-9));
        assert!(outer.contains_ball(&m, 1e-9));
    }

    #[test]
    fn dual_transfer_to_conjugate_exponent() {
        let m = NormModel::lp(1.5).unwrap();
        let x = m.sphere_point(0.6);
        let r = tangency_report(&m, &x);
        assert!(r.inner_ellipse.is_some());
        let d = NormModel::dual(&m).unwrap();
        let l3 = NormModel::lp(3.0).unwrap();
        let v = Vec2::new(0.3, -0.8);
        assert!((d.gauge(v) - l3.gauge(v)).abs() < 1e-8);
        let t = dual_transfer(&r, &d).unwrap();
        assert!(t.outer_ellipse.is_some());
        let back = t.outer_ellipse.unwrap().dual();
        assert!(back.max_abs_diff(&r.inner_ellipse.unwrap()) < 1e-9);
    }

    #[test]
    fn euclidean_dual_transfer_is_identity() {
        let e = NormModel::euclidean();
        let d = NormModel::dual(&e).unwrap();
        let r = tangency_report(&e, &e.sphere_point(0.3));
        let t = dual_transfer(&r, &d).unwrap();
        assert!((t.point.point - r.point.point).norm2() < 1e-7);
        assert!(Ellipse::unit_disc().dual().max_abs_diff(&Ellipse::unit_disc()) < 1e-15);
    }

    #[test]
    fn euclidean_ellipses_exist_at_the_axes() {
        let e = NormModel::euclidean();
        for theta in [0.0, PI / 2.0, PI] {
            let r = tangency_report(&e, &e.sphere_point(theta));
            let (inner, outer) = (r.inner_ellipse.unwrap(), r.outer_ellipse.unwrap());
            assert!(inner.max_abs_diff(&Ellipse::unit_disc()) < 1e-6);
            assert!(outer.max_abs_diff(&Ellipse::unit_disc()) < 1e-6);
        }
    }
}
