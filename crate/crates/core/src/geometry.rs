//! Plane vectors, linear maps, sphere points, and the gauge-relative
//! quantities every other module is built on: dual gauge, sphere
//! parametrization and operator norms.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::NormModel;
use crate::numeric::{golden_max, wrap_angle, TAU};

/// Determinant magnitude below which a map counts as singular.
pub const DET_EPS: f64 = 1e-12;
/// One-sided curvature above this is reported as infinite.
pub const KAPPA_INFINITE: f64 = 1e8;
/// One-sided support functionals further apart than this mark a corner.
pub const SMOOTH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x1: f64,
    pub x2: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x1: 0.0, x2: 0.0 };
    pub const E1: Vec2 = Vec2 { x1: 1.0, x2: 0.0 };
    pub const E2: Vec2 = Vec2 { x1: 0.0, x2: 1.0 };

    #[inline]
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }
    /// Unit vector `(cos θ, sin θ)`.
    #[inline]
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }
    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2
    }
    /// `x1 o2 - x2 o1`; positive when `o` is counterclockwise from `self`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x1 * o.x2 - self.x2 * o.x1
    }
    #[inline]
    pub fn norm2(self) -> f64 {
        self.x1.hypot(self.x2)
    }
    #[inline]
    pub fn norm2_sq(self) -> f64 {
        self.dot(self)
    }
    /// Rotation by +π/2.
    #[inline]
    pub fn rot90(self) -> Vec2 {
        Vec2::new(-self.x2, self.x1)
    }
    #[inline]
    pub fn angle(self) -> f64 {
        wrap_angle(self.x2.atan2(self.x1))
    }
    pub fn normalized(self) -> Vec2 {
        self * (1.0 / self.norm2())
    }
    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x1 += o.x1;
        self.x2 += o.x2;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, t: f64) -> Vec2 {
        Vec2::new(self.x1 * t, self.x2 * t)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x1, -self.x2)
    }
}

/// A 2×2 matrix acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearMap2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl LinearMap2 {
    pub const IDENTITY: LinearMap2 = LinearMap2::new(1.0, 0.0, 0.0, 1.0);

    /// Row-major constructor: `[[m11, m12], [m21, m22]]`.
    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m11, m12, m21, m22 }
    }
    pub fn from_columns(c1: Vec2, c2: Vec2) -> Self {
        Self::new(c1.x1, c2.x1, c1.x2, c2.x2)
    }
    pub fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, 0.0, b)
    }
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, -s, s, c)
    }
    #[inline]
    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.m11 * v.x1 + self.m12 * v.x2,
            self.m21 * v.x1 + self.m22 * v.x2,
        )
    }
    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }
    pub fn is_invertible(&self) -> bool {
        self.det().abs() > DET_EPS
    }
    pub fn inverse(&self) -> Result<LinearMap2> {
        let d = self.det();
        if d.abs() <= DET_EPS || !d.is_finite() {
            return Err(Error::Singular { det: d });
        }
        Ok(Self::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d))
    }
    pub fn compose(&self, rhs: &LinearMap2) -> LinearMap2 {
        Self::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }
    pub fn sub(&self, rhs: &LinearMap2) -> LinearMap2 {
        Self::new(
            self.m11 - rhs.m11,
            self.m12 - rhs.m12,
            self.m21 - rhs.m21,
            self.m22 - rhs.m22,
        )
    }
    pub fn scale(&self, t: f64) -> LinearMap2 {
        Self::new(self.m11 * t, self.m12 * t, self.m21 * t, self.m22 * t)
    }
    pub fn transpose(&self) -> LinearMap2 {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }
    pub fn max_abs_diff(&self, rhs: &LinearMap2) -> f64 {
        let d = self.sub(rhs);
        d.m11.abs().max(d.m12.abs()).max(d.m21.abs()).max(d.m22.abs())
    }
    pub fn is_finite(&self) -> bool {
        self.m11.is_finite() && self.m12.is_finite() && self.m21.is_finite() && self.m22.is_finite()
    }

    /// Eigen-decomposition of the symmetric part: `(λ_small, λ_big, unit eigenvector of λ_big)`.
    pub fn sym_eigen(&self) -> (f64, f64, Vec2) {
        let a = self.m11;
        let b = 0.5 * (self.m12 + self.m21);
        let c = self.m22;
        let mean = 0.5 * (a + c);
        let rad = (0.5 * (a - c)).hypot(b);
        let big = mean + rad;
        let small = mean - rad;
        let v = if b.abs() > 1e-300 {
            Vec2::new(b, big - a).normalized()
        } else if a >= c {
            Vec2::E1
        } else {
            Vec2::E2
        };
        (small, big, v)
    }

    /// Applies `f` to the eigenvalues of a symmetric matrix.
    pub fn sym_fn<F: Fn(f64) -> f64>(&self, f: F) -> LinearMap2 {
        let (small, big, v) = self.sym_eigen();
        let w = v.rot90();
        let (fb, fs) = (f(big), f(small));
        LinearMap2::new(
            fb * v.x1 * v.x1 + fs * w.x1 * w.x1,
            fb * v.x1 * v.x2 + fs * w.x1 * w.x2,
            fb * v.x1 * v.x2 + fs * w.x1 * w.x2,
            fb * v.x2 * v.x2 + fs * w.x2 * w.x2,
        )
    }
}

/// Euclidean disc `{y : |y - center|₂ ≤ radius}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Vec2,
    pub radius: f64,
}

impl Disc {
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        (p - self.center).norm2() <= self.radius + tol
    }
}

/// Curvature value with an explicit infinity flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    Finite(f64),
    Infinite,
}

impl Curvature {
    pub fn from_value(k: f64) -> Self {
        if !k.is_finite() || k > KAPPA_INFINITE {
            Curvature::Infinite
        } else {
            Curvature::Finite(k.max(0.0))
        }
    }
    pub fn value(self) -> f64 {
        match self {
            Curvature::Finite(k) => k,
            Curvature::Infinite => f64::INFINITY,
        }
    }
    pub fn is_infinite(self) -> bool {
        matches!(self, Curvature::Infinite)
    }
}

/// A point of the unit sphere with its first- and second-order data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpherePoint {
    /// Euclidean polar angle of `point`.
    pub theta: f64,
    pub point: Vec2,
    /// Support functional, as a vector under the dot pairing. Average of the
    /// one-sided limits at corners.
    pub support: Vec2,
    /// `a^⊥`: gauge-one tangent with `point × tangent > 0`.
    pub tangent: Vec2,
    pub curvature: Curvature,
    /// Curvature approached from decreasing θ.
    pub kappa_cw: f64,
    /// Curvature approached from increasing θ.
    pub kappa_ccw: f64,
    pub smooth: bool,
}

impl SpherePoint {
    /// Largest one-sided curvature (infinite at corners).
    pub fn kappa_hi(&self) -> f64 {
        if !self.smooth {
            return f64::INFINITY;
        }
        let k = self.kappa_cw.max(self.kappa_ccw);
        if k > KAPPA_INFINITE {
            f64::INFINITY
        } else {
            k
        }
    }
    /// Smallest one-sided curvature.
    pub fn kappa_lo(&self) -> f64 {
        if !self.smooth {
            return f64::INFINITY;
        }
        let k = self.kappa_cw.min(self.kappa_ccw);
        if k > KAPPA_INFINITE {
            f64::INFINITY
        } else {
            k
        }
    }
    /// Euclidean unit outward normal.
    pub fn normal(&self) -> Vec2 {
        self.support.normalized()
    }
    pub fn require_smooth(&self) -> Result<()> {
        if self.smooth {
            Ok(())
        } else {
            Err(Error::NonSmoothPoint { theta: self.theta })
        }
    }
}

/// Operator norm together with the angle of a maximizing unit vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorm {
    pub value: f64,
    pub witness_angle: f64,
}

impl NormModel {
    /// `sup{⟨f, y⟩ : gauge(y) ≤ 1}` from a 2048-angle sweep of the cached
    /// sphere followed by golden-section refinement.
    pub fn dual_gauge(&self, f: Vec2) -> f64 {
        self.dual_argmax(f).1
    }

    /// Angle and value of the maximizer of `⟨f, y⟩` over the sphere.
    pub(crate) fn dual_argmax(&self, f: Vec2) -> (f64, f64) {
        if f.norm2() == 0.0 {
            return (0.0, 0.0);
        }
        let pts = self.cache_points();
        let n = pts.len();
        let stride = (n / 2048).max(1);
        let mut best = (0usize, f64::NEG_INFINITY);
        for i in (0..n).step_by(stride) {
            let v = f.dot(pts[i]);
            if v > best.1 {
                best = (i, v);
            }
        }
        let h = TAU * stride as f64 / n as f64;
        let t0 = TAU * best.0 as f64 / n as f64;
        let (t, v) = golden_max(|t| f.dot(self.radial_point(t)), t0 - h, t0 + h, 1e-12);
        if v >= best.1 {
            (wrap_angle(t), v)
        } else {
            (t0, best.1)
        }
    }

    /// The sphere point in direction θ with support functional, tangent and curvature.
    pub fn sphere_point(&self, theta: f64) -> SpherePoint {
        let theta = wrap_angle(theta);
        let point = self.radial_point(theta);
        let loc = self.local(theta);
        let smooth = (loc.support_cw - loc.support_ccw).norm2()
            <= SMOOTH_TOL * loc.support_cw.norm2().max(1.0);
        let support = if smooth {
            loc.support_ccw
        } else {
            (loc.support_cw + loc.support_ccw) * 0.5
        };
        // Normalize the support so that ⟨x*, x⟩ = 1 exactly.
        let support = support * (1.0 / support.dot(point));
        let t = support.rot90();
        let tangent = t * (1.0 / self.gauge(t));
        let (kcw, kccw) = if smooth {
            (loc.kappa_cw, loc.kappa_ccw)
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        let curvature = if smooth && kcw.max(kccw) <= KAPPA_INFINITE {
            Curvature::Finite(0.5 * (kcw + kccw))
        } else {
            Curvature::Infinite
        };
        SpherePoint {
            theta,
            point,
            support,
            tangent,
            curvature,
            kappa_cw: kcw,
            kappa_ccw: kccw,
            smooth,
        }
    }

    /// Sphere point through the direction of `v`.
    pub fn sphere_point_at(&self, v: Vec2) -> SpherePoint {
        self.sphere_point(v.angle())
    }

    /// `sup_{‖z‖ ≤ 1} ‖T z‖` from a 4096-point sweep of the cached sphere and
    /// golden-section refinement around the three best grid angles.
    pub fn operator_norm(&self, t: &LinearMap2) -> OperatorNorm {
        let pts = self.cache_points();
        let n = pts.len();
        let vals: Vec<f64> = pts.iter().map(|&p| self.gauge(t.apply(p))).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        let h = TAU / n as f64;
        let mut best = OperatorNorm {
            value: vals[order[0]],
            witness_angle: TAU * order[0] as f64 / n as f64,
        };
        for &i in order.iter().take(3) {
            let t0 = TAU * i as f64 / n as f64;
            let (ang, v) = golden_max(
                |s| self.gauge(t.apply(self.radial_point(s))),
                t0 - h,
                t0 + h,
                1e-11,
            );
            if v > best.value {
                best = OperatorNorm {
                    value: v,
                    witness_angle: wrap_angle(ang),
                };
            }
        }
        best
    }
}
