//! The staircase-curvature counterexample: a convex curve whose curvature
//! drops to `2^{-n}` on shrinking arcs near `(0, −1)`, closed up with a
//! pair of circular arcs and reflected into a symmetric unit sphere.
//!
//! A piecewise-constant curvature integrates to a chain of circular arcs,
//! so the curve is built exactly arc by arc rather than by quadrature.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::models::{Arc, NormModel};
use crate::numeric::golden_min;
use crate::semigroup::inv_norm_lower_bound;
use crate::spec_file::ModelSpec;

/// Default truncation depth of the staircase.
///
/// Depth 19 keeps the smallest curvature `2^{-19}` above the outer-disc
/// floor while truncating `K(1)` by less than `1e-6`.
pub const DEFAULT_DEPTH: u32 = 19;
/// Arc-length parameter where the curvature-1 comparison point sits.
pub const UNIT_ARC_S: f64 = 0.8;

/// Piecewise-constant curvature on `[lo, hi]`, `default` outside the listed pieces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureFunction {
    pub domain: (f64, f64),
    /// `(start, end, value)`, sorted and disjoint.
    pub pieces: Vec<(f64, f64, f64)>,
    pub default: f64,
}

impl CurvatureFunction {
    pub fn constant(domain: (f64, f64), value: f64) -> Self {
        Self {
            domain,
            pieces: Vec::new(),
            default: value,
        }
    }

    /// `2^{-n}` on `[2^{-n}, 2^{-n} + 2^{-n-2}]` for `1 ≤ n ≤ depth`, else 1, on `[−π/2, 1]`.
    pub fn staircase(depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::BadParameter("staircase depth must be at least 1".into()));
        }
        let mut pieces: Vec<(f64, f64, f64)> = (1..=depth)
            .map(|n| {
                let a = 0.5f64.powi(n as i32);
                (a, a + 0.25 * a, a)
            })
            .collect();
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            domain: (-FRAC_PI_2, 1.0),
            pieces,
            default: 1.0,
        })
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if s < self.domain.0 || s > self.domain.1 {
            return Err(Error::OutOfDomain(s));
        }
        Ok(self
            .pieces
            .iter()
            .find(|p| p.0 <= s && s <= p.1)
            .map_or(self.default, |p| p.2))
    }

    /// Constant-curvature runs `(start, end, value)` covering `[lo, hi]`.
    fn runs(&self, lo: f64, hi: f64) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        let mut s = lo;
        for &(a, b, v) in &self.pieces {
            if b <= s || a >= hi {
                continue;
            }
            if a > s {
                out.push((s, a, self.default));
            }
            let end = b.min(hi);
            out.push((a.max(s), end, v));
            s = end;
        }
        if s < hi {
            out.push((s, hi, self.default));
        }
        out
    }

    /// `K(s) = ∫₀ˢ k`, exact for the piecewise-constant `k`.
    pub fn integral(&self, s: f64) -> Result<f64> {
        if s < self.domain.0 || s > self.domain.1 {
            return Err(Error::OutOfDomain(s));
        }
        let (lo, hi, sign) = if s >= 0.0 { (0.0, s, 1.0) } else { (s, 0.0, -1.0) };
        Ok(sign * self.runs(lo, hi).iter().map(|r| (r.1 - r.0) * r.2).sum::<f64>())
    }
}

/// `k_staircase(s)` truncated at `n_max`.
pub fn k_staircase(s: f64, n_max: u32) -> Result<f64> {
    CurvatureFunction::staircase(n_max)?.eval(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub s: f64,
    pub point: Vec2,
    /// Tangent angle `K(s)`.
    pub heading: f64,
}

/// The integrated curve: exact arcs for `s ∈ [0, end]` plus samples on the
/// whole domain (including the unit quarter circle for `s < 0`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuiltCurve {
    #[serde(skip)]
    pub arcs: Vec<Arc>,
    pub samples: Vec<CurveSample>,
    pub endpoint: Vec2,
    pub end_heading: f64,
}

impl BuiltCurve {
    /// Point at arc length `s ≥ 0`.
    pub fn point_at(&self, s: f64) -> Vec2 {
        let mut rest = s;
        for a in &self.arcs {
            if rest <= a.length {
                return a.point_at(rest);
            }
            rest -= a.length;
        }
        self.endpoint
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,x,y,heading\n");
        for p in &self.samples {
            out.push_str(&format!("{},{},{},{}\n", p.s, p.point.x1, p.point.x2, p.heading));
        }
        out
    }
}

/// `Γ(0) = (0, −1)`, `Γ'(0) = (1, 0)`, `Γ'' = k·Γ'^⊥`, with samples every `step`.
pub fn integrate_curve(k: &CurvatureFunction, step: f64) -> Result<BuiltCurve> {
    if !(step > 0.0 && step <= 1e-4) {
        return Err(Error::BadParameter(format!("step must lie in (0, 1e-4], got {step}")));
    }
    let mut arcs = Vec::new();
    let mut start = Vec2::new(0.0, -1.0);
    let mut heading = 0.0;
    for (a, b, v) in k.runs(0.0, k.domain.1) {
        let arc = Arc {
            start,
            heading,
            curvature: v,
            length: b - a,
        };
        start = arc.end();
        heading = arc.end_heading();
        arcs.push(arc);
    }
    let mut curve = BuiltCurve {
        arcs,
        samples: Vec::new(),
        endpoint: start,
        end_heading: heading,
    };
    let n_neg = (-k.domain.0 / step).ceil() as usize;
    for i in (1..=n_neg).rev() {
        // k ≡ 1 below zero: the unit circle through (0, −1).
        let s = -(i as f64 * step).min(-k.domain.0);
        curve.samples.push(CurveSample {
            s,
            point: Vec2::from_angle(s - FRAC_PI_2),
            heading: s,
        });
    }
    let n_pos = (k.domain.1 / step).ceil() as usize;
    for i in 0..=n_pos {
        let s = (i as f64 * step).min(k.domain.1);
        curve.samples.push(CurveSample {
            s,
            point: curve.point_at(s),
            heading: k.integral(s)?,
        });
    }
    Ok(curve)
}

/// Two arcs from the curve's endpoint to `(1, 0)` arriving vertically, each
/// turning half of the remaining angle. Their radii solve a 2×2 linear system.
pub fn closing_arcs(p: Vec2, heading: f64) -> Result<Vec<Arc>> {
    let turn = FRAC_PI_2 - heading;
    let target = Vec2::new(1.0, 0.0);
    if turn.abs() < 1e-12 && (p - target).norm2() < 1e-12 {
        return Ok(Vec::new());
    }
    if !(turn > 0.0) {
        return Err(Error::TangencySolveFailed { residual: turn });
    }
    // The endpoint tangent line must meet the x-axis beyond x = 1.
    let a = p.x1 - p.x2 * heading.cos() / heading.sin();
    if !(a > 1.0) {
        return Err(Error::TangencySolveFailed { residual: 1.0 - a });
    }
    let d = target - p;
    // Displacement of a unit-radius arc from heading h turning φ.
    let chord = |h: f64, phi: f64| Vec2::new((h + phi).sin() - h.sin(), h.cos() - (h + phi).cos());
    // Radii of the two arcs when the first one turns by φ₁ and the second by the rest.
    let radii = |phi1: f64| -> Option<(f64, f64)> {
        let (c1, c2) = (chord(heading, phi1), chord(heading + phi1, turn - phi1));
        let det = c1.cross(c2);
        if det.abs() < 1e-15 {
            return None;
        }
        let (r1, r2) = (d.cross(c2) / det, c1.cross(d) / det);
        (r1 > 0.0 && r2 > 0.0).then_some((r1, r2))
    };
    // The pair is underdetermined: among admissible splits take the one whose
    // radii are closest in ratio.
    let imbalance = |phi1: f64| radii(phi1).map_or(f64::INFINITY, |(r1, r2)| (r1 / r2).ln().abs());
    const SPLITS: usize = 512;
    let h = turn / SPLITS as f64;
    let (best_i, best) = (1..SPLITS)
        .map(|i| (i, imbalance(i as f64 * h)))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    if !best.is_finite() {
        return Err(Error::TangencySolveFailed { residual: best });
    }
    let (phi1, refined) = golden_min(imbalance, (best_i as f64 - 1.0) * h, (best_i as f64 + 1.0) * h, 1e-13);
    let phi1 = if refined <= best { phi1 } else { best_i as f64 * h };
    let (r1, r2) = radii(phi1).ok_or(Error::TangencySolveFailed { residual: f64::NAN })?;
    let phi2 = turn - phi1;
    let first = Arc {
        start: p,
        heading,
        curvature: 1.0 / r1,
        length: r1 * phi1,
    };
    let second = Arc {
        start: first.end(),
        heading: first.end_heading(),
        curvature: 1.0 / r2,
        length: r2 * phi2,
    };
    let residual = (second.end() - target).norm2();
    if residual > 1e-12 {
        return Err(Error::TangencySolveFailed { residual });
    }
    Ok(vec![first, second])
}

/// Closes the curve with [`closing_arcs`] and reflects it into a sphere.
pub fn close_sphere(curve: &BuiltCurve) -> Result<NormModel> {
    let mut quadrant = curve.arcs.clone();
    quadrant.extend(closing_arcs(curve.endpoint, curve.end_heading)?);
    NormModel::curve_norm(quadrant)
}

#[derive(Debug, Clone)]
pub struct NobstBuild {
    pub depth: u32,
    pub k: CurvatureFunction,
    pub curve: BuiltCurve,
    pub model: NormModel,
}

/// The staircase model at the given truncation depth.
pub fn build_nobst(depth: u32) -> Result<NobstBuild> {
    let k = CurvatureFunction::staircase(depth)?;
    let curve = integrate_curve(&k, 1e-4)?;
    let model = close_sphere(&curve)?.with_spec(ModelSpec::Nobst { depth });
    Ok(NobstBuild { depth, k, curve, model })
}

/// Arc length of the comparison point for level `n`: mid-interval for
/// `n ≥ 1`, the curvature-1 point for `n = 0`.
pub fn witness_s(n: u32) -> f64 {
    if n == 0 {
        UNIT_ARC_S
    } else {
        let a = 0.5f64.powi(n as i32);
        a + 0.125 * a
    }
}

/// `(n, bound)` pairs of [`inv_norm_lower_bound`] from the level-`n` point
/// to the curvature-1 point.
pub fn nobst_witness(build: &NobstBuild, ns: &[u32]) -> Result<Vec<(u32, f64)>> {
    let model = &build.model;
    let y = model.sphere_point_at(build.curve.point_at(UNIT_ARC_S));
    ns.iter()
        .map(|&n| {
            if n > build.depth {
                return Err(Error::BadParameter(format!("level {n} exceeds depth {}", build.depth)));
            }
            let x = model.sphere_point_at(build.curve.point_at(witness_s(n)));
            Ok((n, inv_norm_lower_bound(model, &x, &y)?))
        })
        .collect()
}

/// Closed form `1 − Σ_{n ≤ depth} 2^{-n-2}(1 − 2^{-n})` of `K(1)`.
pub fn k_at_one_series(depth: u32) -> f64 {
    1.0 - (1..=depth)
        .map(|n| {
            let a = 0.5f64.powi(n as i32);
            0.25 * a * (1.0 - a)
        })
        .sum::<f64>()
}

/// Unit-radius quarter turn, used by tests and the CLI as a sanity model.
pub fn quarter_circle() -> CurvatureFunction {
    CurvatureFunction::constant((-FRAC_PI_2, FRAC_PI_2), 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tangency::outer_disc;

    #[test]
    fn staircase_values() {
        assert_eq!(k_staircase(0.25, 20).unwrap(), 0.25);
        assert_eq!(k_staircase(0.2, 20).unwrap(), 1.0);
        assert_eq!(k_staircase(-1.0, 20).unwrap(), 1.0);
        assert_eq!(k_staircase(0.6, 20).unwrap(), 0.5);
        assert!(matches!(k_staircase(1.5, 20), Err(Error::OutOfDomain(_))));
        assert!(matches!(k_staircase(-2.0, 20), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn k_at_one() {
        let k = CurvatureFunction::staircase(DEFAULT_DEPTH).unwrap();
        let v = k.integral(1.0).unwrap();
        assert!((v - k_at_one_series(DEFAULT_DEPTH)).abs() < 1e-14);
        assert!((v - 5.0 / 6.0).abs() < 1e-6);
    }

    #[test]
    fn quarter_circle_lands_on_axis() {
        let c = integrate_curve(&quarter_circle(), 1e-4).unwrap();
        assert!((c.endpoint - Vec2::new(1.0, 0.0)).norm2() < 1e-8);
        let m = close_sphere(&c).unwrap();
        for t in crate::numeric::angle_grid(64) {
            assert!((m.gauge(Vec2::from_angle(t)) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn curve_properties() {
        let b = build_nobst(DEFAULT_DEPTH).unwrap();
        let c = &b.curve;
        assert!(c.endpoint.x1 > 0.0 && c.endpoint.x1 < 1.0);
        assert!(c.endpoint.x2 > -1.0 && c.endpoint.x2 < 0.0);
        let origin = Vec2::new(0.0, -1.0);
        assert!(c.samples.iter().all(|p| (p.point - origin).norm2() <= 5.0 / 3.0 + 1e-6));
        assert!(c.samples.windows(2).all(|w| w[1].heading >= w[0].heading));
        let h = 1e-5;
        for i in 1..1000 {
            let s = i as f64 / 1000.0;
            let d = (c.point_at(s + h) - c.point_at(s - h)) * (0.5 / h);
            assert!((d.norm2() - 1.0).abs() < 1e-8);
            assert!(d.x1 > 0.0 && d.x2 > 0.0);
        }
    }

    #[test]
    fn outer_disc_at_bottom() {
        let b = build_nobst(DEFAULT_DEPTH).unwrap();
        let x = b.model.sphere_point_at(Vec2::new(0.0, -1.0));
        let d = outer_disc(&b.model, &x).unwrap();
        assert!(d.radius <= 5.0 / 3.0 + 1e-6, "{}", d.radius);
    }

    #[test]
    fn witness_growth() {
        let b = build_nobst(DEFAULT_DEPTH).unwrap();
        let w = nobst_witness(&b, &[0, 0]).unwrap();
        assert_eq!(w[0].1, w[1].1);
        let w = nobst_witness(&b, &(1..=8).collect::<Vec<_>>()).unwrap();
        for pair in w.windows(2) {
            let r = pair[1].1 / pair[0].1;
            assert!(r > 1.3 && r < 1.6, "{r}");
        }
    }
}
