//! Moduli of uniform convexity and strong extremality, power-type-2 fits
//! and the decomposition inequality `t² + δ(‖u‖) ≤ 1`.
//!
//! Both moduli are computed with the constraints as equalities, which turns
//! each infimum into a sweep over one angle plus a one-dimensional root find.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{SpherePoint, Vec2};
use crate::models::NormModel;
use crate::numeric::{angle_grid, bisect, golden_max, golden_min, log_grid};

/// Outer sweep size for [`delta_uc`].
pub const UC_SWEEP: usize = 1024;
/// Direction count for [`delta_strong`].
pub const STRONG_SWEEP: usize = 512;
/// Points of the cached δ̂ curve.
pub const DELTA_GRID_LEN: usize = 64;
/// Smallest ε of the cached δ̂ curve.
pub const DELTA_GRID_MIN: f64 = 0.05;
/// Fitted power-type-2 constants below this count as absent.
pub const POWER2_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusKind {
    Uc,
    StrongExtremality { theta: f64 },
}

/// A modulus sampled on an ε grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusCurve {
    pub kind: ModulusKind,
    pub eps_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub power2_coeff: Option<f64>,
}

impl ModulusCurve {
    fn new(kind: ModulusKind, eps_grid: Vec<f64>, values: Vec<f64>) -> Self {
        let mut c = Self {
            kind,
            eps_grid,
            values,
            power2_coeff: None,
        };
        c.power2_coeff = power2_fit(&c);
        c
    }

    /// Linear interpolation, with `δ̂(0) = 0` and clamping above the grid.
    pub fn interpolate(&self, eps: f64) -> f64 {
        let (g, v) = (&self.eps_grid, &self.values);
        if eps <= 0.0 {
            return 0.0;
        }
        if eps <= g[0] {
            return v[0] * eps / g[0];
        }
        match g.iter().position(|&e| e >= eps) {
            None => *v.last().expect("non-empty curve"),
            Some(i) => {
                let w = (eps - g[i - 1]) / (g[i] - g[i - 1]);
                v[i - 1] + w * (v[i] - v[i - 1])
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,delta\n");
        for (e, d) in self.eps_grid.iter().zip(&self.values) {
            out.push_str(&format!("{e},{d}\n"));
        }
        out
    }
}

/// The standard ε grid of cached curves.
pub fn delta_grid() -> Vec<f64> {
    log_grid(DELTA_GRID_MIN, 2.0, DELTA_GRID_LEN)
}

/// `1 − ‖(x + y)/2‖` for `x = S(θ)` and the `y` on the sphere
/// counterclockwise from `x` with `‖x − y‖ = ε`.
fn midpoint_depth(model: &NormModel, theta: f64, eps: f64) -> f64 {
    let x = model.radial_point(theta);
    let gap = |phi: f64| model.gauge(x - model.radial_point(phi)) - eps;
    let phi = bisect(gap, theta, theta + std::f64::consts::PI, 1e-13);
    let y = model.radial_point(phi);
    1.0 - model.gauge((x + y) * 0.5)
}

/// Modulus of uniform convexity at `eps ∈ (0, 2]`.
pub fn delta_uc(model: &NormModel, eps: f64) -> Result<f64> {
    delta_uc_sweep(model, eps, UC_SWEEP)
}

/// [`delta_uc`] with an explicit outer sweep size.
pub fn delta_uc_sweep(model: &NormModel, eps: f64, n: usize) -> Result<f64> {
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::BadEps(eps));
    }
    let thetas = angle_grid(n);
    let vals: Vec<f64> = thetas.par_iter().map(|&t| midpoint_depth(model, t, eps)).collect();
    let (i, best) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let h = std::f64::consts::TAU / n as f64;
    let (_, refined) = golden_min(|t| midpoint_depth(model, t, eps), thetas[i] - h, thetas[i] + h, 1e-9);
    Ok(best.min(refined).clamp(0.0, 1.0))
}

/// Largest `ρ ∈ [0, 1]` with `‖ρx ± y‖ ≤ 1`.
fn max_rho(model: &NormModel, x: Vec2, y: Vec2) -> f64 {
    let ok = |r: f64| model.gauge(x * r + y) <= 1.0 && model.gauge(x * r - y) <= 1.0;
    if ok(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Modulus of strong extremality `Δ(x, ε)` for `eps ∈ (0, 1]`.
pub fn delta_strong(model: &NormModel, x: &SpherePoint, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::BadEps(eps));
    }
    let f = |t: f64| max_rho(model, x.point, model.radial_point(t) * eps);
    let thetas = angle_grid(STRONG_SWEEP);
    let (i, rho) = thetas
        .par_iter()
        .map(|&t| f(t))
        .enumerate()
        .reduce(|| (0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let h = std::f64::consts::TAU / STRONG_SWEEP as f64;
    let (_, refined) = golden_max(f, thetas[i] - h, thetas[i] + h, 1e-10);
    Ok(1.0 - rho.max(refined))
}

/// `min δ/ε²` over the grid, if at least [`POWER2_FLOOR`].
pub fn power2_fit(curve: &ModulusCurve) -> Option<f64> {
    let c = curve
        .eps_grid
        .iter()
        .zip(&curve.values)
        .map(|(e, d)| d / (e * e))
        .fold(f64::INFINITY, f64::min);
    (c >= POWER2_FLOOR && c.is_finite()).then_some(c)
}

/// δ sampled on `grid` with an outer sweep of `n` points.
pub fn uc_curve(model: &NormModel, grid: &[f64], n: usize) -> Result<ModulusCurve> {
    let values = grid
        .iter()
        .map(|&e| delta_uc_sweep(model, e, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModulusCurve::new(ModulusKind::Uc, grid.to_vec(), values))
}

/// Δ(x, ·) sampled on `grid ⊂ (0, 1]`.
pub fn strong_curve(model: &NormModel, x: &SpherePoint, grid: &[f64]) -> Result<ModulusCurve> {
    let values = grid
        .iter()
        .map(|&e| delta_strong(model, x, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModulusCurve::new(
        ModulusKind::StrongExtremality { theta: x.theta },
        grid.to_vec(),
        values,
    ))
}

/// The model's cached δ̂ curve on the standard grid.
pub fn cached_delta(model: &NormModel) -> &ModulusCurve {
    model
        .delta_cache()
        .get_or_init(|| uc_curve(model, &delta_grid(), UC_SWEEP).expect("grid lies in (0, 2]"))
}

/// `z = t x + u` with `t = ⟨x*, z⟩` and `u` in the tangent line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub t: f64,
    pub u: Vec2,
    pub delta: f64,
    pub holds: bool,
}

/// Checks `t² + δ̂(‖u‖) ≤ 1 + 1e-4`.
pub fn decomposition_check(model: &NormModel, x: &SpherePoint, z: Vec2) -> Result<Decomposition> {
    x.require_smooth()?;
    let t = x.support.dot(z);
    let u = z - x.point * t;
    let delta = cached_delta(model).interpolate(model.gauge(u));
    Ok(Decomposition {
        t,
        u,
        delta,
        holds: t * t + delta <= 1.0 + 1e-4,
    })
}
