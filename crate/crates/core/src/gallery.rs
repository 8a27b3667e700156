//! Named example models used by the CLI, the reproductions and the tests.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::models::{Arc, FourierTerm, NormModel};
use crate::spec_file::ModelSpec;
use crate::tangency::Ellipse;

/// `g(θ) = 1 + sin(4θ)/17`.
pub fn grandpa_pig() -> NormModel {
    NormModel::polar(vec![FourierTerm::constant(1.0), FourierTerm::sin(4, 1.0 / 17.0)])
        .expect("the 1/17 profile satisfies the polar convexity condition")
}

/// `g(θ) = 1 + sin(4θ)/20`: same shape family with curvature bounded away from zero.
pub fn polar_twentieth() -> NormModel {
    NormModel::polar(vec![FourierTerm::constant(1.0), FourierTerm::sin(4, 1.0 / 20.0)])
        .expect("the 1/20 profile is strictly convex")
}

/// `‖·‖₄` blended with the Euclidean norm, rescaled so `‖e₁‖ = 1`.
pub fn blend_l4() -> NormModel {
    let l4 = NormModel::lp(4.0).expect("p = 4 is valid");
    let b = NormModel::blend(&l4, 1.0).expect("eps = 1 is valid");
    NormModel::scaled(&b, std::f64::consts::FRAC_1_SQRT_2).expect("positive factor")
}

/// Two circular arcs in the fourth quadrant: one of radius `r` centered at
/// `(0, r − 1)` from `(0, −1)` up to the polar angle `angle` about its
/// center, then one centered on the x-axis meeting `x`-axis vertically.
pub fn splicing(r: f64, angle: f64) -> Result<NormModel> {
    if !(r > 1.0) || !(angle > -FRAC_PI_2 && angle < 0.0) {
        return Err(Error::BadParameter(format!(
            "splicing needs r > 1 and angle in (−π/2, 0), got r={r}, angle={angle}"
        )));
    }
    let c = Vec2::new(0.0, r - 1.0);
    let r2 = r + (r - 1.0) / angle.sin();
    if !(r2 > 0.0) {
        return Err(Error::BadParameter(format!("second radius {r2} is not positive")));
    }
    let first = Arc::from_circle(c, r, -FRAC_PI_2, angle)?;
    let c2 = Vec2::new((r - r2) * angle.cos(), 0.0);
    let second = Arc::from_circle(c2, r2, angle, 0.0)?;
    NormModel::curve_norm(vec![first, second])
}

pub fn hexagon() -> NormModel {
    let vertices = (0..6).map(|k| Vec2::from_angle(k as f64 * PI / 3.0)).collect();
    NormModel::polygon(vertices).expect("regular hexagon")
}

/// A named gallery model.
#[derive(Debug, Clone)]
pub struct Entry {
    pub name: &'static str,
    pub model: NormModel,
}

fn entry(name: &'static str, model: Result<NormModel>) -> Entry {
    Entry {
        name,
        model: model.unwrap_or_else(|e| panic!("gallery model {name} failed to build: {e}")),
    }
}

/// Every gallery model, in a fixed order.
pub fn gallery() -> Vec<Entry> {
    let e = |s: ModelSpec| s.build();
    vec![
        entry("euclidean", Ok(NormModel::euclidean())),
        entry("l1", NormModel::lp(1.0)),
        entry("linf", NormModel::lp(f64::INFINITY)),
        entry("l1.5", NormModel::lp(1.5)),
        entry("l4", NormModel::lp(4.0)),
        entry("quadrant-mix", NormModel::quadrant_mix(1.5, 4.0)),
        entry("l2-l1-hybrid", NormModel::l2_l1_hybrid()),
        entry("grandpa-pig", Ok(grandpa_pig())),
        entry("polar-twentieth", Ok(polar_twentieth())),
        entry("blend-l4", Ok(blend_l4())),
        entry("ellipse", Ok(NormModel::ellipse_intersection(vec![Ellipse::from_semi_axes(2.0, 1.0)]).expect("ellipse"))),
        entry(
            "ellipse-pair",
            NormModel::ellipse_intersection(vec![
                Ellipse::from_semi_axes(1.2, 0.8),
                Ellipse::from_semi_axes(0.8, 1.2),
            ]),
        ),
        entry("hexagon", Ok(hexagon())),
        entry("splicing", e(ModelSpec::Splicing { r: 2.0, angle: -FRAC_PI_4 })),
        entry("nobst", e(ModelSpec::Nobst { depth: crate::curve_builder::DEFAULT_DEPTH })),
    ]
}

/// Gallery model by name.
pub fn by_name(name: &str) -> Option<NormModel> {
    gallery().into_iter().find(|e| e.name == name).map(|e| e.model)
}
