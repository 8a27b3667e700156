//! Named reproductions: each runs a fixed gallery check and reports one
//! PASS/FAIL line per assertion.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::Serialize;

use crate::classify::{classify_st, classify_st_sweep, umst_delta_table, DiscSide, StVerdict, UMST_EPS};
use crate::curvature::profile;
use crate::curve_builder::{build_nobst, k_at_one_series, nobst_witness, DEFAULT_DEPTH};
use crate::gallery::{grandpa_pig, splicing};
use crate::geometry::{LinearMap2, Vec2};
use crate::models::NormModel;
use crate::numeric::angle_grid;
use crate::semigroup::{certify, figure_maps, l1_orbit, orbit_map, Reachable};
use crate::tangency::outer_disc;

/// One checked assertion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

pub const NAMES: [&str; 6] = ["figure1", "l1-orbits", "quadrant-mix", "grandpa-pig", "splicing", "nobst"];

/// Runs the reproduction called `name`, or `None` for an unknown name.
pub fn run(name: &str) -> Option<Vec<Check>> {
    Some(match name {
        "figure1" => figure1(),
        "l1-orbits" => l1_orbits(),
        "quadrant-mix" => quadrant_mix(),
        "grandpa-pig" => grandpa_pig_checks(),
        "splicing" => splicing_checks(),
        "nobst" => nobst_checks(),
        _ => return None,
    })
}

/// Largest absolute column sum: the ℓ₁ operator norm.
pub fn l1_operator_norm(t: &LinearMap2) -> f64 {
    (t.m11.abs() + t.m21.abs()).max(t.m12.abs() + t.m22.abs())
}

pub fn figure1() -> Vec<Check> {
    let l1 = NormModel::lp(1.0).expect("p = 1 is valid");
    let (t1, t2) = figure_maps();
    let (a, b) = (Vec2::new(0.5, 0.5), Vec2::new(0.25, 0.75));
    let mut out = vec![
        Check::new("T1 maps (1/2,1/2) to (1/4,3/4)", t1.apply(a) == b, format!("{:?}", t1.apply(a))),
        Check::new("T2 maps (1/4,3/4) to (1/2,1/2)", t2.apply(b) == a, format!("{:?}", t2.apply(b))),
    ];
    for (label, t) in [("T1", t1), ("T2", t2)] {
        let oracle = l1_operator_norm(&t);
        match certify(&l1, &t) {
            Ok(c) => out.push(Check::new(
                format!("{label} has l1 operator norm 1"),
                (c.op_norm - 1.0).abs() <= 1e-9 && (oracle - 1.0).abs() <= 1e-15 && c.is_contractive,
                format!("sampled {}, column-sum {oracle}", c.op_norm),
            )),
            Err(e) => out.push(Check::new(format!("{label} has l1 operator norm 1"), false, e.to_string())),
        }
    }
    out
}

pub fn l1_orbits() -> Vec<Check> {
    let l1 = NormModel::lp(1.0).expect("p = 1 is valid");
    let mut out = Vec::new();
    match l1_orbit(&l1, &l1.sphere_point(0.0)) {
        Ok(r) => out.push(Check::new(
            "orbit of e1 is the whole sphere",
            r.reachable == Reachable::AllSphere && r.witnesses.iter().all(|w| w.certificate.is_contractive),
            format!("{:?}, {} witnesses", r.reachable, r.witnesses.len()),
        )),
        Err(e) => out.push(Check::new("orbit of e1 is the whole sphere", false, e.to_string())),
    }
    let mid = l1.sphere_point_at(Vec2::new(0.5, 0.5));
    match l1_orbit(&l1, &mid) {
        Ok(r) => out.push(Check::new(
            "orbit of (1/2,1/2) misses exactly the vertices",
            matches!(&r.reachable, Reachable::AllButSet(v) if v.len() == 4),
            format!("{:?}", r.reachable),
        )),
        Err(e) => out.push(Check::new("orbit of (1/2,1/2) misses exactly the vertices", false, e.to_string())),
    }
    let hit = orbit_map(&l1, &mid, &l1.sphere_point(0.0));
    out.push(Check::new(
        "no contractive map sends (1/2,1/2) to e1",
        hit.is_none(),
        format!("{hit:?}"),
    ));
    out
}

pub fn quadrant_mix() -> Vec<Check> {
    let m = NormModel::quadrant_mix(1.5, 4.0).expect("valid exponents");
    let st = classify_st(&m);
    let mut out = vec![Check::new(
        "quadrant-mix(1.5, 4) is not semitransitive",
        matches!(st.verdict, StVerdict::No { .. } | StVerdict::Boundary { .. }),
        format!("{:?}", st.verdict),
    )];
    let e1 = m.sphere_point(0.0);
    for theta in [0.5, 2.0, 4.0] {
        let y = m.sphere_point(theta);
        let fwd = orbit_map(&m, &e1, &y);
        let back = orbit_map(&m, &y, &e1);
        out.push(Check::new(
            format!("e1 and S({theta}) are not connected"),
            fwd.is_none() && back.is_none(),
            format!("forward {}, backward {}", fwd.is_some(), back.is_some()),
        ));
    }
    out
}

pub fn grandpa_pig_checks() -> Vec<Check> {
    let m = grandpa_pig();
    let grid = angle_grid(4096);
    let cond = grid
        .iter()
        .map(|&t| m.polar_condition(t).expect("polar model"))
        .fold(f64::INFINITY, f64::min);
    let prof = profile(&m, 4096);
    let mut out = vec![
        Check::new("polar convexity condition is positive", cond > 0.0, format!("min {cond:.6e}")),
        Check::new("minimum curvature exceeds 0.5", prof.kappa_min > 0.5, format!("min {:.6e}", prof.kappa_min)),
    ];
    for row in umst_delta_table(&m) {
        out.push(Check::new(
            format!("empirical delta at eps={} is positive", row.eps),
            row.delta > 0.0,
            format!("{:.6e}", row.delta),
        ));
    }
    debug_assert_eq!(out.len(), 2 + UMST_EPS.len());
    out
}

pub fn splicing_checks() -> Vec<Check> {
    let mut out = Vec::new();
    match splicing(2.0, -std::f64::consts::FRAC_PI_4) {
        Ok(m) => {
            let st = classify_st_sweep(&m, 1024);
            out.push(Check::new("splicing model is semitransitive", st.verdict.is_yes(), format!("{:?}", st.verdict)));
            let x = m.sphere_point(-FRAC_PI_2);
            out.push(Check::new(
                "(0,-1) has an outer disc",
                outer_disc(&m, &x).is_some(),
                format!("{:?}", outer_disc(&m, &x)),
            ));
        }
        Err(e) => out.push(Check::new("splicing model builds", false, e.to_string())),
    }
    out
}

pub fn nobst_checks() -> Vec<Check> {
    let build = match build_nobst(DEFAULT_DEPTH) {
        Ok(b) => b,
        Err(e) => return vec![Check::new("staircase model builds", false, e.to_string())],
    };
    let mut out = Vec::new();
    let k1 = build.k.integral(1.0).unwrap_or(f64::NAN);
    let series = k_at_one_series(DEFAULT_DEPTH);
    out.push(Check::new(
        "K(1) = 5/6",
        (k1 - 5.0 / 6.0).abs() <= 1e-6 && (k1 - series).abs() <= 1e-12,
        format!("K(1) = {k1}, series {series}"),
    ));
    let bounds_ok = (1..=1000).all(|i| {
        let s = i as f64 / 1000.0;
        build.k.integral(s).map_or(false, |k| 0.6 * s - 1e-12 <= k && k <= s + 1e-12)
    });
    out.push(Check::new("(3/5)s <= K(s) <= s", bounds_ok, "1000 points in (0, 1]"));
    let centre = Vec2::new(0.0, -1.0);
    let reach = build
        .curve
        .samples
        .iter()
        .map(|s| (s.point - centre).norm2())
        .fold(0.0, f64::max);
    out.push(Check::new(
        "curve stays within 5/3 of (0,-1)",
        reach <= 5.0 / 3.0 + 1e-6,
        format!("max distance {reach:.9}"),
    ));
    let st = classify_st_sweep(&build.model, 1024);
    out.push(Check::new("staircase model is semitransitive", st.verdict.is_yes(), format!("{:?}", st.verdict)));
    let ns: Vec<u32> = (1..=8).collect();
    match nobst_witness(&build, &ns) {
        Ok(w) => {
            let vals: Vec<f64> = w.iter().map(|p| p.1).collect();
            let ratios: Vec<f64> = vals.windows(2).map(|p| p[1] / p[0]).collect();
            out.push(Check::new(
                "inverse-norm bounds increase with n",
                vals.windows(2).all(|p| p[1] > p[0]),
                format!("{vals:.4?}"),
            ));
            out.push(Check::new(
                "consecutive ratios lie in [1.3, 1.6]",
                ratios.iter().all(|r| (1.3..=1.6).contains(r)),
                format!("{ratios:.4?}"),
            ));
        }
        Err(e) => out.push(Check::new("inverse-norm bounds increase with n", false, e.to_string())),
    }
    out
}

/// Whether a failed ST verdict sits on the given side at a coordinate axis.
pub fn axis_failure(verdict: &StVerdict, side: DiscSide) -> bool {
    match verdict {
        StVerdict::No { point, missing, .. } => {
            *missing == side && (point.x1.abs() < 1e-9 || point.x2.abs() < 1e-9)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_sum_oracle() {
        assert_eq!(l1_operator_norm(&LinearMap2::new(1.0, -2.0, 0.5, 0.5)), 2.5);
        assert_eq!(l1_operator_norm(&LinearMap2::IDENTITY), 1.0);
    }

    #[test]
    fn figure1_passes() {
        assert!(figure1().iter().all(|c| c.pass), "{:?}", figure1());
    }

    #[test]
    fn unknown_name() {
        assert!(run("nope").is_none());
    }
}
