//! Semitransitivity verdicts: ST from inner/outer discs at every sphere
//! point, BST from the disc-radius ratio and power-type moduli, UMST from
//! smoothness and positive curvature, plus flat-arc and pilgrim probes.

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{LinearMap2, SpherePoint, Vec2};
use crate::models::{Family, NormModel};
use crate::moduli::{cached_delta, uc_curve};
use crate::numeric::{angle_grid, golden_max, golden_min, log_grid, wrap_angle, TAU};
use crate::semigroup::{make_l_ab, orbit_map_with_outer, CERTIFY_TOL};
use crate::tangency::{inner_disc, outer_disc, tangency_report};

/// Sphere sweep size for the ST verdict.
pub const ST_SWEEP: usize = 1024;
/// Sweep size used for the dual model inside [`classify_st`].
pub const DUAL_SWEEP: usize = 256;
/// Curvature at or below this counts as vanishing.
pub const KAPPA_MIN_THRESHOLD: f64 = 1e-6;
/// Disc-radius ratios above this count as unbounded.
pub const LAMBDA_CAP: f64 = 1e4;
/// ε rows of the UMST table.
pub const UMST_EPS: [f64; 4] = [0.05, 0.1, 0.2, 0.4];
/// Base points and offsets of the UMST table.
pub const UMST_POINTS: usize = 256;
pub const UMST_OFFSETS: usize = 32;
/// Smallest and largest angular offset between `a` and `b`.
const UMST_OFFSET_RANGE: (f64, f64) = (1e-3, 0.5);
/// Target grid and success share of the pilgrim probe.
pub const PILGRIM_GRID: usize = 512;
pub const PILGRIM_SHARE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscSide {
    Inner,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StVerdict {
    Yes,
    No { theta: f64, point: Vec2, missing: DiscSide },
    /// The grid passes but a refinement near a curvature extremum fails.
    Boundary { theta: f64, missing: DiscSide },
}

impl StVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, StVerdict::Yes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BstVerdict {
    Yes { lambda: f64 },
    No { reason: String },
    Unknown { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaRow {
    pub eps: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum UmstVerdict {
    EligibleYes { kappa_min: f64, delta_table: Vec<DeltaRow> },
    No { reason: String },
    Unknown { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PilgrimVerdict {
    LikelyYes { share: f64 },
    LikelyNo { share: f64, blocked: Vec<f64> },
    Unknown,
}

/// Closed arc of sphere directions `[start, end]`, counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularInterval {
    pub start: f64,
    pub end: f64,
}

/// Result of the ST sweep with the data BST reuses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StReport {
    pub verdict: StVerdict,
    /// Verdict kind on the sampled dual agrees (absent for dual models).
    pub dual_agrees: Option<bool>,
    pub sweep: usize,
    pub min_inner_radius: f64,
    pub max_outer_radius: f64,
    pub kappa_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub model: String,
    pub st: StVerdict,
    pub st_dual_agrees: Option<bool>,
    pub bst: BstVerdict,
    pub umst: UmstVerdict,
    pub flat_points: Vec<AngularInterval>,
    pub pilgrim_dense: PilgrimVerdict,
    pub sweep: usize,
}

/// Feature angles first, then the uniform grid, so witnesses land on
/// structural points when those fail.
fn sweep_angles(model: &NormModel, n: usize) -> Vec<f64> {
    let mut v = model.feature_angles();
    v.extend(angle_grid(n));
    v
}

struct Probe {
    point: SpherePoint,
    inner: Option<f64>,
    outer: Option<f64>,
}

fn probe(model: &NormModel, theta: f64) -> Probe {
    let point = model.sphere_point(theta);
    Probe {
        inner: inner_disc(model, &point).map(|d| d.radius),
        outer: outer_disc(model, &point).map(|d| d.radius),
        point,
    }
}

fn missing_side(p: &Probe) -> Option<DiscSide> {
    match (p.inner, p.outer) {
        (None, _) => Some(DiscSide::Inner),
        (_, None) => Some(DiscSide::Outer),
        _ => None,
    }
}

/// ST sweep without the dual comparison.
pub fn classify_st_sweep(model: &NormModel, n: usize) -> StReport {
    let angles = sweep_angles(model, n);
    let probes: Vec<Probe> = angles.par_iter().map(|&t| probe(model, t)).collect();
    let kappa_min = refined_kappa_min(model, &probes);
    let min_inner = probes.iter().filter_map(|p| p.inner).fold(f64::INFINITY, f64::min);
    let max_outer = probes.iter().filter_map(|p| p.outer).fold(0.0, f64::max);
    let mut report = StReport {
        verdict: StVerdict::Yes,
        dual_agrees: None,
        sweep: n,
        min_inner_radius: min_inner,
        max_outer_radius: max_outer,
        kappa_min,
    };
    if let Some(p) = probes.iter().find(|p| missing_side(p).is_some()) {
        report.verdict = StVerdict::No {
            theta: p.point.theta,
            point: p.point.point,
            missing: missing_side(p).expect("checked above"),
        };
        return report;
    }
    // Refine around the curvature extremes of the grid.
    let h = TAU / n as f64;
    let grid = &probes[probes.len() - n..];
    let lo = (0..n).min_by(|&a, &b| grid[a].point.kappa_lo().total_cmp(&grid[b].point.kappa_lo()));
    let hi = (0..n).max_by(|&a, &b| grid[a].point.kappa_hi().total_cmp(&grid[b].point.kappa_hi()));
    let mut extra = Vec::new();
    if let Some(i) = lo {
        let t0 = grid[i].point.theta;
        extra.push(golden_min(|t| model.sphere_point(t).kappa_lo(), t0 - h, t0 + h, 1e-10).0);
    }
    if let Some(i) = hi {
        let t0 = grid[i].point.theta;
        extra.push(golden_max(|t| model.sphere_point(t).kappa_hi(), t0 - h, t0 + h, 1e-10).0);
    }
    for t in extra {
        let p = probe(model, t);
        if let Some(side) = missing_side(&p) {
            report.verdict = StVerdict::Boundary {
                theta: wrap_angle(t),
                missing: side,
            };
            return report;
        }
        report.min_inner_radius = report.min_inner_radius.min(p.inner.unwrap_or(f64::INFINITY));
        report.max_outer_radius = report.max_outer_radius.max(p.outer.unwrap_or(0.0));
    }
    report
}

fn refined_kappa_min(model: &NormModel, probes: &[Probe]) -> f64 {
    let (i, k) = probes
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.point.kappa_lo()))
        .fold((0, f64::INFINITY), |acc, (i, k)| if k < acc.1 { (i, k) } else { acc });
    if k <= 0.0 || probes.is_empty() {
        return k.max(0.0);
    }
    let t0 = probes[i].point.theta;
    let h = TAU / ST_SWEEP as f64;
    let (_, refined) = golden_min(|t| model.sphere_point(t).kappa_lo(), t0 - h, t0 + h, 1e-10);
    k.min(refined).max(0.0)
}

/// ST verdict on the primal sweep together with the dual comparison.
pub fn classify_st(model: &NormModel) -> StReport {
    let mut report = classify_st_sweep(model, ST_SWEEP);
    if !matches!(model.family(), Family::Dual { .. }) {
        report.dual_agrees = NormModel::dual(model)
            .ok()
            .map(|d| classify_st_sweep(&d, DUAL_SWEEP).verdict.is_yes() == report.verdict.is_yes());
    }
    report
}

/// BST verdict from an ST report.
pub fn classify_bst_from(model: &NormModel, st: &StReport) -> BstVerdict {
    if !st.verdict.is_yes() {
        return BstVerdict::No {
            reason: "not semitransitive".into(),
        };
    }
    let lambda = st.max_outer_radius / st.min_inner_radius;
    if !(lambda <= LAMBDA_CAP) {
        return BstVerdict::No {
            reason: format!("outer/inner disc radius ratio {lambda:.3e} is unbounded on the sweep"),
        };
    }
    if cached_delta(model).power2_coeff.is_none() {
        return BstVerdict::No {
            reason: "modulus of convexity is not of power type 2".into(),
        };
    }
    match dual_power2(model) {
        Some(Some(_)) => BstVerdict::Yes { lambda },
        Some(None) => BstVerdict::No {
            reason: "dual modulus of convexity is not of power type 2".into(),
        },
        None => BstVerdict::Unknown {
            reason: "dual model could not be sampled".into(),
        },
    }
}

/// Power-type-2 constant of the dual on a coarse grid; the outer `None`
/// means the dual could not be built.
fn dual_power2(model: &NormModel) -> Option<Option<f64>> {
    let dual = match model.family() {
        Family::Dual { base } => base.clone(),
        _ => NormModel::dual(model).ok()?,
    };
    let curve = uc_curve(&dual, &log_grid(0.05, 2.0, 16), 128).ok()?;
    Some(curve.power2_coeff)
}

pub fn classify_bst(model: &NormModel) -> BstVerdict {
    classify_bst_from(model, &classify_st_sweep(model, ST_SWEEP))
}

/// The empirical ε ↦ δ table: for each ε, the Euclidean-angle offset
/// distance `‖a − b‖` of the nearest pair whose `L^{ab}_ε` fails to certify,
/// or the largest tested distance when none fails.
pub fn umst_delta_table(model: &NormModel) -> Vec<DeltaRow> {
    let offsets = log_grid(UMST_OFFSET_RANGE.0, UMST_OFFSET_RANGE.1, UMST_OFFSETS);
    let bases: Vec<SpherePoint> = angle_grid(UMST_POINTS).iter().map(|&t| model.sphere_point(t)).collect();
    UMST_EPS
        .iter()
        .map(|&eps| {
            let delta = offsets
                .iter()
                .enumerate()
                .find_map(|(k, &off)| {
                    let failing: Vec<f64> = bases
                        .par_iter()
                        .filter_map(|a| {
                            let b = model.sphere_point(a.theta + off);
                            let dist = model.gauge(a.point - b.point);
                            let ok = make_l_ab(model, a, &b, eps)
                                .map(|l| quick_op_norm(model, &l) <= 1.0 + CERTIFY_TOL)
                                .unwrap_or(false);
                            (!ok).then_some(dist)
                        })
                        .collect();
                    if failing.is_empty() {
                        None
                    } else if k == 0 {
                        Some(0.0)
                    } else {
                        Some(failing.into_iter().fold(f64::INFINITY, f64::min))
                    }
                })
                .unwrap_or_else(|| {
                    let last = offsets[offsets.len() - 1];
                    bases
                        .iter()
                        .map(|a| model.gauge(a.point - model.radial_point(a.theta + last)))
                        .fold(f64::INFINITY, f64::min)
                });
            DeltaRow { eps, delta }
        })
        .collect()
}

/// Operator norm on a 1024-point sweep with refinement at the best point.
fn quick_op_norm(model: &NormModel, t: &LinearMap2) -> f64 {
    let n = 1024;
    let (i, v) = angle_grid(n)
        .iter()
        .enumerate()
        .map(|(i, &s)| (i, model.gauge(t.apply(model.radial_point(s)))))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let h = TAU / n as f64;
    let t0 = TAU * i as f64 / n as f64;
    let (_, r) = golden_max(|s| model.gauge(t.apply(model.radial_point(s))), t0 - h, t0 + h, 1e-11);
    v.max(r)
}

/// UMST verdict from an ST report.
pub fn classify_umst_from(model: &NormModel, st: &StReport) -> UmstVerdict {
    if matches!(model.family(), Family::Dual { .. }) {
        return UmstVerdict::Unknown {
            reason: "sampled dual models carry no smoothness certificate".into(),
        };
    }
    if !st.verdict.is_yes() {
        return UmstVerdict::No {
            reason: "not semitransitive".into(),
        };
    }
    if st.kappa_min <= KAPPA_MIN_THRESHOLD {
        return UmstVerdict::No {
            reason: format!("curvature vanishes (min {:.3e})", st.kappa_min),
        };
    }
    if !model.is_c2() {
        return UmstVerdict::Unknown {
            reason: "norm is not C²; the positive-curvature criterion does not apply".into(),
        };
    }
    UmstVerdict::EligibleYes {
        kappa_min: st.kappa_min,
        delta_table: umst_delta_table(model),
    }
}

pub fn classify_umst(model: &NormModel) -> UmstVerdict {
    classify_umst_from(model, &classify_st_sweep(model, ST_SWEEP))
}

/// Maximal arcs of the cached sphere that lie on a line, with zero curvature.
pub fn find_flat(model: &NormModel) -> Vec<AngularInterval> {
    let pts = model.cache_points();
    let n = pts.len();
    let flat: Vec<bool> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (a, b, c) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
            let chord = c - a;
            let dev = chord.cross(b - a).abs() / chord.norm2();
            if dev > 1e-9 {
                return false;
            }
            let sp = model.sphere_point(model.cache_angle(i));
            sp.smooth && sp.kappa_cw < 1e-9 && sp.kappa_ccw < 1e-9
        })
        .collect();
    if flat.iter().all(|&f| f) {
        return vec![AngularInterval { start: 0.0, end: TAU }];
    }
    // Start scanning just after a non-flat index so runs do not wrap.
    let start = (0..n).find(|&i| !flat[i]).expect("some point is not flat");
    let mut out = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for k in 1..=n {
        let i = (start + k) % n;
        match (flat[i], run) {
            (true, None) => run = Some((i, i)),
            (true, Some((s, _))) => run = Some((s, i)),
            (false, Some((s, e))) => {
                if (e + n - s) % n >= 2 {
                    out.push(AngularInterval {
                        start: model.cache_angle(s),
                        end: model.cache_angle(e),
                    });
                }
                run = None;
            }
            (false, None) => {}
        }
    }
    out
}

/// Whether the orbit of `x` looks dense: `orbit_map` succeeds on at least
/// 99% of the target grid.
pub fn pilgrim_probe(model: &NormModel, x: &SpherePoint, n: usize) -> PilgrimVerdict {
    if n == 0 {
        return PilgrimVerdict::Unknown;
    }
    let outer = tangency_report(model, x).outer_ellipse;
    let hits: Vec<(f64, bool)> = angle_grid(n)
        .par_iter()
        .map(|&t| {
            let y = model.sphere_point(t);
            (t, orbit_map_with_outer(model, x, outer.as_ref(), &y).is_some())
        })
        .collect();
    let share = hits.iter().filter(|h| h.1).count() as f64 / n as f64;
    if share >= PILGRIM_SHARE {
        PilgrimVerdict::LikelyYes { share }
    } else {
        PilgrimVerdict::LikelyNo {
            share,
            blocked: hits.iter().filter(|h| !h.1).map(|h| h.0).collect(),
        }
    }
}

/// All verdicts for one model. The pilgrim probe starts at a generic angle.
pub fn classify(model: &NormModel) -> Verdict {
    let st = classify_st(model);
    let bst = classify_bst_from(model, &st);
    let umst = classify_umst_from(model, &st);
    Verdict {
        model: model.name(),
        st: st.verdict,
        st_dual_agrees: st.dual_agrees,
        bst,
        umst,
        flat_points: find_flat(model),
        pilgrim_dense: pilgrim_probe(model, &model.sphere_point(1.0), 128),
        sweep: st.sweep,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_is_everything() {
        let e = NormModel::euclidean();
        let st = classify_st(&e);
        assert_eq!(st.verdict, StVerdict::Yes);
        assert_eq!(st.dual_agrees, Some(true));
        match classify_bst_from(&e, &st) {
            BstVerdict::Yes { lambda } => assert!((lambda - 1.0).abs() < 1e-6, "{lambda}"),
            v => panic!("{v:?}"),
        }
        match classify_umst_from(&e, &st) {
            UmstVerdict::EligibleYes { delta_table, .. } => {
                assert!(delta_table.iter().all(|r| r.delta > 0.0));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn lp_failures_sit_on_the_axes() {
        let l4 = NormModel::lp(4.0).unwrap();
        match classify_st_sweep(&l4, 256).verdict {
            StVerdict::No { point, missing, .. } => {
                assert_eq!(missing, DiscSide::Outer);
                assert!(point.x1.abs() < 1e-12 || point.x2.abs() < 1e-12);
            }
            v => panic!("{v:?}"),
        }
        assert!(matches!(classify_umst(&l4), UmstVerdict::No { .. }));
    }

    #[test]
    fn flat_faces() {
        assert_eq!(find_flat(&NormModel::lp(1.0).unwrap()).len(), 4);
        assert!(find_flat(&NormModel::euclidean()).is_empty());
        let hybrid = NormModel::l2_l1_hybrid().unwrap();
        let faces = find_flat(&hybrid);
        assert_eq!(faces.len(), 2);
        for f in faces {
            let mid = 0.5 * (f.start + f.end);
            let u = Vec2::from_angle(mid);
            assert!(u.x1 * u.x2 < 0.0, "face at {mid}");
        }
    }

    #[test]
    fn pilgrim_examples() {
        let e = NormModel::euclidean();
        assert!(matches!(pilgrim_probe(&e, &e.sphere_point(0.3), 64), PilgrimVerdict::LikelyYes { .. }));
        let l1 = NormModel::lp(1.0).unwrap();
        let x = l1.sphere_point_at(Vec2::new(0.5, 0.5));
        match pilgrim_probe(&l1, &x, PILGRIM_GRID) {
            PilgrimVerdict::LikelyYes { share } => assert!(share < 1.0),
            v => panic!("{v:?}"),
        }
        let mix = NormModel::quadrant_mix(1.5, 4.0).unwrap();
        assert!(matches!(
            pilgrim_probe(&mix, &mix.sphere_point(0.0), 64),
            PilgrimVerdict::LikelyNo { .. }
        ));
    }

    #[test]
    fn dual_of_l15_is_flat_at_the_axes() {
        let l15 = NormModel::lp(1.5).unwrap();
        let d = NormModel::dual(&l15).unwrap();
        assert_eq!(d.sphere_point(0.0).kappa_lo(), 0.0);
        assert_eq!(classify_st(&l15).dual_agrees, Some(true));
    }
}
