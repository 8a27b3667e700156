//! Property suites for the invariants of gauges, contractive maps,
//! tangent discs and ellipses, and moduli.

use proptest::prelude::*;

use planar_norms::classify::{classify_st_sweep, StVerdict};
use planar_norms::gallery::{blend_l4, grandpa_pig, polar_twentieth};
use planar_norms::geometry::{LinearMap2, Vec2};
use planar_norms::moduli::delta_uc_sweep;
use planar_norms::semigroup::{certify, make_l_ab, orbit_map};
use planar_norms::tangency::{dual_transfer, inner_disc, outer_disc, tangency_report, Ellipse};
use planar_norms::NormModel;

fn smooth_models() -> Vec<NormModel> {
    vec![
        NormModel::euclidean(),
        NormModel::lp(4.0).unwrap(),
        NormModel::lp(1.5).unwrap(),
        grandpa_pig(),
        polar_twentieth(),
        blend_l4(),
    ]
}

fn model() -> impl Strategy<Value = NormModel> {
    (0..smooth_models().len()).prop_map(|i| smooth_models().swap_remove(i))
}

fn angle() -> impl Strategy<Value = f64> {
    0.0..std::f64::consts::TAU
}

fn generic_angle() -> impl Strategy<Value = f64> {
    // Stay clear of the coordinate axes, where several models lose a disc.
    (0usize..4, 0.05..(std::f64::consts::FRAC_PI_2 - 0.05)).prop_map(|(q, t)| q as f64 * std::f64::consts::FRAC_PI_2 + t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gauge_is_a_norm(m in model(), a in angle(), b in angle(), r in 0.1..3.0f64, s in 0.1..3.0f64, t in -3.0..3.0f64) {
        let (x, y) = (Vec2::from_angle(a) * r, Vec2::from_angle(b) * s);
        prop_assert!((m.gauge(x * t) - t.abs() * m.gauge(x)).abs() <= 1e-9 * (1.0 + t.abs() * m.gauge(x)));
        prop_assert!(m.gauge(x + y) <= m.gauge(x) + m.gauge(y) + 1e-9);
        prop_assert!((m.gauge(-x) - m.gauge(x)).abs() <= 1e-9 * m.gauge(x));
    }

    #[test]
    fn contractions_compose(m in model(), a in generic_angle(), b in generic_angle(), e1 in 0.05..0.9f64, e2 in 0.05..0.9f64) {
        let (x, y) = (m.sphere_point(a), m.sphere_point(b));
        let t1 = make_l_ab(&m, &x, &x, e1).unwrap();
        let t2 = make_l_ab(&m, &y, &y, e2).unwrap();
        let c = certify(&m, &t1.compose(&t2)).unwrap();
        prop_assert!(c.is_contractive, "{c:?}");
    }

    #[test]
    fn l_aa_has_norm_one_and_stays_near_identity(m in model(), a in generic_angle(), eps in 0.01..0.99f64) {
        let x = m.sphere_point(a);
        let l = make_l_ab(&m, &x, &x, eps).unwrap();
        prop_assert!((m.operator_norm(&l).value - 1.0).abs() <= 1e-6);
        prop_assert!(m.operator_norm(&l.sub(&LinearMap2::IDENTITY)).value <= 2.0 * eps + 1e-6);
        prop_assert!(m.gauge(l.apply(x.point) - x.point) <= 1e-12);
    }

    #[test]
    fn orbit_maps_hit_their_target(m in model(), a in generic_angle(), b in generic_angle()) {
        let (x, y) = (m.sphere_point(a), m.sphere_point(b));
        if let Some(c) = orbit_map(&m, &x, &y) {
            prop_assert!(c.is_contractive);
            prop_assert!(m.gauge(c.t.apply(x.point) - y.point) <= 1e-9);
        }
    }

    #[test]
    fn discs_bracket_the_osculating_circle(m in model(), a in generic_angle()) {
        let x = m.sphere_point(a);
        let k = x.kappa_lo();
        if let Some(d) = inner_disc(&m, &x) {
            prop_assert!(d.radius <= 1.0 / x.kappa_hi() + 1e-9);
        }
        if let Some(d) = outer_disc(&m, &x) {
            prop_assert!(d.radius >= 1.0 / k - 1e-9);
        }
    }

    #[test]
    fn modulus_is_monotone(m in model(), e in 0.05..1.8f64, de in 0.01..0.2f64) {
        let lo = delta_uc_sweep(&m, e, 256).unwrap();
        let hi = delta_uc_sweep(&m, e + de, 256).unwrap();
        prop_assert!(lo <= hi + 1e-6, "{lo} > {hi}");
        prop_assert!((0.0..=1.0).contains(&lo));
    }

    #[test]
    fn ellipse_duality_is_an_involution(a in 0.2..5.0f64, b in 0.2..5.0f64, c in -1.0..1.0f64) {
        let c = c * 2.0 * (a * b).sqrt() * 0.99;
        let e = Ellipse::from_coeffs(a, b, c).unwrap();
        prop_assert!(e.max_abs_diff(&e.dual().dual()) <= 1e-9 * (a + b));
        prop_assert!((e.area() * e.dual().area() - std::f64::consts::PI.powi(2)).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn tangency_transfer_round_trips(a in generic_angle()) {
        let m = polar_twentieth();
        let d = NormModel::dual(&m).unwrap();
        let dd = NormModel::dual(&d).unwrap();
        let r = tangency_report(&m, &m.sphere_point(a));
        let back = dual_transfer(&dual_transfer(&r, &d).unwrap(), &dd).unwrap();
        prop_assert!((back.point.point - r.point.point).norm2() <= 1e-6);
        for (x, y) in [(r.inner_ellipse, back.inner_ellipse), (r.outer_ellipse, back.outer_ellipse)] {
            match (x, y) {
                (Some(x), Some(y)) => prop_assert!(x.max_abs_diff(&y) <= 1e-9),
                (None, None) => {}
                other => prop_assert!(false, "{other:?}"),
            }
        }
    }

    #[test]
    fn scaling_preserves_the_st_verdict(f in 0.3..3.0f64) {
        let m = NormModel::lp(4.0).unwrap();
        let s = NormModel::scaled(&m, f).unwrap();
        let v = classify_st_sweep(&s, 256).verdict;
        prop_assert!(matches!(v, StVerdict::No { .. }), "{v:?}");
    }
}
