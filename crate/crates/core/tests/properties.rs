use proptest::prelude::*;

use taubnut_index::eta::{
    boundary_channels, eta_bernoulli, eta_integral, eta_route, BoundaryChannel, Route, SeriesSpec,
};
use taubnut_index::gauge::{field_strength_auto, Duality, InstantonChannel, InstantonData};
use taubnut_index::geometry::{d_omega, metric_at, potential, star3_dv, Gauge, MetricSpec, MetricVariant, Point};
use taubnut_index::index::{index_formula, index_formula_for, GRAV_LEMMA};

fn generic_lambda() -> impl Strategy<Value = f64> {
    (-4i32..4, 0.01f64..0.99).prop_map(|(n, f)| n as f64 + f)
}

fn polar_point(r_lo: f64, r_hi: f64) -> impl Strategy<Value = Point> {
    (r_lo..r_hi, 0.05f64..3.09, -3.1f64..3.1, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(r, t, p, tau)| Point::from_polar(r, t, p, tau))
}

fn channels() -> impl Strategy<Value = Vec<BoundaryChannel>> {
    prop::collection::vec((generic_lambda(), -5.0f64..5.0), 1..5)
        .prop_map(|v| v.into_iter().map(|(l, f)| BoundaryChannel::new(l, f)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eta_is_periodic_in_lambda(l in generic_lambda(), n in -3i32..3) {
        let a = eta_bernoulli(l).unwrap();
        let b = eta_bernoulli(l + n as f64).unwrap();
        prop_assert!(a.max_diff(b) < 1e-12);
    }

    #[test]
    fn eta_reflection(l in generic_lambda()) {
        let a = eta_bernoulli(l).unwrap();
        let b = eta_bernoulli(-l).unwrap();
        prop_assert!((a.a0 + b.a0).abs() < 1e-12);
        prop_assert!((a.a2 - b.a2).abs() < 1e-12);
    }

    #[test]
    fn index_formula_is_invariant_under_holonomy_shift(ch in channels(), bulk in -3.0f64..3.0, j in 0usize..4) {
        let j = j % ch.len();
        let mut shifted = ch.clone();
        // (λ, c) → (λ + 1, c − 1) leaves Φ = λ + c unchanged
        shifted[j].lambda += 1.0;
        let a = index_formula(&ch, bulk).unwrap();
        let b = index_formula(&shifted, bulk).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn assembled_equals_closed_formula(ch in channels(), bulk in -3.0f64..3.0) {
        let s = SeriesSpec::default();
        let grav = ch.len() as f64 * GRAV_LEMMA;
        let closed = index_formula(&ch, bulk).unwrap();
        for route in [Route::Bernoulli, Route::Poisson] {
            let eta = eta_integral(&ch, route, &s).unwrap();
            prop_assert!((bulk + grav - eta.integrated - closed).abs() < 1e-9 + eta.error_estimate);
        }
    }

    #[test]
    fn index_is_additive_over_direct_sums(a in channels(), b in channels(), ba in -2.0f64..2.0, bb in -2.0f64..2.0) {
        let mut both = a.clone();
        both.extend(b.iter().copied());
        let sum = index_formula(&a, ba).unwrap() + index_formula(&b, bb).unwrap();
        prop_assert!((index_formula(&both, ba + bb).unwrap() - sum).abs() < 1e-12);
    }

    #[test]
    fn model_index_is_integral(params in prop::collection::vec((generic_lambda(), -3i64..4), 1..4)) {
        let Ok(data) = InstantonData::model(&params) else { return Ok(()) };
        let bulk: f64 = data.channels.iter().map(taubnut_index::gauge::bulk_closed_form).sum();
        let v = index_formula_for(&data, bulk).unwrap();
        prop_assert!((v - v.round()).abs() < 1e-9, "{v}");
        let fluxes: Vec<f64> = boundary_channels(&data).unwrap().iter().map(|c| c.flux).collect();
        prop_assert_eq!(fluxes, data.channels.iter().map(|c| c.flux()).collect::<Vec<_>>());
    }

    #[test]
    fn d_omega_is_star_dv(p in polar_point(0.01, 50.0)) {
        let d = d_omega(&p, Gauge::regular_at(&p)).unwrap();
        let s = star3_dv(&p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((d[i][j] - s[i][j]).abs() < 1e-10 * (1.0 + s[i][j].abs()));
            }
        }
    }

    #[test]
    fn homotopy_end_matches_conformal_metric(p in polar_point(4.0, 60.0)) {
        let gauge = Gauge::regular_at(&p);
        let a = metric_at(&MetricSpec::new(MetricVariant::Homotopy { t: 1.0 }).with_gauge(gauge), &p).unwrap();
        let b = metric_at(&MetricSpec::new(MetricVariant::Conformal).with_gauge(gauge), &p).unwrap();
        prop_assert!((a.g - b.g).amax() <= 1e-13 * b.g.amax());
    }

    #[test]
    fn conformal_end_is_rescaled_taub_nut(p in polar_point(4.0, 60.0)) {
        let gauge = Gauge::regular_at(&p);
        let r = p.r();
        let tn = metric_at(&MetricSpec::taub_nut().with_gauge(gauge), &p).unwrap();
        let conf = metric_at(&MetricSpec::new(MetricVariant::Conformal).with_gauge(gauge), &p).unwrap();
        let scaled = tn.g / (potential(1.0, r) * r * r);
        prop_assert!((conf.g - scaled).amax() <= 1e-12 * scaled.amax());
    }

    #[test]
    fn frames_are_orthonormal_and_oriented(p in polar_point(0.05, 40.0), v in 0usize..4, t in 0.0f64..1.0) {
        let variant = [MetricVariant::TaubNut, MetricVariant::Conformal, MetricVariant::ExactD, MetricVariant::Homotopy { t }][v];
        let s = metric_at(&MetricSpec::new(variant).with_gauge(Gauge::regular_at(&p)), &p).unwrap();
        prop_assert!(s.frame_residual() < 1e-12);
        prop_assert!(s.frame.determinant() > 0.0);
    }

    #[test]
    fn model_fields_are_anti_self_dual(l in generic_lambda(), m in -4i64..5, p in polar_point(0.02, 30.0)) {
        let ch = InstantonChannel::model(l, m);
        let fs = field_strength_auto(&ch, &p).unwrap();
        prop_assert!(fs.relative_defect() < 1e-8);
        prop_assert_eq!(fs.duality(1e-8), Duality::AntiSelfDual);
        prop_assert!(fs.closure_residual <= 1e-10 * (1.0 + fs.norm));
    }

    #[test]
    fn fibre_angle_wraps(t in -20.0f64..20.0) {
        let p = Point::new(0.1, 0.2, 0.3, t);
        prop_assert!((0.0..std::f64::consts::TAU).contains(&p.tau));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // the default u_max resolves the heat-kernel tail only for dist(λ, ℤ) ≳ 0.045
    #[test]
    fn mode_sum_matches_closed_form(l in (-4i32..4, 0.05f64..0.95).prop_map(|(n, f)| n as f64 + f)) {
        let s = SeriesSpec::default();
        let v = eta_route(l, Route::ModeSum, &s).unwrap();
        prop_assert!(v.value.max_diff(eta_bernoulli(l).unwrap()) < 1e-8);
    }
}

#[test]
fn mode_sum_refuses_near_integer_holonomy() {
    let err = eta_route(-0.0236, Route::ModeSum, &SeriesSpec::default()).unwrap_err();
    assert!(matches!(err, taubnut_index::error::Error::SeriesNonConvergence { .. }), "{err:?}");
    assert!(eta_route(-0.0236, Route::Bernoulli, &SeriesSpec::default()).is_ok());
}
