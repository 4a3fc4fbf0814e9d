use proptest::prelude::*;

use ricci_soliton::cli::{parse_config, run_with_io, to_json, LogLevel};
use ricci_soliton::geometry::{build_warped_metric, geometry_report, EndDescriptor};
use ricci_soliton::numeric::fmt17;
use ricci_soliton::ode::{
    integrate_profile, make_params, time_of_flight, Monotonicity, Profile, SolitonParams, Symmetry,
};
use ricci_soliton::taxonomy::{catalog, classify, Family, FamilyLabel};

const TOL: f64 = 1e-10;

fn mu_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0..-0.2f64, 0.2..3.0f64]
}

/// Parameters and an initial value at least 5% away from the separatrix.
fn generic() -> impl Strategy<Value = (SolitonParams, f64)> {
    (-3.0..3.0f64, mu_strategy(), 0.2..5.0f64).prop_filter_map("near separatrix", |(l, m, a0)| {
        let p = make_params(l, m).ok()?;
        match p.positive_separatrix() {
            Some(g) if (a0 - g).abs() < 0.05 * g => None,
            _ => Some((p, a0)),
        }
    })
}

fn profile((p, a0): (SolitonParams, f64)) -> Profile {
    integrate_profile(p, 0.0, a0, (-0.05, 0.05), TOL).unwrap()
}

/// Sample times at the given fractions of the sampled span, which ends early
/// when the solution blows up or dies inside the window.
fn inside(p: &Profile, fractions: &[f64]) -> Vec<f64> {
    let (lo, hi) = p.data_span();
    fractions.iter().map(|f| lo + f * (hi - lo)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn ode_residual_stays_within_ten_tol(case in generic()) {
        let p = profile(case);
        prop_assert!(p.max_residual(100) <= 10.0 * TOL, "{}", p.max_residual(100));
    }

    #[test]
    fn monotonicity_follows_the_sign_of_the_rhs(case in generic()) {
        let (params, a0) = case;
        let p = profile(case);
        let expected = if params.rhs(a0) > 0.0 { Monotonicity::Increasing } else { Monotonicity::Decreasing };
        prop_assert_eq!(p.monotonicity(), expected);
    }

    #[test]
    fn curvature_sign_matches_the_derivative((params, a) in generic()) {
        // a' = 2 a^3 K
        let k = params.curvature(a);
        let da = params.rhs(a);
        prop_assert!((da - 2.0 * a.powi(3) * k).abs() <= 1e-12 * (1.0 + da.abs()));
    }

    #[test]
    fn time_of_flight_matches_integration(case in generic(), frac in 0.1..1.0f64) {
        let (params, a0) = case;
        let p = profile(case);
        let (_, hi) = p.data_span();
        let t1 = hi * frac;
        let a1 = p.value(t1).unwrap();
        prop_assume!((a1 - a0).abs() > 1e-9 * a0);
        let flight = time_of_flight(&params, a0, a1).unwrap();
        prop_assert!((flight - t1).abs() <= 1e-8, "{flight} vs {t1}");
    }

    #[test]
    fn scale_and_translate_act_on_values(case in generic(), alpha in 0.25..4.0f64, tau in -1.0..1.0f64) {
        let p = profile(case);
        let scaled = p.apply_symmetry(Symmetry::Scale(alpha)).unwrap();
        let moved = p.apply_symmetry(Symmetry::Translate(tau)).unwrap();
        prop_assert!((scaled.params().mu() - case.0.mu() / alpha).abs() <= 1e-14 * case.0.mu().abs());
        for t in inside(&p, &[0.1, 0.5, 0.9]) {
            let a = p.value(t).unwrap();
            prop_assert!((scaled.value(t).unwrap() - alpha * a).abs() <= 1e-12 * alpha * a);
            prop_assert!((moved.value(t + tau).unwrap() - a).abs() <= 1e-12 * a);
        }
        prop_assert!(scaled.max_residual(50) <= 10.0 * TOL);
    }

    #[test]
    fn rescale_stretches_time(case in generic(), beta in 0.5..2.0f64) {
        let p = profile(case);
        let r = p.apply_symmetry(Symmetry::Rescale(beta)).unwrap();
        for t in inside(&p, &[0.1, 0.6, 0.9]) {
            let (x, y) = (r.value(beta * beta * t).unwrap(), p.value(t).unwrap());
            prop_assert!((x - y).abs() <= 1e-12 * y);
        }
    }

    #[test]
    fn classification_is_invariant_under_scalings(case in generic(), alpha in 0.25..4.0f64, beta in 0.5..2.0f64) {
        let p = profile(case);
        let label = classify(&p);
        prop_assume!(!matches!(label, FamilyLabel::UnresolvedT0Sign { .. }));
        let scaled = p.apply_symmetry(Symmetry::Scale(alpha)).unwrap();
        let rescaled = p.apply_symmetry(Symmetry::Rescale(beta)).unwrap();
        prop_assert_eq!(classify(&scaled).tag(), label.tag());
        prop_assert_eq!(classify(&rescaled).tag(), label.tag());
    }

    #[test]
    fn fmt17_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        let v = serde_json::json!({ "x": x });
        let back: serde_json::Value = serde_json::from_str(&to_json(&v)).unwrap();
        prop_assert_eq!(back["x"].as_f64().unwrap(), x);
    }

    #[test]
    fn config_lines_parse(keys in proptest::collection::btree_set("[a-z][a-z0-9-]{0,8}", 1..6), val in "[0-9.,-]{1,10}") {
        let text: String = keys.iter().map(|k| format!("{k} = {val} # note\n")).collect();
        let map = parse_config(&text).unwrap();
        prop_assert_eq!(map.len(), keys.len());
        for k in &keys {
            prop_assert_eq!(map[k].as_str(), val.as_str());
        }
    }
}

fn token() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("--lambda".to_string()),
        Just("--mu".to_string()),
        Just("--a0".to_string()),
        Just("--t0".to_string()),
        Just("--window".to_string()),
        Just("--samples".to_string()),
        Just("--tol".to_string()),
        Just("--format".to_string()),
        Just("json".to_string()),
        "-?[0-9]{1,3}(\\.[0-9]{1,3})?(e-?[0-9]{1,2})?",
        "[ -~]{0,8}",
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn cli_never_panics(sub in prop_oneof![Just("integrate"), Just("classify"), Just("bogus")],
                        rest in proptest::collection::vec(token(), 0..10)) {
        let mut argv = vec!["soliton".to_string(), sub.to_string()];
        argv.extend(rest);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with_io(argv, &mut out, &mut err, LogLevel::Quiet);
        prop_assert!(matches!(code, 0..=2));
        prop_assert_eq!(code == 0, err.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn g6_cone_angle_is_nu(nu in 0.3..6.0f64) {
        let e = catalog(Family::G6, nu).unwrap();
        let r = geometry_report(&e.profile, 1e-12).unwrap();
        match r.outer_end {
            EndDescriptor::ConeEnd { angle } => prop_assert!((angle - nu).abs() <= 1e-4, "{angle}"),
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn cigar_metric_tracks_tanh(nu in 0.4..3.0f64) {
        // b = nu tanh(r / nu) for mu = -1/nu^2
        let p = catalog(Family::G1Cigar, nu).unwrap().profile.restrict_to_origin().unwrap();
        let m = build_warped_metric(&p, (0.0, 0.0), (0.0, 4.0 * nu), 401).unwrap();
        for (r, b) in m.r.iter().zip(&m.b) {
            prop_assert!((b - nu * (r / nu).tanh()).abs() <= 1e-9 * nu);
        }
        prop_assert!(m.curvature_identity_residual() <= 1e-6);
    }
}
