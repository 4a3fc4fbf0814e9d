use std::f64::consts::PI;

use ricci_soliton::geometry::{build_warped_metric, WarpedMetric};
use ricci_soliton::numeric::smooth_bump;
use ricci_soliton::taxonomy::{catalog, Family};
use ricci_soliton::variational::{
    conformal_part, energy, fd_variation, first_variation, total_curvature, VariationField,
};

mod common;
use common::perturbed_set;

/// Window spacing `h` so that the bump window spans at least 400 points.
fn metric_for(family: Family, nu: f64) -> WarpedMetric {
    let e = catalog(family, nu).unwrap();
    let h = (0.8 * e.reference.r_hi / 400.0).min(1e-3);
    e.reference_metric(h).unwrap()
}

fn inner(m: &WarpedMetric) -> (f64, f64) {
    let (r0, r1) = (m.r[0], m.r[m.len() - 1]);
    (r0 + 0.1 * (r1 - r0), r1 - 0.1 * (r1 - r0))
}

// composite trapezoid on the grid; the integrands vanish to all orders at
// the window ends, where the rule is spectrally accurate
fn trapezoid(m: &WarpedMetric, f: impl Fn(usize) -> f64) -> f64 {
    (0..m.len()).map(f).sum::<f64>() * m.h
}

#[test]
fn every_catalog_entry_is_critical_for_tracefree_variations() {
    for f in Family::ALL {
        for nu in f.info().sample_nu {
            let m = metric_for(f, nu);
            let v = VariationField::bump(&m, inner(&m), 0.0, 1.0).unwrap();
            let dv = first_variation(&m, &v).unwrap();
            assert!(dv.abs() <= 1e-7, "{f} {nu}: {dv:e}");
        }
    }
}

#[test]
fn conformal_variation_of_a_soliton_is_minus_lambda_times_area_change() {
    for f in Family::ALL {
        let nu = f.info().sample_nu[1];
        let e = catalog(f, nu).unwrap();
        let m = metric_for(f, nu);
        let w = inner(&m);
        let v = VariationField::bump(&m, w, 1.0, 0.0).unwrap();
        let expected = -e.params.lambda() * 2.0 * PI * trapezoid(&m, |i| smooth_bump(w.0, w.1, m.r[i]) * m.b[i]);
        let got = conformal_part(&m, &v).unwrap();
        assert!((got - expected).abs() <= 1e-7 * (1.0 + expected.abs()), "{f}: {got} vs {expected}");
    }
}

#[test]
fn energy_scales_with_log_of_the_factor() {
    // g1(c) = c^2 g1(1) is the cigar b = c tanh(r / c)
    let base = catalog(Family::G1Cigar, 1.0).unwrap().profile.restrict_to_origin().unwrap();
    let m = build_warped_metric(&base, (0.0, 0.0), (0.0, 3.0), 3001).unwrap();
    let w = (0.5, 2.5);
    let e1 = energy(&m, w).unwrap();
    let tc = total_curvature(&m, w).unwrap();
    for c in [0.5, 2.0] {
        let p = catalog(Family::G1Cigar, c).unwrap().profile.restrict_to_origin().unwrap();
        let mc = build_warped_metric(&p, (0.0, 0.0), (0.0, 3.0 * c), 3001).unwrap();
        let ec = energy(&mc, (0.5 * c, 2.5 * c)).unwrap();
        let predicted = e1 - 2.0 * c.ln() * tc;
        assert!((ec - predicted).abs() <= 1e-6, "c = {c}: {ec} vs {predicted}");
    }
}

fn lie(m: &WarpedMetric) -> VariationField {
    let (lo, hi) = inner(m);
    let dbump = move |r: f64| {
        // d/dr exp(1 - 1/q), q = 1 - x^2, x = (2r - lo - hi)/(hi - lo)
        let x = (2.0 * r - lo - hi) / (hi - lo);
        let q = 1.0 - x * x;
        if q <= 0.0 {
            0.0
        } else {
            smooth_bump(lo, hi, r) * (-2.0 * x / (q * q)) * 2.0 / (hi - lo)
        }
    };
    VariationField::lie_derivative(m, (lo, hi), move |r| 0.2 * smooth_bump(lo, hi, r), move |r| 0.2 * dbump(r))
        .unwrap()
}

#[test]
fn lie_derivative_variations_leave_the_energy_unchanged() {
    let mut metrics: Vec<(String, WarpedMetric)> = Family::ALL
        .iter()
        .map(|&f| (f.tag().to_string(), metric_for(f, f.info().sample_nu[1])))
        .collect();
    metrics.extend(perturbed_set().into_iter().map(|(l, m)| (l.to_string(), m)));
    for (label, m) in &metrics {
        let v = lie(m);
        let analytic = first_variation(m, &v).unwrap();
        assert!(analytic.abs() <= 1e-7, "{label}: {analytic:e}");
        let fd = fd_variation(m, &v, 1e-4).unwrap();
        assert!(fd.abs() <= 1e-6, "{label}: fd {fd:e}");
    }
}

#[test]
fn conformal_half_of_a_lie_variation_vanishes_only_on_solitons() {
    for f in [Family::G1Cigar, Family::G6, Family::G8, Family::G12] {
        let m = metric_for(f, f.info().sample_nu[1]);
        let c = conformal_part(&m, &lie(&m)).unwrap();
        assert!(c.abs() <= 1e-7, "{f}: {c:e}");
    }
    let (_, m) = perturbed_set().swap_remove(1);
    let c = conformal_part(&m, &lie(&m)).unwrap();
    assert!(c.abs() >= 1e-3, "{c:e}");
}

#[test]
fn perturbed_metrics_fd_and_analytic_agree_and_are_large() {
    for (label, m) in perturbed_set() {
        let v = VariationField::bump(&m, inner(&m), 0.0, 0.1).unwrap();
        let analytic = first_variation(&m, &v).unwrap();
        let fd = fd_variation(&m, &v, 1e-4).unwrap();
        assert!(analytic.abs() >= 1e-3 && fd.abs() >= 1e-3, "{label}: {analytic} {fd}");
        assert!((fd - analytic).abs() <= 1e-5 * analytic.abs().max(1.0), "{label}: {analytic} {fd}");
    }
}
