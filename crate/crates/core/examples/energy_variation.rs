//! First variation of the energy on a soliton and on a perturbed metric.
//!
//! On a soliton the trace-free part of the variation vanishes. The conformal
//! part is `-lambda` times the change of area, so it vanishes too on the
//! steady cigar. Either way the finite-difference oracle tracks the analytic
//! value with an `O(eps^2)` error.

use ricci_soliton::geometry::WarpedMetric;
use ricci_soliton::ode::make_params;
use ricci_soliton::taxonomy::{catalog, Family};
use ricci_soliton::variational::{energy, variation_report, VariationField};

fn show(label: &str, m: &WarpedMetric, window: (f64, f64)) -> ricci_soliton::Result<()> {
    println!("{label}: energy {:.10}", energy(m, window)?);
    for (phi, psi) in [(0.0, 0.1), (0.1, 0.0)] {
        let v = VariationField::bump(m, window, phi, psi)?;
        let r = variation_report(m, &v, 1e-3)?;
        println!(
            "  phi {phi} psi {psi}: analytic {:+.6e}, fd {:+.6e}, slope {:.2}, noether {:.1e}",
            r.analytic, r.finite_difference, r.slope_estimate, r.noether_defect
        );
    }
    Ok(())
}

fn main() -> ricci_soliton::Result<()> {
    let e = catalog(Family::G1Cigar, 1.0)?;
    let m = e.reference_metric(1e-3)?;
    let (lo, hi) = (m.r[0], m.r[m.len() - 1]);
    show("cigar", &m, (lo + 0.1 * (hi - lo), hi - 0.1 * (hi - lo)))?;

    // r + 0.1 r^3 is not a soliton for any potential
    let params = make_params(0.0, -1.0)?;
    let perturbed = WarpedMetric::from_functions(
        params,
        (0.2, 2.0),
        1801,
        |r| r + 0.1 * r.powi(3),
        |r| 1.0 + 0.3 * r * r,
        |r| 0.6 * r,
    )?;
    show("perturbed", &perturbed, (0.3, 1.9))
}
