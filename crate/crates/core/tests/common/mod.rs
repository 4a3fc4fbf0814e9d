//! Fixtures shared by the integration tests.

use ricci_soliton::geometry::WarpedMetric;
use ricci_soliton::ode::make_params;

/// Eight metrics that are not solitons, with their analytic `b, b', b''`.
/// Each keeps `K` away from zero on its window, where `log|K|` is smooth.
pub type Warp = (&'static str, (f64, f64), fn(f64) -> f64, fn(f64) -> f64, fn(f64) -> f64);

pub fn perturbed_set() -> Vec<(&'static str, WarpedMetric)> {
    let warps: [Warp; 8] = [
        (
            "tanh(r)(1 + 0.02 sin 3r)",
            (0.2, 2.5),
            |r| r.tanh() * (1.0 + 0.02 * (3.0 * r).sin()),
            |r| (1.0 + 0.02 * (3.0 * r).sin()) / r.cosh().powi(2) + 0.06 * r.tanh() * (3.0 * r).cos(),
            |r| {
                let s2 = 1.0 / r.cosh().powi(2);
                -2.0 * r.tanh() * s2 * (1.0 + 0.02 * (3.0 * r).sin()) + 0.12 * s2 * (3.0 * r).cos()
                    - 0.18 * r.tanh() * (3.0 * r).sin()
            },
        ),
        (
            "r + 0.1 r^3",
            (0.2, 2.0),
            |r| r + 0.1 * r.powi(3),
            |r| 1.0 + 0.3 * r * r,
            |r| 0.6 * r,
        ),
        (
            "sin r + 0.1 sin 2r",
            (0.2, 2.5),
            |r| r.sin() + 0.1 * (2.0 * r).sin(),
            |r| r.cos() + 0.2 * (2.0 * r).cos(),
            |r| -r.sin() - 0.4 * (2.0 * r).sin(),
        ),
        (
            "sinh r + 0.2 sinh 2r",
            (0.2, 2.0),
            |r| r.sinh() + 0.2 * (2.0 * r).sinh(),
            |r| r.cosh() + 0.4 * (2.0 * r).cosh(),
            |r| r.sinh() + 0.8 * (2.0 * r).sinh(),
        ),
        (
            "tan r + 0.1 r^3",
            (0.1, 1.2),
            |r| r.tan() + 0.1 * r.powi(3),
            |r| 1.0 / r.cos().powi(2) + 0.3 * r * r,
            |r| 2.0 * r.tan() / r.cos().powi(2) + 0.6 * r,
        ),
        (
            "r exp(-r^2/4)",
            (0.2, 2.0),
            |r| r * (-r * r / 4.0).exp(),
            |r| (1.0 - r * r / 2.0) * (-r * r / 4.0).exp(),
            |r| (r.powi(3) / 4.0 - 1.5 * r) * (-r * r / 4.0).exp(),
        ),
        ("r + r^2", (0.5, 2.0), |r| r + r * r, |r| 1.0 + 2.0 * r, |_| 2.0),
        (
            "ln(1 + r)",
            (0.2, 2.0),
            |r| r.ln_1p(),
            |r| 1.0 / (1.0 + r),
            |r| -1.0 / (1.0 + r).powi(2),
        ),
    ];
    warps
        .iter()
        .map(|&(label, window, b, db, d2b)| {
            let n = ((window.1 - window.0) / 1e-3).round() as usize + 1;
            // compared against the cigar's equations
            let m = WarpedMetric::from_functions(make_params(0.0, -1.0).unwrap(), window, n, b, db, d2b)
                .expect("analytic warps are positive on their windows");
            (label, m)
        })
        .collect()
}
