//! Numerical certificates that a warped metric is a gradient Ricci soliton
//! with potential `u = log|K|`: the trace-free Hessian of `u` vanishes,
//! `Delta u = 2(lambda - K)`, `u' = 2 mu b`, and the rotated gradient
//! `(u'/b) d_theta` is Killing.
//!
//! Derivatives are second-order central differences on the metric's own
//! grid, so residuals of genuine solitons decay like `h^2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::WarpedMetric;
use crate::ode::profile::SMOOTH_ORIGIN_TOL;
use crate::ode::Profile;

/// Curvature below which `log|K|` is treated as undefined.
pub const K_ZERO: f64 = 1e-12;

/// Grid metadata of a residual computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridInfo {
    pub h: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
    /// `[r_first, r_last]` of each run of samples with `|K| >= K_ZERO`.
    pub segments: Vec<(f64, f64)>,
    /// Number of interior samples at which residuals were evaluated.
    pub points_checked: usize,
}

/// Suprema of the four soliton residuals over the interior of the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    /// `|u'' - (b'/b) u'|`
    pub max_tracefree: f64,
    /// `|u'' + (b'/b) u' - 2(lambda - K)|`
    pub max_laplace: f64,
    /// `|u' - 2 mu b|`
    pub max_potential: f64,
    /// `|u'/b - 2 mu|`
    pub max_killing: f64,
    pub grid: GridInfo,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.max_tracefree
            .max(self.max_laplace)
            .max(self.max_potential)
            .max(self.max_killing)
    }
}

/// Pointwise residuals at one interior sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Pointwise {
    pub r: f64,
    pub tracefree: f64,
    pub laplace: f64,
    pub potential: f64,
    pub killing: f64,
}

/// Index ranges `[lo, hi]` of maximal runs with `|K| >= K_ZERO`.
pub(crate) fn nonzero_segments(k: &[f64]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, kv) in k.iter().enumerate() {
        match (kv.abs() >= K_ZERO, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, k.len() - 1));
    }
    out
}

/// `[lo, hi]` sample indices of one run with usable curvature.
type Segment = (usize, usize);

/// Residuals at every interior point of every usable segment.
pub(crate) fn pointwise(metric: &WarpedMetric) -> Result<(Vec<Pointwise>, Vec<Segment>)> {
    let segments: Vec<(usize, usize)> = nonzero_segments(&metric.k)
        .into_iter()
        .filter(|(lo, hi)| hi - lo >= 2)
        .collect();
    if segments.is_empty() {
        let r = metric
            .k
            .iter()
            .position(|k| k.abs() < K_ZERO)
            .map(|i| metric.r[i])
            .unwrap_or(f64::NAN);
        return Err(Error::ZeroCurvature { r });
    }
    let (lambda, mu) = (metric.params.lambda(), metric.params.mu());
    let h = metric.h;
    let u: Vec<f64> = metric.k.iter().map(|k| k.abs().ln()).collect();
    let mut out = Vec::new();
    for &(lo, hi) in &segments {
        for i in lo + 1..hi {
            let b = metric.b[i];
            if !(b > 0.0) {
                continue;
            }
            let du = (u[i + 1] - u[i - 1]) / (2.0 * h);
            let d2u = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
            let ratio = metric.b_prime[i] / b;
            out.push(Pointwise {
                r: metric.r[i],
                tracefree: (d2u - ratio * du).abs(),
                laplace: (d2u + ratio * du - 2.0 * (lambda - metric.k[i])).abs(),
                potential: (du - 2.0 * mu * b).abs(),
                killing: (du / b - 2.0 * mu).abs(),
            });
        }
    }
    Ok((out, segments))
}

/// All four residuals of a metric. The grid is split where `|K| < 1e-12`;
/// only when no run of at least three samples remains is the metric
/// rejected with [`Error::ZeroCurvature`].
pub fn soliton_residual(metric: &WarpedMetric) -> Result<ResidualReport> {
    let (points, segments) = pointwise(metric)?;
    let sup = |f: fn(&Pointwise) -> f64| points.iter().map(f).fold(0.0, f64::max);
    Ok(ResidualReport {
        max_tracefree: sup(|p| p.tracefree),
        max_laplace: sup(|p| p.laplace),
        max_potential: sup(|p| p.potential),
        max_killing: sup(|p| p.killing),
        grid: GridInfo {
            h: metric.h,
            r_min: metric.r[0],
            r_max: metric.r[metric.len() - 1],
            n: metric.len(),
            segments: segments
                .iter()
                .map(|&(lo, hi)| (metric.r[lo], metric.r[hi]))
                .collect(),
            points_checked: points.len(),
        },
    })
}

/// `sup |u' - 2 mu b|`.
pub fn potential_check(metric: &WarpedMetric) -> Result<f64> {
    Ok(soliton_residual(metric)?.max_potential)
}

/// `sup |u'/b - 2 mu|`: the rotated gradient `(u'/b) d_theta` is Killing
/// exactly when `u'/b` is constant.
pub fn killing_check(metric: &WarpedMetric) -> Result<f64> {
    Ok(soliton_residual(metric)?.max_killing)
}

/// Outcome of the smooth-extension test at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothExtension {
    pub extends: bool,
    /// `lambda - 2 mu` when the metric extends.
    #[serde(rename = "K_origin")]
    pub k_origin: Option<f64>,
}

/// Whether the metric of `profile` closes up smoothly at `t = 0`, which
/// happens exactly when `a(0) = 1`.
pub fn smooth_extension_check(profile: &Profile) -> Result<SmoothExtension> {
    if !profile.touches_origin() {
        let (lo, hi) = (profile.lower().t, profile.upper().t);
        return Err(Error::Domain(format!(
            "t = 0 is not in the closure of the profile domain ({lo}, {hi})"
        )));
    }
    let a0 = profile.value(0.0)?;
    let extends = (a0 - 1.0).abs() <= SMOOTH_ORIGIN_TOL;
    let p = profile.params();
    Ok(SmoothExtension {
        extends,
        k_origin: extends.then(|| p.lambda() - 2.0 * p.mu()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_warped_metric;
    use crate::ode::{closed_form_profile, make_params};

    fn cigar_metric(n: usize) -> WarpedMetric {
        let p = closed_form_profile(make_params(0.0, -1.0).unwrap(), 1.0)
            .unwrap()
            .restrict_to_origin()
            .unwrap();
        build_warped_metric(&p, (0.0, 0.0), (0.2, 3.2), n).unwrap()
    }

    #[test]
    fn cigar_residuals_are_small_and_second_order() {
        let coarse = soliton_residual(&cigar_metric(3001)).unwrap();
        let fine = soliton_residual(&cigar_metric(6001)).unwrap();
        assert!(coarse.max() < 1e-5, "{coarse:?}");
        for (c, f) in [
            (coarse.max_tracefree, fine.max_tracefree),
            (coarse.max_laplace, fine.max_laplace),
            (coarse.max_potential, fine.max_potential),
            (coarse.max_killing, fine.max_killing),
        ] {
            assert!(c / f > 3.5, "{c} {f} {coarse:?} {fine:?}");
        }
    }

    #[test]
    fn perturbed_cigar_fails() {
        let bump = |r: f64| 1.0 + 0.01 * (3.0 * r).sin();
        let dbump = |r: f64| 0.03 * (3.0 * r).cos();
        let d2bump = |r: f64| -0.09 * (3.0 * r).sin();
        let m = WarpedMetric::from_functions(
            make_params(0.0, -1.0).unwrap(),
            (0.2, 3.0),
            2801,
            |r| r.tanh() * bump(r),
            |r| bump(r) / r.cosh().powi(2) + r.tanh() * dbump(r),
            |r| {
                let s2 = 1.0 / r.cosh().powi(2);
                -2.0 * r.tanh() * s2 * bump(r) + 2.0 * s2 * dbump(r) + r.tanh() * d2bump(r)
            },
        )
        .unwrap();
        let rep = soliton_residual(&m).unwrap();
        assert!(rep.max_tracefree > 1e-2);
        assert!(rep.max_potential > 1e-2);
        assert!(rep.max_killing > 1e-2);
    }

    #[test]
    fn constant_curvature_has_zero_residuals() {
        // round sphere band, K = lambda = 1
        let m = WarpedMetric::from_functions(
            make_params(1.0, 1.0).unwrap(),
            (0.5, 2.5),
            201,
            f64::sin,
            f64::cos,
            |r| -r.sin(),
        )
        .unwrap();
        let rep = soliton_residual(&m).unwrap();
        assert!(rep.max_tracefree < 1e-12 && rep.max_laplace < 1e-12);
    }

    #[test]
    fn flat_metric_is_rejected() {
        let m = WarpedMetric::from_functions(
            make_params(-2.0, -1.0).unwrap(),
            (1.0, 2.0),
            11,
            |r| r,
            |_| 1.0,
            |_| 0.0,
        )
        .unwrap();
        assert!(matches!(soliton_residual(&m), Err(Error::ZeroCurvature { .. })));
    }

    #[test]
    fn sign_change_splits_the_grid() {
        let k = [1.0, 2.0, 3.0, 0.0, -1.0, -2.0, -3.0, -4.0];
        assert_eq!(nonzero_segments(&k), vec![(0, 2), (4, 7)]);
    }

    #[test]
    fn smooth_extension_of_closed_forms() {
        let cigar = closed_form_profile(make_params(0.0, -1.0).unwrap(), 1.0).unwrap();
        let s = smooth_extension_check(&cigar).unwrap();
        assert_eq!((s.extends, s.k_origin), (true, Some(2.0)));
        let g3 = closed_form_profile(make_params(0.0, 1.0).unwrap(), -1.0).unwrap();
        assert!(matches!(smooth_extension_check(&g3), Err(Error::Domain(_))));
        let cone = closed_form_profile(make_params(0.0, 1.0).unwrap(), 0.5).unwrap();
        assert!(!smooth_extension_check(&cone).unwrap().extends);
    }
}
