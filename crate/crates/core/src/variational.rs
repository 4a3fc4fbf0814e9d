//! The functional `E[g] = \int K log|K| dmu` on radial windows of a warped
//! metric, its first variation, an independent finite-difference oracle for
//! it, and the conserved quantity `Delta log|K| + 2K`.
//!
//! A variation `h = phi g + psi (dr^2 - b^2 dtheta^2)` has trace `2 phi` and
//! trace-free part `psi (dr^2 - b^2 dtheta^2)`. The first variation is
//!
//! ```text
//! dE = -1/4 \int H (Delta u + 2K) dmu + 1/2 \int <h, trace-free Hess u> dmu,   u = log|K|
//! ```
//!
//! so trace-free variations detect exactly the soliton equation, and on a
//! soliton a conformal variation gives `-lambda \int phi dmu`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::WarpedMetric;
use crate::numeric::{central6_d1, central6_d2, central_d1, central_d2, simpson, smooth_bump};
use crate::verify::K_ZERO;

/// Grid points required between a variation's support and the metric edge:
/// the oracle differences `b` twice with seven-point stencils.
pub const SUPPORT_MARGIN: usize = 7;

/// Default step of the finite-difference oracle.
pub const DEFAULT_EPS: f64 = 1e-4;

/// A compactly supported radial variation, sampled on a metric's grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationField {
    pub window: (f64, f64),
    /// Grid index of the first sample.
    pub start: usize,
    /// Conformal part.
    pub phi: Vec<f64>,
    /// Trace-free part.
    pub psi: Vec<f64>,
    pub h: f64,
}

impl VariationField {
    /// Sample `phi` and `psi` on the grid points of `metric` inside `window`.
    /// Both must vanish to second order at the window ends.
    pub fn from_fns(
        metric: &WarpedMetric,
        window: (f64, f64),
        phi: impl Fn(f64) -> f64,
        psi: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let (lo, hi) = support_indices(metric, window)?;
        let v = VariationField {
            window,
            start: lo,
            phi: (lo..=hi).map(|i| phi(metric.r[i])).collect(),
            psi: (lo..=hi).map(|i| psi(metric.r[i])).collect(),
            h: metric.h,
        };
        v.check_support()?;
        Ok(v)
    }

    /// `phi = a * bump`, `psi = c * bump` with the standard smooth bump on
    /// `window`.
    pub fn bump(metric: &WarpedMetric, window: (f64, f64), phi_amp: f64, psi_amp: f64) -> Result<Self> {
        let (lo, hi) = window;
        Self::from_fns(
            metric,
            window,
            |r| phi_amp * smooth_bump(lo, hi, r),
            |r| psi_amp * smooth_bump(lo, hi, r),
        )
    }

    /// `h = L_X g` for the radial field `X = xi(r) d_r`:
    /// `phi = xi' + (b'/b) xi = div X`, `psi = xi' - (b'/b) xi`.
    pub fn lie_derivative(
        metric: &WarpedMetric,
        window: (f64, f64),
        xi: impl Fn(f64) -> f64,
        dxi: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let (lo, hi) = support_indices(metric, window)?;
        let mut phi = Vec::with_capacity(hi - lo + 1);
        let mut psi = Vec::with_capacity(hi - lo + 1);
        for i in lo..=hi {
            let r = metric.r[i];
            let q = metric.b_prime[i] / metric.b[i];
            phi.push(dxi(r) + q * xi(r));
            psi.push(dxi(r) - q * xi(r));
        }
        let v = VariationField {
            window,
            start: lo,
            phi,
            psi,
            h: metric.h,
        };
        v.check_support()?;
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// Index one past the last sample.
    pub fn end(&self) -> usize {
        self.start + self.len()
    }

    /// Values and the first two differences (with zero extension) vanish at
    /// both ends within `1e-12`.
    fn check_support(&self) -> Result<()> {
        let h = self.h;
        for (name, f) in [("phi", &self.phi), ("psi", &self.psi)] {
            let n = f.len();
            let ext = |j: isize| -> f64 {
                if j < 0 || j >= n as isize {
                    0.0
                } else {
                    f[j as usize]
                }
            };
            for e in [0isize, n as isize - 1] {
                let d0 = ext(e);
                let d1 = (ext(e + 1) - ext(e - 1)) / (2.0 * h);
                let d2 = (ext(e + 1) - 2.0 * ext(e) + ext(e - 1)) / (h * h);
                if d0.abs().max(d1.abs()).max(d2.abs()) > 1e-12 {
                    return Err(Error::Window(format!(
                        "{name} does not vanish to second order at the end r = {}",
                        self.window_edge(e == 0)
                    )));
                }
            }
        }
        Ok(())
    }

    fn window_edge(&self, left: bool) -> f64 {
        if left {
            self.window.0
        } else {
            self.window.1
        }
    }

    fn check_metric(&self, metric: &WarpedMetric) -> Result<()> {
        if (metric.h - self.h).abs() > 1e-12 * self.h || self.end() > metric.len() {
            return Err(Error::Window(
                "variation was sampled on a different grid".into(),
            ));
        }
        Ok(())
    }
}

/// First and last grid index inside `window`, with room for the stencils.
fn support_indices(metric: &WarpedMetric, (r0, r1): (f64, f64)) -> Result<(usize, usize)> {
    let (lo, hi) = window_indices(metric, (r0, r1))?;
    if lo < SUPPORT_MARGIN || hi + SUPPORT_MARGIN >= metric.len() {
        return Err(Error::Window(format!(
            "support [{r0}, {r1}] needs {SUPPORT_MARGIN} grid points of margin inside [{}, {}]",
            metric.r[0],
            metric.r[metric.len() - 1]
        )));
    }
    Ok((lo, hi))
}

/// Grid indices of the first and last sample in `[r0, r1]`, snapping
/// endpoints that sit within a rounding error of a grid point.
fn window_indices(metric: &WarpedMetric, (r0, r1): (f64, f64)) -> Result<(usize, usize)> {
    let n = metric.len();
    if !(r0 < r1) || n == 0 {
        return Err(Error::Window(format!("empty window [{r0}, {r1}]")));
    }
    let h = metric.h;
    let first = metric.r[0];
    let lo = ((r0 - first) / h - 1e-9).ceil().max(0.0) as usize;
    let hi_f = ((r1 - first) / h + 1e-9).floor();
    if hi_f < 0.0 || lo >= n || (hi_f as usize) <= lo {
        return Err(Error::Window(format!(
            "window [{r0}, {r1}] has fewer than two grid points in [{first}, {}]",
            metric.r[n - 1]
        )));
    }
    Ok((lo, (hi_f as usize).min(n - 1)))
}

fn check_curvature(metric: &WarpedMetric, lo: usize, hi: usize) -> Result<()> {
    match (lo..=hi).find(|&i| metric.k[i].abs() < K_ZERO) {
        Some(i) => Err(Error::ZeroCurvature { r: metric.r[i] }),
        None => Ok(()),
    }
}

/// `2 pi \int_{r0}^{r1} K log|K| b dr` by composite Simpson on the grid
/// points inside the window.
pub fn energy(metric: &WarpedMetric, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window_indices(metric, window)?;
    check_curvature(metric, lo, hi)?;
    let integrand: Vec<f64> = (lo..=hi)
        .map(|i| {
            let k = metric.k[i];
            k * k.abs().ln() * metric.b[i]
        })
        .collect();
    Ok(2.0 * PI * simpson(&integrand, metric.h))
}

/// Total curvature `2 pi \int K b dr` of a window.
pub fn total_curvature(metric: &WarpedMetric, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window_indices(metric, window)?;
    let integrand: Vec<f64> = (lo..=hi).map(|i| metric.k[i] * metric.b[i]).collect();
    Ok(2.0 * PI * simpson(&integrand, metric.h))
}

/// `u = log|K|` on the support of `v` plus three points either side.
fn log_curvature(metric: &WarpedMetric, v: &VariationField) -> Result<(usize, Vec<f64>)> {
    v.check_metric(metric)?;
    let (lo, hi) = (v.start - 3, v.end() + 2);
    check_curvature(metric, lo, hi)?;
    Ok((lo, (lo..=hi).map(|i| metric.k[i].abs().ln()).collect()))
}

/// Analytic first variation of `E` along `v`:
/// `-1/4 \int 2 phi (u'' + (b'/b) u' + 2K) dmu + 1/2 \int psi (u'' - (b'/b) u') dmu`
/// with sixth-order differences of `u = log|K|` and `dmu = 2 pi b dr`.
pub fn first_variation(metric: &WarpedMetric, v: &VariationField) -> Result<f64> {
    let (offset, u) = log_curvature(metric, v)?;
    let h = metric.h;
    let integrand: Vec<f64> = (0..v.len())
        .map(|j| {
            let i = v.start + j;
            let du = central6_d1(&u, i - offset, h);
            let d2u = central6_d2(&u, i - offset, h);
            let q = metric.b_prime[i] / metric.b[i];
            let conformal = -0.5 * v.phi[j] * (d2u + q * du + 2.0 * metric.k[i]);
            let tracefree = 0.5 * v.psi[j] * (d2u - q * du);
            (conformal + tracefree) * metric.b[i]
        })
        .collect();
    Ok(2.0 * PI * simpson(&integrand, h))
}

/// `-1/2 \int (Delta u + 2K) div X dmu` for a variation whose conformal part
/// is `div X`: the conformal half of [`first_variation`].
pub fn conformal_part(metric: &WarpedMetric, v: &VariationField) -> Result<f64> {
    let without_psi = VariationField {
        psi: vec![0.0; v.len()],
        ..v.clone()
    };
    first_variation(metric, &without_psi)
}

/// Energy of `g + s h` over the support of `v`, with the perturbed metric
/// `A dr^2 + B^2 dtheta^2`, `A = 1 + s(phi + psi)`, `B^2 = b^2 (1 + s(phi - psi))`,
/// and its curvature `-(1/(sqrt(A) B)) d/dr(B' / sqrt(A))` by differencing `B`.
fn perturbed_energy(metric: &WarpedMetric, v: &VariationField, s: f64) -> Result<f64> {
    let h = metric.h;
    let (lo, hi) = (v.start - 6, v.end() + 5);
    let coeffs = |i: usize| -> (f64, f64) {
        if i >= v.start && i < v.end() {
            let j = i - v.start;
            (v.phi[j], v.psi[j])
        } else {
            (0.0, 0.0)
        }
    };
    let mut sqrt_a = Vec::with_capacity(hi - lo + 1);
    let mut big_b = Vec::with_capacity(hi - lo + 1);
    for i in lo..=hi {
        let (phi, psi) = coeffs(i);
        let a = 1.0 + s * (phi + psi);
        let w = 1.0 + s * (phi - psi);
        if !(a > 0.0 && w > 0.0) {
            return Err(Error::Window(format!(
                "eps = {s} makes the perturbed metric degenerate at r = {}",
                metric.r[i]
            )));
        }
        sqrt_a.push(a.sqrt());
        big_b.push(metric.b[i] * w.sqrt());
    }
    // q = B'/sqrt(A) on [start - 3, end + 2]
    let q: Vec<f64> = (3..=hi - lo - 3)
        .map(|k| central6_d1(&big_b, k, h) / sqrt_a[k])
        .collect();
    let mut integrand = Vec::with_capacity(v.len());
    for j in 0..v.len() {
        let k = j + 6;
        let curvature = -central6_d1(&q, j + 3, h) / (sqrt_a[k] * big_b[k]);
        if curvature.abs() < K_ZERO {
            return Err(Error::ZeroCurvature {
                r: metric.r[v.start + j],
            });
        }
        integrand.push(curvature * curvature.abs().ln() * big_b[k] * sqrt_a[k]);
    }
    Ok(2.0 * PI * simpson(&integrand, h))
}

/// Central difference `(E[g + eps h] - E[g - eps h]) / (2 eps)`, with each
/// perturbed metric rebuilt from its first fundamental form. Independent of
/// [`first_variation`].
pub fn fd_variation(metric: &WarpedMetric, v: &VariationField, eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("must be positive and finite, got {eps}"),
        });
    }
    v.check_metric(metric)?;
    check_curvature(metric, v.start - 6, v.end() + 5)?;
    let plus = perturbed_energy(metric, v, eps)?;
    let minus = perturbed_energy(metric, v, -eps)?;
    Ok((plus - minus) / (2.0 * eps))
}

/// `sup |u'' + (b'/b) u' + 2K - 2 lambda|` over the interior grid points of
/// the window, with the same second-order differences as the residual
/// checks. Zero on solitons up to `O(h^2)`.
pub fn noether_defect(metric: &WarpedMetric, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window_indices(metric, window)?;
    let (lo, hi) = (lo.max(1), hi.min(metric.len() - 2));
    if lo > hi {
        return Err(Error::Window(format!(
            "window [{}, {}] has no interior grid points",
            window.0, window.1
        )));
    }
    check_curvature(metric, lo - 1, hi + 1)?;
    let u: Vec<f64> = (lo - 1..=hi + 1).map(|i| metric.k[i].abs().ln()).collect();
    let (lambda, h) = (metric.params.lambda(), metric.h);
    let mut worst: f64 = 0.0;
    for i in lo..=hi {
        let j = i - lo + 1;
        let b = metric.b[i];
        if !(b > 0.0) {
            continue;
        }
        let du = central_d1(&u, j, h);
        let d2u = central_d2(&u, j, h);
        let value = d2u + metric.b_prime[i] / b * du - 2.0 * (lambda - metric.k[i]);
        worst = worst.max(value.abs());
    }
    Ok(worst)
}

/// Analytic and finite-difference variations side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationReport {
    pub analytic: f64,
    pub finite_difference: f64,
    pub eps: f64,
    /// Least-squares slope of `log|fd - analytic|` against `log eps` over
    /// `eps, eps/2, eps/4`; about 2 when the oracle is consistent.
    pub slope_estimate: f64,
    pub noether_defect: f64,
}

/// Slope of the oracle error over `eps, eps/2, eps/4`.
pub fn richardson_slope(metric: &WarpedMetric, v: &VariationField, eps: f64) -> Result<f64> {
    let analytic = first_variation(metric, v)?;
    let mut xs = Vec::with_capacity(3);
    let mut ys = Vec::with_capacity(3);
    for k in 0..3 {
        let e = eps / f64::from(1 << k);
        let err = (fd_variation(metric, v, e)? - analytic).abs();
        xs.push(e.ln());
        ys.push(err.max(f64::MIN_POSITIVE).ln());
    }
    Ok(least_squares_slope(&xs, &ys))
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn variation_report(metric: &WarpedMetric, v: &VariationField, eps: f64) -> Result<VariationReport> {
    Ok(VariationReport {
        analytic: first_variation(metric, v)?,
        finite_difference: fd_variation(metric, v, eps)?,
        eps,
        slope_estimate: richardson_slope(metric, v, eps)?,
        noether_defect: noether_defect(metric, v.window)?,
    })
}
