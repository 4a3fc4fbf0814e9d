use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{fmt17, hermite5, GaussLegendre, Jet};
use crate::ode::profile::SMOOTH_ORIGIN_TOL;
use crate::ode::{Profile, Representation, SolitonParams};

/// Closed-form metric recognised from a reciprocal-affine profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClosedFormTag {
    /// `b = nu tanh(r / nu)`.
    Cigar { nu: f64 },
    /// `b = nu tan(r / nu)`.
    Exploding { nu: f64 },
    /// The metric through `a = 1/(4 mu t - nu^2)`; cylinder of radius `nu`
    /// at its inner end.
    G3 { nu: f64 },
    None,
}

impl ClosedFormTag {
    fn of(profile: &Profile) -> Self {
        let phi = match profile.representation() {
            Representation::ReciprocalAffine { phi } => *phi,
            _ => return ClosedFormTag::None,
        };
        let mu = profile.params().mu();
        if phi == 1.0 && mu < 0.0 {
            ClosedFormTag::Cigar {
                nu: 1.0 / (-mu).sqrt(),
            }
        } else if phi == 1.0 {
            ClosedFormTag::Exploding {
                nu: 1.0 / mu.sqrt(),
            }
        } else if phi <= 0.0 && mu > 0.0 {
            ClosedFormTag::G3 {
                nu: (-phi / mu).sqrt(),
            }
        } else {
            ClosedFormTag::None
        }
    }
}

/// Where a metric's samples came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MetricSource {
    /// Reconstructed from a profile; `b' = 1/a` and `K = lambda - 2 mu / a`.
    Profile,
    /// Given directly by `b` and its derivatives; `K = -b''/b`.
    Explicit,
}

/// Samples of `g = dr^2 + b(r)^2 dtheta^2` on a uniform `r` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WarpedMetric {
    pub params: SolitonParams,
    #[serde(rename = "r_grid")]
    pub r: Vec<f64>,
    pub b: Vec<f64>,
    pub b_prime: Vec<f64>,
    /// Gauss curvature.
    #[serde(rename = "K")]
    pub k: Vec<f64>,
    /// `t = b^2/4`.
    #[serde(rename = "t_of_r")]
    pub t: Vec<f64>,
    pub closed_form: ClosedFormTag,
    pub source: MetricSource,
    /// Grid spacing.
    pub h: f64,
}

impl WarpedMetric {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// A metric given by closed-form `b`, `b'` and `b''` on `n` uniform
    /// samples of `[r_lo, r_hi]`. Curvature is `-b''/b`.
    pub fn from_functions(
        params: SolitonParams,
        (r_lo, r_hi): (f64, f64),
        n: usize,
        b: impl Fn(f64) -> f64,
        db: impl Fn(f64) -> f64,
        d2b: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if n < 2 || !(r_lo < r_hi) {
            return Err(Error::WindowEmpty { lo: r_lo, hi: r_hi });
        }
        let h = (r_hi - r_lo) / (n - 1) as f64;
        let r: Vec<f64> = (0..n).map(|j| r_lo + h * j as f64).collect();
        let bv: Vec<f64> = r.iter().map(|&x| b(x)).collect();
        if let Some(bad) = bv.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::Domain(format!(
                "warping factor must be positive, got b({}) = {}",
                r[bad], bv[bad]
            )));
        }
        Ok(Self {
            params,
            b_prime: r.iter().map(|&x| db(x)).collect(),
            k: r.iter().zip(&bv).map(|(&x, &bx)| -d2b(x) / bx).collect(),
            t: bv.iter().map(|v| v * v / 4.0).collect(),
            b: bv,
            r,
            closed_form: ClosedFormTag::None,
            source: MetricSource::Explicit,
            h,
        })
    }

    /// Largest `|a(b^2/4) b' - 1|` over the grid.
    pub fn coupling_residual(&self, profile: &Profile) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (t, bp) in self.t.iter().zip(&self.b_prime) {
            let a = profile.value(*t)?;
            worst = worst.max((a * bp - 1.0).abs());
        }
        Ok(worst)
    }

    /// Largest `|K - (lambda - 2 mu b')|` over the grid.
    pub fn curvature_identity_residual(&self) -> f64 {
        let (l, m) = (self.params.lambda(), self.params.mu());
        self.k
            .iter()
            .zip(&self.b_prime)
            .map(|(k, bp)| (k - (l - 2.0 * m * bp)).abs())
            .fold(0.0, f64::max)
    }

    /// Index of the grid point nearest to `r`.
    pub fn nearest_index(&self, r: f64) -> Option<usize> {
        if self.r.is_empty() || !r.is_finite() {
            return None;
        }
        let j = ((r - self.r[0]) / self.h).round();
        if j < 0.0 || j as usize >= self.r.len() {
            None
        } else {
            Some(j as usize)
        }
    }

    /// CSV with header `r,b,db_dr,K`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,b,db_dr,K\n");
        for i in 0..self.r.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt17(self.r[i]),
                fmt17(self.b[i]),
                fmt17(self.b_prime[i]),
                fmt17(self.k[i])
            ));
        }
        out
    }

    /// Metric restricted to grid indices `[lo, hi]`.
    pub fn slice(&self, lo: usize, hi: usize) -> WarpedMetric {
        let cut = |v: &Vec<f64>| v[lo..=hi].to_vec();
        WarpedMetric {
            params: self.params,
            r: cut(&self.r),
            b: cut(&self.b),
            b_prime: cut(&self.b_prime),
            k: cut(&self.k),
            t: cut(&self.t),
            closed_form: self.closed_form,
            source: self.source,
            h: self.h,
        }
    }
}

/// Cumulative arc length `r(b) = \int a(s^2/4) ds` on panels in `b`.
///
/// Panels of sampled profiles are aligned with the integrator's nodes, where
/// `a(s^2/4)` is a polynomial of degree ten, so six-point Gauss-Legendre is
/// exact on them. Closed forms get panels over which `a` changes by about 2%.
pub struct ArcLength<'p> {
    profile: &'p Profile,
    edges: Vec<f64>,
    panels: Vec<f64>,
    cumulative: Vec<f64>,
    rule: GaussLegendre,
}

impl<'p> ArcLength<'p> {
    pub fn new(profile: &'p Profile) -> Result<Self> {
        let (edges, points) = match profile.representation() {
            Representation::Sampled(nodes) => {
                let mut edges = Vec::with_capacity(nodes.len() + 1);
                if nodes[0].t < 0.0 && nodes[nodes.len() - 1].t > 0.0 {
                    edges.push(0.0);
                }
                edges.extend(nodes.iter().filter(|n| n.t >= 0.0).map(|n| 2.0 * n.t.sqrt()));
                (edges, 6)
            }
            _ => (closed_form_edges(profile)?, 8),
        };
        if edges.len() < 2 {
            return Err(Error::Domain(
                "profile has no samples with t > 0, so the metric is empty".into(),
            ));
        }
        let rule = GaussLegendre::new(points);
        let f = |s: f64| profile.value(s * s / 4.0).unwrap_or(f64::NAN);
        let panels: Vec<f64> = edges.windows(2).map(|w| rule.integrate(w[0], w[1], f)).collect();
        if panels.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("arc length quadrature left the profile domain".into()));
        }
        let mut table = Self {
            profile,
            edges,
            panels: Vec::new(),
            cumulative: Vec::new(),
            rule,
        };
        table.accumulate(&panels, 0);
        table.panels = panels;
        Ok(table)
    }

    /// Like [`new`](Self::new), but with the running sums started at the
    /// panel containing `b_origin`. Near a cusp `r(b)` measured from the
    /// smallest `b` is large, and differences of large sums would cost the
    /// digits that second differences of `log|K|` need.
    pub fn anchored(profile: &'p Profile, b_origin: f64) -> Result<Self> {
        let mut table = Self::new(profile)?;
        let (lo, hi) = table.b_range();
        let k0 = table.panel_of(b_origin.clamp(lo, hi));
        let panels = table.panels.clone();
        table.accumulate(&panels, k0);
        Ok(table)
    }

    /// `cumulative[k0] = 0`, summing outward in both directions.
    fn accumulate(&mut self, panels: &[f64], k0: usize) {
        let mut cumulative = vec![0.0; self.edges.len()];
        for k in k0..panels.len() {
            cumulative[k + 1] = cumulative[k] + panels[k];
        }
        for k in (0..k0).rev() {
            cumulative[k] = cumulative[k + 1] - panels[k];
        }
        self.cumulative = cumulative;
    }

    /// Smallest and largest `b` covered.
    pub fn b_range(&self) -> (f64, f64) {
        (self.edges[0], self.edges[self.edges.len() - 1])
    }

    fn a_at(&self, b: f64) -> f64 {
        self.profile.value(b * b / 4.0).unwrap_or(f64::NAN)
    }

    /// `\int a(s^2/4) ds` up to `b`, from the smallest `b` or, for an
    /// [`anchored`](Self::anchored) table, from the anchor panel's left edge.
    pub fn integral_to(&self, b: f64) -> f64 {
        let (lo, hi) = self.b_range();
        let b = b.clamp(lo, hi);
        let k = self.panel_of(b);
        self.cumulative[k] + self.rule.integrate(self.edges[k], b, |s| self.a_at(s))
    }

    /// Total integral over the covered range.
    pub fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1] - self.cumulative[0]
    }

    /// Value of [`integral_to`](Self::integral_to) at the smallest `b`.
    pub fn start(&self) -> f64 {
        self.cumulative[0]
    }

    fn panel_of(&self, b: f64) -> usize {
        let k = self.edges.partition_point(|e| *e <= b);
        k.saturating_sub(1).min(self.edges.len() - 2)
    }

    /// Solve `integral_to(b) = target` by safeguarded Newton iteration.
    pub fn invert(&self, target: f64) -> f64 {
        self.invert_split(target).0
    }

    /// [`invert`](Self::invert) plus the first-order correction
    /// `-(integral_to(b) - target) / a(b)` that `b` is too coarse to hold.
    /// Near an end where `a` is large the correction carries the digits that
    /// `log|K|` needs.
    pub fn invert_split(&self, target: f64) -> (f64, f64) {
        let b = self.invert_newton(target);
        let k = self.panel_of(b);
        let g = (self.cumulative[k] - target)
            + self.rule.integrate(self.edges[k], b, |s| self.a_at(s));
        let a = self.a_at(b);
        let db = if a.is_finite() && a != 0.0 { -g / a } else { 0.0 };
        (b, db)
    }

    fn invert_newton(&self, target: f64) -> f64 {
        let k = self
            .cumulative
            .partition_point(|c| *c <= target)
            .saturating_sub(1)
            .min(self.edges.len() - 2);
        let (mut lo, mut hi) = (self.edges[k], self.edges[k + 1]);
        let base = self.cumulative[k];
        let mut b = lo + (hi - lo) * ((target - base) / (self.cumulative[k + 1] - base)).clamp(0.0, 1.0);
        for _ in 0..100 {
            let g = base + self.rule.integrate(self.edges[k], b, |s| self.a_at(s)) - target;
            if g > 0.0 {
                hi = b;
            } else {
                lo = b;
            }
            let step = g / self.a_at(b);
            let mut next = b - step;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(f64::MIN_POSITIVE) {
                return next;
            }
            b = next;
        }
        b
    }
}

/// Panel edges in `b` for a closed-form profile.
fn closed_form_edges(profile: &Profile) -> Result<Vec<f64>> {
    let (lo, hi) = profile.data_span();
    let t_lo = lo.max(0.0);
    if !(hi > t_lo) {
        return Ok(Vec::new());
    }
    let (b_lo, b_hi) = (2.0 * t_lo.sqrt(), 2.0 * hi.sqrt());
    let scale = 1.0 / profile.params().mu().abs().sqrt();
    let mut edges = vec![b_lo];
    let mut b = b_lo;
    while b < b_hi {
        let t = b * b / 4.0;
        let (a, da) = profile.eval(t)?;
        // d a / d b = a'(t) b / 2
        let dadb = (da * b / 2.0).abs();
        let mut step = 0.02 * (b + 0.05 * scale);
        if dadb > 0.0 {
            step = step.min(0.02 * a / dadb);
        }
        b = (b + step).min(b_hi);
        edges.push(b);
        if edges.len() > 1_000_000 {
            return Err(Error::Domain("closed-form panel generation did not terminate".into()));
        }
    }
    Ok(edges)
}

/// Reconstruct `g = dr^2 + b^2 dtheta^2` from a profile.
///
/// `anchor = (r0, b0)` fixes `r(b0) = r0`. With `b0 = 0` the profile must
/// extend smoothly over the origin. The grid has spacing
/// `(r_hi - r_lo)/(n - 1)`; points outside the metric's domain are dropped.
pub fn build_warped_metric(
    profile: &Profile,
    anchor: (f64, f64),
    r_window: (f64, f64),
    n_samples: usize,
) -> Result<WarpedMetric> {
    let (r_lo, r_hi) = r_window;
    if n_samples < 2 || !(r_lo < r_hi) || !r_lo.is_finite() || !r_hi.is_finite() {
        return Err(Error::WindowEmpty { lo: r_lo, hi: r_hi });
    }
    let h = (r_hi - r_lo) / (n_samples - 1) as f64;
    build_on_grid(profile, anchor, r_lo, h, n_samples)
}

/// Like [`build_warped_metric`] with a prescribed spacing: the grid is
/// `r_lo + j h` for all `j` with `r_lo + j h <= r_hi`.
pub fn build_with_spacing(
    profile: &Profile,
    anchor: (f64, f64),
    (r_lo, r_hi): (f64, f64),
    h: f64,
) -> Result<WarpedMetric> {
    if !(h > 0.0) || !(r_lo < r_hi) {
        return Err(Error::WindowEmpty { lo: r_lo, hi: r_hi });
    }
    let n = ((r_hi - r_lo) / h * (1.0 + 1e-12)).floor() as usize + 1;
    build_on_grid(profile, anchor, r_lo, h, n)
}

fn build_on_grid(
    profile: &Profile,
    (r0, b0): (f64, f64),
    r_lo: f64,
    h: f64,
    n: usize,
) -> Result<WarpedMetric> {
    if !(b0 >= 0.0) || !r0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "anchor",
            reason: format!("need finite r0 and b0 >= 0, got ({r0}, {b0})"),
        });
    }
    if b0 == 0.0 {
        if !profile.touches_origin() {
            return Err(Error::NotSmoothOrigin { a0: f64::NAN });
        }
        let a0 = profile.value(0.0)?;
        if (a0 - 1.0).abs() > SMOOTH_ORIGIN_TOL {
            return Err(Error::NotSmoothOrigin { a0 });
        }
    }
    let table = ArcLength::anchored(profile, b0)?;
    let (b_min, b_max) = table.b_range();
    if b0 < b_min || b0 > b_max {
        return Err(Error::Domain(format!(
            "anchor b0 = {b0} outside the sampled range [{b_min}, {b_max}]"
        )));
    }
    let offset = r0 - table.integral_to(b0);
    let (dom_lo, dom_hi) = (offset + table.start(), offset + table.start() + table.total());

    let params = *profile.params();
    let mut out = WarpedMetric {
        params,
        r: Vec::new(),
        b: Vec::new(),
        b_prime: Vec::new(),
        k: Vec::new(),
        t: Vec::new(),
        closed_form: ClosedFormTag::of(profile),
        source: MetricSource::Profile,
        h,
    };
    for j in 0..n {
        let r = r_lo + h * j as f64;
        if r < dom_lo || r > dom_hi {
            continue;
        }
        let (b, db) = table.invert_split(r - offset);
        // t = b^2/4 split as t + dt to keep the digits lost in rounding b
        let t = b * b / 4.0;
        let dt = b.mul_add(b, -4.0 * t) / 4.0 + b * db / 2.0;
        let (a, da) = profile.eval(t)?;
        let a = a + da * dt;
        out.r.push(r);
        out.b.push(b);
        out.t.push(t);
        out.b_prime.push(1.0 / a);
        out.k.push(params.curvature(a));
    }
    if out.r.is_empty() {
        return Err(Error::WindowEmpty {
            lo: r_lo,
            hi: r_lo + h * (n - 1) as f64,
        });
    }
    Ok(out)
}

/// Signed arc length from the circle of radius `b_from` to that of `b_to`.
pub fn radial_distance(profile: &Profile, b_from: f64, b_to: f64) -> Result<f64> {
    let table = ArcLength::new(profile)?;
    Ok(table.integral_to(b_to) - table.integral_to(b_from))
}

/// Gauss curvature `lambda - 2 mu / a` where the profile takes the value `a`.
pub fn curvature_from_a(params: &SolitonParams, a: f64) -> f64 {
    params.curvature(a)
}

/// Second-order central-difference estimate of `-b''/b` at the grid point
/// nearest `r`, which must be at least five samples from either edge.
pub fn curvature_from_b(metric: &WarpedMetric, r: f64) -> Result<f64> {
    let i = metric.nearest_index(r).ok_or(Error::Edge(r))?;
    if i < 5 || i + 6 > metric.len() {
        return Err(Error::Edge(r));
    }
    let b = &metric.b;
    let h = metric.h;
    Ok(-(b[i + 1] - 2.0 * b[i] + b[i - 1]) / (h * h * b[i]))
}

/// Geodesic curvature `b'/b` of the circle at radius `r0`, interpolating
/// between grid points with a quintic Hermite (`b'' = -K b`).
pub fn geodesic_curvature(metric: &WarpedMetric, r0: f64) -> Result<f64> {
    let n = metric.len();
    if n == 0 || !(r0 >= metric.r[0] && r0 <= metric.r[n - 1]) {
        return Err(Error::OutOfDomain {
            t: r0,
            lo: metric.r.first().copied().unwrap_or(f64::NAN),
            hi: metric.r.last().copied().unwrap_or(f64::NAN),
        });
    }
    let j = (((r0 - metric.r[0]) / metric.h).floor() as usize).min(n.saturating_sub(2));
    if n == 1 {
        return Ok(metric.b_prime[0] / metric.b[0]);
    }
    let jet = |i: usize| Jet {
        value: metric.b[i],
        d1: metric.b_prime[i],
        d2: -metric.k[i] * metric.b[i],
    };
    let (b, db) = hermite5(metric.r[j], metric.r[j + 1], jet(j), jet(j + 1), r0);
    Ok(db / b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{closed_form_profile, constant_profile, integrate_profile, make_params};

    fn cigar() -> Profile {
        closed_form_profile(make_params(0.0, -1.0).unwrap(), 1.0)
            .unwrap()
            .restrict_to_origin()
            .unwrap()
    }

    #[test]
    fn cigar_metric_is_tanh() {
        let m = build_warped_metric(&cigar(), (0.0, 0.0), (0.0, 5.0), 501).unwrap();
        assert_eq!(m.len(), 501);
        for (r, b) in m.r.iter().zip(&m.b) {
            assert!((b - r.tanh()).abs() < 1e-12, "r={r}");
        }
        assert_eq!(m.closed_form, ClosedFormTag::Cigar { nu: 1.0 });
        assert!(m.curvature_identity_residual() < 1e-14);
    }

    #[test]
    fn sampled_cigar_metric_is_tanh() {
        let p = integrate_profile(make_params(0.0, -1.0).unwrap(), 0.0, 1.0, (0.0, 1.0), 1e-12)
            .unwrap();
        let m = build_warped_metric(&p, (0.0, 0.0), (0.0, 5.0), 101).unwrap();
        for (r, b) in m.r.iter().zip(&m.b) {
            assert!((b - r.tanh()).abs() < 1e-9, "r={r} b={b}");
        }
        let c = m.coupling_residual(&p).unwrap();
        // b' carries the sub-ulp part of t that the stored t_of_r drops
        assert!(c < 1e-10, "{c}");
    }

    #[test]
    fn flat_separatrix_gives_plane() {
        let p = constant_profile(make_params(-2.0, -1.0).unwrap(), (0.0, 4.0)).unwrap();
        let m = build_warped_metric(&p, (0.0, 0.0), (0.0, 3.0), 31).unwrap();
        for (r, b) in m.r.iter().zip(&m.b) {
            assert!((b - r).abs() < 1e-13);
        }
        assert!(m.k.iter().all(|k| k.abs() < 1e-15));
    }

    #[test]
    fn origin_anchor_requires_smooth_profile() {
        let p = closed_form_profile(make_params(0.0, -1.0).unwrap(), 2.0).unwrap();
        assert!(matches!(
            build_warped_metric(&p, (0.0, 0.0), (0.0, 1.0), 10),
            Err(Error::NotSmoothOrigin { .. })
        ));
    }

    #[test]
    fn window_outside_domain_is_empty() {
        let p = closed_form_profile(make_params(0.0, 1.0).unwrap(), 1.0)
            .unwrap()
            .restrict_to_origin()
            .unwrap();
        assert!(matches!(
            build_warped_metric(&p, (0.0, 0.0), (2.0, 3.0), 10),
            Err(Error::WindowEmpty { .. })
        ));
    }

    #[test]
    fn curvature_from_b_matches_closed_form() {
        let m = build_warped_metric(&cigar(), (0.0, 0.0), (0.0, 3.0), 3001).unwrap();
        let k = curvature_from_b(&m, 1.0).unwrap();
        let exact = 2.0 / 1f64.cosh().powi(2);
        assert!((k - exact).abs() < 1e-6);
        assert!(matches!(curvature_from_b(&m, 0.002), Err(Error::Edge(_))));
    }

    #[test]
    fn geodesic_curvature_of_cigar_circles() {
        let m = build_warped_metric(&cigar(), (0.0, 0.0), (0.0, 3.0), 301).unwrap();
        let kappa = geodesic_curvature(&m, 2.0).unwrap();
        let exact = 1.0 / (2f64.cosh().powi(2) * 2f64.tanh());
        assert!((kappa - exact).abs() < 1e-10);
        let between = geodesic_curvature(&m, 1.234).unwrap();
        let exact = 1.0 / (1.234f64.cosh().powi(2) * 1.234f64.tanh());
        assert!((between - exact).abs() < 1e-9);
    }

    #[test]
    fn metric_csv_header() {
        let m = build_warped_metric(&cigar(), (0.0, 0.0), (0.0, 1.0), 3).unwrap();
        assert!(m.to_csv().starts_with("r,b,db_dr,K\n"));
        assert_eq!(m.to_csv().lines().count(), 4);
    }
}
