use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::metric::ArcLength;
use crate::numeric::serialize_extended;
use crate::ode::{time_of_flight, Direction, EndTag, Fate, Monotonicity, Profile, Representation};
use crate::ode::{A_BLOWUP, A_ZERO};

/// Relative drift of `a` between `0.9 t_max` and `t_max` below which a
/// converging end is accepted as a cone.
const CONE_DRIFT: f64 = 1e-7;
/// Largest circle length at the first sample of a cusp.
const CUSP_LENGTH: f64 = 1e-4;
/// Largest distance of `K` from `lambda` at the first sample of a cusp.
const CUSP_CURVATURE: f64 = 1e-3;
/// Allowed deviation of a measured tail exponent from its model.
const EXPONENT_SLACK: f64 = 0.05;

/// Geometry of the metric at one end of its radial interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EndDescriptor {
    /// The metric closes up smoothly at the origin.
    SmoothPoint {
        #[serde(rename = "K_at_origin")]
        k_at_origin: f64,
    },
    /// The metric closes up at the origin with a cone singularity.
    ConePoint { angle: f64 },
    /// Asymptotic to a flat cone of the given angle.
    ConeEnd { angle: f64 },
    /// Asymptotic to a cylinder.
    CylinderEnd { radius: f64 },
    /// Hyperbolic cusp: circles shrink to zero length with `K -> lambda < 0`.
    CuspEnd,
    /// Totally geodesic boundary circle at finite distance.
    GeodesicBoundary {
        length: f64,
        /// Geodesic curvature of the last resolved circle before the boundary.
        geodesic_curvature: f64,
    },
    /// Finite-distance end where `a -> 0` and `K` is unbounded.
    ExplodingEnd { nu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CurvatureSign {
    Positive,
    Negative,
    Zero,
}

/// Completeness, curvature range and ends of the metric of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryReport {
    pub complete_inner: bool,
    pub complete_outer: bool,
    pub complete: bool,
    pub curvature_sign: CurvatureSign,
    #[serde(rename = "K_inf", serialize_with = "serialize_extended")]
    pub k_inf: f64,
    #[serde(rename = "K_sup", serialize_with = "serialize_extended")]
    pub k_sup: f64,
    pub inner_end: EndDescriptor,
    pub outer_end: EndDescriptor,
}

impl GeometryReport {
    pub fn bounded_curvature(&self) -> bool {
        self.k_inf.is_finite() && self.k_sup.is_finite()
    }
}

struct End {
    descriptor: EndDescriptor,
    complete: bool,
    /// Limit of `K` towards this end.
    k: f64,
}

fn unresolved(end: &'static str, reason: impl Into<String>) -> Error {
    Error::UnresolvedEnd {
        end,
        reason: reason.into(),
    }
}

/// Completeness and end structure of the metric `dr^2 + b^2 dtheta^2` built
/// from `profile` on `t > 0`. Truncated ends are first continued with the
/// integrator at tolerance `tol` until the solution's fate is reached.
pub fn geometry_report(profile: &Profile, tol: f64) -> Result<GeometryReport> {
    let params = *profile.params();
    if let Representation::Constant { value } = profile.representation() {
        let angle = 2.0 * std::f64::consts::PI / value;
        let flat = *value == 1.0;
        let inner = if flat {
            EndDescriptor::SmoothPoint { k_at_origin: 0.0 }
        } else {
            EndDescriptor::ConePoint { angle }
        };
        return Ok(GeometryReport {
            complete_inner: flat,
            complete_outer: true,
            complete: flat,
            curvature_sign: CurvatureSign::Zero,
            k_inf: 0.0,
            k_sup: 0.0,
            inner_end: inner,
            outer_end: EndDescriptor::ConeEnd { angle },
        });
    }

    let p = complete_profile(profile, tol)?;
    let inner = inner_end(&p)?;
    let outer = outer_end(&p)?;
    check_tail_exponents(&p)?;

    let (k_inf, k_sup) = if inner.k <= outer.k {
        (inner.k, outer.k)
    } else {
        (outer.k, inner.k)
    };
    let curvature_sign = match p.monotonicity() {
        Monotonicity::Increasing => CurvatureSign::Positive,
        Monotonicity::Decreasing => CurvatureSign::Negative,
        Monotonicity::Constant => CurvatureSign::Zero,
    };
    debug_assert!(params.lambda().is_finite());
    Ok(GeometryReport {
        complete_inner: inner.complete,
        complete_outer: outer.complete,
        complete: inner.complete && outer.complete,
        curvature_sign,
        k_inf,
        k_sup,
        inner_end: inner.descriptor,
        outer_end: outer.descriptor,
    })
}

/// Continue truncated ends of a sampled profile until `t = 0` is reached
/// below and the solution's fate is reached above.
fn complete_profile(profile: &Profile, tol: f64) -> Result<Profile> {
    let mut p = profile.clone();
    if p.lower().tag == EndTag::Truncated && p.lower().t > 0.0 {
        p = p.extend(Direction::Backward, 0.0, tol)?;
    }
    if p.upper().tag == EndTag::Truncated {
        let (t_e, a_e) = match p.nodes() {
            Some(nodes) => {
                let last = nodes[nodes.len() - 1];
                (last.t, last.a)
            }
            None => return Ok(p),
        };
        let params = *p.params();
        let target = match p.fate(Direction::Forward) {
            Fate::BlowUp => t_e + 2.0 * time_of_flight(&params, a_e, f64::INFINITY)? + 1.0,
            Fate::DecayToZero => {
                t_e + 2.0 * time_of_flight(&params, a_e, 0.5 * A_ZERO)?.abs() + 1.0
            }
            Fate::Converges { limit } => {
                let rate = params.rhs_da(limit).abs();
                let gap = ((a_e - limit).abs() / (1e-10 * limit)).max(1.0);
                let t_c = t_e + gap.ln() / rate;
                t_c.max(0.0) / 0.9 + 10.0 / rate
            }
            Fate::Constant => return Ok(p),
        };
        p = p.extend(Direction::Forward, target, tol)?;
    }
    Ok(p)
}

/// First resolved `(t, a)` of the data on `t >= 0`, and the last.
fn data_ends(p: &Profile) -> Result<((f64, f64), (f64, f64))> {
    let (lo, hi) = p.data_span();
    let lo = lo.max(0.0);
    if !(hi >= lo) {
        return Err(unresolved("inner", "profile has no samples with t >= 0"));
    }
    Ok(((lo, p.value(lo)?), (hi, p.value(hi)?)))
}

fn inner_end(p: &Profile) -> Result<End> {
    let params = p.params();
    let (lambda, mu) = (params.lambda(), params.mu());
    if p.touches_origin() {
        let a0 = p.value(0.0)?;
        let k = params.curvature(a0);
        return Ok(if (a0 - 1.0).abs() <= crate::ode::profile::SMOOTH_ORIGIN_TOL {
            End {
                descriptor: EndDescriptor::SmoothPoint { k_at_origin: lambda - 2.0 * mu },
                complete: true,
                k,
            }
        } else {
            End {
                descriptor: EndDescriptor::ConePoint {
                    angle: 2.0 * std::f64::consts::PI / a0,
                },
                complete: false,
                k,
            }
        });
    }
    let lower = p.lower();
    if lower.tag != EndTag::BlowUp {
        return Err(unresolved(
            "inner",
            format!("profile stops at t = {} without reaching t = 0 or a blow-up", lower.t),
        ));
    }
    let t0 = lower.t;
    if lower.uncertainty > 0.0 && t0.abs() <= lower.uncertainty {
        return Err(unresolved(
            "inner",
            format!(
                "blow-up time {t0:e} is within its uncertainty {:e} of t = 0",
                lower.uncertainty
            ),
        ));
    }
    if lambda == 0.0 {
        return Ok(End {
            descriptor: EndDescriptor::CylinderEnd {
                radius: 2.0 * t0.max(0.0).sqrt(),
            },
            complete: true,
            k: lambda,
        });
    }
    if lambda > 0.0 {
        return Err(unresolved("inner", "backward blow-up with lambda > 0"));
    }
    let ((t_s, a_s), _) = data_ends(p)?;
    let b_s = 2.0 * t_s.sqrt();
    if t0 > 0.0 {
        Ok(End {
            descriptor: EndDescriptor::GeodesicBoundary {
                length: 4.0 * std::f64::consts::PI * t0.sqrt(),
                geodesic_curvature: 1.0 / (a_s * b_s),
            },
            complete: false,
            k: lambda,
        })
    } else {
        let k_s = params.curvature(a_s);
        if b_s >= CUSP_LENGTH || (k_s - lambda).abs() >= CUSP_CURVATURE {
            return Err(unresolved(
                "inner",
                format!("cusp not resolved: b = {b_s:e}, K - lambda = {:e}", k_s - lambda),
            ));
        }
        Ok(End {
            descriptor: EndDescriptor::CuspEnd,
            complete: true,
            k: lambda,
        })
    }
}

fn outer_end(p: &Profile) -> Result<End> {
    let params = p.params();
    let (lambda, mu) = (params.lambda(), params.mu());
    let upper = p.upper();
    match upper.tag {
        EndTag::BlowUp => {
            let t1 = upper.t;
            if !(t1 > 0.0) {
                return Err(unresolved("outer", format!("blow-up at t = {t1} <= 0")));
            }
            if lambda == 0.0 {
                Ok(End {
                    descriptor: EndDescriptor::CylinderEnd {
                        radius: 2.0 * t1.sqrt(),
                    },
                    complete: true,
                    k: lambda,
                })
            } else if lambda > 0.0 {
                let (_, (t_e, a_e)) = data_ends(p)?;
                Ok(End {
                    descriptor: EndDescriptor::GeodesicBoundary {
                        length: 4.0 * std::f64::consts::PI * t1.sqrt(),
                        geodesic_curvature: 1.0 / (a_e * 2.0 * t_e.sqrt()),
                    },
                    complete: false,
                    k: lambda,
                })
            } else {
                Err(unresolved("outer", "forward blow-up with lambda < 0"))
            }
        }
        EndTag::Converges { limit } => {
            let (_, (t_max, a_max)) = data_ends(p)?;
            if !(t_max > 0.0) {
                return Err(unresolved("outer", "no samples at positive t"));
            }
            let drift = (a_max - p.value(0.9 * t_max)?).abs();
            if drift >= CONE_DRIFT * a_max {
                return Err(unresolved(
                    "outer",
                    format!("a has not settled near {limit}: drift {drift:e} over the last tenth"),
                ));
            }
            Ok(End {
                descriptor: EndDescriptor::ConeEnd {
                    angle: 2.0 * std::f64::consts::PI / a_max,
                },
                complete: true,
                k: 0.0,
            })
        }
        EndTag::DecayToZero if mu > 0.0 => Ok(End {
            descriptor: EndDescriptor::ExplodingEnd { nu: 1.0 / mu.sqrt() },
            complete: false,
            k: f64::NEG_INFINITY,
        }),
        _ => Err(unresolved(
            "outer",
            format!("no asymptotic model for the end at t = {}", upper.t),
        )),
    }
}

/// Compare the local power law of the sampled data near each blow-up or
/// decay end with its model: `a ~ |T - t|^{-1/2}` (lambda != 0),
/// `a ~ |T - t|^{-1}` (lambda = 0) and `a ~ 1/t` at a decaying end.
fn check_tail_exponents(p: &Profile) -> Result<()> {
    let nodes = match p.nodes() {
        Some(n) => n,
        None => return Ok(()),
    };
    let params = p.params();
    let blow_up_exponent = if params.lambda() == 0.0 { 1.0 } else { 0.5 };
    let mid = nodes.partition_point(|n| n.t < p.anchor().0);
    for (end, name, edge) in [
        (p.lower(), "inner", &nodes[..mid.max(1)]),
        (p.upper(), "outer", &nodes[mid.min(nodes.len() - 1)..]),
    ] {
        let (expected, measured) = match end.tag {
            EndTag::BlowUp => {
                // d ln a / d ln|T - t| at the node nearest to a = sqrt(A_BLOWUP),
                // where |T - t| is well resolved in floating point.
                let probe = A_BLOWUP.sqrt();
                let n = edge
                    .iter()
                    .min_by(|x, y| {
                        (x.a / probe).ln().abs().total_cmp(&(y.a / probe).ln().abs())
                    })
                    .unwrap();
                (blow_up_exponent, (n.da * (end.t - n.t)).abs() / n.a)
            }
            EndTag::DecayToZero => {
                let n = if name == "inner" { edge[0] } else { edge[edge.len() - 1] };
                (1.0, (n.da * n.t / n.a).abs())
            }
            _ => continue,
        };
        if !((measured - expected).abs() <= EXPONENT_SLACK) {
            return Err(unresolved(
                name,
                format!("tail exponent {measured} does not match the model value {expected}"),
            ));
        }
    }
    Ok(())
}

/// Radial length `\int a/sqrt(t) dt` of the metric over the profile's
/// domain on `t >= 0`, with the asymptotic tails beyond the data added in
/// closed form. Infinite when an end is at infinite distance.
pub fn radial_extent(profile: &Profile) -> Result<f64> {
    let params = profile.params();
    let (lambda, mu) = (params.lambda(), params.mu());
    if let Representation::Constant { .. } = profile.representation() {
        return Ok(f64::INFINITY);
    }
    let table = ArcLength::new(profile)?;
    let mut total = table.total();
    let ((t_s, _), (t_e, a_e)) = data_ends(profile)?;

    let lower = profile.lower();
    if !profile.touches_origin() && lower.tag == EndTag::BlowUp {
        let t0 = lower.t;
        if lambda >= 0.0 || t0 <= 0.0 {
            return Ok(f64::INFINITY);
        }
        total += ((t_s - t0) / t0).max(0.0).sqrt().asinh() / (-lambda).sqrt();
    }
    let upper = profile.upper();
    match upper.tag {
        EndTag::BlowUp => {
            if lambda <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let t1 = upper.t;
            total += ((t1 - t_e) / t1).clamp(0.0, 1.0).sqrt().asin() / lambda.sqrt();
        }
        EndTag::Converges { .. } => return Ok(f64::INFINITY),
        EndTag::DecayToZero => {
            // a ~ a_e t_e / t beyond the last sample
            let _ = mu;
            total += 2.0 * a_e * t_e.sqrt();
        }
        _ => {}
    }
    Ok(total)
}
