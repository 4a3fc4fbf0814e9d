use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::fmt17;
use crate::ode::params::SolitonParams;
use crate::ode::phase::{fate, Direction, Fate};
use crate::ode::rk::{self, interpolate, Node, Stop, Tolerance};

/// Blow-up event threshold on `a`.
pub const A_BLOWUP: f64 = 1e8;
/// Decay event threshold on `a`.
pub const A_ZERO: f64 = 1e-10;
/// Relative distance to the separatrix below which an anchor is snapped to
/// the constant solution.
pub const SEPARATRIX_SNAP: f64 = 1e-13;
/// Relative distance to a stable separatrix at the window edge that counts
/// as converged.
const CONVERGED: f64 = 1e-8;
/// Tolerance on `a(0) = 1` for the smooth-extension condition.
pub const SMOOTH_ORIGIN_TOL: f64 = 1e-8;

/// Behaviour of a profile at one end of its interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EndTag {
    /// `a -> infinity` at a finite time.
    BlowUp,
    /// `a -> 0` as `|t| -> infinity`.
    DecayToZero,
    /// `a -> limit > 0` as `|t| -> infinity`.
    Converges { limit: f64 },
    /// Interval starts at `t = 0` with `a(0) = 1`.
    SmoothOrigin,
    /// Edge of the integration window; the solution continues beyond it.
    Truncated,
}

/// One end of a profile's interval. `uncertainty` is zero when the
/// location is known exactly (closed forms, catalog constructions).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint {
    pub t: f64,
    pub tag: EndTag,
    pub uncertainty: f64,
}

impl Endpoint {
    fn exact(t: f64, tag: EndTag) -> Self {
        Self {
            t,
            tag,
            uncertainty: 0.0,
        }
    }
}

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Endpoint", 3)?;
        if self.t.is_finite() {
            st.serialize_field("t", &self.t)?;
        } else {
            st.serialize_field("t", &fmt17(self.t))?;
        }
        st.serialize_field("tag", &self.tag)?;
        st.serialize_field("uncertainty", &self.uncertainty)?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
}

/// How the profile values are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// `a(t) = 1 / (4 mu t + phi)` (steady solitons only).
    ReciprocalAffine { phi: f64 },
    /// The separatrix `a = value`.
    Constant { value: f64 },
    /// Accepted Runge-Kutta nodes in increasing `t`, with quintic Hermite
    /// dense output between them.
    Sampled(Vec<Node>),
}

/// A symmetry acting on solutions of the profile ODE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symmetry {
    /// `a -> alpha a`, with `(mu, gamma) -> (mu / alpha, alpha gamma)`.
    Scale(f64),
    /// Metric scaling by `beta^2`: `a -> a(t / beta^2)`, `mu -> mu / beta^2`.
    Rescale(f64),
    /// Time translation `a -> a(t - tau)`.
    Translate(f64),
}

/// A positive solution of the profile ODE on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    params: SolitonParams,
    repr: Representation,
    lower: Endpoint,
    upper: Endpoint,
    anchor: (f64, f64),
}

impl Profile {
    pub fn params(&self) -> &SolitonParams {
        &self.params
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn lower(&self) -> Endpoint {
        self.lower
    }

    pub fn upper(&self) -> Endpoint {
        self.upper
    }

    /// `(t_ref, a_ref)`.
    pub fn anchor(&self) -> (f64, f64) {
        self.anchor
    }

    pub fn nodes(&self) -> Option<&[Node]> {
        match &self.repr {
            Representation::Sampled(nodes) => Some(nodes),
            _ => None,
        }
    }

    pub fn monotonicity(&self) -> Monotonicity {
        let slope = self.params.rhs(self.anchor.1);
        if matches!(self.repr, Representation::Constant { .. }) || slope == 0.0 {
            Monotonicity::Constant
        } else if slope > 0.0 {
            Monotonicity::Increasing
        } else {
            Monotonicity::Decreasing
        }
    }

    /// Fate of the underlying solution beyond the given end, whether or not
    /// the profile itself reaches it.
    pub fn fate(&self, direction: Direction) -> Fate {
        if matches!(self.repr, Representation::Constant { .. }) {
            return Fate::Constant;
        }
        fate(&self.params, self.anchor.1, direction)
    }

    /// Range of `t` over which values come straight from the representation
    /// rather than from an asymptotic tail model. Closed forms are cut where
    /// `a` reaches the event thresholds, like integrated profiles.
    pub fn data_span(&self) -> (f64, f64) {
        match &self.repr {
            Representation::Sampled(nodes) => (nodes[0].t, nodes[nodes.len() - 1].t),
            Representation::Constant { .. } => (self.lower.t, self.upper.t),
            Representation::ReciprocalAffine { phi } => {
                let mu = self.params.mu();
                let at_blowup = (1.0 / A_BLOWUP - phi) / (4.0 * mu);
                let at_zero = (1.0 / A_ZERO - phi) / (4.0 * mu);
                let cut = |end: Endpoint| match end.tag {
                    EndTag::BlowUp => at_blowup,
                    _ if end.t.is_finite() => end.t,
                    _ => at_zero,
                };
                let (lo, hi) = (cut(self.lower), cut(self.upper));
                (lo, hi)
            }
        }
    }

    fn in_domain(&self, t: f64) -> bool {
        if let Representation::Sampled(nodes) = &self.repr {
            if t >= nodes[0].t && t <= nodes[nodes.len() - 1].t {
                return true;
            }
        }
        let lower_ok = if self.lower.tag == EndTag::BlowUp {
            t > self.lower.t
        } else {
            t >= self.lower.t
        };
        let upper_ok = if self.upper.tag == EndTag::BlowUp {
            t < self.upper.t
        } else {
            t <= self.upper.t
        };
        lower_ok && upper_ok && t.is_finite()
    }

    /// `(a(t), a'(t))` from the dense output (or tail model beyond the data).
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !self.in_domain(t) {
            return Err(Error::OutOfDomain {
                t,
                lo: self.lower.t,
                hi: self.upper.t,
            });
        }
        match &self.repr {
            Representation::Constant { value } => Ok((*value, 0.0)),
            Representation::ReciprocalAffine { phi } => {
                let mu = self.params.mu();
                let a = 1.0 / (4.0 * mu * t + phi);
                Ok((a, -4.0 * mu * a * a))
            }
            Representation::Sampled(nodes) => {
                let first = &nodes[0];
                let last = &nodes[nodes.len() - 1];
                if t < first.t {
                    return self.tail(first, self.lower, t);
                }
                if t > last.t {
                    return self.tail(last, self.upper, t);
                }
                let k = nodes.partition_point(|n| n.t <= t);
                if k == 0 {
                    return Ok((first.a, first.da));
                }
                if k >= nodes.len() {
                    return Ok((last.a, last.da));
                }
                Ok(interpolate(&nodes[k - 1], &nodes[k], t))
            }
        }
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.eval(t).map(|(a, _)| a)
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.eval(t).map(|(_, da)| da)
    }

    /// Asymptotic continuation past the last node towards `end`.
    fn tail(&self, edge: &Node, end: Endpoint, t: f64) -> Result<(f64, f64)> {
        let out = || Error::OutOfDomain {
            t,
            lo: self.lower.t,
            hi: self.upper.t,
        };
        match end.tag {
            EndTag::BlowUp => {
                // a^{-p} is linear in t and vanishes at the blow-up time.
                let p = if self.params.lambda() == 0.0 { 1.0 } else { 2.0 };
                let y_edge = edge.a.powf(-p);
                let slope = y_edge / (edge.t - end.t);
                let y = slope * (t - end.t);
                if y <= 0.0 {
                    return Err(out());
                }
                let a = y.powf(-1.0 / p);
                let da = -(1.0 / p) * y.powf(-1.0 / p - 1.0) * slope;
                Ok((a, da))
            }
            EndTag::DecayToZero => {
                let mu = self.params.mu();
                let y = 1.0 / edge.a + 4.0 * mu * (t - edge.t);
                if y <= 0.0 {
                    return Err(out());
                }
                let a = 1.0 / y;
                Ok((a, -4.0 * mu * a * a))
            }
            EndTag::Converges { limit } => {
                let k = self.params.rhs_da(limit);
                let dev = (edge.a - limit) * (k * (t - edge.t)).exp();
                Ok((limit + dev, k * dev))
            }
            EndTag::SmoothOrigin | EndTag::Truncated => Err(out()),
        }
    }

    /// Largest relative ODE residual `|a' - rhs(a)| / (1 + |a'|)` over `n`
    /// uniform samples of the data span.
    pub fn max_residual(&self, n: usize) -> f64 {
        let (lo, hi) = self.data_span();
        let n = n.max(2);
        (0..n)
            .filter_map(|k| {
                let t = (lo + (hi - lo) * k as f64 / (n - 1) as f64).min(hi);
                self.eval(t).ok()
            })
            .map(|(a, da)| (da - self.params.rhs(a)).abs() / (1.0 + da.abs()))
            .fold(0.0, f64::max)
    }

    /// Whether `t = 0` lies in the closure of the domain with a finite value.
    pub fn touches_origin(&self) -> bool {
        self.in_domain(0.0)
    }

    /// Copy of the profile restricted to `t >= 0`. The new lower end is
    /// tagged `SmoothOrigin` when `a(0) = 1`, `Truncated` otherwise.
    pub fn restrict_to_origin(&self) -> Result<Profile> {
        if self.lower.t >= 0.0 {
            return Ok(self.clone());
        }
        let (a0, da0) = self.eval(0.0)?;
        let tag = if (a0 - 1.0).abs() <= SMOOTH_ORIGIN_TOL {
            EndTag::SmoothOrigin
        } else {
            EndTag::Truncated
        };
        let mut out = self.clone();
        out.lower = Endpoint::exact(0.0, tag);
        if let Representation::Sampled(nodes) = &mut out.repr {
            let k = nodes.partition_point(|n| n.t < 0.0);
            let mut kept: Vec<Node> = Vec::with_capacity(nodes.len() - k + 1);
            if nodes.get(k).map(|n| n.t) != Some(0.0) {
                kept.push(Node {
                    t: 0.0,
                    a: a0,
                    da: da0,
                    d2a: self.params.second_derivative(a0),
                });
            }
            kept.extend_from_slice(&nodes[k..]);
            *nodes = kept;
        }
        if out.anchor.0 < 0.0 {
            out.anchor = (0.0, a0);
        }
        Ok(out)
    }

    /// Apply one of the three symmetries of the solution space.
    pub fn apply_symmetry(&self, action: Symmetry) -> Result<Profile> {
        apply_symmetry(self, action)
    }

    /// `(t, a, a')` rows: the nodes of a sampled profile when `samples` is
    /// zero, otherwise `samples` uniform points of the data span (101 for
    /// closed forms given zero).
    pub fn rows(&self, samples: usize) -> Vec<(f64, f64, f64)> {
        match (&self.repr, samples) {
            (Representation::Sampled(nodes), 0) => nodes.iter().map(|n| (n.t, n.a, n.da)).collect(),
            _ => {
                let n = if samples == 0 { 101 } else { samples.max(2) };
                let (lo, hi) = self.data_span();
                (0..n)
                    .filter_map(|k| {
                        let t = lo + (hi - lo) * k as f64 / (n - 1) as f64;
                        self.eval(t).ok().map(|(a, da)| (t, a, da))
                    })
                    .collect()
            }
        }
    }

    /// CSV with header `t,a,dadt` of [`Profile::rows`].
    pub fn to_csv(&self, samples: usize) -> String {
        let mut out = String::from("t,a,dadt\n");
        for (t, a, da) in self.rows(samples) {
            out.push_str(&format!("{},{},{}\n", fmt17(t), fmt17(a), fmt17(da)));
        }
        out
    }

    /// Continue a sampled profile past a truncated end (or past the origin),
    /// integrating from its edge node towards `target`. Other ends are
    /// returned unchanged, as are closed forms.
    pub fn extend(&self, direction: Direction, target: f64, tol: f64) -> Result<Profile> {
        let nodes = match &self.repr {
            Representation::Sampled(nodes) => nodes,
            _ => return Ok(self.clone()),
        };
        let end = match direction {
            Direction::Forward => self.upper,
            Direction::Backward => self.lower,
        };
        if !matches!(end.tag, EndTag::Truncated | EndTag::SmoothOrigin) {
            return Ok(self.clone());
        }
        let edge = match direction {
            Direction::Forward => nodes[nodes.len() - 1],
            Direction::Backward => nodes[0],
        };
        let tol = Tolerance::relative(tol);
        let run = rk::integrate(&self.params, edge.t, edge.a, target, tol, A_ZERO, A_BLOWUP);
        let new_end = endpoint_from_run(&self.params, &run, edge.a, self.anchor.0, tol, direction)?;
        let mut out = self.clone();
        if let Representation::Sampled(nodes) = &mut out.repr {
            match direction {
                Direction::Forward => {
                    nodes.extend(run.nodes.iter().skip(1).copied());
                    out.upper = new_end;
                }
                Direction::Backward => {
                    let mut merged: Vec<Node> = run.nodes.iter().skip(1).rev().copied().collect();
                    merged.extend_from_slice(nodes);
                    *nodes = merged;
                    out.lower = new_end;
                }
            }
        }
        Ok(out)
    }

    /// Assemble a sampled profile from nodes and endpoint data. Used by the
    /// catalog for solutions anchored at an exactly known blow-up time.
    pub(crate) fn from_parts(
        params: SolitonParams,
        nodes: Vec<Node>,
        lower: Endpoint,
        upper: Endpoint,
        anchor: (f64, f64),
    ) -> Profile {
        Profile {
            params,
            repr: Representation::Sampled(nodes),
            lower,
            upper,
            anchor,
        }
    }
}

/// Machine-readable summary of a profile (without the node table).
#[derive(Debug, Clone, Serialize)]
pub struct ProfileSummary {
    pub params: SolitonParams,
    pub representation: &'static str,
    pub phi: Option<f64>,
    pub lower: Endpoint,
    pub upper: Endpoint,
    pub anchor_t: f64,
    pub anchor_a: f64,
    pub monotonicity: Monotonicity,
    pub nodes: usize,
}

impl From<&Profile> for ProfileSummary {
    fn from(p: &Profile) -> Self {
        let (representation, phi, nodes) = match &p.repr {
            Representation::ReciprocalAffine { phi } => ("CLOSED_FORM_RECIPROCAL_AFFINE", Some(*phi), 0),
            Representation::Constant { .. } => ("CLOSED_FORM_CONSTANT", None, 0),
            Representation::Sampled(n) => ("SAMPLED", None, n.len()),
        };
        ProfileSummary {
            params: p.params,
            representation,
            phi,
            lower: p.lower,
            upper: p.upper,
            anchor_t: p.anchor.0,
            anchor_a: p.anchor.1,
            monotonicity: p.monotonicity(),
            nodes,
        }
    }
}

/// Closed-form steady profile `a(t) = 1 / (4 mu t + phi)` on its maximal
/// interval.
pub fn closed_form_profile(params: SolitonParams, phi: f64) -> Result<Profile> {
    if !params.gamma().is_infinite() {
        return Err(Error::NotSteady);
    }
    if !phi.is_finite() {
        return Err(Error::InvalidParameter {
            name: "phi",
            reason: format!("must be finite, got {phi}"),
        });
    }
    let mu = params.mu();
    let edge = -phi / (4.0 * mu);
    let (lower, upper) = if mu < 0.0 {
        (
            Endpoint::exact(f64::NEG_INFINITY, EndTag::DecayToZero),
            Endpoint::exact(edge, EndTag::BlowUp),
        )
    } else {
        (
            Endpoint::exact(edge, EndTag::BlowUp),
            Endpoint::exact(f64::INFINITY, EndTag::DecayToZero),
        )
    };
    // Anchor where a = 1 (t = 0 when phi = 1).
    let t_ref = (1.0 - phi) / (4.0 * mu);
    Ok(Profile {
        params,
        repr: Representation::ReciprocalAffine { phi },
        lower,
        upper,
        anchor: (t_ref, 1.0),
    })
}

/// The separatrix `a = gamma` over a window.
pub fn constant_profile(params: SolitonParams, window: (f64, f64)) -> Result<Profile> {
    let g = params.positive_separatrix().ok_or(Error::Domain(
        "constant positive profiles need 0 < gamma < infinity".into(),
    ))?;
    let (lo, hi) = check_window(window)?;
    Ok(Profile {
        params,
        repr: Representation::Constant { value: g },
        lower: Endpoint::exact(lo, EndTag::Truncated),
        upper: Endpoint::exact(hi, EndTag::Truncated),
        anchor: (lo.max(0.0).min(hi), g),
    })
}

fn check_window(window: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidParameter {
            name: "window",
            reason: format!("need finite t_lo <= t_hi, got ({lo}, {hi})"),
        });
    }
    Ok((lo, hi))
}

/// Integrate the profile ODE from `(t_ref, a_ref)` over `window`.
///
/// Integration stops early when `a` exceeds [`A_BLOWUP`] or drops below
/// [`A_ZERO`]; blow-up times are then refined with the local model
/// `a^{-2} ~ 4 lambda (T - t)` (or `a^{-1} ~ 4 |mu| |T - t|` when steady).
pub fn integrate_profile(
    params: SolitonParams,
    t_ref: f64,
    a_ref: f64,
    window: (f64, f64),
    tol: f64,
) -> Result<Profile> {
    if !(a_ref > 0.0) || !a_ref.is_finite() {
        return Err(Error::NonPositiveA(a_ref));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    let (lo, hi) = check_window(window)?;
    if !(lo <= t_ref && t_ref <= hi) {
        return Err(Error::InvalidParameter {
            name: "t_ref",
            reason: format!("{t_ref} outside window ({lo}, {hi})"),
        });
    }
    if let Some(g) = params.positive_separatrix() {
        if (a_ref - g).abs() <= SEPARATRIX_SNAP * g.max(1.0) {
            let mut p = constant_profile(params, (lo, hi))?;
            p.anchor = (t_ref, g);
            return Ok(p);
        }
    }
    integrate_sampled(params, t_ref, a_ref, (lo, hi), Tolerance::relative(tol))
}

pub(crate) fn integrate_sampled(
    params: SolitonParams,
    t_ref: f64,
    a_ref: f64,
    (lo, hi): (f64, f64),
    tol: Tolerance,
) -> Result<Profile> {
    let forward = rk::integrate(&params, t_ref, a_ref, hi, tol, A_ZERO, A_BLOWUP);
    let backward = rk::integrate(&params, t_ref, a_ref, lo, tol, A_ZERO, A_BLOWUP);
    let upper = endpoint_from_run(&params, &forward, a_ref, t_ref, tol, Direction::Forward)?;
    let lower = endpoint_from_run(&params, &backward, a_ref, t_ref, tol, Direction::Backward)?;

    let mut nodes: Vec<Node> = backward.nodes.iter().rev().copied().collect();
    nodes.extend(forward.nodes.iter().skip(1).copied());
    Ok(Profile {
        params,
        repr: Representation::Sampled(nodes),
        lower,
        upper,
        anchor: (t_ref, a_ref),
    })
}

fn endpoint_from_run(
    params: &SolitonParams,
    run: &rk::Run,
    a_ref: f64,
    t_ref: f64,
    tol: Tolerance,
    direction: Direction,
) -> Result<Endpoint> {
    let last = *run.nodes.last().unwrap();
    let infinity = match direction {
        Direction::Forward => f64::INFINITY,
        Direction::Backward => f64::NEG_INFINITY,
    };
    match run.stop {
        Stop::Failure { last_t } => Err(Error::StepFailure { last_t }),
        Stop::Above => {
            let (t, uncertainty) = refine_blow_up(params, &run.nodes, t_ref, tol);
            Ok(Endpoint {
                t,
                tag: EndTag::BlowUp,
                uncertainty,
            })
        }
        Stop::Below => Ok(Endpoint::exact(infinity, EndTag::DecayToZero)),
        Stop::End => match fate(params, a_ref, direction) {
            Fate::Converges { limit } if (last.a - limit).abs() <= CONVERGED * limit => {
                Ok(Endpoint::exact(infinity, EndTag::Converges { limit }))
            }
            _ => Ok(Endpoint::exact(last.t, EndTag::Truncated)),
        },
    }
}

/// Blow-up time from the last nodes before the event. Returns the estimate
/// and an uncertainty combining the spread of two local fits with the
/// stepper tolerance.
pub(crate) fn refine_blow_up(
    params: &SolitonParams,
    nodes: &[Node],
    t_ref: f64,
    tol: Tolerance,
) -> (f64, f64) {
    let last = nodes[nodes.len() - 1];
    let lambda = params.lambda();
    let (p, model) = if lambda == 0.0 {
        (1.0, last.t - 1.0 / (4.0 * params.mu() * last.a))
    } else {
        (2.0, last.t + 1.0 / (4.0 * lambda * last.a * last.a))
    };
    let fit = if nodes.len() >= 2 {
        let prev = nodes[nodes.len() - 2];
        let y1 = prev.a.powf(-p);
        let y2 = last.a.powf(-p);
        if y1 != y2 {
            last.t - y2 * (last.t - prev.t) / (y2 - y1)
        } else {
            model
        }
    } else {
        model
    };
    let uncertainty = (fit - model).abs() + 10.0 * tol.rtol * (model - t_ref).abs() + 1e-15;
    (model, uncertainty)
}

/// Apply a symmetry of the profile ODE to a profile.
pub fn apply_symmetry(profile: &Profile, action: Symmetry) -> Result<Profile> {
    let positive = |name: &'static str, x: f64| {
        if x > 0.0 && x.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name,
                reason: format!("must be positive and finite, got {x}"),
            })
        }
    };
    let p = &profile.params;
    let mut out = profile.clone();
    match action {
        Symmetry::Scale(alpha) => {
            positive("alpha", alpha)?;
            out.params = SolitonParams::new(p.lambda() / (alpha * alpha), p.mu() / alpha)?;
            out.repr = match &profile.repr {
                Representation::ReciprocalAffine { phi } => {
                    Representation::ReciprocalAffine { phi: phi / alpha }
                }
                Representation::Constant { value } => Representation::Constant {
                    value: value * alpha,
                },
                Representation::Sampled(nodes) => Representation::Sampled(
                    nodes
                        .iter()
                        .map(|n| Node {
                            t: n.t,
                            a: alpha * n.a,
                            da: alpha * n.da,
                            d2a: alpha * n.d2a,
                        })
                        .collect(),
                ),
            };
            out.anchor = (profile.anchor.0, alpha * profile.anchor.1);
            out.lower = scale_tag(profile.lower, alpha);
            out.upper = scale_tag(profile.upper, alpha);
            if out.lower.tag == EndTag::SmoothOrigin && alpha != 1.0 {
                out.lower.tag = EndTag::Truncated;
            }
        }
        Symmetry::Rescale(beta) => {
            positive("beta", beta)?;
            let b2 = beta * beta;
            out.params = SolitonParams::new(p.lambda() / b2, p.mu() / b2)?;
            out.repr = match &profile.repr {
                Representation::Sampled(nodes) => Representation::Sampled(
                    nodes
                        .iter()
                        .map(|n| Node {
                            t: n.t * b2,
                            a: n.a,
                            da: n.da / b2,
                            d2a: n.d2a / (b2 * b2),
                        })
                        .collect(),
                ),
                other => other.clone(),
            };
            out.anchor = (profile.anchor.0 * b2, profile.anchor.1);
            for (dst, src) in [(&mut out.lower, profile.lower), (&mut out.upper, profile.upper)] {
                dst.t = src.t * b2;
                dst.uncertainty = src.uncertainty * b2;
            }
        }
        Symmetry::Translate(tau) => {
            if !tau.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "tau",
                    reason: format!("must be finite, got {tau}"),
                });
            }
            out.repr = match &profile.repr {
                Representation::ReciprocalAffine { phi } => Representation::ReciprocalAffine {
                    phi: phi - 4.0 * p.mu() * tau,
                },
                Representation::Sampled(nodes) => Representation::Sampled(
                    nodes.iter().map(|n| Node { t: n.t + tau, ..*n }).collect(),
                ),
                other => other.clone(),
            };
            out.anchor = (profile.anchor.0 + tau, profile.anchor.1);
            out.lower.t = profile.lower.t + tau;
            out.upper.t = profile.upper.t + tau;
            if out.lower.tag == EndTag::SmoothOrigin && tau != 0.0 {
                out.lower.tag = EndTag::Truncated;
            }
        }
    }
    Ok(out)
}

fn scale_tag(end: Endpoint, alpha: f64) -> Endpoint {
    let tag = match end.tag {
        EndTag::Converges { limit } => EndTag::Converges {
            limit: limit * alpha,
        },
        other => other,
    };
    Endpoint { tag, ..end }
}
