use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{build_with_spacing, radial_distance, radial_extent, WarpedMetric};
use crate::numeric::serialize_extended;
use crate::ode::profile::integrate_sampled;
use crate::ode::{
    closed_form_profile, integrate_profile, time_of_flight, EndTag, Endpoint, Profile,
    SolitonParams, Tolerance, A_ZERO,
};
use crate::taxonomy::Family;

/// Integration tolerance for catalog profiles.
pub const CATALOG_TOL: f64 = 1e-14;
/// Value of `a` at which solutions anchored at a known blow-up time start.
const START_AT_ZERO: f64 = 1e8;
/// Same, for blow-ups at `t > 0` where `T - t` must stay well resolved.
const START_AT_POSITIVE: f64 = 1e6;

/// Admissible values of the family parameter `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuRange {
    #[serde(serialize_with = "serialize_extended")]
    pub lo: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl NuRange {
    const fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn contains(&self, nu: f64) -> bool {
        let above = if self.lo_closed { nu >= self.lo } else { nu > self.lo };
        let below = if self.hi_closed { nu <= self.hi } else { nu < self.hi };
        above && below && nu.is_finite()
    }

    pub fn describe(&self) -> String {
        format!(
            "{}{}, {}{}",
            if self.lo_closed { "[" } else { "(" },
            self.lo,
            if self.hi.is_finite() { self.hi.to_string() } else { "inf".into() },
            if self.hi_closed { "]" } else { ")" }
        )
    }
}

/// Static description of a family: the table of the classification theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyInfo {
    pub family: Family,
    pub regime: &'static str,
    /// `R2`, `D` (disc), `R2*` or `D*` (punctured).
    pub topology: &'static str,
    pub nu_range: NuRange,
    pub complete: bool,
    pub curvature_sign: &'static str,
    pub inner_end: &'static str,
    pub outer_end: &'static str,
    /// Three representative parameter values.
    pub sample_nu: [f64; 3],
    pub normalization: &'static str,
}

impl Family {
    pub fn info(self) -> FamilyInfo {
        let all = NuRange::open(0.0, f64::INFINITY);
        let row = |regime,
                   topology,
                   nu_range,
                   complete,
                   curvature_sign,
                   inner_end,
                   outer_end,
                   sample_nu,
                   normalization| FamilyInfo {
            family: self,
            regime,
            topology,
            nu_range,
            complete,
            curvature_sign,
            inner_end,
            outer_end,
            sample_nu,
            normalization,
        };
        match self {
            Family::G1Cigar => row(
                "STEADY", "R2", all, true, "POSITIVE", "SMOOTH_POINT", "CYLINDER_END",
                [1.0, 1.5, 2.0],
                "mu = -1/nu^2, a = 1/(1 + 4 mu t); b = nu tanh(r/nu), so g1(nu) = nu^2 g1(1)",
            ),
            Family::G2Exploding => row(
                "STEADY", "R2", all, false, "NEGATIVE", "SMOOTH_POINT", "EXPLODING_END",
                [1.0, 1.5, 2.0],
                "mu = 1/nu^2, a = 1/(1 + 4 mu t); b = nu tan(r/nu), so g2(nu) = nu^2 g2(1)",
            ),
            Family::G3 => row(
                "STEADY",
                "R2*",
                NuRange {
                    lo: 0.0,
                    hi: f64::INFINITY,
                    lo_closed: true,
                    hi_closed: false,
                },
                false, "NEGATIVE", "CYLINDER_END", "EXPLODING_END",
                [0.5, 1.0, 2.0],
                "mu = 1, a = 1/(4t - nu^2); cylinder of radius nu at the inner end",
            ),
            Family::G4Plus => row(
                "SHRINKING", "D", NuRange::open(1.0, FRAC_PI_2), false, "POSITIVE",
                "SMOOTH_POINT", "GEODESIC_BOUNDARY",
                [1.1, 1.3, 1.5],
                "0 < gamma < 1 with blow-up at T1 = 1/4 (boundary length 2 pi); nu = dist(0, boundary), inverted for gamma by bisection",
            ),
            Family::G4Minus => row(
                "SHRINKING", "D", NuRange::open(FRAC_PI_2, f64::INFINITY), false, "POSITIVE",
                "SMOOTH_POINT", "GEODESIC_BOUNDARY",
                [1.7, 2.2, 3.0],
                "gamma < 0 with blow-up at T1 = 1/4 (boundary length 2 pi); nu = dist(0, boundary), inverted for gamma by bisection",
            ),
            Family::G5 => row(
                "SHRINKING", "R2", all, false, "NEGATIVE", "SMOOTH_POINT", "EXPLODING_END",
                [1.0, 1.5, 2.0],
                "gamma = 2, mu = 1/nu^2, a(0) = 1",
            ),
            Family::G6 => row(
                "EXPANDING", "R2", NuRange::open(0.0, 2.0 * PI), true, "POSITIVE",
                "SMOOTH_POINT", "CONE_END",
                [FRAC_PI_2, PI, 1.5 * PI],
                "mu = -1, gamma = 2 pi/nu (cone angle nu), a(0) = 1",
            ),
            Family::G7 => row(
                "EXPANDING", "R2", NuRange::open(2.0 * PI, f64::INFINITY), true, "NEGATIVE",
                "SMOOTH_POINT", "CONE_END",
                [2.5 * PI, 3.0 * PI, 4.0 * PI],
                "mu = -1, gamma = 2 pi/nu (cone angle nu), a(0) = 1",
            ),
            Family::G8 => row(
                "EXPANDING", "R2*", all, true, "NEGATIVE", "CUSP_END", "CONE_END",
                [FRAC_PI_2, PI, 2.0 * PI],
                "lambda = -1, gamma = 2 pi/nu, blow-up at T0 = 0 exactly",
            ),
            Family::G9 => row(
                "EXPANDING", "D*", all, false, "NEGATIVE", "GEODESIC_BOUNDARY", "CONE_END",
                [FRAC_PI_2, PI, 2.0 * PI],
                "lambda = -1, gamma = 2 pi/nu, blow-up at T0 = 1/4 (boundary length 2 pi)",
            ),
            Family::G10 => row(
                "EXPANDING", "R2", all, false, "NEGATIVE", "SMOOTH_POINT", "EXPLODING_END",
                [1.0, 1.5, 2.0],
                "gamma = -1, mu = 1/nu^2, a(0) = 1",
            ),
            Family::G11 => row(
                "EXPANDING", "R2*", all, false, "NEGATIVE", "CUSP_END", "EXPLODING_END",
                [1.0, 1.5, 2.0],
                "lambda = -1, mu = 1/nu^2, blow-up at T0 = 0 exactly",
            ),
            Family::G12 => row(
                "EXPANDING", "D*", all, false, "NEGATIVE", "GEODESIC_BOUNDARY", "EXPLODING_END",
                [1.0, 1.5, 2.0],
                "lambda = -1, mu = 1/nu^2, blow-up at T0 = 1/4 (boundary length 2 pi)",
            ),
        }
    }
}

/// The classification table, one row per family tag.
pub fn family_table() -> Vec<FamilyInfo> {
    Family::ALL.iter().map(|f| f.info()).collect()
}

/// Metric window used to check the soliton equations on an entry: the
/// metric is anchored at `r(b0) = 0` and sampled on `[0, r_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceWindow {
    pub b0: f64,
    pub r_hi: f64,
}

/// Canonical representative of a family.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub family: Family,
    pub nu: f64,
    pub params: SolitonParams,
    #[serde(skip)]
    pub profile: Profile,
    pub normalization_note: String,
    pub reference: ReferenceWindow,
}

impl CatalogEntry {
    /// The entry's metric on its reference window with spacing `h`.
    pub fn reference_metric(&self, h: f64) -> Result<WarpedMetric> {
        build_with_spacing(
            &self.profile,
            (0.0, self.reference.b0),
            (0.0, self.reference.r_hi),
            h,
        )
    }

    /// Whether the metric closes up smoothly at the origin.
    pub fn extends_over_origin(&self) -> bool {
        self.profile.touches_origin()
            && self
                .profile
                .value(0.0)
                .map(|a| (a - 1.0).abs() <= crate::ode::profile::SMOOTH_ORIGIN_TOL)
                .unwrap_or(false)
    }
}

/// Canonical representative of `family` with parameter `nu`.
pub fn catalog(family: Family, nu: f64) -> Result<CatalogEntry> {
    let info = family.info();
    if !info.nu_range.contains(nu) {
        return Err(Error::Range {
            family: family.tag().to_string(),
            nu,
            range: info.nu_range.describe(),
        });
    }
    let nu2 = nu * nu;
    let (profile, window) = match family {
        Family::G1Cigar => {
            let mu = -1.0 / nu2;
            let p = closed_form_profile(SolitonParams::new(0.0, mu)?, 1.0)?.restrict_to_origin()?;
            let t1 = nu2 / 4.0;
            (p, (0.1 * t1, 0.5 * t1))
        }
        Family::G2Exploding => {
            let p = closed_form_profile(SolitonParams::new(0.0, 1.0 / nu2)?, 1.0)?
                .restrict_to_origin()?;
            (p, (0.05 * nu2, 0.2 * nu2))
        }
        Family::G3 => {
            let p = closed_form_profile(SolitonParams::new(0.0, 1.0)?, -nu2)?;
            let t0 = nu2 / 4.0;
            // mu = 1 for every nu, so the window length is fixed too
            (p, (t0 + 0.0125, t0 + 0.4))
        }
        Family::G4Plus | Family::G4Minus => {
            let gamma = g4_gamma(family, nu)?;
            (g4_profile(gamma)?, (0.02, 0.15))
        }
        Family::G5 => {
            let mu = 1.0 / nu2;
            let params = SolitonParams::new(mu, mu)?;
            (decaying_from_origin(params)?, (0.05 * nu2, 0.2 * nu2))
        }
        Family::G6 | Family::G7 => {
            let gamma = 2.0 * PI / nu;
            let params = SolitonParams::new(-2.0 / gamma, -1.0)?;
            let tau = 1.0 / (4.0 * gamma);
            let p = smooth_origin(integrate_profile(params, 0.0, 1.0, (0.0, 50.0 * tau), CATALOG_TOL)?);
            (p, (0.1 * tau, 3.0 * tau))
        }
        Family::G8 | Family::G9 => {
            let gamma = 2.0 * PI / nu;
            let params = SolitonParams::new(-1.0, -gamma / 2.0)?;
            let t0 = if family == Family::G8 { 0.0 } else { 0.25 };
            let tau = 1.0 / (2.0 * gamma * gamma);
            let p = from_blow_up(params, t0, t0 + 50.0 * tau)?;
            // K -> 0 as a -> gamma, where log|K| loses digits
            (p, (t0 + 0.2 * tau, t0 + 0.6 * tau))
        }
        Family::G10 => {
            let mu = 1.0 / nu2;
            let params = SolitonParams::new(-2.0 * mu, mu)?;
            (decaying_from_origin(params)?, (0.05 * nu2, 0.15 * nu2))
        }
        Family::G11 | Family::G12 => {
            let mu = 1.0 / nu2;
            let params = SolitonParams::new(-1.0, mu)?;
            let t0 = if family == Family::G11 { 0.0 } else { 0.25 };
            let t_far = t0 + 100.0 / (4.0 * mu * A_ZERO);
            let p = from_blow_up(params, t0, t_far)?;
            let c = 1.0 / (16.0 * mu * mu);
            (p, (t0 + 0.1 * c, t0 + 1.5 * c))
        }
    };
    let (b_lo, b_hi) = (2.0 * window.0.sqrt(), 2.0 * window.1.sqrt());
    let r_hi = radial_distance(&profile, b_lo, b_hi)?;
    Ok(CatalogEntry {
        family,
        nu,
        params: *profile.params(),
        normalization_note: info.normalization.to_string(),
        reference: ReferenceWindow { b0: b_lo, r_hi },
        profile,
    })
}

/// Mark the lower end of a profile integrated from `a(0) = 1` as smooth.
fn smooth_origin(p: Profile) -> Profile {
    let nodes = p.nodes().map(|n| n.to_vec()).unwrap_or_default();
    if nodes.is_empty() || nodes[0].t != 0.0 || nodes[0].a != 1.0 {
        return p;
    }
    Profile::from_parts(
        *p.params(),
        nodes,
        Endpoint {
            t: 0.0,
            tag: EndTag::SmoothOrigin,
            uncertainty: 0.0,
        },
        p.upper(),
        p.anchor(),
    )
}

/// Solution through `a(0) = 1` followed until it decays below `A_ZERO`.
fn decaying_from_origin(params: SolitonParams) -> Result<Profile> {
    let t_far = 100.0 / (4.0 * params.mu() * A_ZERO);
    Ok(smooth_origin(integrate_profile(params, 0.0, 1.0, (0.0, t_far), CATALOG_TOL)?))
}

/// Solution that blows up backward exactly at `t0`. Integration starts at
/// a large value `a_s`, placed at the exact time of flight from infinity.
fn from_blow_up(params: SolitonParams, t0: f64, t_far: f64) -> Result<Profile> {
    let a_s = if t0 == 0.0 { START_AT_ZERO } else { START_AT_POSITIVE };
    let t_s = t0 + time_of_flight(&params, f64::INFINITY, a_s)?;
    let p = integrate_sampled(params, t_s, a_s, (t_s, t_far), Tolerance::relative(CATALOG_TOL))?;
    let nodes = p.nodes().map(|n| n.to_vec()).unwrap_or_default();
    Ok(Profile::from_parts(
        params,
        nodes,
        Endpoint {
            t: t0,
            tag: EndTag::BlowUp,
            uncertainty: 0.0,
        },
        p.upper(),
        p.anchor(),
    ))
}

/// Parameters of the g4 solution through `a(0) = 1` with shape `gamma` and
/// blow-up at `T1 = 1/4`: `mu = -1 - ln(1 - gamma)/gamma`.
fn g4_params(gamma: f64) -> Result<SolitonParams> {
    let mu = -1.0 - (-gamma).ln_1p() / gamma;
    SolitonParams::new(2.0 * mu / gamma, mu)
}

fn g4_profile(gamma: f64) -> Result<Profile> {
    let p = integrate_profile(g4_params(gamma)?, 0.0, 1.0, (0.0, 1.0), CATALOG_TOL)?;
    if p.upper().tag != EndTag::BlowUp {
        return Err(Error::Domain(format!("g4 profile with gamma = {gamma} did not blow up")));
    }
    Ok(smooth_origin(p))
}

/// `dist(0, boundary)` for the g4 metric of shape `gamma`.
pub fn g4_distance(gamma: f64) -> Result<f64> {
    radial_extent(&g4_profile(gamma)?)
}

/// Invert `nu = dist(0, boundary)`, which decreases strictly in `gamma`.
/// g4+ is searched over `gamma = 1 - e^{-s}`, g4- over `gamma = -e^s`.
fn g4_gamma(family: Family, nu: f64) -> Result<f64> {
    let (to_gamma, mut lo, mut hi): (fn(f64) -> f64, f64, f64) = match family {
        Family::G4Plus => (|s: f64| -(-s).exp_m1(), 1e-9, 25.0),
        _ => (|s: f64| -s.exp(), -20.0, 40.0),
    };
    // distance as a function of s: decreasing for g4+, increasing for g4-
    let increasing = family == Family::G4Minus;
    let d = |s: f64| g4_distance(to_gamma(s));
    let (d_lo, d_hi) = (d(lo)?, d(hi)?);
    let (d_min, d_max) = if increasing { (d_lo, d_hi) } else { (d_hi, d_lo) };
    if !(nu > d_min && nu < d_max) {
        return Err(Error::Range {
            family: family.tag().to_string(),
            nu,
            range: format!("({d_min}, {d_max}) reachable numerically"),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= 1e-13 * mid.abs().max(1.0) {
            break;
        }
        if (d(mid)? < nu) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(to_gamma(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{classify, FamilyLabel};

    #[test]
    fn cigar_entry_is_closed_form() {
        let e = catalog(Family::G1Cigar, 1.0).unwrap();
        assert_eq!(e.params.mu(), -1.0);
        assert_eq!(e.profile.value(0.1).unwrap(), 1.0 / (1.0 - 0.4));
    }

    #[test]
    fn ranges_are_enforced() {
        assert!(matches!(catalog(Family::G6, 7.0), Err(Error::Range { .. })));
        assert!(matches!(catalog(Family::G7, 6.0), Err(Error::Range { .. })));
        assert!(matches!(catalog(Family::G1Cigar, 0.0), Err(Error::Range { .. })));
        assert!(matches!(catalog(Family::G4Plus, 1.6), Err(Error::Range { .. })));
        assert!(catalog(Family::G3, 0.0).is_ok());
    }

    #[test]
    fn g4_distance_is_inverted() {
        for (family, nu) in [(Family::G4Plus, 1.3), (Family::G4Minus, 2.2)] {
            let e = catalog(family, nu).unwrap();
            let d = radial_extent(&e.profile).unwrap();
            assert!((d - nu).abs() < 1e-9, "{family}: {d}");
            assert!((e.profile.upper().t - 0.25).abs() < 1e-10);
        }
    }

    #[test]
    fn g6_entry_has_requested_cone_angle() {
        let e = catalog(Family::G6, PI).unwrap();
        assert_eq!(e.params.gamma().finite(), Some(2.0));
        assert_eq!(e.profile.upper().tag, EndTag::Converges { limit: 2.0 });
    }

    #[test]
    fn exact_t0_entries_round_trip() {
        for family in [Family::G8, Family::G11] {
            let e = catalog(family, 1.0).unwrap();
            assert_eq!(classify(&e.profile), FamilyLabel::Family(family));
        }
    }

    #[test]
    fn table_has_thirteen_rows() {
        let t = family_table();
        assert_eq!(t.len(), 13);
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json[0]["family"], "G1_CIGAR");
        assert_eq!(json[0]["nu_range"]["hi"], "inf");
    }
}
