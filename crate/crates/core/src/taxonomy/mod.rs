//! The twelve families of rotationally symmetric soliton metrics (thirteen
//! tags, since g4 comes in two signs): classification of profiles and
//! canonical representatives.

pub mod catalog;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::ode::{time_of_flight, Direction, EndTag, Gamma, Profile, Representation};

pub use catalog::{catalog, family_table, g4_distance, CatalogEntry, FamilyInfo, NuRange, ReferenceWindow};


/// One of the soliton families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    G1Cigar,
    G2Exploding,
    G3,
    G4Plus,
    G4Minus,
    G5,
    G6,
    G7,
    G8,
    G9,
    G10,
    G11,
    G12,
}

impl Family {
    pub const ALL: [Family; 13] = [
        Family::G1Cigar,
        Family::G2Exploding,
        Family::G3,
        Family::G4Plus,
        Family::G4Minus,
        Family::G5,
        Family::G6,
        Family::G7,
        Family::G8,
        Family::G9,
        Family::G10,
        Family::G11,
        Family::G12,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::G1Cigar => "G1_CIGAR",
            Family::G2Exploding => "G2_EXPLODING",
            Family::G3 => "G3",
            Family::G4Plus => "G4_PLUS",
            Family::G4Minus => "G4_MINUS",
            Family::G5 => "G5",
            Family::G6 => "G6",
            Family::G7 => "G7",
            Family::G8 => "G8",
            Family::G9 => "G9",
            Family::G10 => "G10",
            Family::G11 => "G11",
            Family::G12 => "G12",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts the tag names and short forms such as `g1`, `g4+`, `g4plus`,
    /// `g4-`, `cigar`, in any case.
    fn from_str(s: &str) -> Result<Self, Error> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| *c != '_' && *c != ' ')
            .collect();
        let family = match key.as_str() {
            "g1" | "g1cigar" | "cigar" => Family::G1Cigar,
            "g2" | "g2exploding" | "exploding" => Family::G2Exploding,
            "g3" => Family::G3,
            "g4+" | "g4plus" | "g4p" => Family::G4Plus,
            "g4-" | "g4minus" | "g4m" => Family::G4Minus,
            "g5" => Family::G5,
            "g6" => Family::G6,
            "g7" => Family::G7,
            "g8" => Family::G8,
            "g9" => Family::G9,
            "g10" => Family::G10,
            "g11" => Family::G11,
            "g12" => Family::G12,
            _ => {
                return Err(Error::InvalidParameter {
                    name: "family",
                    reason: format!("unknown family `{s}`"),
                })
            }
        };
        Ok(family)
    }
}

/// Result of classifying a profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyLabel {
    Family(Family),
    /// The constant solution `a = gamma`: a flat cone.
    FlatSeparatrix,
    /// The blow-up time `T0` could not be separated from zero.
    UnresolvedT0Sign { t0: f64, uncertainty: f64 },
}

impl FamilyLabel {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilyLabel::Family(f) => f.tag(),
            FamilyLabel::FlatSeparatrix => "FLAT_SEPARATRIX",
            FamilyLabel::UnresolvedT0Sign { .. } => "UNRESOLVED_T0_SIGN",
        }
    }

    pub fn family(&self) -> Option<Family> {
        match self {
            FamilyLabel::Family(f) => Some(*f),
            _ => None,
        }
    }
}

impl From<Family> for FamilyLabel {
    fn from(f: Family) -> Self {
        FamilyLabel::Family(f)
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl Serialize for FamilyLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self {
            FamilyLabel::UnresolvedT0Sign { t0, uncertainty } => {
                let mut st = s.serialize_struct("FamilyLabel", 3)?;
                st.serialize_field("tag", self.tag())?;
                st.serialize_field("t0", t0)?;
                st.serialize_field("uncertainty", uncertainty)?;
                st.end()
            }
            _ => {
                let mut st = s.serialize_struct("FamilyLabel", 1)?;
                st.serialize_field("tag", self.tag())?;
                st.end()
            }
        }
    }
}

/// Tolerance used when a profile has to be continued backward to find `T0`.
const T0_TOL: f64 = 1e-12;

/// Assign a profile to its family.
///
/// The decision uses the signs of `mu` and `gamma`, the side of the
/// separatrix the solution lies on, and for three pairs of families the sign
/// of the backward blow-up time `T0`. When `T0` is within its numerical
/// uncertainty of zero the result is [`FamilyLabel::UnresolvedT0Sign`]; only
/// profiles whose `T0 = 0` is known exactly are labelled G8 or G11.
pub fn classify(profile: &Profile) -> FamilyLabel {
    if let Representation::Constant { .. } = profile.representation() {
        return FamilyLabel::FlatSeparatrix;
    }
    let params = profile.params();
    let mu = params.mu();
    let (t_ref, a_ref) = profile.anchor();
    let by_t0 = |neg: Family, zero: Family, pos: Family| match lower_blow_up(profile) {
        Some((t0, unc)) if unc == 0.0 && t0 == 0.0 => zero.into(),
        Some((t0, unc)) if t0.abs() > unc => {
            if t0 < 0.0 {
                neg.into()
            } else {
                pos.into()
            }
        }
        Some((t0, uncertainty)) => FamilyLabel::UnresolvedT0Sign { t0, uncertainty },
        None => FamilyLabel::UnresolvedT0Sign {
            t0: f64::NAN,
            uncertainty: f64::INFINITY,
        },
    };
    match params.gamma() {
        Gamma::Infinite => {
            if mu < 0.0 {
                Family::G1Cigar.into()
            } else {
                let phi = match profile.representation() {
                    Representation::ReciprocalAffine { phi } => *phi,
                    _ => 1.0 / a_ref - 4.0 * mu * t_ref,
                };
                if phi > 0.0 {
                    Family::G2Exploding.into()
                } else {
                    Family::G3.into()
                }
            }
        }
        Gamma::Finite(g) if g > 0.0 => {
            if a_ref == g {
                FamilyLabel::FlatSeparatrix
            } else if mu > 0.0 {
                if a_ref > g {
                    Family::G4Plus.into()
                } else {
                    Family::G5.into()
                }
            } else if a_ref < g {
                Family::G6.into()
            } else {
                by_t0(Family::G7, Family::G8, Family::G9)
            }
        }
        Gamma::Finite(_) => {
            if mu < 0.0 {
                Family::G4Minus.into()
            } else {
                by_t0(Family::G10, Family::G11, Family::G12)
            }
        }
    }
}

/// `(T0, uncertainty)` of the backward blow-up, continuing the profile
/// backward when its lower end is truncated.
fn lower_blow_up(profile: &Profile) -> Option<(f64, f64)> {
    let lower = profile.lower();
    if lower.tag == EndTag::BlowUp {
        return Some((lower.t, lower.uncertainty));
    }
    let nodes = profile.nodes()?;
    let first = nodes[0];
    let flight = time_of_flight(profile.params(), first.a, f64::INFINITY).ok()?;
    // flight < 0: the blow-up lies in the past
    let target = first.t + 2.0 * flight - 1.0;
    let extended = profile.extend(Direction::Backward, target, T0_TOL).ok()?;
    let lower = extended.lower();
    (lower.tag == EndTag::BlowUp).then_some((lower.t, lower.uncertainty))
}
