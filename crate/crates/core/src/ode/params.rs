use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// The separatrix level `gamma = 2 mu / lambda`, infinite for steady solitons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    Finite(f64),
    Infinite,
}

impl Gamma {
    pub fn finite(self) -> Option<f64> {
        match self {
            Gamma::Finite(g) => Some(g),
            Gamma::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Gamma::Infinite)
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Finite(g) => write!(f, "{g}"),
            Gamma::Infinite => write!(f, "INFINITE"),
        }
    }
}

impl Serialize for Gamma {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Gamma::Finite(g) => s.serialize_f64(*g),
            Gamma::Infinite => s.serialize_str("INFINITE"),
        }
    }
}

/// Sign class of the expansion constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Regime {
    Shrinking,
    Steady,
    Expanding,
}

/// The pair (lambda, mu) of a two-dimensional gradient Ricci soliton profile.
///
/// `lambda` is the expansion constant and `mu` the normalisation of the
/// Killing field. Positive profiles `a(t)` satisfy
///
/// ```text
/// a'(t) = 4 mu a^2 (a / gamma - 1) = 2 lambda a^3 - 4 mu a^2
/// ```
///
/// The right-hand form never divides by `lambda`, so `gamma` is only derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParams {
    lambda: f64,
    mu: f64,
}

impl SolitonParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("must be finite, got {lambda}"),
            });
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: format!("must be finite, got {mu}"),
            });
        }
        if mu == 0.0 {
            return Err(Error::MuZero);
        }
        Ok(Self { lambda, mu })
    }

    /// Parameters from `(mu, gamma)`, with `lambda = 2 mu / gamma`.
    pub fn from_mu_gamma(mu: f64, gamma: Gamma) -> Result<Self> {
        match gamma {
            Gamma::Infinite => Self::new(0.0, mu),
            Gamma::Finite(g) if g == 0.0 || !g.is_finite() => Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("must be non-zero and finite, got {g}"),
            }),
            Gamma::Finite(g) => Self::new(2.0 * mu / g, mu),
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn gamma(&self) -> Gamma {
        if self.lambda == 0.0 {
            Gamma::Infinite
        } else {
            Gamma::Finite(2.0 * self.mu / self.lambda)
        }
    }

    /// Positive separatrix level, if the ODE has one.
    pub fn positive_separatrix(&self) -> Option<f64> {
        self.gamma().finite().filter(|g| *g > 0.0)
    }

    pub fn regime(&self) -> Regime {
        if self.lambda > 0.0 {
            Regime::Shrinking
        } else if self.lambda < 0.0 {
            Regime::Expanding
        } else {
            Regime::Steady
        }
    }

    /// Right-hand side of the profile ODE.
    pub fn rhs(&self, a: f64) -> f64 {
        a * a * (2.0 * self.lambda * a - 4.0 * self.mu)
    }

    /// d(rhs)/da.
    pub fn rhs_da(&self, a: f64) -> f64 {
        a * (6.0 * self.lambda * a - 8.0 * self.mu)
    }

    /// Second time derivative of a solution through `a`.
    pub fn second_derivative(&self, a: f64) -> f64 {
        self.rhs_da(a) * self.rhs(a)
    }

    /// Gauss curvature `lambda - 2 mu / a` of the metric at a point where the
    /// profile takes the value `a`.
    pub fn curvature(&self, a: f64) -> f64 {
        self.lambda - 2.0 * self.mu / a
    }
}

impl Serialize for SolitonParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SolitonParams", 3)?;
        st.serialize_field("lambda", &self.lambda)?;
        st.serialize_field("mu", &self.mu)?;
        st.serialize_field("gamma", &self.gamma())?;
        st.end()
    }
}

/// Build parameters; `mu` must be non-zero.
pub fn make_params(lambda: f64, mu: f64) -> Result<SolitonParams> {
    SolitonParams::new(lambda, mu)
}
