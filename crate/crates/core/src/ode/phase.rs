//! Phase-line facts about the profile ODE: the eventual fate of a positive
//! solution in each time direction, the exact time of flight between two
//! values, and the blow-up time of the solution through `a(0) = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::params::{Gamma, SolitonParams};

/// What a solution does as it leaves its anchor in one time direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Fate {
    /// `a -> infinity` in finite time.
    BlowUp,
    /// `a -> 0` as `|t| -> infinity`.
    DecayToZero,
    /// `a -> limit > 0` as `|t| -> infinity`.
    Converges { limit: f64 },
    /// The constant separatrix solution.
    Constant,
}

/// Direction of travel in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Fate of the solution through `a > 0` in the given time direction.
pub fn fate(params: &SolitonParams, a: f64, direction: Direction) -> Fate {
    let slope = params.rhs(a);
    if slope == 0.0 {
        return Fate::Constant;
    }
    // Moving "up" in a: forward on an increasing solution, backward on a
    // decreasing one.
    let up = (slope > 0.0) == (direction == Direction::Forward);
    if up {
        // a keeps increasing until it meets a separatrix above it or blows up.
        match params.positive_separatrix() {
            Some(g) if g > a => Fate::Converges { limit: g },
            _ => Fate::BlowUp,
        }
    } else {
        match params.positive_separatrix() {
            Some(g) if g < a => Fate::Converges { limit: g },
            _ => Fate::DecayToZero,
        }
    }
}

/// Antiderivative of `1 / rhs(s)`, normalised to vanish at `s = infinity`.
///
/// With `c = 2 lambda` and `d = 4 mu` the right-hand side is `s^2 (c s - d)`
/// and partial fractions give `1/(d s) + (c/d^2) ln|c - d/s|`. Writing
/// `x = -d/(c s)` this is `(c/d^2) (ln|1 + x| - x)` plus a constant; the two
/// leading terms cancel for large `s`, so the difference is summed directly.
fn flight_antiderivative(params: &SolitonParams, s: f64) -> f64 {
    let c = 2.0 * params.lambda();
    let d = 4.0 * params.mu();
    if s.is_infinite() {
        return 0.0;
    }
    if c == 0.0 {
        return 1.0 / (d * s);
    }
    let x = -d / (c * s);
    c / (d * d) * log1p_minus_x(x)
}

/// `ln|1 + x| - x`, accurate for small `|x|`.
fn log1p_minus_x(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // -x^2/2 + x^3/3 - x^4/4 + ...
        let mut term = x * x;
        let mut acc = 0.0;
        for k in 2..40 {
            let contribution = if k % 2 == 0 { -term } else { term } / k as f64;
            acc += contribution;
            if contribution.abs() <= 1e-18 * acc.abs() {
                break;
            }
            term *= x;
        }
        acc
    } else if x > -1.0 {
        x.ln_1p() - x
    } else {
        (-(1.0 + x)).ln() - x
    }
}

/// Exact time needed to travel from `a_from` to `a_to` along a solution.
/// Either value may be `f64::INFINITY`; the two must lie on the same side of
/// every separatrix.
pub fn time_of_flight(params: &SolitonParams, a_from: f64, a_to: f64) -> Result<f64> {
    if !(a_from > 0.0 && a_to > 0.0) {
        return Err(Error::Domain(format!(
            "time of flight needs positive values, got {a_from} -> {a_to}"
        )));
    }
    if let Some(g) = params.positive_separatrix() {
        let side = |x: f64| x.partial_cmp(&g);
        if side(a_from) != side(a_to) || a_from == g {
            return Err(Error::Domain(format!(
                "values {a_from} and {a_to} are separated by the separatrix {g}"
            )));
        }
    }
    Ok(flight_antiderivative(params, a_to) - flight_antiderivative(params, a_from))
}

/// Blow-up time of the solution with `a(0) = 1`:
/// `4 mu T = -1 - (1/gamma) ln(1 - gamma)`.
///
/// The sign of the result tells the direction: positive for forward
/// blow-up (`a` increasing), negative for blow-up in the past.
pub fn blow_up_time_closed(mu: f64, gamma: Gamma) -> Result<f64> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::Domain(format!("mu must be non-zero and finite, got {mu}")));
    }
    let g = match gamma {
        Gamma::Infinite => return Ok(-1.0 / (4.0 * mu)),
        Gamma::Finite(g) => g,
    };
    if g == 0.0 || !g.is_finite() {
        return Err(Error::Domain(format!("gamma must be non-zero, got {g}")));
    }
    if g >= 1.0 {
        return Err(Error::Domain(format!(
            "log(1 - gamma) undefined for gamma = {g}; the solution through a(0) = 1 does not blow up"
        )));
    }
    // -(1/g) ln(1-g) written with ln_1p for accuracy at small |g|.
    let value = -1.0 - (-g).ln_1p() / g;
    Ok(value / (4.0 * mu))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(lambda: f64, mu: f64) -> SolitonParams {
        SolitonParams::new(lambda, mu).unwrap()
    }

    #[test]
    fn fates_follow_the_phase_line() {
        // cigar: increasing, blows up forward, decays backward
        let cigar = p(0.0, -1.0);
        assert_eq!(fate(&cigar, 1.0, Direction::Forward), Fate::BlowUp);
        assert_eq!(fate(&cigar, 1.0, Direction::Backward), Fate::DecayToZero);
        // gamma = 1, mu = -1: stable separatrix
        let e = p(-2.0, -1.0);
        assert_eq!(fate(&e, 0.5, Direction::Forward), Fate::Converges { limit: 1.0 });
        assert_eq!(fate(&e, 0.5, Direction::Backward), Fate::DecayToZero);
        assert_eq!(fate(&e, 2.0, Direction::Forward), Fate::Converges { limit: 1.0 });
        assert_eq!(fate(&e, 2.0, Direction::Backward), Fate::BlowUp);
        assert_eq!(fate(&e, 1.0, Direction::Forward), Fate::Constant);
        // gamma = 1/2, mu = 1: unstable separatrix
        let s = p(4.0, 1.0);
        assert_eq!(fate(&s, 1.0, Direction::Forward), Fate::BlowUp);
        assert_eq!(fate(&s, 1.0, Direction::Backward), Fate::Converges { limit: 0.5 });
        assert_eq!(fate(&s, 0.25, Direction::Forward), Fate::DecayToZero);
    }

    #[test]
    fn closed_form_blow_up_times() {
        let t = blow_up_time_closed(1.0, Gamma::Finite(0.5)).unwrap();
        assert!((t - (-1.0 + 2.0 * 2f64.ln()) / 4.0).abs() < 1e-15);
        let t = blow_up_time_closed(-1.0, Gamma::Finite(-1.0)).unwrap();
        assert!((t - (-1.0 + 2f64.ln()) / -4.0).abs() < 1e-15);
        assert!(matches!(
            blow_up_time_closed(1.0, Gamma::Finite(1.0)),
            Err(Error::Domain(_))
        ));
        assert!(blow_up_time_closed(1.0, Gamma::Finite(0.0)).is_err());
        assert_eq!(blow_up_time_closed(-1.0, Gamma::Infinite).unwrap(), 0.25);
    }

    #[test]
    fn flight_time_agrees_with_closed_form() {
        let params = p(4.0, 1.0);
        let t = time_of_flight(&params, 1.0, f64::INFINITY).unwrap();
        let closed = blow_up_time_closed(1.0, Gamma::Finite(0.5)).unwrap();
        assert!((t - closed).abs() < 1e-14);
    }

    #[test]
    fn flight_time_for_steady_profile() {
        let params = p(0.0, 1.0);
        // a = 1/(1 + 4t): from 1 to 1/5 takes t = 1
        let t = time_of_flight(&params, 1.0, 0.2).unwrap();
        assert!((t - 1.0).abs() < 1e-14);
    }

    #[test]
    fn flight_time_near_blow_up_keeps_precision() {
        // lambda = -1, mu = -1: a ~ 1/sqrt(4 t) near the blow-up
        let params = p(-1.0, -1.0);
        let t = time_of_flight(&params, f64::INFINITY, 1e8).unwrap();
        assert!((t / 2.5e-17 - 1.0).abs() < 1e-6, "t = {t}");
    }

    #[test]
    fn flight_across_separatrix_is_rejected() {
        let params = p(4.0, 1.0);
        assert!(time_of_flight(&params, 0.25, 1.0).is_err());
    }
}
