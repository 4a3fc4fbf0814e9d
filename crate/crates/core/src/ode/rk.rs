//! Dormand-Prince 5(4) stepper specialised to the scalar autonomous profile
//! ODE. Accepted steps are stored as nodes carrying `a`, `a'` and `a''`,
//! which gives a C^2 quintic Hermite dense output.

use crate::numeric::{hermite5, Jet};
use crate::ode::params::SolitonParams;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 2_000_000;

/// Relative and absolute tolerances of the stepper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    /// Relative tolerance `tol`. Solutions are followed down to `a ~ 1e-10`,
    /// so the absolute floor sits well below that.
    pub fn relative(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol * 1e-14,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-24,
        }
    }
}

/// One accepted point of a numerical solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub t: f64,
    pub a: f64,
    pub da: f64,
    pub d2a: f64,
}

impl Node {
    pub fn on_solution(params: &SolitonParams, t: f64, a: f64) -> Self {
        Self {
            t,
            a,
            da: params.rhs(a),
            d2a: params.second_derivative(a),
        }
    }

    pub fn jet(&self) -> Jet {
        Jet {
            value: self.a,
            d1: self.da,
            d2: self.d2a,
        }
    }
}

/// Dense interpolation between two consecutive nodes.
pub fn interpolate(left: &Node, right: &Node, t: f64) -> (f64, f64) {
    hermite5(left.t, right.t, left.jet(), right.jet(), t)
}

/// `a` is growing along the direction of integration on a time scale
/// `a / a'` far below the elapsed time, so the step collapse is the blow-up
/// outrunning floating-point resolution rather than a stiffness failure.
fn near_blow_up(params: &SolitonParams, a: f64, dir: f64, t: f64, t0: f64) -> bool {
    let da = params.rhs(a);
    da * dir > 0.0 && a / da.abs() <= 1e-6 * (t.abs() + (t - t0).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// Reached the requested end time.
    End,
    /// `a` crossed the upper event threshold, or kept climbing until `t`
    /// could no longer be resolved.
    Above,
    /// `a` crossed the lower event threshold.
    Below,
    /// Step size collapsed before the tolerance could be met.
    Failure { last_t: f64 },
}

#[derive(Debug, Clone)]
pub struct Run {
    /// Nodes in integration order (decreasing t when integrating backward).
    pub nodes: Vec<Node>,
    pub stop: Stop,
    pub rejected: usize,
}

/// Integrate from `(t0, a0)` towards `t_end`, halting when `a` leaves
/// `(a_lo, a_hi)`.
pub fn integrate(
    params: &SolitonParams,
    t0: f64,
    a0: f64,
    t_end: f64,
    tol: Tolerance,
    a_lo: f64,
    a_hi: f64,
) -> Run {
    let mut nodes = vec![Node::on_solution(params, t0, a0)];
    let mut rejected = 0;
    if t_end == t0 {
        return Run {
            nodes,
            stop: Stop::End,
            rejected,
        };
    }
    let dir = (t_end - t0).signum();
    let span = (t_end - t0).abs();
    let f = |a: f64| params.rhs(a);

    let mut t = t0;
    let mut a = a0;
    let mut k1 = f(a);
    let mut h = initial_step(params, a, tol).min(span) * dir;

    for _ in 0..MAX_STEPS {
        let remaining = t_end - t;
        if remaining * dir <= 0.0 {
            return Run {
                nodes,
                stop: Stop::End,
                rejected,
            };
        }
        let last = remaining.abs() <= h.abs() * (1.0 + 1e-12);
        if last {
            h = remaining;
        } else {
            // Take the step that t can actually represent, so that the node
            // times agree with the increments used to produce them.
            h = (t + h) - t;
            if h == 0.0 {
                let climbing = params.rhs(a) * dir > 0.0;
                return Run {
                    nodes,
                    stop: if climbing { Stop::Above } else { Stop::Failure { last_t: t } },
                    rejected,
                };
            }
        }

        let k2 = f(a + h * A21 * k1);
        let k3 = f(a + h * (A31 * k1 + A32 * k2));
        let k4 = f(a + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(a + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = f(a + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let a_new = a + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = f(a_new);
        let err_abs = (h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
        // An error e in a shows up as a residual |rhs'(a)| e in a', so near a
        // stiff fixed point the value tolerance alone is not enough.
        let stiff = params.rhs_da(a_new).abs().max(1e-300);
        let scale = (tol.atol + tol.rtol * a.abs().max(a_new.abs()))
            .min((0.5 * tol.rtol * (1.0 + k7.abs()) / stiff).max(4.0 * f64::EPSILON * a_new.abs()));
        let err = err_abs / scale;

        if !a_new.is_finite() || !err.is_finite() || a_new <= 0.0 || err > 1.0 {
            rejected += 1;
            let fac = if err.is_finite() && err > 0.0 {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= fac;
            if h.abs() <= 1e-15 * t.abs().max(1e-300) || h.abs() < f64::MIN_POSITIVE * 1e10 {
                let climbing = near_blow_up(params, a, dir, t, t0);
                return Run {
                    nodes,
                    stop: if climbing { Stop::Above } else { Stop::Failure { last_t: t } },
                    rejected,
                };
            }
            continue;
        }

        let t_new = if last { t_end } else { t + h };
        if t_new == t {
            // The step no longer moves t. Near a blow-up with lambda != 0 this
            // happens before a reaches a_hi, since T - t ~ 1/(4 lambda a^2)
            // drops below the spacing of floating-point numbers around T.
            let climbing = a_new > a && params.rhs(a) * dir > 0.0;
            return Run {
                nodes,
                stop: if climbing { Stop::Above } else { Stop::Failure { last_t: t } },
                rejected,
            };
        }
        let prev = *nodes.last().unwrap();
        let next = Node {
            t: t_new,
            a: a_new,
            da: k7,
            d2a: params.rhs_da(a_new) * k7,
        };

        // The error estimate only speaks for the step end. Check that the
        // interpolant also satisfies the ODE inside the step. Its derivative
        // error vanishes at the midpoint, hence the off-centre probes.
        let ratio = [0.2, 0.5, 0.8]
            .iter()
            .map(|s| {
                let (am, dam) = interpolate(&prev, &next, t + s * (t_new - t));
                // Rounding of the node values alone perturbs the slope by
                // about ulp(a) / dt, so that much defect is not the stepper's.
                let allowed = tol.rtol * (1.0 + dam.abs())
                    + 8.0 * f64::EPSILON * (dam.abs() + params.rhs_da(am).abs() * am.abs())
                    + 4.0 * f64::EPSILON * (prev.a.abs() + next.a.abs()) / (t_new - t).abs();
                (dam - params.rhs(am)).abs() / allowed
            })
            .fold(0.0, |m: f64, r| if r.is_nan() { f64::INFINITY } else { m.max(r) });
        if ratio > 1.0 && a_new < a_hi && a_new > a_lo {
            rejected += 1;
            let fac = if ratio.is_finite() {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 0.9)
            } else {
                0.2
            };
            h *= fac;
            if h.abs() <= 1e-15 * t.abs().max(1e-300) {
                let climbing = near_blow_up(params, a, dir, t, t0);
                return Run {
                    nodes,
                    stop: if climbing { Stop::Above } else { Stop::Failure { last_t: t } },
                    rejected,
                };
            }
            continue;
        }

        if a_new >= a_hi || a_new <= a_lo {
            let target = if a_new >= a_hi { a_hi } else { a_lo };
            let t_star = locate(&prev, &next, target);
            let (a_star, _) = interpolate(&prev, &next, t_star);
            nodes.push(Node::on_solution(params, t_star, a_star));
            return Run {
                nodes,
                stop: if a_new >= a_hi { Stop::Above } else { Stop::Below },
                rejected,
            };
        }

        nodes.push(next);
        t = t_new;
        a = a_new;
        k1 = k7;
        if last {
            return Run {
                nodes,
                stop: Stop::End,
                rejected,
            };
        }
        let fac = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= fac;
    }
    Run {
        nodes,
        stop: Stop::Failure { last_t: t },
        rejected,
    }
}

fn initial_step(params: &SolitonParams, a: f64, tol: Tolerance) -> f64 {
    let rate = (params.rhs(a) / a).abs().max(1e-300);
    (tol.rtol.powf(0.2) * 0.1 / rate).min(1.0)
}

/// Time at which the dense output between two nodes crosses `target`.
fn locate(left: &Node, right: &Node, target: f64) -> f64 {
    let (mut lo, mut hi) = (left.t, right.t);
    let below_at_lo = left.a < target;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let (v, _) = interpolate(left, right, mid);
        if (v < target) == below_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
