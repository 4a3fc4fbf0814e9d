//! Positive solutions of the soliton profile ODE
//! `a'(t) = 4 mu a^2 (a/gamma - 1)`: parameters, adaptive integration,
//! closed forms, symmetries and phase-line analysis.

pub mod params;
pub mod phase;
pub mod profile;
pub mod rk;

pub use params::{make_params, Gamma, Regime, SolitonParams};
pub use phase::{blow_up_time_closed, fate, time_of_flight, Direction, Fate};
pub use profile::{
    apply_symmetry, closed_form_profile, constant_profile, integrate_profile, EndTag, Endpoint,
    Monotonicity, Profile, ProfileSummary, Representation, Symmetry, A_BLOWUP, A_ZERO,
};
pub use rk::{Node, Tolerance};
