//! The three symmetries of the profile ODE: value scaling, metric rescaling
//! and time translation.

use ricci_soliton::ode::{integrate_profile, make_params, Symmetry};
use ricci_soliton::taxonomy::classify;

fn main() -> ricci_soliton::Result<()> {
    let p = integrate_profile(make_params(-1.0, -1.0)?, 0.5, 3.0, (0.5, 1.5), 1e-10)?;
    println!("original: mu {} gamma {:?} -> {}", p.params().mu(), p.params().gamma(), classify(&p).tag());

    for action in [Symmetry::Scale(2.0), Symmetry::Rescale(0.5), Symmetry::Translate(0.25)] {
        let q = p.apply_symmetry(action)?;
        println!(
            "{action:?}: lambda {} mu {} gamma {:?}, residual {:.1e} -> {}",
            q.params().lambda(),
            q.params().mu(),
            q.params().gamma(),
            q.max_residual(100),
            classify(&q).tag()
        );
    }

    // Scale(alpha) multiplies values, Rescale(beta) stretches time by beta^2.
    let t = 1.0;
    let a = p.value(t)?;
    let scaled = p.apply_symmetry(Symmetry::Scale(2.0))?.value(t)?;
    let stretched = p.apply_symmetry(Symmetry::Rescale(0.5))?.value(0.25 * t)?;
    println!("a({t}) = {a}, scaled {scaled} (= 2a), rescaled at t/4 {stretched} (= a)");
    Ok(())
}
