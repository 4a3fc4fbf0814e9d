//! Classify initial data `(lambda, mu, a(t0) = a0)` into the twelve families.

use ricci_soliton::ode::{integrate_profile, make_params};
use ricci_soliton::taxonomy::classify;

fn main() -> ricci_soliton::Result<()> {
    let cases = [
        (0.0, -1.0, 1.0, 0.0),
        (0.0, 1.0, 1.0, 0.0),
        (0.0, 1.0, 0.5, 1.0),
        (1.0, 1.0, 3.0, 0.0),
        (-1.0, -1.0, 3.0, 0.5),
        (-2.0, 1.0, 1.0, 0.0),
        (1.0, 0.5, 1.0, 0.0),
        (-1.0, -1.0, 1.0, 0.0),
        (1.0, 2.0, 1.0, 0.0),
    ];
    for (lambda, mu, a0, t0) in cases {
        let p = integrate_profile(make_params(lambda, mu)?, t0, a0, (t0, t0 + 1.0), 1e-10)?;
        let label = classify(&p);
        println!("lambda {lambda:>5} mu {mu:>5} a({t0}) = {a0:<4} -> {}", label.tag());
    }
    Ok(())
}
