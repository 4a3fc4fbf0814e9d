// Blow-up time of a(0) = 1 from the integrator against the closed form
// 4 mu T = -1 - ln(1 - gamma)/gamma.

use ricci_soliton::ode::{blow_up_time_closed, integrate_profile, make_params, EndTag};

fn main() -> ricci_soliton::Result<()> {
    println!("{:>6} {:>6} {:>8} {:>20} {:>20} {:>10}", "lambda", "mu", "gamma", "integrated", "closed form", "diff");
    for (lambda, mu) in [(4.0, 1.0), (8.0, 1.0), (2.5, 1.0), (-4.0, -1.0), (3.0, 0.5)] {
        let params = make_params(lambda, mu)?;
        let exact = blow_up_time_closed(mu, params.gamma())?;
        let window = if exact > 0.0 { (0.0, 2.0 * exact) } else { (2.0 * exact, 0.0) };
        let p = integrate_profile(params, 0.0, 1.0, window, 1e-12)?;
        let end = if exact > 0.0 { p.upper() } else { p.lower() };
        assert_eq!(end.tag, EndTag::BlowUp);
        println!(
            "{lambda:>6} {mu:>6} {:>8.4} {:>20.15} {:>20.15} {:>10.2e}",
            params.gamma().finite().unwrap_or(f64::INFINITY),
            end.t,
            exact,
            (end.t - exact).abs()
        );
    }
    Ok(())
}
