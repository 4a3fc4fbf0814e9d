//! Integrate the profile ODE from an initial value and inspect the result.
//!
//!     cargo run --example integrate_profile -- 1.0 1.0 3.0

use ricci_soliton::ode::{integrate_profile, make_params, ProfileSummary};

fn main() -> ricci_soliton::Result<()> {
    let args: Vec<f64> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("numeric argument"))
        .collect();
    let (lambda, mu, a0) = match args[..] {
        [l, m, a] => (l, m, a),
        _ => (1.0, 1.0, 3.0),
    };

    let params = make_params(lambda, mu)?;
    let profile = integrate_profile(params, 0.0, a0, (-1.0, 1.0), 1e-10)?;
    let summary = ProfileSummary::from(&profile);

    println!("lambda = {lambda}, mu = {mu}, gamma = {:?}", params.gamma());
    println!("lower end {:?}", summary.lower);
    println!("upper end {:?}", summary.upper);
    println!("{} nodes, {:?}", summary.nodes, summary.monotonicity);
    println!("max ODE residual over 100 samples: {:.2e}", profile.max_residual(100));

    print!("{}", profile.to_csv(11));
    Ok(())
}
