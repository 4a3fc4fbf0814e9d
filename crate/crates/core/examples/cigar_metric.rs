// The cigar b(r) = nu tanh(r/nu) rebuilt from its profile a = 1/(1 + 4 mu t).

use ricci_soliton::geometry::build_warped_metric;
use ricci_soliton::taxonomy::{catalog, Family};

fn main() -> ricci_soliton::Result<()> {
    let nu = 1.5;
    let entry = catalog(Family::G1Cigar, nu)?;
    let profile = entry.profile.restrict_to_origin()?;
    let m = build_warped_metric(&profile, (0.0, 0.0), (0.0, 6.0), 13)?;

    println!("{:>6} {:>20} {:>20} {:>10}", "r", "b", "nu tanh(r/nu)", "K");
    for i in 0..m.len() {
        let exact = nu * (m.r[i] / nu).tanh();
        println!("{:>6.2} {:>20.15} {:>20.15} {:>10.6}", m.r[i], m.b[i], exact, m.k[i]);
    }
    println!("curvature identity residual {:.2e}", m.curvature_identity_residual());
    println!("coupling residual {:.2e}", m.coupling_residual(&profile)?);
    Ok(())
}
