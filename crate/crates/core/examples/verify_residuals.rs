// Soliton residuals of catalog metrics at h and h/2. Genuine solitons lose a
// factor of about four per halving.

use ricci_soliton::taxonomy::{catalog, Family};
use ricci_soliton::verify::soliton_residual;

fn main() -> ricci_soliton::Result<()> {
    println!("{:<13} {:>10} {:>10} {:>10} {:>10} {:>7}", "family", "tracefree", "laplace", "potential", "killing", "ratio");
    for family in Family::ALL {
        let e = catalog(family, family.info().sample_nu[1])?;
        let coarse = soliton_residual(&e.reference_metric(2e-3)?)?;
        let fine = soliton_residual(&e.reference_metric(1e-3)?)?;
        println!(
            "{:<13} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e} {:>7.2}",
            family.tag(),
            fine.max_tracefree,
            fine.max_laplace,
            fine.max_potential,
            fine.max_killing,
            coarse.max() / fine.max()
        );
    }
    Ok(())
}
