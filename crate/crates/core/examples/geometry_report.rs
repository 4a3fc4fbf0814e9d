//! Completeness, curvature range and ends for one representative per family.

use ricci_soliton::geometry::geometry_report;
use ricci_soliton::taxonomy::{catalog, Family};

fn main() -> ricci_soliton::Result<()> {
    for family in Family::ALL {
        let nu = family.info().sample_nu[1];
        let e = catalog(family, nu)?;
        let r = geometry_report(&e.profile, 1e-12)?;
        println!(
            "{:<13} nu {:<8.4} complete {:<5} K in [{:.4}, {:.4}]",
            family.tag(),
            nu,
            r.complete,
            r.k_inf,
            r.k_sup
        );
        println!("    inner {:?}", r.inner_end);
        println!("    outer {:?}", r.outer_end);
    }
    Ok(())
}
