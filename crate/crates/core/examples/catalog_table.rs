// The family table with the sampled parameter values.

use ricci_soliton::taxonomy::{catalog, family_table};

fn main() -> ricci_soliton::Result<()> {
    for info in family_table() {
        println!(
            "{:<13} {:<10} {:<3} complete {:<5} {:<8} {:<18} {:<18} nu in {}",
            info.family.tag(),
            info.regime,
            info.topology,
            info.complete,
            info.curvature_sign,
            info.inner_end,
            info.outer_end,
            info.nu_range.describe()
        );
        for nu in info.sample_nu {
            let e = catalog(info.family, nu)?;
            println!("    nu {nu:<8.4} lambda {:+.6} mu {:+.6}", e.params.lambda(), e.params.mu());
        }
    }
    Ok(())
}
