//! Exact strong and weak checks on the stochastic two-body problem.
//!
//! Angular momentum `r²w` is conserved in mean but not pathwise; the energy
//! is conserved in neither sense.

use sdefi::algebra::CRational;
use sdefi::fixtures::{two_body_energy, two_body_int, two_body_momentum};
use sdefi::ito::{check_strong, check_weak, lemma_identity_residual};

fn main() -> sdefi::Result<()> {
    let sys = two_body_int(1, 1, 1, 1);
    let one = CRational::one();
    for (name, phi) in [("M", two_body_momentum(&one)), ("E", two_body_energy(&one, &one))] {
        println!("{name} = {}", sys.poly_text(&phi));
        for verdict in [check_strong(&sys, &phi)?, check_weak(&sys, &phi)?] {
            println!("  {}: {}", verdict.mode, if verdict.holds { "holds" } else { "fails" });
            for r in verdict.nonvanishing() {
                println!("    {} = {}", r.name, sys.poly_text(&r.poly));
            }
        }
        // the Hessian identity behind the strong-implies-weak argument
        let lemma = lemma_identity_residual(&phi, &sys.diffusions[1])?;
        println!("  Hessian identity residual along g_2: {}", sys.poly_text(&lemma));
    }
    Ok(())
}
