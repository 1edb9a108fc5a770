//! Linear noise that removes every polynomial weak integral of the
//! harmonic oscillator up to degree 4.

use sdefi::fixtures::harmonic_oscillator;
use sdefi::ito::Mode;
use sdefi::perturb::{build_perturbation, verify_perturbation, PerturbationVerdict};
use sdefi::search::find_first_integrals;

fn main() -> sdefi::Result<()> {
    let sys = harmonic_oscillator();
    let before = find_first_integrals(&sys, Mode::Strong, 1, 2)?;
    for b in &before.basis {
        println!("unperturbed integral: {}", sys.poly_text(b));
    }
    let plan = build_perturbation(&sys, 0.37, 8)?;
    println!("exponents {:?}, noise eigenvalues {:?}", plan.exponents, plan.mu);
    println!("min |E(l)| = {:.3e} at l = {:?}", plan.residual_min, plan.residual_argmin);
    println!("P = {}", plan.p_exact);
    let verdict = verify_perturbation(&sys, &plan, 4)?;
    println!("weak integrals of degree <= 4 after perturbation: {}", verdict.counterexamples.len());
    println!("{}", PerturbationVerdict::SCOPE_NOTE);
    Ok(())
}
