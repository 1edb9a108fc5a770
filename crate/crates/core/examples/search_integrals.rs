//! Bases of first integrals in a degree window.

use sdefi::algebra::CRational;
use sdefi::fixtures;
use sdefi::ito::Mode;
use sdefi::search::find_first_integrals;

fn main() -> sdefi::Result<()> {
    let cases = [
        ("GBM dX = X dt + X dB", fixtures::gbm(CRational::one(), CRational::one()), Mode::Weak, -1, 1),
        ("GBM dX = X dt + X dB", fixtures::gbm(CRational::one(), CRational::one()), Mode::Strong, -1, 1),
        ("oscillator", fixtures::harmonic_oscillator(), Mode::Strong, 1, 4),
        (
            "three-species system with zero-sum noise",
            fixtures::zero_sum_system(2.into(), 3.into(), fixtures::ZeroSumDrift::Corrected),
            Mode::Strong,
            1,
            2,
        ),
    ];
    for (name, sys, mode, dmin, dmax) in cases {
        let basis = find_first_integrals(&sys, mode, dmin, dmax)?;
        let s = basis.summary(&sys.var_names)?;
        println!("{name}: {mode} integrals on [{dmin}, {dmax}] ({} monomials, rank {})", s.monomials, s.operator_rank);
        if s.basis.is_empty() {
            println!("  none");
        }
        for b in &s.basis {
            println!("  {b}");
        }
    }
    Ok(())
}
