//! Non-integrability verdicts from resonances at the origin.

use sdefi::fixtures;
use sdefi::resonance::{nonintegrability_report, DEFAULT_K, DEFAULT_TOL};

fn main() -> sdefi::Result<()> {
    let systems = [
        ("Lotka-Volterra, b = (1, 2)", fixtures::lotka_volterra_2()),
        ("Lotka-Volterra, b = (1, 2, 3)", fixtures::lotka_volterra_3()),
        ("oscillator", fixtures::harmonic_oscillator()),
        ("dX = -X dt + 2X dB", fixtures::gbm((-1).into(), 2.into())),
    ];
    for (name, sys) in systems {
        let report = nonintegrability_report(&sys, DEFAULT_K, DEFAULT_TOL)?;
        println!("{name}");
        for l in report.lattices.iter().chain(&report.drift_lattices) {
            println!("  S({}) over {}: {} vectors, rank {} [{}]", l.label, l.lattice, l.vectors.len(), l.rank, l.completeness);
        }
        for v in &report.verdicts {
            println!("  {v}");
        }
    }
    Ok(())
}
