//! Simulation cross-checks of weak and strong conservation.

use sdefi::algebra::{parse_poly, CRational};
use sdefi::fixtures;
use sdefi::ito::Mode;
use sdefi::mc::{conservation_test, simulate_paths, Allowances, SimConfig};

fn main() -> sdefi::Result<()> {
    let gbm = fixtures::gbm(CRational::one(), CRational::one());
    let ens = simulate_paths(&gbm, &SimConfig::real(&[1.0], 1e-3, 1.0, 4000, 11))?;
    let inv = parse_poly("x^-1", &gbm.var_names)?;
    for mode in [Mode::Weak, Mode::Strong] {
        let r = conservation_test(&ens, &inv, mode, Allowances::default())?;
        println!("GBM x^-1 {mode}: pass {:?}, delta {:.3e}, stderr {:.3e}, max dev {:.3e}", r.pass, r.delta, r.stderr, r.max_dev);
    }

    let tb = fixtures::two_body_int(1, 1, 1, 1);
    let ens = simulate_paths(&tb, &SimConfig::real(&[1.0, 0.0, 0.0, 1.0], 1e-3, 1.0, 2000, 5))?;
    for text in ["r^2*w", "1/2*v^2 + 1/2*r^2*w^2 - r^-1"] {
        let phi = parse_poly(text, &tb.var_names)?;
        let r = conservation_test(&ens, &phi, Mode::Weak, Allowances::default())?;
        println!("two-body {text}: pass {:?}, mean {:.4} vs {:.4}", r.pass, r.mean[0], r.phi_x0[0]);
    }
    Ok(())
}
