//! First integrals of polynomial and Laurent SDEs.
//!
//! Start with [`ito`] for exact strong/weak checks, [`search`] for bases of
//! integrals in a degree window, [`resonance`] for non-integrability verdicts
//! at an equilibrium, [`perturb`] for noise that destroys weak integrals and
//! [`mc`] for simulation cross-checks. The `examples/` directory has one
//! runnable program per capability.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod ito;
pub mod mc;
pub mod perturb;
pub mod resonance;
pub mod search;
pub mod spectral;

pub use error::{Error, Result};
