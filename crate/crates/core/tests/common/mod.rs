//! Random polynomial generators shared by the integration tests.

#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use sdefi::algebra::{CRational, ExpVec, LaurentPoly, VField};

pub fn coeff<R: Rng>(rng: &mut R) -> CRational {
    let re = BigRational::new(rng.random_range(-9..=9).into(), rng.random_range(1..=5).into());
    let im = if rng.random_bool(0.25) { BigRational::from_integer(rng.random_range(-4..=4).into()) } else { BigRational::zero() };
    CRational::new(re, im)
}

/// Up to `max_terms` terms with every exponent in `[lo, hi]`.
pub fn poly<R: Rng>(rng: &mut R, dim: usize, lo: i64, hi: i64, max_terms: usize) -> LaurentPoly {
    let terms = rng.random_range(1..=max_terms);
    let mut p = LaurentPoly::zero(dim);
    for _ in 0..terms {
        let e: Vec<i64> = (0..dim).map(|_| rng.random_range(lo..=hi)).collect();
        p.add_term(ExpVec(e), &coeff(rng));
    }
    p
}

pub fn field<R: Rng>(rng: &mut R, dim: usize, lo: i64, hi: i64, max_terms: usize) -> VField {
    VField::new((0..dim).map(|_| poly(rng, dim, lo, hi, max_terms)).collect())
}
