//! Reference systems used by the examples, the CLI data files and the tests.
//!
//! Symbolic parameters are instantiated with exact rationals.

use crate::algebra::{parse_poly, CMatrix, CRational, ExpVec, LaurentPoly, VField};
use crate::ito::SdeSystem;

fn names(ns: &[&str]) -> Vec<String> {
    ns.iter().map(|s| s.to_string()).collect()
}

fn mono(n: usize, exps: &[i64], c: CRational) -> LaurentPoly {
    LaurentPoly::monomial(n, exps.to_vec(), c)
}

/// Geometric Brownian motion `dX = a X dt + σ X dB`, variable `x`.
pub fn gbm(a: CRational, sigma: CRational) -> SdeSystem {
    let x = LaurentPoly::var(1, 0);
    SdeSystem::new(VField::new(vec![x.scale(&a)]), vec![VField::new(vec![x.scale(&sigma)])], Some(names(&["x"])))
        .expect("well-formed")
}

/// Pure multiplicative noise `dX = c X dB`; `x` is a martingale.
pub fn multiplicative_noise(c: CRational) -> SdeSystem {
    let x = LaurentPoly::var(1, 0);
    SdeSystem::new(VField::new(vec![LaurentPoly::zero(1)]), vec![VField::new(vec![x.scale(&c)])], Some(names(&["x"])))
        .expect("well-formed")
}

/// `dx1 = x2 dt, dx2 = -x1 dt`.
pub fn harmonic_oscillator() -> SdeSystem {
    let n = 2;
    let f = VField::new(vec![LaurentPoly::var(n, 1), -&LaurentPoly::var(n, 0)]);
    SdeSystem::ode(f).expect("well-formed")
}

/// Linear ODE `dx = A x dt`.
pub fn linear_ode(a: &CMatrix) -> SdeSystem {
    let n = a.nrows();
    let comps = (0..n)
        .map(|i| {
            LaurentPoly::from_terms(n, (0..n).map(|j| (ExpVec::unit(n, j), a.get(i, j).clone())))
        })
        .collect();
    SdeSystem::ode(VField::new(comps)).expect("well-formed")
}

/// Stochastic two-body problem in polar variables `(r, φ, v, w)`:
///
/// ```text
/// dr = v dt
/// dφ = w dt
/// dv = (r w² − k/(m r²)) dt + σ_r r dB^r
/// dw = −2 v w / r dt + σ_φ / r dB^φ
/// ```
pub fn two_body(m: CRational, k: CRational, sigma_r: CRational, sigma_phi: CRational) -> SdeSystem {
    let n = 4;
    let one = CRational::one();
    let k_over_m = &k / &m;
    let f = VField::new(vec![
        mono(n, &[0, 0, 1, 0], one.clone()),
        mono(n, &[0, 0, 0, 1], one.clone()),
        &mono(n, &[1, 0, 0, 2], one.clone()) - &mono(n, &[-2, 0, 0, 0], k_over_m),
        mono(n, &[-1, 0, 1, 1], CRational::from_int(-2)),
    ]);
    let z = LaurentPoly::zero(n);
    let g1 = VField::new(vec![z.clone(), z.clone(), mono(n, &[1, 0, 0, 0], sigma_r), z.clone()]);
    let g2 = VField::new(vec![z.clone(), z.clone(), z, mono(n, &[-1, 0, 0, 0], sigma_phi)]);
    SdeSystem::new(f, vec![g1, g2], Some(names(&["r", "phi", "v", "w"]))).expect("well-formed")
}

pub fn two_body_int(m: i64, k: i64, sigma_r: i64, sigma_phi: i64) -> SdeSystem {
    two_body(m.into(), k.into(), sigma_r.into(), sigma_phi.into())
}

/// Angular momentum `m r² w`.
pub fn two_body_momentum(m: &CRational) -> LaurentPoly {
    mono(4, &[2, 0, 0, 1], m.clone())
}

/// Energy `½ m (v² + r² w²) − k/r`.
pub fn two_body_energy(m: &CRational, k: &CRational) -> LaurentPoly {
    let half_m = m * &CRational::ratio(1, 2);
    &(&mono(4, &[0, 0, 2, 0], half_m.clone()) + &mono(4, &[2, 0, 0, 2], half_m)) - &mono(4, &[-1, 0, 0, 0], k.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroSumDrift {
    /// Drift exactly as printed: third component `−a x1 − b x2 + x2 x3`.
    Verbatim,
    /// Third component `−a x1 − b x2 − x1 x2`, for which `x1 + x2 + x3`
    /// is a strong first integral.
    Corrected,
}

/// Three-dimensional system with a single noise whose components sum to zero.
pub fn zero_sum_system(a: CRational, b: CRational, variant: ZeroSumDrift) -> SdeSystem {
    let nm = names(&["x1", "x2", "x3"]);
    let p = |s: &str| parse_poly(s, &nm).expect("fixture text");
    let (a, b) = (LaurentPoly::constant(3, a), LaurentPoly::constant(3, b));
    let x1 = LaurentPoly::var(3, 0);
    let x2 = LaurentPoly::var(3, 1);
    let third_tail = match variant {
        ZeroSumDrift::Verbatim => p("x2*x3"),
        ZeroSumDrift::Corrected => p("-x1*x2"),
    };
    let f = VField::new(vec![
        &(&a * &x1) + &p("x2*x3"),
        &(&b * &x2) + &p("x1*x2 - x2*x3"),
        &(&-&(&a * &x1) - &(&b * &x2)) + &third_tail,
    ]);
    let g = VField::new(vec![
        p("x1 - 2*x2 + x1*x2 - x1*x3"),
        p("2*x2 - x3 + x2*x3 - x1*x2"),
        p("x3 - x1 + x1*x3 - x2*x3"),
    ]);
    SdeSystem::new(f, vec![g], Some(nm)).expect("well-formed")
}

/// Lotka–Volterra with one multiplicative quadratic noise:
/// `dx_i = x_i (b_i + Σ_j a_ij x_j) dt + x_i Σ_j σ_ij x_j dB`.
pub fn lotka_volterra(b: &[CRational], a: &CMatrix, sigma: &CMatrix) -> SdeSystem {
    let n = b.len();
    assert!(a.nrows() == n && a.ncols() == n && sigma.nrows() == n && sigma.ncols() == n);
    let mut drift = Vec::with_capacity(n);
    let mut noise = Vec::with_capacity(n);
    for i in 0..n {
        let xi = LaurentPoly::var(n, i);
        let lin = (0..n).fold(LaurentPoly::constant(n, b[i].clone()), |acc, j| {
            &acc + &LaurentPoly::var(n, j).scale(a.get(i, j))
        });
        let quad = (0..n).fold(LaurentPoly::zero(n), |acc, j| &acc + &LaurentPoly::var(n, j).scale(sigma.get(i, j)));
        drift.push(&xi * &lin);
        noise.push(&xi * &quad);
    }
    SdeSystem::new(VField::new(drift), vec![VField::new(noise)], None).expect("well-formed")
}

/// Two-species instance with `b = (1, 2)` and fixed generic coefficients.
pub fn lotka_volterra_2() -> SdeSystem {
    let r = CRational::ratio;
    lotka_volterra(
        &[CRational::from_int(1), CRational::from_int(2)],
        &CMatrix::from_rows(vec![vec![r(-1, 1), r(1, 3)], vec![r(-2, 5), r(-1, 1)]]),
        &CMatrix::from_rows(vec![vec![r(1, 2), r(-1, 3)], vec![r(2, 7), r(3, 4)]]),
    )
}

/// Three-species instance with `b = (1, 2, 3)`.
pub fn lotka_volterra_3() -> SdeSystem {
    let r = CRational::ratio;
    lotka_volterra(
        &[CRational::from_int(1), CRational::from_int(2), CRational::from_int(3)],
        &CMatrix::from_rows(vec![
            vec![r(-1, 1), r(1, 2), r(0, 1)],
            vec![r(1, 3), r(-1, 1), r(1, 5)],
            vec![r(0, 1), r(-2, 3), r(-1, 1)],
        ]),
        &CMatrix::from_rows(vec![
            vec![r(1, 2), r(0, 1), r(1, 7)],
            vec![r(-1, 3), r(1, 4), r(0, 1)],
            vec![r(1, 5), r(2, 9), r(-1, 6)],
        ]),
    )
}
