//! Roots of exact polynomials: squarefree splitting, exact extraction of
//! Gaussian-rational roots, and Durand–Kerner for the rest.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::crational::rationalize;
use crate::algebra::{CRational, UniPoly};
use crate::error::{Error, Result};

/// Convergence tolerance on the Durand–Kerner corrections (relative).
pub const ROOT_TOL: f64 = 1e-12;
const MAX_ITER: usize = 2000;
const MAX_ATTEMPTS: usize = 8;
const STALL_TOL: f64 = 1e-9;
/// Largest denominator tried when guessing an exact root.
const MAX_GUESS_DEN: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Root {
    #[serde(serialize_with = "ser_c64")]
    pub value: Complex64,
    /// Present when the root was verified to be an exact element of ℚ(i).
    #[serde(serialize_with = "ser_opt_exact")]
    pub exact: Option<CRational>,
}

pub(crate) fn ser_c64<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn ser_opt_exact<S: serde::Serializer>(z: &Option<CRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    z.as_ref().map(ToString::to_string).serialize(s)
}

impl Root {
    fn exact(r: CRational) -> Self {
        Root { value: r.to_c64(), exact: Some(r) }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact.as_ref().is_some_and(CRational::is_zero)
    }
}

/// All roots of `p` with multiplicity, sorted by real part then imaginary part.
pub fn poly_roots(p: &UniPoly) -> Result<Vec<Root>> {
    let mut out = Vec::with_capacity(p.degree());
    for (factor, mult) in p.squarefree_decomposition() {
        let roots = squarefree_roots(&factor)?;
        for r in roots {
            for _ in 0..mult {
                out.push(r.clone());
            }
        }
    }
    sort_roots(&mut out);
    Ok(out)
}

pub fn sort_roots(roots: &mut [Root]) {
    roots.sort_by(|a, b| {
        let key = |z: &Complex64| ((z.re * 1e9).round(), (z.im * 1e9).round());
        let (ka, kb) = (key(&a.value), key(&b.value));
        ka.0.total_cmp(&kb.0).then(kb.1.total_cmp(&ka.1))
    });
}

fn squarefree_roots(f: &UniPoly) -> Result<Vec<Root>> {
    let mut f = f.monic();
    let mut roots = Vec::new();
    if f.coeff(0).is_zero() && f.degree() > 0 {
        roots.push(Root::exact(CRational::zero()));
        f = f.div_rem(&UniPoly::from_ints(&[0, 1])).0;
    }
    match f.degree() {
        0 => return Ok(roots),
        1 => {
            roots.push(Root::exact(-f.coeff(0)));
            return Ok(roots);
        }
        _ => {}
    }
    let numeric = durand_kerner(&f)?;
    let mut residual = f.clone();
    let mut inexact = Vec::new();
    for z in numeric {
        match guess_exact(&residual, z) {
            Some(r) => {
                residual = residual.div_rem(&UniPoly::linear_root(&r)).0;
                roots.push(Root::exact(r));
            }
            None => inexact.push(z),
        }
    }
    if residual.degree() == 1 {
        // the remaining root is exact once all others were divided out
        roots.push(Root::exact(-residual.monic().coeff(0)));
    } else {
        roots.extend(inexact.into_iter().map(|z| Root { value: polish(f.coeffs(), z), exact: None }));
    }
    Ok(roots)
}

fn guess_exact(p: &UniPoly, z: Complex64) -> Option<CRational> {
    let scale = 1.0 + z.norm();
    let snap = |x: f64| if x.abs() < 1e-9 * scale { 0.0 } else { x };
    let re = rationalize(snap(z.re), MAX_GUESS_DEN)?;
    let im = rationalize(snap(z.im), MAX_GUESS_DEN)?;
    let r = CRational::new(re, im);
    if (r.to_c64() - z).norm() > 1e-6 * scale {
        return None;
    }
    p.eval(&r).is_zero().then_some(r)
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn polish(coeffs: &[CRational], mut z: Complex64) -> Complex64 {
    let c: Vec<Complex64> = coeffs.iter().map(CRational::to_c64).collect();
    let d: Vec<Complex64> = c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
    for _ in 0..4 {
        let dp = horner(&d, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = horner(&c, z) / dp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Simultaneous (Weierstrass / Durand–Kerner) iteration on a monic
/// squarefree polynomial. Restarts from randomly perturbed starting points
/// when an attempt stalls.
pub fn durand_kerner(p: &UniPoly) -> Result<Vec<Complex64>> {
    let p = p.monic();
    let n = p.degree();
    let c: Vec<Complex64> = p.coeffs().iter().map(CRational::to_c64).collect();
    let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d0e5);
    let seed = Complex64::new(0.4, 0.9);
    for attempt in 0..MAX_ATTEMPTS {
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let base = seed.powu(k as u32 + 1) * (radius / seed.norm().powi(k as i32 + 1)).min(radius);
                if attempt == 0 {
                    base
                } else {
                    let jitter = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
                    base * (1.0 + jitter) + jitter * radius * 0.1
                }
            })
            .collect();
        let mut converged = false;
        let mut last = f64::INFINITY;
        for _ in 0..MAX_ITER {
            let mut max_rel = 0.0f64;
            for i in 0..n {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        denom *= z[i] - z[j];
                    }
                }
                if denom.norm() == 0.0 {
                    denom = Complex64::new(f64::EPSILON, 0.0);
                }
                let delta = horner(&c, z[i]) / denom;
                if !delta.re.is_finite() || !delta.im.is_finite() {
                    max_rel = f64::INFINITY;
                    break;
                }
                z[i] -= delta;
                max_rel = max_rel.max(delta.norm() / (1.0 + z[i].norm()));
            }
            last = max_rel;
            if !max_rel.is_finite() {
                break;
            }
            if max_rel <= ROOT_TOL {
                converged = true;
                break;
            }
        }
        // rounding can keep clustered roots jittering just above ROOT_TOL
        converged |= last <= STALL_TOL;
        if converged {
            return Ok(z);
        }
    }
    Err(Error::RootNonConvergence { degree: n, attempts: MAX_ATTEMPTS })
}
