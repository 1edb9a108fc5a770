//! Linear multiplicative noise that removes every weak first integral.
//!
//! For `dx = f(x) dt` with `f(0) = 0` and `Df(0) = QΛQ⁻¹` (simple nonzero
//! spectrum), take `P = Q·diag(u^{a_1}, …, u^{a_n})·Q⁻¹` with `a_1 = 1`,
//! `a_k = 2(a_1 + … + a_{k−1})`. The perturbed system is
//! `dx = f dt + P x dB`. The argument needs the expression
//!
//! ```text
//! E(l) = 2 Σ λ_i l_i + Σ l_i (l_i − 1) μ_i² + Σ_{i≠j} l_i l_j μ_i μ_j,   μ_i = u^{a_i}
//! ```
//!
//! to be nonzero for every `l ∈ (Z⁺)ⁿ \ {0}`; here it is checked for
//! `|l|₁ ≤ L` and the perturbed system is then searched for polynomial
//! weak integrals of bounded degree.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{CMatrix, CRational, ExpVec, LaurentPoly, VField};
use crate::error::{Error, Result};
use crate::ito::{Mode, SdeSystem};
use crate::search::{self, IntegralBasis};
use crate::spectral::{self, numeric};

const RETRIES: usize = 20;
const RETRY_SEED: u64 = 0x7e57_ab1e;
const RESIDUAL_TOL: f64 = 1e-12;
/// Entries of `P` below this fraction of `max|P_ij|` are set to zero before
/// the exact conversion.
const SNAP_TOL: f64 = 1e-13;

/// `a_1 = 1`, `a_k = 2(a_1 + … + a_{k−1})`.
pub fn exponents(n: usize) -> Vec<u64> {
    let mut a: Vec<u64> = Vec::with_capacity(n);
    let mut sum = 0u64;
    for k in 0..n {
        let next = if k == 0 { 1 } else { 2 * sum };
        a.push(next);
        sum += next;
    }
    a
}

fn ser_cmat<S: serde::Serializer>(m: &DMatrix<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    rows.serialize(s)
}

fn ser_cvec<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct RejectedBase {
    pub u: f64,
    /// First `l` at which `E(l)` vanished to tolerance.
    pub offending: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbationPlan {
    #[serde(serialize_with = "ser_cmat")]
    pub q: DMatrix<Complex64>,
    /// Eigenvalues of `Df(0)` in the column order of `Q`.
    #[serde(serialize_with = "ser_cvec")]
    pub lambda: Vec<Complex64>,
    pub exponents: Vec<u64>,
    pub u: f64,
    /// `μ_i = u^{a_i}`.
    pub mu: Vec<f64>,
    #[serde(serialize_with = "ser_cmat")]
    pub p: DMatrix<Complex64>,
    /// Exact binary value of `p` (after dropping rounding noise); the
    /// verification runs on this matrix.
    pub p_exact: CMatrix,
    pub det_df0: CRational,
    pub verified_to: usize,
    pub residual_min: f64,
    pub residual_argmin: Vec<i64>,
    pub rejected: Vec<RejectedBase>,
}

impl PerturbationPlan {
    /// Diffusion field `x ↦ P x`.
    pub fn diffusion(&self) -> VField {
        let n = self.p_exact.nrows();
        VField::new(
            (0..n)
                .map(|i| LaurentPoly::from_terms(n, (0..n).map(|j| (ExpVec::unit(n, j), self.p_exact.get(i, j).clone()))))
                .collect(),
        )
    }

    /// `dx = f dt + P x dB`.
    pub fn perturbed_system(&self, sys: &SdeSystem) -> Result<SdeSystem> {
        SdeSystem::new(sys.drift.clone(), vec![self.diffusion()], Some(sys.var_names.clone()))
    }
}

/// `E(l)` for one `l`.
pub fn expression(lambda: &[Complex64], mu: &[f64], l: &[i64]) -> Complex64 {
    let lin: Complex64 = lambda.iter().zip(l).map(|(a, &k)| a * k as f64).sum();
    let s: f64 = mu.iter().zip(l).map(|(m, &k)| m * k as f64).sum();
    let diag: f64 = mu.iter().zip(l).map(|(m, &k)| m * m * k as f64).sum();
    2.0 * lin + s * s - diag
}

struct Scan {
    min: f64,
    argmin: Vec<i64>,
    offending: Option<Vec<i64>>,
}

fn scan(lambda: &[Complex64], mu: &[f64], l_bound: usize) -> Scan {
    let n = lambda.len();
    let lmax = lambda.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mmax = mu.iter().copied().fold(0.0, f64::max);
    let shells: Vec<(f64, Vec<i64>, Option<Vec<i64>>)> = (1..=l_bound as i64)
        .into_par_iter()
        .map(|s| {
            let scale = 2.0 * s as f64 * lmax + 2.0 * (s as f64 * mmax).powi(2);
            let mut best = (f64::INFINITY, Vec::new(), None);
            for l in shell(n, s) {
                let e = expression(lambda, mu, &l).norm();
                if e <= RESIDUAL_TOL * scale && best.2.is_none() {
                    best.2 = Some(l.clone());
                }
                if e < best.0 {
                    best = (e, l, best.2);
                }
            }
            best
        })
        .collect();
    let offending = shells.iter().find_map(|s| s.2.clone());
    let (min, argmin) = shells.into_iter().map(|s| (s.0, s.1)).min_by(|a, b| a.0.total_cmp(&b.0)).unwrap_or((f64::INFINITY, Vec::new()));
    Scan { min, argmin, offending }
}

fn shell(n: usize, s: i64) -> Vec<Vec<i64>> {
    fn rec(prefix: &mut Vec<i64>, n: usize, left: i64, out: &mut Vec<Vec<i64>>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=left {
            prefix.push(v);
            rec(prefix, n, left - v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(&mut Vec::with_capacity(n), n, s, &mut out);
    }
    out
}

fn snap(p: &DMatrix<Complex64>) -> Result<CMatrix> {
    let scale = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let clean = |x: f64| if x.abs() <= SNAP_TOL * scale { 0.0 } else { x };
    let rows = (0..p.nrows())
        .map(|i| {
            (0..p.ncols())
                .map(|j| {
                    let z = p[(i, j)];
                    CRational::from_c64(Complex64::new(clean(z.re), clean(z.im)))
                        .ok_or_else(|| Error::Numeric("non-finite entry in P".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CMatrix::from_rows(rows))
}

/// Eigenvector basis of a matrix with simple spectrum; each column scaled so
/// its largest entry is exactly 1.
fn eigenbasis(a: &CMatrix, lambda: &[Complex64]) -> Result<DMatrix<Complex64>> {
    let n = a.nrows();
    if a.is_diagonal() {
        return Ok(DMatrix::identity(n, n));
    }
    let ac = a.to_c64();
    let cols: Vec<_> = lambda
        .iter()
        .map(|&l| {
            let v = numeric::null_vectors(&(&ac - DMatrix::from_diagonal_element(n, n, l)), 1).remove(0);
            let pivot = v.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap_or(Complex64::new(1.0, 0.0));
            v / pivot
        })
        .collect();
    Ok(DMatrix::from_columns(&cols))
}

/// Builds `P` for the drift of `sys` (its diffusions are ignored). `u` must
/// lie in `(0, 1)`; if `E(l)` vanishes for some `|l|₁ ≤ L`, up to twenty
/// further values of `u` are drawn from a fixed pseudo-random sequence.
pub fn build_perturbation(sys: &SdeSystem, u: f64, l_bound: usize) -> Result<PerturbationPlan> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Config(format!("u must lie in (0, 1), got {u}")));
    }
    if l_bound == 0 {
        return Err(Error::Config("verification bound L must be at least 1".into()));
    }
    let ode = SdeSystem::new(sys.drift.clone(), Vec::new(), Some(sys.var_names.clone()))?;
    let spec = spectral::linearization(&ode)?;
    let a = &spec.a_f;
    let det = a.det();
    if det.is_zero() {
        return Err(Error::SingularJacobian);
    }
    if spec.mu0.values.iter().any(|r| r.is_exact_zero()) {
        return Err(Error::ZeroEigenvalue);
    }
    if !spec.mu0.is_simple() {
        return Err(Error::RepeatedEigenvalues);
    }
    let n = a.nrows();
    let lambda: Vec<Complex64> = if a.is_diagonal() {
        (0..n).map(|i| a.get(i, i).to_c64()).collect()
    } else {
        spec.mu0.values_c64()
    };
    let q = eigenbasis(a, &lambda)?;
    let q_inv = q.clone().try_inverse().ok_or_else(|| Error::Numeric("eigenvector matrix is singular".into()))?;
    let a_exp = exponents(n);

    let mut rng = ChaCha8Rng::seed_from_u64(RETRY_SEED);
    let mut rejected = Vec::new();
    let mut u_try = u;
    for _ in 0..=RETRIES {
        let mu: Vec<f64> = a_exp.iter().map(|&k| u_try.powi(k as i32)).collect();
        let sc = scan(&lambda, &mu, l_bound);
        if let Some(l) = sc.offending {
            rejected.push(RejectedBase { u: u_try, offending: l });
            u_try = rng.random_range(0.05..0.95);
            continue;
        }
        let lam1 = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, mu.iter().map(|&m| Complex64::new(m, 0.0))));
        let p = &q * lam1 * &q_inv;
        let p_exact = snap(&p)?;
        return Ok(PerturbationPlan {
            q,
            lambda,
            exponents: a_exp,
            u: u_try,
            mu,
            p,
            p_exact,
            det_df0: det,
            verified_to: l_bound,
            residual_min: sc.min,
            residual_argmin: sc.argmin,
            rejected,
        });
    }
    let offending = rejected.last().map(|r| r.offending.clone()).unwrap_or_default();
    Err(Error::NoAdmissibleBase { tries: RETRIES + 1, offending })
}

#[derive(Clone, Debug)]
pub struct PerturbationVerdict {
    pub pass: bool,
    pub dmax: i64,
    /// Weak integrals of the perturbed system found in `[1, D]`.
    pub counterexamples: IntegralBasis,
}

impl PerturbationVerdict {
    pub const SCOPE_NOTE: &'static str =
        "only polynomial weak integrals of degree <= D are excluded; higher degrees and non-polynomial analytic integrals are not checked";
}

/// Exact weak search on `dx = f dt + P x dB` over degrees `[1, D]`.
pub fn verify_perturbation(sys: &SdeSystem, plan: &PerturbationPlan, dmax: i64) -> Result<PerturbationVerdict> {
    if dmax < 1 {
        return Err(Error::InvalidWindow { dmin: 1, dmax });
    }
    let perturbed = plan.perturbed_system(sys)?;
    let basis = search::find_first_integrals(&perturbed, Mode::Weak, 1, dmax)?;
    Ok(PerturbationVerdict { pass: basis.is_empty(), dmax, counterexamples: basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn exponent_recurrence() {
        assert_eq!(exponents(3), vec![1, 2, 6]);
        assert_eq!(exponents(4), vec![1, 2, 6, 18]);
        let a = exponents(8);
        for k in 2..8 {
            assert_eq!(a[k], 3 * a[k - 1]);
        }
        let mut sums: Vec<u64> = Vec::new();
        for i in 0..8 {
            for j in i..8 {
                sums.push(a[i] + a[j]);
            }
        }
        let len = sums.len();
        sums.sort();
        sums.dedup();
        assert_eq!(sums.len(), len);
    }

    #[test]
    fn oscillator_pipeline() {
        let sys = fixtures::harmonic_oscillator();
        let plan = build_perturbation(&sys, 0.37, 8).unwrap();
        assert_eq!(plan.exponents, vec![1, 2]);
        assert!(plan.rejected.is_empty());
        let v = verify_perturbation(&sys, &plan, 4).unwrap();
        assert!(v.pass);
        // P is similar to diag(u, u²)
        let eig = spectral::eigenvalues(&plan.p_exact).unwrap();
        let mut got: Vec<f64> = eig.values.iter().map(|r| r.value.re).collect();
        got.sort_by(f64::total_cmp);
        assert!((got[0] - 0.37f64.powi(2)).abs() < 1e-8 && (got[1] - 0.37).abs() < 1e-8);
    }

    #[test]
    fn diagonal_drift_gives_diagonal_noise() {
        let sys = fixtures::linear_ode(&CMatrix::from_ints(&[&[1, 0], &[0, -1]]));
        let plan = build_perturbation(&sys, 0.37, 8).unwrap();
        assert!(plan.p_exact.is_diagonal());
        assert_eq!(plan.q, DMatrix::identity(2, 2));
    }

    #[test]
    fn vanishing_expression_forces_retry() {
        // λ = (1, −1): E(0, 4) = −8 + 12u⁴ vanishes at u⁴ = 2/3
        let sys = fixtures::linear_ode(&CMatrix::from_ints(&[&[1, 0], &[0, -1]]));
        let u = (2.0f64 / 3.0).powf(0.25);
        let plan = build_perturbation(&sys, u, 8).unwrap();
        assert_eq!(plan.rejected.len(), 1);
        assert_eq!(plan.rejected[0].offending, vec![0, 4]);
        assert_ne!(plan.u, u);
    }

    #[test]
    fn preconditions() {
        let sing = fixtures::linear_ode(&CMatrix::from_ints(&[&[1, 0], &[0, 0]]));
        assert!(matches!(build_perturbation(&sing, 0.37, 8), Err(Error::SingularJacobian)));
        let rep = fixtures::linear_ode(&CMatrix::from_ints(&[&[2, 0], &[0, 2]]));
        assert!(matches!(build_perturbation(&rep, 0.37, 8), Err(Error::RepeatedEigenvalues)));
        let osc = fixtures::harmonic_oscillator();
        assert!(build_perturbation(&osc, 1.5, 8).is_err());
    }
}
