//! Resonance lattices of eigenvalue tuples and the non-integrability verdicts
//! built on them.
//!
//! A tuple `λ` is resonant at `k ≠ 0` when `⟨λ, k⟩ = 0`. With exact
//! eigenvalues the test is exact; otherwise it is the relative test
//! `|⟨λ,k⟩| ≤ tol·(1 + |k|₁·max|λ_j|)` and the result only covers `|k|₁ ≤ K`
//! unless a certificate says more.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::sparse::{Echelon, SparseRow};
use crate::algebra::{CMatrix, CRational};
use crate::error::{Error, Result};
use crate::ito::SdeSystem;
use crate::spectral::{self, H1Status, H1Verdict, PairedSpectrum, Root, SpectralData};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_TOL: f64 = 1e-9;
/// Upper limit on lattice points visited by one enumeration.
pub const MAX_CANDIDATES: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Lattice {
    /// Nonnegative integer vectors.
    Zplus,
    /// All integer vectors.
    Z,
}

impl FromStr for Lattice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zplus" | "z+" | "nonneg" => Ok(Lattice::Zplus),
            "z" | "int" => Ok(Lattice::Z),
            _ => Err(Error::Config(format!("unknown lattice `{s}` (expected zplus or z)"))),
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lattice::Zplus => "zplus",
            Lattice::Z => "z",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ResVector {
    pub k: Vec<i64>,
    pub lattice: Lattice,
}

impl ResVector {
    pub fn l1(&self) -> i64 {
        self.k.iter().map(|x| x.abs()).sum()
    }
}

/// How much an enumeration result can be trusted.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EpistemicStatus {
    Certified { reason: String },
    Bounded { k_bound: usize, tol: f64 },
}

impl EpistemicStatus {
    pub fn certified(reason: impl Into<String>) -> Self {
        EpistemicStatus::Certified { reason: reason.into() }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, EpistemicStatus::Certified { .. })
    }
}

impl fmt::Display for EpistemicStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpistemicStatus::Certified { reason } => write!(f, "certified ({reason})"),
            EpistemicStatus::Bounded { k_bound, tol } => write!(f, "bounded(K={k_bound}, tol={tol:e})"),
        }
    }
}

fn l1_count(n: usize, k: usize, lattice: Lattice) -> u128 {
    let binom = |a: u128, b: u128| -> u128 {
        let mut r = 1u128;
        for i in 0..b {
            r = r.saturating_mul(a - i) / (i + 1);
        }
        r
    };
    match lattice {
        Lattice::Zplus => binom((n + k) as u128, n as u128),
        Lattice::Z => (0..=n.min(k))
            .map(|j| binom(n as u128, j as u128).saturating_mul(binom(k as u128, j as u128)).saturating_mul(1 << j))
            .fold(0u128, u128::saturating_add),
    }
}

/// Nonnegative compositions of `s` into `n` parts, in lexicographic order.
fn compositions(n: usize, s: i64, out: &mut Vec<Vec<i64>>) {
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
    if n == 0 {
        return;
    }
    rec(&mut Vec::with_capacity(n), n, s, out);
}

/// Lattice points with `|k|₁ = s`, sorted lexicographically.
fn shell(n: usize, s: i64, lattice: Lattice) -> Vec<Vec<i64>> {
    let mut base = Vec::new();
    compositions(n, s, &mut base);
    if lattice == Lattice::Zplus {
        return base;
    }
    let mut out = Vec::new();
    for k in base {
        let nz: Vec<usize> = (0..n).filter(|&i| k[i] != 0).collect();
        for mask in 0u32..(1 << nz.len()) {
            let mut v = k.clone();
            for (b, &i) in nz.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    v[i] = -v[i];
                }
            }
            out.push(v);
        }
    }
    out.sort();
    out
}

/// Exact eigenvalues as Gaussian integers over a common denominator,
/// when they fit in `i128`.
fn integer_form(lambda: &[Root]) -> Option<(Vec<i128>, Vec<i128>)> {
    let exact: Vec<&CRational> = lambda.iter().map(|r| r.exact.as_ref()).collect::<Option<_>>()?;
    let den = exact.iter().fold(BigInt::one(), |acc, z| acc.lcm(&z.denom_lcm()));
    let to_i = |r: &num_rational::BigRational| -> Option<i128> { (r * &den).to_integer().to_i128() };
    let re = exact.iter().map(|z| to_i(&z.re)).collect::<Option<Vec<_>>>()?;
    let im = exact.iter().map(|z| to_i(&z.im)).collect::<Option<Vec<_>>>()?;
    // keep headroom so the dot products with |k|₁ ≤ 10⁶ cannot overflow
    let max = re.iter().chain(&im).map(|v| v.unsigned_abs()).max().unwrap_or(0);
    (max < 1u128 << 96).then_some((re, im))
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dot_c(lambda: &[Complex64], k: &[i64]) -> Complex64 {
    lambda.iter().zip(k).map(|(l, &ki)| l * ki as f64).sum()
}

/// All `k` with `0 < |k|₁ ≤ K` in the chosen lattice that satisfy the
/// resonance test, sorted by `|k|₁` then lexicographically.
pub fn enumerate_resonances(lambda: &[Root], k_bound: usize, tol: f64, lattice: Lattice) -> Result<Vec<ResVector>> {
    let n = lambda.len();
    if k_bound == 0 {
        return Err(Error::Config("degree bound K must be at least 1".into()));
    }
    if l1_count(n, k_bound, lattice) > MAX_CANDIDATES {
        return Err(Error::Config(format!(
            "{lattice} enumeration with n = {n}, K = {k_bound} exceeds {MAX_CANDIDATES} lattice points; lower K"
        )));
    }
    let ints = integer_form(lambda);
    let vals: Vec<Complex64> = lambda.iter().map(|r| r.value).collect();
    let scale = max_abs(&vals);
    let hit = |k: &[i64]| -> bool {
        match &ints {
            Some((re, im)) => {
                let dot = |c: &[i128]| c.iter().zip(k).map(|(a, &b)| a * b as i128).sum::<i128>();
                dot(re) == 0 && dot(im) == 0
            }
            None => {
                let l1: i64 = k.iter().map(|x| x.abs()).sum();
                dot_c(&vals, k).norm() <= tol * (1.0 + l1 as f64 * scale)
            }
        }
    };
    let shells: Vec<Vec<ResVector>> = (1..=k_bound as i64)
        .into_par_iter()
        .map(|s| {
            shell(n, s, lattice)
                .into_iter()
                .filter(|k| hit(k))
                .map(|k| ResVector { k, lattice })
                .collect()
        })
        .collect();
    Ok(shells.into_iter().flatten().collect())
}

/// Exact rank over ℚ of a set of integer vectors.
pub fn lattice_rank(set: &[ResVector]) -> usize {
    let Some(n) = set.first().map(|v| v.k.len()) else { return 0 };
    let mut ech = Echelon::new(n);
    for v in set {
        let row: SparseRow = v.k.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, CRational::from_int(x))).collect();
        ech.push(row);
        if ech.rank() == n {
            break;
        }
    }
    ech.rank()
}

/// Direction `θ` with `Re(e^{iθ}λ_j) > ε₀` for every `j`, if one exists.
/// Then `0` is outside the convex hull of the `λ_j` and no nonnegative
/// resonance exists at any order.
pub fn halfplane_certificate(lambda: &[Complex64]) -> Option<f64> {
    if lambda.is_empty() {
        return None;
    }
    let eps0 = 1e-9 * max_abs(lambda);
    if lambda.iter().any(|z| z.norm() <= eps0) {
        return None;
    }
    let mut ang: Vec<f64> = lambda.iter().map(|z| z.arg()).collect();
    ang.sort_by(f64::total_cmp);
    let n = ang.len();
    let tau = std::f64::consts::TAU;
    // largest angular gap; its complement is the arc containing every λ_j
    let (mut gap, mut after) = (ang[0] + tau - ang[n - 1], 0usize);
    for i in 1..n {
        if ang[i] - ang[i - 1] > gap {
            gap = ang[i] - ang[i - 1];
            after = i;
        }
    }
    if gap <= std::f64::consts::PI {
        return None;
    }
    let start = ang[after];
    let centre = start + (tau - gap) / 2.0;
    let theta = -centre;
    let rot = Complex64::from_polar(1.0, theta);
    lambda.iter().all(|z| (rot * z).re > eps0).then_some(theta)
}

/// Dimension of `{k ∈ ℚⁿ : ⟨λ,k⟩ = 0}` for exact `λ`; an upper bound on the
/// rank of any resonance set of `λ`.
fn exact_kernel_dim(lambda: &[Root]) -> Option<usize> {
    let exact: Vec<&CRational> = lambda.iter().map(|r| r.exact.as_ref()).collect::<Option<_>>()?;
    let re = exact.iter().map(|z| CRational::real(z.re.clone())).collect();
    let im = exact.iter().map(|z| CRational::real(z.im.clone())).collect();
    Some(lambda.len() - CMatrix::from_rows(vec![re, im]).rank())
}

/// One resonance set `S_j`.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub label: String,
    pub lattice: Lattice,
    pub eigenvalues: Vec<Root>,
    pub vectors: Vec<Vec<i64>>,
    /// Exact rank of the vectors found.
    pub rank: usize,
    /// Whether `rank` (and emptiness) is the true value for the unbounded set.
    pub completeness: EpistemicStatus,
}

impl LatticeReport {
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Enumerates `S` for one tuple and decides whether the result is complete.
pub fn lattice_report(label: &str, lambda: &[Root], k_bound: usize, tol: f64, lattice: Lattice) -> Result<LatticeReport> {
    let n = lambda.len();
    let mk = |vectors: Vec<Vec<i64>>, rank, completeness| LatticeReport {
        label: label.to_string(),
        lattice,
        eigenvalues: lambda.to_vec(),
        vectors,
        rank,
        completeness,
    };
    if n > 0 && lambda.iter().all(Root::is_exact_zero) {
        let units = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        return Ok(mk(units, n, EpistemicStatus::certified("zero tuple: every k is resonant")));
    }
    let vals: Vec<Complex64> = lambda.iter().map(|r| r.value).collect();
    if lattice == Lattice::Zplus {
        if let Some(theta) = halfplane_certificate(&vals) {
            let theta = if theta.abs() < 5e-7 { 0.0 } else { theta };
            return Ok(mk(Vec::new(), 0, EpistemicStatus::certified(format!("half-plane, theta = {theta:.6}"))));
        }
    }
    let found = enumerate_resonances(lambda, k_bound, tol, lattice)?;
    let rank = lattice_rank(&found);
    let ceiling = exact_kernel_dim(lambda);
    let completeness = match ceiling {
        Some(c) if rank == c && c == 0 => EpistemicStatus::certified("exact eigenvalues, trivial rational kernel"),
        Some(c) if rank == c => EpistemicStatus::certified("rank reaches the exact kernel dimension"),
        None if rank + 1 >= n && n == 1 && rank == 0 && vals[0].norm() > tol => {
            EpistemicStatus::certified("single nonzero eigenvalue")
        }
        None if n > 1 && rank == n - 1 && max_abs(&vals) > tol => {
            EpistemicStatus::certified("rank n-1 is the maximum for a nonzero tuple")
        }
        _ => EpistemicStatus::Bounded { k_bound, tol },
    };
    Ok(mk(found.into_iter().map(|v| v.k).collect(), rank, completeness))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakCertificate {
    /// `Re λ_j > 0` and every `μ^i_j` real: `Re q(k) > 0` for all `k`.
    PositiveDefinite,
    /// All `μ^i` vanish and the `λ_j` lie in an open half-plane.
    HalfPlane,
    BoundedOnly,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeakResonance {
    pub violations: Vec<Vec<i64>>,
    pub certificate: WeakCertificate,
}

/// Searches `k ∈ (Z⁺)ⁿ \ {0}`, `|k|₁ ≤ K`, with
/// `q(k) = ⟨λ,k⟩ + ½ Σ_i ⟨μ^i,k⟩² = 0`.
///
/// `λ` and the `μ^i` must be listed along one common eigenbasis.
pub fn weak_resonance_test(lambda: &[Root], mu: &[Vec<Root>], k_bound: usize, tol: f64) -> Result<WeakResonance> {
    let n = lambda.len();
    if mu.iter().any(|m| m.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: mu.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n) });
    }
    let lv: Vec<Complex64> = lambda.iter().map(|r| r.value).collect();
    let muv: Vec<Vec<Complex64>> = mu.iter().map(|m| m.iter().map(|r| r.value).collect()).collect();
    let lmax = max_abs(&lv);
    let eps = 1e-12 * (1.0 + lmax);
    let mu_real = muv.iter().flatten().all(|z| z.im.abs() <= 1e-12 * (1.0 + z.norm()));
    if n > 0 && mu_real && lv.iter().all(|z| z.re > eps) {
        return Ok(WeakResonance { violations: Vec::new(), certificate: WeakCertificate::PositiveDefinite });
    }
    let mu_zero = mu.iter().flatten().all(Root::is_exact_zero);
    if mu_zero {
        if halfplane_certificate(&lv).is_some() {
            return Ok(WeakResonance { violations: Vec::new(), certificate: WeakCertificate::HalfPlane });
        }
        let found = enumerate_resonances(lambda, k_bound, tol, Lattice::Zplus)?;
        return Ok(WeakResonance { violations: found.into_iter().map(|v| v.k).collect(), certificate: WeakCertificate::BoundedOnly });
    }
    if k_bound == 0 {
        return Err(Error::Config("degree bound K must be at least 1".into()));
    }
    if l1_count(n, k_bound, Lattice::Zplus) > MAX_CANDIDATES {
        return Err(Error::Config(format!("weak-resonance scan with n = {n}, K = {k_bound} is too large; lower K")));
    }
    let exact: Option<(Vec<CRational>, Vec<Vec<CRational>>)> = lambda
        .iter()
        .map(|r| r.exact.clone())
        .collect::<Option<Vec<_>>>()
        .zip(mu.iter().map(|m| m.iter().map(|r| r.exact.clone()).collect::<Option<Vec<_>>>()).collect::<Option<Vec<_>>>());
    let mmax: Vec<f64> = muv.iter().map(|m| max_abs(m)).collect();
    let half = CRational::ratio(1, 2);
    let hit = |k: &[i64]| -> bool {
        if let Some((l, ms)) = &exact {
            let dot = |v: &[CRational]| v.iter().zip(k).fold(CRational::zero(), |acc, (a, &b)| acc + a.scale_int(b));
            let q = ms.iter().fold(dot(l), |acc, m| {
                let d = dot(m);
                acc + &(&d * &d) * &half
            });
            return q.is_zero();
        }
        let l1 = k.iter().sum::<i64>() as f64;
        let q = muv.iter().fold(dot_c(&lv, k), |acc, m| {
            let d = dot_c(m, k);
            acc + 0.5 * d * d
        });
        let scale = 1.0 + l1 * lmax + mmax.iter().map(|m| 0.5 * (l1 * m).powi(2)).sum::<f64>();
        q.norm() <= tol * scale
    };
    let shells: Vec<Vec<Vec<i64>>> = (1..=k_bound as i64)
        .into_par_iter()
        .map(|s| shell(n, s, Lattice::Zplus).into_iter().filter(|k| hit(k)).collect())
        .collect();
    Ok(WeakResonance { violations: shells.into_iter().flatten().collect(), certificate: WeakCertificate::BoundedOnly })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictKind {
    NoStrongAnalytic,
    StrongCountAtMost,
    NoWeakAnalytic,
    NoWeakRational,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::NoStrongAnalytic => "NO_STRONG_ANALYTIC",
            VerdictKind::StrongCountAtMost => "STRONG_COUNT_AT_MOST",
            VerdictKind::NoWeakAnalytic => "NO_WEAK_ANALYTIC",
            VerdictKind::NoWeakRational => "NO_WEAK_RATIONAL",
            VerdictKind::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
}

fn hyp(name: &str, holds: bool) -> Hypothesis {
    Hypothesis { name: name.to_string(), holds }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Only for `STRONG_COUNT_AT_MOST`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    /// The criterion the conclusion rests on.
    pub theorem: String,
    pub hypotheses_checked: Vec<Hypothesis>,
    pub epistemic_status: EpistemicStatus,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound {
            Some(b) => write!(f, "{}({b})", self.kind)?,
            None => write!(f, "{}", self.kind)?,
        }
        write!(f, " [{}] via {}", self.epistemic_status, self.theorem)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

pub const CRIT_STRONG_NONRESONANT: &str = "strong non-resonance (a linearization has no Z+ resonance)";
pub const CRIT_STRONG_COUNT: &str = "strong count bound (min rank of resonance sets)";
pub const CRIT_WEAK_DIAGONAL: &str = "weak resonance q(k) != 0 under simultaneous diagonalizability";
pub const CRIT_WEAK_HIGHER_ORDER: &str = "Z+ non-resonance of Df(0) with O(|x|^2) noise";
pub const CRIT_WEAK_LAURENT: &str = "Z non-resonance of Df(0) with O(|x|^2) noise (rational/Laurent integrals)";

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceReport {
    pub k_bound: usize,
    pub tol: f64,
    pub spectral: SpectralData,
    pub h1: H1Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paired: Option<PairedSpectrum>,
    /// `S_0` (on `A0`) followed by `S_i` (on `Dg_i(0)`), nonnegative lattice.
    pub lattices: Vec<LatticeReport>,
    /// Lattices on `Df(0)` used by the higher-order-noise criteria.
    pub drift_lattices: Vec<LatticeReport>,
    pub s_min: usize,
    pub weak_violations: Vec<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weak_certificate: Option<WeakCertificate>,
    pub verdicts: Vec<Verdict>,
}

impl ResonanceReport {
    pub fn verdict(&self, kind: VerdictKind) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.kind == kind)
    }

    pub fn has_certified(&self, kind: VerdictKind) -> bool {
        self.verdicts.iter().any(|v| v.kind == kind && v.epistemic_status.is_certified())
    }
}

/// Runs every applicable criterion and collects verdicts.
pub fn nonintegrability_report(sys: &SdeSystem, k_bound: usize, tol: f64) -> Result<ResonanceReport> {
    if k_bound == 0 {
        return Err(Error::Config("degree bound K must be at least 1".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let spec = spectral::linearization(sys)?;
    let n = spec.dim();
    let h1 = spectral::h1_check(&spec);
    let g_vanish = spec.all_diffusions_vanish();
    let higher = spec.all_diffusions_higher_order();
    let bounded = EpistemicStatus::Bounded { k_bound, tol };
    let mut verdicts = Vec::new();

    let degenerate = n > 0 && spec.lambda.all_zero() && spec.mu0.all_zero();
    if degenerate {
        verdicts.push(Verdict {
            kind: VerdictKind::Inconclusive,
            bound: None,
            theorem: "degenerate linearization".into(),
            hypotheses_checked: vec![hyp("f(0) = 0", true)],
            epistemic_status: EpistemicStatus::certified("all eigenvalues are exactly zero"),
            detail: "every k is resonant".into(),
        });
        return Ok(ResonanceReport {
            k_bound,
            tol,
            paired: None,
            h1,
            lattices: Vec::new(),
            drift_lattices: Vec::new(),
            s_min: n,
            weak_violations: Vec::new(),
            weak_certificate: None,
            verdicts,
            spectral: spec,
        });
    }

    let mut lattices = vec![lattice_report("A0", &spec.lambda.values, k_bound, tol, Lattice::Zplus)?];
    for (i, mu) in spec.mu.iter().enumerate() {
        lattices.push(lattice_report(&format!("Dg_{}(0)", i + 1), &mu.values, k_bound, tol, Lattice::Zplus)?);
    }
    let s_min = lattices.iter().map(|l| l.rank).min().unwrap_or(n);

    if g_vanish {
        let hyps = vec![hyp("f(0) = 0", true), hyp("g_i(0) = 0", true)];
        let empty = lattices.iter().filter(|l| l.is_empty()).min_by_key(|l| !l.completeness.is_certified());
        if let Some(l) = empty {
            verdicts.push(Verdict {
                kind: VerdictKind::NoStrongAnalytic,
                bound: None,
                theorem: CRIT_STRONG_NONRESONANT.into(),
                hypotheses_checked: hyps.clone(),
                epistemic_status: l.completeness.clone(),
                detail: format!("no resonance for the eigenvalues of {}", l.label),
            });
        }
        let best = lattices
            .iter()
            .filter(|l| l.rank == s_min)
            .min_by_key(|l| !l.completeness.is_certified())
            .expect("at least one lattice");
        verdicts.push(Verdict {
            kind: VerdictKind::StrongCountAtMost,
            bound: Some(s_min),
            theorem: CRIT_STRONG_COUNT.into(),
            hypotheses_checked: hyps,
            epistemic_status: best.completeness.clone(),
            detail: format!("minimum rank attained on {}", best.label),
        });
    }

    let mut paired = None;
    let mut weak_violations = Vec::new();
    let mut weak_certificate = None;
    if g_vanish && h1.verdict == H1Verdict::Holds {
        if let Some(p) = spectral::paired_spectrum(&spec)? {
            let w = weak_resonance_test(&p.lambda, &p.mu, k_bound, tol)?;
            weak_certificate = Some(w.certificate);
            if w.violations.is_empty() {
                verdicts.push(Verdict {
                    kind: VerdictKind::NoWeakAnalytic,
                    bound: None,
                    theorem: CRIT_WEAK_DIAGONAL.into(),
                    hypotheses_checked: vec![hyp("f(0) = 0", true), hyp("g_i(0) = 0", true), hyp("(H1)", true)],
                    epistemic_status: match w.certificate {
                        WeakCertificate::PositiveDefinite => EpistemicStatus::certified("Re lambda > 0 and real mu"),
                        WeakCertificate::HalfPlane => EpistemicStatus::certified("linear noise vanishes; half-plane"),
                        WeakCertificate::BoundedOnly => bounded.clone(),
                    },
                    detail: String::new(),
                });
            }
            weak_violations = w.violations;
            paired = Some(p);
        }
    }

    let mut drift_lattices = Vec::new();
    if higher {
        let hyps = vec![hyp("f(0) = 0", true), hyp("g_i = O(|x|^2)", true)];
        let zp = lattice_report("Df(0)", &spec.mu0.values, k_bound, tol, Lattice::Zplus)?;
        // preferred over the diagonalizable-case verdict unless it is weaker
        let existing_certified = verdicts.iter().any(|v| v.kind == VerdictKind::NoWeakAnalytic && v.epistemic_status.is_certified());
        if zp.is_empty() && (zp.completeness.is_certified() || !existing_certified) {
            verdicts.retain(|v| v.kind != VerdictKind::NoWeakAnalytic);
            verdicts.push(Verdict {
                kind: VerdictKind::NoWeakAnalytic,
                bound: None,
                theorem: CRIT_WEAK_HIGHER_ORDER.into(),
                hypotheses_checked: hyps.clone(),
                epistemic_status: zp.completeness.clone(),
                detail: String::new(),
            });
        }
        let z = lattice_report("Df(0)", &spec.mu0.values, k_bound, tol, Lattice::Z)?;
        if z.is_empty() {
            verdicts.push(Verdict {
                kind: VerdictKind::NoWeakRational,
                bound: None,
                theorem: CRIT_WEAK_LAURENT.into(),
                hypotheses_checked: hyps,
                epistemic_status: z.completeness.clone(),
                detail: String::new(),
            });
        }
        drift_lattices = vec![zp, z];
    }

    if !verdicts.iter().any(|v| matches!(v.kind, VerdictKind::NoWeakAnalytic | VerdictKind::NoWeakRational)) {
        let mut why = Vec::new();
        if !g_vanish {
            why.push("some g_i(0) != 0".to_string());
        }
        if g_vanish && h1.verdict != H1Verdict::Holds {
            why.push("(H1) fails".to_string());
        }
        if !weak_violations.is_empty() {
            why.push(format!("weak resonances {:?}", weak_violations));
        }
        if let Some(zp) = drift_lattices.first().filter(|l| !l.is_empty()) {
            why.push(format!("Df(0) resonances {:?}", zp.vectors));
        }
        if !higher && !(g_vanish && h1.verdict == H1Verdict::Holds) {
            why.push("noise is not O(|x|^2)".to_string());
        }
        let found: Vec<String> = lattices.iter().filter(|l| !l.is_empty()).map(|l| format!("S({}) = {:?}", l.label, l.vectors)).collect();
        why.extend(found);
        verdicts.push(Verdict {
            kind: VerdictKind::Inconclusive,
            bound: None,
            theorem: "none of the weak criteria applies".into(),
            hypotheses_checked: vec![
                hyp("g_i(0) = 0", g_vanish),
                hyp("(H1)", h1.verdict == H1Verdict::Holds),
                hyp("g_i = O(|x|^2)", higher),
            ],
            epistemic_status: bounded,
            detail: why.join("; "),
        });
    }

    Ok(ResonanceReport {
        k_bound,
        tol,
        spectral: spec,
        h1,
        paired,
        lattices,
        drift_lattices,
        s_min,
        weak_violations,
        weak_certificate,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn exact(v: &[i64]) -> Vec<Root> {
        v.iter().map(|&x| Root { value: Complex64::new(x as f64, 0.0), exact: Some(CRational::from_int(x)) }).collect()
    }

    fn numeric(v: &[Complex64]) -> Vec<Root> {
        v.iter().map(|&value| Root { value, exact: None }).collect()
    }

    fn ks(v: &[ResVector]) -> Vec<Vec<i64>> {
        v.iter().map(|r| r.k.clone()).collect()
    }

    /// Straightforward oracle: every vector in the box, filtered.
    fn brute(lambda: &[i64], k_bound: i64, lattice: Lattice) -> Vec<Vec<i64>> {
        let n = lambda.len();
        let lo = if lattice == Lattice::Z { -k_bound } else { 0 };
        let mut out = Vec::new();
        let mut k = vec![lo; n];
        loop {
            let l1: i64 = k.iter().map(|x: &i64| x.abs()).sum();
            if l1 > 0 && l1 <= k_bound && lambda.iter().zip(&k).map(|(a, b)| a * b).sum::<i64>() == 0 {
                out.push(k.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    out.sort_by_key(|k| (k.iter().map(|x| x.abs()).sum::<i64>(), k.clone()));
                    return out;
                }
                if k[i] < k_bound {
                    k[i] += 1;
                    break;
                }
                k[i] = lo;
                i += 1;
            }
        }
    }

    #[test]
    fn matches_brute_force() {
        for (lambda, lattice) in [
            (vec![1, -2], Lattice::Zplus),
            (vec![1, 2], Lattice::Z),
            (vec![3, -1, -2], Lattice::Zplus),
            (vec![3, -1, 2], Lattice::Z),
        ] {
            let got = enumerate_resonances(&exact(&lambda), 5, DEFAULT_TOL, lattice).unwrap();
            assert_eq!(ks(&got), brute(&lambda, 5, lattice), "{lambda:?} {lattice}");
        }
        let got = enumerate_resonances(&exact(&[1, -2]), 3, DEFAULT_TOL, Lattice::Zplus).unwrap();
        assert!(ks(&got).contains(&vec![2, 1]));
        let got = enumerate_resonances(&exact(&[1, 2]), 3, DEFAULT_TOL, Lattice::Z).unwrap();
        assert!(ks(&got).contains(&vec![2, -1]) && ks(&got).contains(&vec![-2, 1]));
        assert!(enumerate_resonances(&exact(&[1, 2]), 7, DEFAULT_TOL, Lattice::Zplus).unwrap().is_empty());
    }

    #[test]
    fn numeric_tolerance_path() {
        let s2 = 2f64.sqrt();
        let l = numeric(&[Complex64::new(1.0, 0.0), Complex64::new(-s2, 0.0)]);
        assert!(enumerate_resonances(&l, 10, DEFAULT_TOL, Lattice::Zplus).unwrap().is_empty());
        let l = numeric(&[Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)]);
        assert_eq!(ks(&enumerate_resonances(&l, 4, DEFAULT_TOL, Lattice::Zplus).unwrap()), vec![vec![1, 1], vec![2, 2]]);
    }

    #[test]
    fn ranks() {
        let rv = |k: Vec<i64>| ResVector { k, lattice: Lattice::Zplus };
        assert_eq!(lattice_rank(&[rv(vec![2, 1])]), 1);
        assert_eq!(lattice_rank(&[]), 0);
        assert_eq!(lattice_rank(&[rv(vec![1, 1, 0]), rv(vec![0, 1, 1]), rv(vec![1, 2, 1])]), 2);
    }

    #[test]
    fn halfplane() {
        let c = |v: &[(f64, f64)]| v.iter().map(|&(a, b)| Complex64::new(a, b)).collect::<Vec<_>>();
        assert!(halfplane_certificate(&c(&[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)])).is_some());
        assert!(halfplane_certificate(&c(&[(1.0, 0.0), (-1.0, 0.0)])).is_none());
        let theta = halfplane_certificate(&c(&[(0.0, 1.0), (1.0, 1.0)])).unwrap();
        assert!(theta < 0.0);
        assert!(halfplane_certificate(&c(&[(1.0, 1.0), (1.0, -1.0), (-1.0, 0.0)])).is_none());
        assert!(halfplane_certificate(&c(&[(0.0, 0.0), (1.0, 0.0)])).is_none());
    }

    #[test]
    fn weak_resonance_examples() {
        let one = |x: (i64, i64)| vec![Root { value: Complex64::new(x.0 as f64 / x.1 as f64, 0.0), exact: Some(CRational::ratio(x.0, x.1)) }];
        let w = weak_resonance_test(&one((1, 2)), &[one((1, 1))], 10, DEFAULT_TOL).unwrap();
        assert!(w.violations.is_empty());
        assert_eq!(w.certificate, WeakCertificate::PositiveDefinite);
        let w = weak_resonance_test(&one((-2, 1)), &[one((2, 1))], 10, DEFAULT_TOL).unwrap();
        assert_eq!(w.violations, vec![vec![1]]);
        // m = 0 reduces to the plain nonnegative lattice
        let l = exact(&[1, -1]);
        let w = weak_resonance_test(&l, &[], 6, DEFAULT_TOL).unwrap();
        assert_eq!(w.violations, ks(&enumerate_resonances(&l, 6, DEFAULT_TOL, Lattice::Zplus).unwrap()));
    }

    #[test]
    fn report_for_resonant_ode() {
        let sys = fixtures::linear_ode(&CMatrix::from_ints(&[&[1, 0], &[0, -1]]));
        let r = nonintegrability_report(&sys, 10, DEFAULT_TOL).unwrap();
        assert!(r.lattices[0].vectors.contains(&vec![1, 1]));
        assert_eq!(r.verdict(VerdictKind::StrongCountAtMost).unwrap().bound, Some(1));
        assert!(r.has_certified(VerdictKind::StrongCountAtMost));
        assert!(r.verdict(VerdictKind::Inconclusive).is_some());
        assert!(r.verdict(VerdictKind::NoWeakAnalytic).is_none());
    }

    #[test]
    fn report_for_martingale_noise() {
        let sys = fixtures::multiplicative_noise(CRational::from_int(2));
        let r = nonintegrability_report(&sys, 10, DEFAULT_TOL).unwrap();
        assert_eq!(r.weak_violations, vec![vec![1]]);
        assert!(r.verdict(VerdictKind::Inconclusive).is_some());
        assert!(r.verdict(VerdictKind::NoWeakAnalytic).is_none());
    }

    #[test]
    fn report_for_gbm_positive() {
        // a = 1, σ = 1: λ = 1/2, μ = 1
        let sys = fixtures::gbm(CRational::one(), CRational::one());
        let r = nonintegrability_report(&sys, 10, DEFAULT_TOL).unwrap();
        assert!(r.has_certified(VerdictKind::NoWeakAnalytic));
        assert!(r.has_certified(VerdictKind::NoStrongAnalytic));
    }

    #[test]
    fn lotka_volterra_higher_order_noise() {
        for sys in [fixtures::lotka_volterra_2(), fixtures::lotka_volterra_3()] {
            let r = nonintegrability_report(&sys, 10, DEFAULT_TOL).unwrap();
            let v = r.verdict(VerdictKind::NoWeakAnalytic).unwrap();
            assert!(v.epistemic_status.is_certified(), "{v}");
            assert_eq!(v.theorem, CRIT_WEAK_HIGHER_ORDER);
            assert!(r.verdict(VerdictKind::NoWeakRational).is_none());
        }
    }

    #[test]
    fn zplus_subset_of_z() {
        let l = exact(&[2, -3, 1]);
        let zp = ks(&enumerate_resonances(&l, 6, DEFAULT_TOL, Lattice::Zplus).unwrap());
        let z = ks(&enumerate_resonances(&l, 6, DEFAULT_TOL, Lattice::Z).unwrap());
        assert!(zp.iter().all(|k| z.contains(k)));
    }
}
