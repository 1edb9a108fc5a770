//! Degree-bounded search for first integrals.
//!
//! The strong and weak conditions are linear in `Φ`, so on a finite window of
//! Laurent monomials they become the kernel of an exact matrix. Every
//! returned integral is re-checked against the symbolic conditions.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::sparse::{Echelon, SparseRow};
use crate::algebra::{CMatrix, CRational, ExpVec, LaurentPoly};
use crate::error::{Error, Result};
use crate::ito::{self, Mode, SdeSystem};
use crate::resonance::ResonanceReport;
use crate::spectral::numeric;

/// Largest monomial basis accepted by the search.
pub const MAX_BASIS: usize = 5000;
const SAMPLE_POINTS: usize = 5;
const SAMPLE_TRIES: usize = 100;
const RANK_TOL: f64 = 1e-8;
const SAMPLE_SEED: u64 = 0x1d_e9e4;

/// Ordered (graded-lex ascending) list of monomials.
///
/// For `dmin ≥ 0` the window holds every polynomial monomial with total
/// degree in `[dmin, dmax]`. For `dmin < 0` it holds every Laurent monomial
/// whose individual exponents and total degree all lie in `[dmin, dmax]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    pub dim: usize,
    pub dmin: i64,
    pub dmax: i64,
    pub monomials: Vec<ExpVec>,
}

impl MonomialBasis {
    pub fn new(dim: usize, dmin: i64, dmax: i64) -> Result<Self> {
        if dmin > dmax {
            return Err(Error::InvalidWindow { dmin, dmax });
        }
        let lo = dmin.min(0);
        let width = (dmax - lo + 1) as f64;
        if width.powi(dim as i32) > 1e8 {
            return Err(Error::Config(format!("window [{dmin}, {dmax}] in dimension {dim} is too large")));
        }
        let mut out = Vec::new();
        let mut cur = vec![0i64; dim];
        fill(&mut cur, 0, lo, dmax, dmin, dmax, &mut out);
        if out.len() > MAX_BASIS {
            return Err(Error::Config(format!(
                "window [{dmin}, {dmax}] has {} monomials in dimension {dim}; the limit is {MAX_BASIS}",
                out.len()
            )));
        }
        out.sort();
        Ok(MonomialBasis { dim, dmin, dmax, monomials: out })
    }

    /// Monomials of total degree exactly `r ≥ 0`.
    pub fn homogeneous(dim: usize, r: i64) -> Result<Self> {
        Self::new(dim, r, r)
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn contains_constant(&self) -> bool {
        self.monomials.iter().any(ExpVec::is_zero)
    }

    pub fn without_constant(mut self) -> Self {
        self.monomials.retain(|e| !e.is_zero());
        self
    }
}

fn fill(cur: &mut Vec<i64>, i: usize, lo: i64, hi: i64, tmin: i64, tmax: i64, out: &mut Vec<ExpVec>) {
    let partial: i64 = cur[..i].iter().sum();
    if i == cur.len() {
        if (tmin..=tmax).contains(&partial) {
            out.push(ExpVec(cur.clone()));
        }
        return;
    }
    let rest = (cur.len() - i - 1) as i64;
    for v in lo..=hi {
        // remaining entries can move the total by at most rest·lo .. rest·hi
        let (smin, smax) = (partial + v + rest * lo, partial + v + rest * hi);
        if smax < tmin || smin > tmax {
            continue;
        }
        cur[i] = v;
        fill(cur, i + 1, lo, hi, tmin, tmax, out);
    }
    cur[i] = 0;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    /// `Φ ↦ ⟨∇Φ, f⟩ + ½ Σ g_iᵀ∇²Φ g_i`.
    Weak,
    /// `Φ ↦ ⟨∇Φ, f − ½ Σ Dg_i·g_i⟩`.
    StrongDrift,
    /// `Φ ↦ ⟨∇Φ, g_i⟩` (zero-based `i`).
    StrongDiffusion(usize),
}

/// Exact sparse matrix of a linear operator restricted to a monomial window.
///
/// Rows are output monomials: the basis monomials first, in basis order,
/// then any other monomial reached by the operator, in graded-lex order.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub rows: Vec<ExpVec>,
    pub cols: Vec<ExpVec>,
    /// `columns[j]` maps row index to entry.
    pub columns: Vec<SparseRow>,
}

impl OperatorMatrix {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> CRational {
        self.columns[j].get(&i).cloned().unwrap_or_default()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.nrows(), self.ncols());
        for (j, col) in self.columns.iter().enumerate() {
            for (&i, v) in col {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Row-major sparse rows.
    pub fn row_vectors(&self) -> Vec<SparseRow> {
        let mut rows = vec![SparseRow::new(); self.nrows()];
        for (j, col) in self.columns.iter().enumerate() {
            for (&i, v) in col {
                rows[i].insert(j, v.clone());
            }
        }
        rows
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.ncols());
        for r in self.row_vectors() {
            e.push(r);
        }
        e.rank()
    }
}

fn apply(sys: &SdeSystem, strat: &crate::algebra::VField, kind: OperatorKind, m: &LaurentPoly) -> Result<LaurentPoly> {
    Ok(match kind {
        OperatorKind::Weak => ito::weak_generator_apply(sys, m)?,
        OperatorKind::StrongDrift => m.gradient().dot(strat),
        OperatorKind::StrongDiffusion(i) => {
            let g = sys.diffusions.get(i).ok_or(Error::AxisOutOfRange { axis: i, dim: sys.noise_dim() })?;
            m.gradient().dot(g)
        }
    })
}

pub fn operator_matrix(sys: &SdeSystem, basis: &MonomialBasis, kind: OperatorKind) -> Result<OperatorMatrix> {
    if basis.dim != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: basis.dim });
    }
    let strat = ito::stratonovich_drift(sys);
    let images: Vec<LaurentPoly> = basis
        .monomials
        .par_iter()
        .map(|e| apply(sys, &strat, kind, &LaurentPoly::monomial(sys.dim(), e.clone(), CRational::one())))
        .collect::<Result<_>>()?;
    let mut index: BTreeMap<ExpVec, usize> = basis.monomials.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let extra: BTreeSet<ExpVec> = images.iter().flat_map(|p| p.terms().map(|(e, _)| e.clone())).filter(|e| !index.contains_key(e)).collect();
    let mut rows = basis.monomials.clone();
    for e in extra {
        index.insert(e.clone(), rows.len());
        rows.push(e);
    }
    let columns = images.iter().map(|p| p.terms().map(|(e, c)| (index[e], c.clone())).collect()).collect();
    Ok(OperatorMatrix { rows, cols: basis.monomials.clone(), columns })
}

/// All first integrals in a degree window, as a reduced basis.
#[derive(Clone, Debug)]
pub struct IntegralBasis {
    pub mode: Mode,
    pub dmin: i64,
    pub dmax: i64,
    /// Number of non-constant monomials searched.
    pub monomials: usize,
    /// Exact rank of the stacked operator matrix.
    pub operator_rank: usize,
    /// Leading graded-lex coefficient of each element is 1; no constants.
    pub basis: Vec<LaurentPoly>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralBasisSummary {
    pub mode: Mode,
    pub window: [i64; 2],
    pub monomials: usize,
    pub operator_rank: usize,
    pub basis: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub independence_rank: Option<usize>,
}

impl IntegralBasis {
    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn summary(&self, names: &[String]) -> Result<IntegralBasisSummary> {
        Ok(IntegralBasisSummary {
            mode: self.mode,
            window: [self.dmin, self.dmax],
            monomials: self.monomials,
            operator_rank: self.operator_rank,
            basis: self.basis.iter().map(|p| p.to_text(names)).collect(),
            independence_rank: if self.basis.is_empty() { None } else { Some(independence_rank(&self.basis)?) },
        })
    }
}

/// Exact kernel of the generator (weak) or of the stacked drift and
/// diffusion operators (strong) on the window `[dmin, dmax]`.
pub fn find_first_integrals(sys: &SdeSystem, mode: Mode, dmin: i64, dmax: i64) -> Result<IntegralBasis> {
    let basis = MonomialBasis::new(sys.dim(), dmin, dmax)?.without_constant();
    let kinds: Vec<OperatorKind> = match mode {
        Mode::Weak => vec![OperatorKind::Weak],
        Mode::Strong => std::iter::once(OperatorKind::StrongDrift)
            .chain((0..sys.noise_dim()).map(OperatorKind::StrongDiffusion))
            .collect(),
    };
    let mut ech = Echelon::new(basis.len());
    for kind in kinds {
        let m = operator_matrix(sys, &basis, kind)?;
        for row in m.row_vectors() {
            if ech.rank() == basis.len() {
                break;
            }
            ech.push(row);
        }
    }
    let n = sys.dim();
    let integrals: Vec<LaurentPoly> = ech
        .nullspace()
        .into_iter()
        .map(|v| LaurentPoly::from_terms(n, v.into_iter().map(|(j, c)| (basis.monomials[j].clone(), c))))
        .collect();
    for phi in &integrals {
        if !ito::check(sys, phi, mode)?.holds {
            return Err(Error::Numeric(format!("kernel element {} failed re-verification", sys.poly_text(phi))));
        }
    }
    Ok(IntegralBasis { mode, dmin, dmax, monomials: basis.len(), operator_rank: ech.rank(), basis: integrals })
}

fn sample_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let den = rng.random_range(1..=7) as f64;
            let mut num = 0;
            while num == 0 {
                num = rng.random_range(-14..=14);
            }
            Complex64::new(num as f64 / den, 0.0)
        })
        .collect()
}

/// Generic rank of the Jacobian of `(Φ¹, …, Φˢ)`: the largest numeric rank
/// seen at five pseudo-random rational points. A lower bound on the number
/// of functionally independent elements.
pub fn independence_rank(basis: &[LaurentPoly]) -> Result<usize> {
    let Some(n) = basis.first().map(LaurentPoly::dim) else { return Ok(0) };
    let grads: Vec<_> = basis.iter().map(LaurentPoly::gradient).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut best = 0;
    let mut used = 0;
    let mut tries = 0;
    while used < SAMPLE_POINTS {
        if tries == SAMPLE_TRIES {
            if used == 0 {
                return Err(Error::NoSamplePoint(SAMPLE_TRIES));
            }
            break;
        }
        tries += 1;
        let x = sample_point(&mut rng, n);
        let rows: Option<Vec<Vec<Complex64>>> = grads.iter().map(|g| g.evaluate(&x).ok()).collect();
        let Some(rows) = rows else { continue };
        if rows.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            continue;
        }
        let jac = nalgebra::DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        best = best.max(numeric::numeric_rank(&jac, RANK_TOL));
        used += 1;
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct CountBoundCheck {
    pub independence_rank: usize,
    pub s_min: usize,
    pub bound_certified: bool,
    pub consistent: bool,
}

/// Compares the number of independent strong integrals found with the
/// resonance bound `s_min`.
pub fn count_bound_check(basis: &IntegralBasis, report: &ResonanceReport) -> Result<CountBoundCheck> {
    if basis.mode != Mode::Strong {
        return Err(Error::Config("the count bound applies to strong integrals only".into()));
    }
    let rank = independence_rank(&basis.basis)?;
    let certified = report
        .verdict(crate::resonance::VerdictKind::StrongCountAtMost)
        .is_some_and(|v| v.epistemic_status.is_certified());
    Ok(CountBoundCheck { independence_rank: rank, s_min: report.s_min, bound_certified: certified, consistent: rank <= report.s_min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;
    use crate::fixtures::{self, ZeroSumDrift};
    use crate::resonance::{nonintegrability_report, DEFAULT_TOL};

    fn p(s: &str, n: usize) -> LaurentPoly {
        parse_poly(s, &crate::algebra::default_names(n)).unwrap()
    }

    #[test]
    fn basis_windows() {
        let b = MonomialBasis::new(1, -1, 1).unwrap();
        assert_eq!(b.monomials, vec![ExpVec(vec![-1]), ExpVec(vec![0]), ExpVec(vec![1])]);
        let b = MonomialBasis::new(2, 1, 2).unwrap();
        assert_eq!(b.len(), 5);
        assert!(!b.contains_constant());
        let b = MonomialBasis::new(2, -1, 1).unwrap();
        // entries in [-1,1], total in [-1,1]: 9 minus (1,1) and (-1,-1)
        assert_eq!(b.len(), 7);
        assert!(MonomialBasis::new(2, 2, 1).is_err());
    }

    #[test]
    fn gbm_operator_is_diagonal() {
        let sys = fixtures::gbm(CRational::one(), CRational::one());
        let b = MonomialBasis::new(1, -1, 1).unwrap();
        let m = operator_matrix(&sys, &b, OperatorKind::Weak).unwrap();
        assert_eq!(m.nrows(), 3);
        let d = m.to_dense();
        assert!(d.is_diagonal());
        let diag: Vec<_> = (0..3).map(|i| d.get(i, i).clone()).collect();
        assert_eq!(diag, vec![CRational::zero(), CRational::zero(), CRational::one()]);
    }

    #[test]
    fn zero_system_gives_zero_matrix() {
        let sys = SdeSystem::new(crate::algebra::VField::zero(2), vec![crate::algebra::VField::zero(2)], None).unwrap();
        let b = MonomialBasis::new(2, 0, 3).unwrap();
        for kind in [OperatorKind::Weak, OperatorKind::StrongDrift, OperatorKind::StrongDiffusion(0)] {
            assert!(operator_matrix(&sys, &b, kind).unwrap().to_dense().is_zero());
        }
    }

    #[test]
    fn known_integrals() {
        let b = find_first_integrals(&fixtures::harmonic_oscillator(), Mode::Strong, 1, 2).unwrap();
        assert_eq!(b.basis, vec![p("x1^2 + x2^2", 2)]);
        let gbm = fixtures::gbm(CRational::one(), CRational::one());
        let b = find_first_integrals(&gbm, Mode::Weak, -1, 1).unwrap();
        assert_eq!(b.basis, vec![LaurentPoly::monomial(1, vec![-1], CRational::one())]);
        assert!(find_first_integrals(&gbm, Mode::Strong, -3, 3).unwrap().is_empty());
        let corrected = fixtures::zero_sum_system(CRational::from_int(2), CRational::from_int(3), ZeroSumDrift::Corrected);
        let b = find_first_integrals(&corrected, Mode::Strong, 1, 1).unwrap();
        assert_eq!(b.basis, vec![p("x1 + x2 + x3", 3)]);
        let verbatim = fixtures::zero_sum_system(CRational::from_int(2), CRational::from_int(3), ZeroSumDrift::Verbatim);
        assert!(find_first_integrals(&verbatim, Mode::Strong, 1, 1).unwrap().is_empty());
    }

    #[test]
    fn nullity_matches_rank() {
        let sys = fixtures::lotka_volterra_2();
        let b = find_first_integrals(&sys, Mode::Weak, 1, 4).unwrap();
        assert_eq!(b.len(), b.monomials - b.operator_rank);
        assert!(b.is_empty());
    }

    #[test]
    fn independence() {
        let r = |v: &[&str], n| independence_rank(&v.iter().map(|s| p(s, n)).collect::<Vec<_>>()).unwrap();
        assert_eq!(r(&["x1", "x1^2"], 1), 1);
        assert_eq!(r(&["x1 + x2", "x1 - x2"], 2), 2);
        assert_eq!(r(&["x1*x2", "x1^2 + x2^2", "x1^2*x2^2 + x1^2 + x2^2"], 2), 2);
        assert_eq!(r(&["x1^-1 + x2", "3*x1^-1 + 3*x2"], 2), 1);
    }

    #[test]
    fn count_bound_for_oscillator() {
        let sys = fixtures::harmonic_oscillator();
        let b = find_first_integrals(&sys, Mode::Strong, 1, 4).unwrap();
        let rep = nonintegrability_report(&sys, 10, DEFAULT_TOL).unwrap();
        let c = count_bound_check(&b, &rep).unwrap();
        assert_eq!(c.s_min, 1);
        assert_eq!(c.independence_rank, 1);
        assert!(c.consistent && c.bound_certified);
    }
}
