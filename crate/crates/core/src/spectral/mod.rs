//! Linearization at the origin: exact Jacobians, the Itô-corrected matrix
//! `A0 = Df(0) − ½ Σ Dg_i(0)²`, characteristic polynomials, eigenvalues and
//! the simultaneous-diagonalizability hypothesis.

pub mod numeric;
pub mod roots;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{CMatrix, CRational, ExpVec, UniPoly, VField};
use crate::error::{Error, Result};
use crate::ito::SdeSystem;

pub use roots::{poly_roots, Root};

/// Eigenvalues of one matrix together with its exact characteristic polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenSet {
    /// Monic `det(xI − A)`.
    #[serde(serialize_with = "ser_upoly")]
    pub char_poly: UniPoly,
    pub values: Vec<Root>,
}

fn ser_upoly<S: serde::Serializer>(p: &UniPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

impl EigenSet {
    pub fn values_c64(&self) -> Vec<Complex64> {
        self.values.iter().map(|r| r.value).collect()
    }

    pub fn all_exact(&self) -> bool {
        self.values.iter().all(Root::is_exact)
    }

    pub fn all_zero(&self) -> bool {
        self.values.iter().all(Root::is_exact_zero)
    }

    /// `det(A − xI) = (−1)ⁿ det(xI − A)`.
    pub fn det_a_minus_x(&self) -> UniPoly {
        if self.char_poly.degree() % 2 == 1 {
            self.char_poly.scale(&CRational::from_int(-1))
        } else {
            self.char_poly.clone()
        }
    }

    pub fn is_simple(&self) -> bool {
        self.char_poly.is_squarefree()
    }
}

/// Eigenvalues as roots of the exact characteristic polynomial.
pub fn eigenvalues(m: &CMatrix) -> Result<EigenSet> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let char_poly = m.char_poly();
    let values = poly_roots(&char_poly)?;
    Ok(EigenSet { char_poly, values })
}

fn check_defined(v: &VField, label: &str) -> Result<()> {
    for c in &v.components {
        if !c.is_polynomial() {
            return Err(Error::SingularAtOrigin { field: label.to_string() });
        }
    }
    Ok(())
}

/// Exact `Dv(0)`: entry `(i, j)` is the coefficient of `x_j` in `v_i`.
pub fn jacobian_at_origin(v: &VField) -> Result<CMatrix> {
    check_defined(v, "vector field")?;
    let n = v.dim();
    let rows = v
        .components
        .iter()
        .map(|c| (0..n).map(|j| c.coeff(&ExpVec::unit(n, j))).collect())
        .collect();
    Ok(CMatrix::from_rows(rows))
}

pub fn value_at_origin(v: &VField) -> Vec<CRational> {
    v.components.iter().map(|c| c.constant_term()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralData {
    /// `Df(0)`.
    pub a_f: CMatrix,
    /// `Dg_i(0)`.
    pub a_g: Vec<CMatrix>,
    /// `Df(0) − ½ Σ Dg_i(0)²`.
    pub a0: CMatrix,
    pub mu0: EigenSet,
    pub mu: Vec<EigenSet>,
    pub lambda: EigenSet,
    /// `g_i(0) = 0`.
    pub diffusion_vanishes: Vec<bool>,
    /// `g_i(x) = O(|x|²)`.
    pub diffusion_higher_order: Vec<bool>,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.a_f.nrows()
    }

    pub fn all_diffusions_vanish(&self) -> bool {
        self.diffusion_vanishes.iter().all(|&b| b)
    }

    pub fn all_diffusions_higher_order(&self) -> bool {
        self.diffusion_higher_order.iter().all(|&b| b)
    }

    /// `("Df(0)", A_f), ("Dg_1(0)", A_g1), …`.
    pub fn labeled_matrices(&self) -> Vec<(String, &CMatrix)> {
        std::iter::once(("Df(0)".to_string(), &self.a_f))
            .chain(self.a_g.iter().enumerate().map(|(i, m)| (format!("Dg_{}(0)", i + 1), m)))
            .collect()
    }
}

/// Linear data at the origin. Requires the drift to be polynomial at 0 with
/// `f(0) = 0`; diffusion fields must also be defined at 0.
pub fn linearization(sys: &SdeSystem) -> Result<SpectralData> {
    check_defined(&sys.drift, "drift")?;
    for (i, g) in sys.diffusions.iter().enumerate() {
        check_defined(g, &format!("diffusion {}", i + 1))?;
    }
    if let Some(component) = value_at_origin(&sys.drift).iter().position(|c| !c.is_zero()) {
        return Err(Error::NotEquilibrium { component });
    }
    let a_f = jacobian_at_origin(&sys.drift)?;
    let a_g = sys.diffusions.iter().map(jacobian_at_origin).collect::<Result<Vec<_>>>()?;
    let half = CRational::ratio(1, 2);
    let a0 = a_g.iter().fold(a_f.clone(), |acc, g| acc.sub(&g.mul(g).scale(&half)));
    let diffusion_vanishes = sys.diffusions.iter().map(|g| value_at_origin(g).iter().all(CRational::is_zero)).collect();
    let diffusion_higher_order = sys
        .diffusions
        .iter()
        .map(|g| g.components.iter().all(|c| c.terms().all(|(e, _)| e.total_degree() >= 2)))
        .collect();
    Ok(SpectralData {
        mu0: eigenvalues(&a_f)?,
        mu: a_g.iter().map(eigenvalues).collect::<Result<Vec<_>>>()?,
        lambda: eigenvalues(&a0)?,
        a_f,
        a_g,
        a0,
        diffusion_vanishes,
        diffusion_higher_order,
    })
}

/// Exact diagonalizability over ℂ: the squarefree part of the
/// characteristic polynomial must annihilate the matrix.
pub fn is_diagonalizable(m: &CMatrix) -> bool {
    let sf = m.char_poly().squarefree_part();
    m.eval_poly(&sf).is_zero()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum H1Verdict {
    Holds,
    Fails,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum H1Witness {
    Commutator { left: String, right: String, commutator: CMatrix },
    NotDiagonalizable { matrix: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct H1Status {
    pub verdict: H1Verdict,
    pub witness: Option<H1Witness>,
}

/// Simultaneous diagonalizability of `Df(0), Dg_1(0), …, Dg_m(0)`, decided
/// as "pairwise commuting and each diagonalizable". Both parts are exact.
pub fn h1_check(spec: &SpectralData) -> H1Status {
    let mats = spec.labeled_matrices();
    for (i, (li, mi)) in mats.iter().enumerate() {
        for (lj, mj) in &mats[i + 1..] {
            let c = mi.commutator(mj);
            if !c.is_zero() {
                return H1Status {
                    verdict: H1Verdict::Fails,
                    witness: Some(H1Witness::Commutator { left: li.clone(), right: lj.clone(), commutator: c }),
                };
            }
        }
    }
    for (label, m) in &mats {
        if !is_diagonalizable(m) {
            return H1Status { verdict: H1Verdict::Fails, witness: Some(H1Witness::NotDiagonalizable { matrix: label.clone() }) };
        }
    }
    H1Status { verdict: H1Verdict::Holds, witness: None }
}

/// Eigenvalues of `Df(0)`, `Dg_i(0)` and `A0` listed along one common
/// eigenbasis, so that index `j` refers to the same eigenvector everywhere.
#[derive(Clone, Debug, Serialize)]
pub struct PairedSpectrum {
    pub mu0: Vec<Root>,
    pub mu: Vec<Vec<Root>>,
    /// `λ_j = μ⁰_j − ½ Σ_i (μ^i_j)²`.
    pub lambda: Vec<Root>,
}

const COMBINATION_WEIGHTS: [(i64, i64); 8] = [(7, 13), (11, 17), (5, 19), (3, 23), (13, 29), (17, 31), (19, 37), (23, 41)];

fn snap(value: Complex64, set: &EigenSet) -> Root {
    let scale = 1.0 + value.norm();
    set.values
        .iter()
        .filter_map(|r| r.exact.as_ref().map(|e| (e, (r.value - value).norm())))
        .filter(|(_, d)| *d <= 1e-7 * scale)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(e, _)| Root { value: e.to_c64(), exact: Some(e.clone()) })
        .unwrap_or(Root { value, exact: None })
}

fn lambda_from(mu0: &Root, mus: &[&Root]) -> Root {
    let half = CRational::ratio(1, 2);
    let exact = mu0.exact.clone().and_then(|start| {
        mus.iter().try_fold(start, |acc, m| {
            let e = m.exact.as_ref()?;
            Some(&acc - &(&(e * e) * &half))
        })
    });
    let value = mus.iter().fold(mu0.value, |acc, m| acc - 0.5 * m.value * m.value);
    match exact {
        Some(e) => Root { value: e.to_c64(), exact: Some(e) },
        None => Root { value, exact: None },
    }
}

/// Common-eigenbasis spectra. Requires (H1); returns `None` when it fails.
pub fn paired_spectrum(spec: &SpectralData) -> Result<Option<PairedSpectrum>> {
    if h1_check(spec).verdict != H1Verdict::Holds {
        return Ok(None);
    }
    let n = spec.dim();
    let m = spec.a_g.len();
    if spec.a_g.iter().all(CMatrix::is_zero) {
        let zero = Root { value: Complex64::new(0.0, 0.0), exact: Some(CRational::zero()) };
        let mu0 = spec.mu0.values.clone();
        let lambda = mu0.clone();
        return Ok(Some(PairedSpectrum { mu0, mu: vec![vec![zero; n]; m], lambda }));
    }
    for attempt in 0..3 {
        let mut comb = spec.a_f.clone();
        for (i, g) in spec.a_g.iter().enumerate() {
            let (p, q) = COMBINATION_WEIGHTS[(i + attempt * 3) % COMBINATION_WEIGHTS.len()];
            comb = comb.add(&g.scale(&CRational::ratio(p, q)));
        }
        let eig = eigenvalues(&comb)?;
        let Some(t) = common_basis(&comb.to_c64(), &eig) else { continue };
        let Some(t_inv) = t.clone().try_inverse() else { continue };
        let diag_of = |a: &CMatrix| -> Option<Vec<Complex64>> {
            let d = &t_inv * a.to_c64() * &t;
            let scale = 1.0 + d.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let off = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j);
            let worst = off.map(|(i, j)| d[(i, j)].norm()).fold(0.0, f64::max);
            (worst <= 1e-8 * scale).then(|| (0..n).map(|i| d[(i, i)]).collect())
        };
        let Some(d0) = diag_of(&spec.a_f) else { continue };
        let Some(dg) = spec.a_g.iter().map(diag_of).collect::<Option<Vec<_>>>() else { continue };
        let mu0: Vec<Root> = d0.into_iter().map(|z| snap(z, &spec.mu0)).collect();
        let mu: Vec<Vec<Root>> = dg
            .into_iter()
            .zip(&spec.mu)
            .map(|(d, set)| d.into_iter().map(|z| snap(z, set)).collect())
            .collect();
        let lambda = (0..n)
            .map(|j| {
                let col: Vec<&Root> = mu.iter().map(|v| &v[j]).collect();
                lambda_from(&mu0[j], &col)
            })
            .collect();
        return Ok(Some(PairedSpectrum { mu0, mu, lambda }));
    }
    Err(Error::Numeric("could not build a common eigenbasis for Df(0), Dg_i(0)".into()))
}

/// Columns spanning each eigenspace of a diagonalizable matrix.
fn common_basis(c: &DMatrix<Complex64>, eig: &EigenSet) -> Option<DMatrix<Complex64>> {
    let n = c.nrows();
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for r in &eig.values {
        match groups.iter_mut().find(|(v, _)| (*v - r.value).norm() <= 1e-9 * (1.0 + v.norm())) {
            Some(g) => g.1 += 1,
            None => groups.push((r.value, 1)),
        }
    }
    let mut cols = Vec::with_capacity(n);
    for (v, k) in groups {
        let shifted = c - DMatrix::from_diagonal_element(n, n, v);
        cols.extend(numeric::null_vectors(&shifted, k));
    }
    (cols.len() == n).then(|| DMatrix::from_columns(&cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, ZeroSumDrift};

    #[test]
    fn rotation_eigenvalues() {
        let e = eigenvalues(&CMatrix::from_ints(&[&[0, -1], &[1, 0]])).unwrap();
        let ex: Vec<_> = e.values.iter().map(|r| r.exact.clone().unwrap()).collect();
        assert!(ex.contains(&CRational::i()) && ex.contains(&-CRational::i()));
    }

    #[test]
    fn diagonal_eigenvalues_exact() {
        let d = [CRational::ratio(1, 3), CRational::from_int(-2), CRational::ratio(7, 5)];
        let e = eigenvalues(&CMatrix::diagonal(&d)).unwrap();
        assert!(e.all_exact());
        for v in &d {
            assert!(e.values.iter().any(|r| r.exact.as_ref() == Some(v)));
        }
    }

    #[test]
    fn not_equilibrium_rejected() {
        let sys = SdeSystem::ode(VField::new(vec![crate::algebra::LaurentPoly::one(1)])).unwrap();
        assert!(matches!(linearization(&sys), Err(Error::NotEquilibrium { component: 0 })));
        let sys = fixtures::two_body_int(1, 1, 1, 1);
        assert!(matches!(linearization(&sys), Err(Error::SingularAtOrigin { .. })));
    }

    #[test]
    fn h1_examples() {
        let mk = |af: CMatrix, ag: CMatrix| {
            let sys = SdeSystem::new(
                fixtures::linear_ode(&af).drift,
                vec![fixtures::linear_ode(&ag).drift],
                None,
            )
            .unwrap();
            h1_check(&linearization(&sys).unwrap())
        };
        let st = mk(CMatrix::from_ints(&[&[1, 0], &[0, 2]]), CMatrix::zeros(2, 2));
        assert_eq!(st.verdict, H1Verdict::Holds);
        let st = mk(CMatrix::from_ints(&[&[1, 0], &[0, 1]]), CMatrix::from_ints(&[&[0, 1], &[0, 0]]));
        assert_eq!(st.verdict, H1Verdict::Fails);
        assert_eq!(st.witness, Some(H1Witness::NotDiagonalizable { matrix: "Dg_1(0)".into() }));
        let st = mk(CMatrix::from_ints(&[&[1, 0], &[0, 2]]), CMatrix::from_ints(&[&[0, 1], &[1, 0]]));
        assert_eq!(st.verdict, H1Verdict::Fails);
        match st.witness {
            Some(H1Witness::Commutator { commutator, .. }) => {
                assert_eq!(commutator, CMatrix::from_ints(&[&[0, -1], &[1, 0]]))
            }
            other => panic!("unexpected witness {other:?}"),
        }
        // nilpotent with diagonal drift commutes only if drift is scalar; here it is
        let st = mk(CMatrix::from_ints(&[&[3, 0], &[0, 3]]), CMatrix::from_ints(&[&[0, 1], &[0, 0]]));
        assert_eq!(st.witness, Some(H1Witness::NotDiagonalizable { matrix: "Dg_1(0)".into() }));
    }

    #[test]
    fn paired_spectrum_of_commuting_pair() {
        // Df(0) = [[1,1],[1,1]] (eigs 0, 2), Dg(0) = [[2,1],[1,2]] (eigs 1, 3) share eigenvectors
        let af = CMatrix::from_ints(&[&[1, 1], &[1, 1]]);
        let ag = CMatrix::from_ints(&[&[2, 1], &[1, 2]]);
        let sys = SdeSystem::new(fixtures::linear_ode(&af).drift, vec![fixtures::linear_ode(&ag).drift], None).unwrap();
        let spec = linearization(&sys).unwrap();
        let p = paired_spectrum(&spec).unwrap().unwrap();
        let pairs: Vec<(CRational, CRational)> = p
            .mu0
            .iter()
            .zip(&p.mu[0])
            .map(|(a, b)| (a.exact.clone().unwrap(), b.exact.clone().unwrap()))
            .collect();
        // (1,1)/√2 pairs 2 with 3; (1,-1)/√2 pairs 0 with 1
        assert!(pairs.contains(&(CRational::from_int(2), CRational::from_int(3))));
        assert!(pairs.contains(&(CRational::from_int(0), CRational::from_int(1))));
        // λ = μ0 − ½ μ²
        for (j, l) in p.lambda.iter().enumerate() {
            let m0 = p.mu0[j].exact.clone().unwrap();
            let m1 = p.mu[0][j].exact.clone().unwrap();
            assert_eq!(l.exact.clone().unwrap(), &m0 - &(&(&m1 * &m1) * &CRational::ratio(1, 2)));
        }
        // and the λ multiset matches eigenvalues of A0
        for l in &p.lambda {
            assert!(spec.lambda.values.iter().any(|r| r.exact == l.exact));
        }
    }

    #[test]
    fn zero_sum_diffusion_spectrum() {
        let sys = fixtures::zero_sum_system(CRational::from_int(2), CRational::from_int(3), ZeroSumDrift::Verbatim);
        let spec = linearization(&sys).unwrap();
        assert_eq!(spec.a_g[0], CMatrix::from_ints(&[&[1, -2, 0], &[0, 2, -1], &[-1, 0, 1]]));
        assert!(spec.all_diffusions_vanish());
        assert!(!spec.all_diffusions_higher_order());
    }
}
