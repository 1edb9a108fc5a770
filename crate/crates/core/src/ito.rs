//! Itô generator calculus for `dX = f(X) dt + Σ g_i(X) dB^i`.
//!
//! A non-constant `Φ` is a *strong* first integral iff
//! `⟨∇Φ, f − ½Σ Dg_i·g_i⟩ ≡ 0` and `⟨∇Φ, g_i⟩ ≡ 0` for every `i`, and a
//! *weak* first integral iff `⟨∇Φ, f⟩ + ½Σ g_iᵀ ∇²Φ g_i ≡ 0`. All checks
//! below are exact polynomial identity tests.

use serde::Serialize;

use crate::algebra::{default_names, quadratic_form, CRational, LaurentPoly, VField};
use crate::error::{Error, Result};

/// Polynomial SDE system in Itô form.
#[derive(Clone, Debug, PartialEq)]
pub struct SdeSystem {
    pub drift: VField,
    pub diffusions: Vec<VField>,
    pub var_names: Vec<String>,
}

impl SdeSystem {
    pub fn new(drift: VField, diffusions: Vec<VField>, var_names: Option<Vec<String>>) -> Result<Self> {
        let n = drift.dim();
        for c in &drift.components {
            if c.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.dim() });
            }
        }
        for g in &diffusions {
            if g.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
            }
            for c in &g.components {
                if c.dim() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: c.dim() });
                }
            }
        }
        let var_names = var_names.unwrap_or_else(|| default_names(n));
        if var_names.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: var_names.len() });
        }
        Ok(SdeSystem { drift, diffusions, var_names })
    }

    /// Deterministic system `dx = f dt`.
    pub fn ode(drift: VField) -> Result<Self> {
        Self::new(drift, Vec::new(), None)
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    pub fn noise_dim(&self) -> usize {
        self.diffusions.len()
    }

    pub fn with_names(mut self, names: &[&str]) -> Self {
        assert_eq!(names.len(), self.dim());
        self.var_names = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn poly_text(&self, p: &LaurentPoly) -> String {
        p.to_text(&self.var_names)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strong,
    Weak,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Strong => "strong",
            Mode::Weak => "weak",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub name: String,
    pub poly: LaurentPoly,
}

/// Outcome of a strong or weak check. `holds` iff every residual is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralVerdict {
    pub mode: Mode,
    pub holds: bool,
    pub residuals: Vec<Residual>,
}

impl IntegralVerdict {
    fn from_residuals(mode: Mode, residuals: Vec<Residual>) -> Self {
        let holds = residuals.iter().all(|r| r.poly.is_zero());
        IntegralVerdict { mode, holds, residuals }
    }

    /// Residuals that are not identically zero.
    pub fn nonvanishing(&self) -> impl Iterator<Item = &Residual> {
        self.residuals.iter().filter(|r| !r.poly.is_zero())
    }

    pub fn residual(&self, name: &str) -> Option<&LaurentPoly> {
        self.residuals.iter().find(|r| r.name == name).map(|r| &r.poly)
    }
}

/// `Σ Dg_i·g_i`.
pub fn ito_correction(sys: &SdeSystem) -> VField {
    sys.diffusions
        .iter()
        .fold(VField::zero(sys.dim()), |acc, g| acc.add(&g.directional(g)))
}

/// Drift of the equivalent Stratonovich system, `f − ½ Σ Dg_i·g_i`.
pub fn stratonovich_drift(sys: &SdeSystem) -> VField {
    if sys.diffusions.is_empty() {
        return sys.drift.clone();
    }
    sys.drift.sub(&ito_correction(sys).scale(&CRational::ratio(1, 2)))
}

fn check_candidate(sys: &SdeSystem, phi: &LaurentPoly) -> Result<()> {
    if phi.dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: phi.dim() });
    }
    Ok(())
}

/// `LΦ = ⟨∇Φ, f⟩ + ½ Σ g_iᵀ ∇²Φ g_i`.
pub fn weak_generator_apply(sys: &SdeSystem, phi: &LaurentPoly) -> Result<LaurentPoly> {
    check_candidate(sys, phi)?;
    let first = phi.gradient().dot(&sys.drift);
    if sys.diffusions.is_empty() {
        return Ok(first);
    }
    let hess = phi.hessian();
    let second = sys
        .diffusions
        .iter()
        .fold(LaurentPoly::zero(sys.dim()), |acc, g| &acc + &quadratic_form(&hess, g));
    Ok(&first + &second.scale(&CRational::ratio(1, 2)))
}

pub fn check_strong(sys: &SdeSystem, phi: &LaurentPoly) -> Result<IntegralVerdict> {
    check_candidate(sys, phi)?;
    if phi.is_constant() {
        return Err(Error::ConstantCandidate);
    }
    let grad = phi.gradient();
    let mut residuals = vec![Residual { name: "drift".into(), poly: grad.dot(&stratonovich_drift(sys)) }];
    for (i, g) in sys.diffusions.iter().enumerate() {
        residuals.push(Residual { name: format!("diffusion[{}]", i + 1), poly: grad.dot(g) });
    }
    Ok(IntegralVerdict::from_residuals(Mode::Strong, residuals))
}

pub fn check_weak(sys: &SdeSystem, phi: &LaurentPoly) -> Result<IntegralVerdict> {
    check_candidate(sys, phi)?;
    if phi.is_constant() {
        return Err(Error::ConstantCandidate);
    }
    let residuals = vec![Residual { name: "generator".into(), poly: weak_generator_apply(sys, phi)? }];
    Ok(IntegralVerdict::from_residuals(Mode::Weak, residuals))
}

pub fn check(sys: &SdeSystem, phi: &LaurentPoly, mode: Mode) -> Result<IntegralVerdict> {
    match mode {
        Mode::Strong => check_strong(sys, phi),
        Mode::Weak => check_weak(sys, phi),
    }
}

/// `⟨∇⟨∇Φ,g⟩, g⟩ − gᵀ∇²Φ g − ⟨∇Φ, Dg·g⟩`. This is the chain rule applied to
/// `⟨∇Φ, g⟩` along `g`, so the result is identically zero for every input;
/// it is exposed as an executable check of the calculus.
pub fn lemma_identity_residual(phi: &LaurentPoly, g: &VField) -> Result<LaurentPoly> {
    if g.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), found: g.dim() });
    }
    let grad = phi.gradient();
    let along = grad.dot(g);
    let lhs = along.gradient().dot(g);
    let hess_term = quadratic_form(&phi.hessian(), g);
    let transport = grad.dot(&g.directional(g));
    Ok(&(&lhs - &hess_term) - &transport)
}
