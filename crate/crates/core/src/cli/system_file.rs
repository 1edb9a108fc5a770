//! JSON system files.
//!
//! ```json
//! {
//!   "dim": 1,
//!   "noise_dim": 1,
//!   "var_names": ["x"],
//!   "drift": [[{"c": ["1/1", "0/1"], "e": [1]}]],
//!   "diffusion": [[[{"c": ["1/1", "0/1"], "e": [1]}]]],
//!   "candidates": {"inverse": [{"c": ["1/1", "0/1"], "e": [-1]}]},
//!   "x0": ["1"]
//! }
//! ```
//!
//! `drift` lists one component per coordinate and `diffusion` one vector
//! field per noise. A component may be a list of terms, a single term object,
//! or a polynomial in text form such as `"x1*x2 - 1/2*x3"`. A coefficient
//! `c` is `[re, im]` or a single real part, written as exact `p/q` strings.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::algebra::crational::rat_to_pq;
use crate::algebra::{default_names, parse_poly, parse_rational, CRational, ExpVec, LaurentPoly, VField};
use crate::error::{Error, Result};
use crate::ito::SdeSystem;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum CoeffSpec {
    Pair(Vec<String>),
    Real(String),
    /// Present only to produce a helpful error for bare JSON numbers.
    Number(serde_json::Number),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub c: CoeffSpec,
    pub e: Vec<i64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ComponentSpec {
    Terms(Vec<TermSpec>),
    Term(TermSpec),
    Text(String),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpecFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var_names: Option<Vec<String>>,
    pub drift: Vec<ComponentSpec>,
    #[serde(default)]
    pub diffusion: Vec<Vec<ComponentSpec>>,
    /// Named candidate integrals used by `check-*`, `analyze` and `simulate`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub candidates: BTreeMap<String, ComponentSpec>,
    /// Default initial point for simulation, as exact rationals.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<String>>,
}

/// A parsed system file.
#[derive(Clone, Debug)]
pub struct LoadedSystem {
    pub system: SdeSystem,
    pub candidates: Vec<(String, LaurentPoly)>,
    pub x0: Option<Vec<CRational>>,
}

fn coeff(c: &CoeffSpec) -> Result<CRational> {
    match c {
        CoeffSpec::Real(s) => Ok(CRational::real(parse_rational(s)?)),
        CoeffSpec::Pair(v) => match v.as_slice() {
            [re] => Ok(CRational::real(parse_rational(re)?)),
            [re, im] => Ok(CRational::new(parse_rational(re)?, parse_rational(im)?)),
            _ => Err(Error::Parse(format!("coefficient must be [re, im], got {} entries", v.len()))),
        },
        CoeffSpec::Number(n) => Err(Error::Parse(format!(
            "coefficient {n} is a JSON number; write it as an exact rational string such as \"1/2\""
        ))),
    }
}

pub fn component(spec: &ComponentSpec, names: &[String], location: &str) -> Result<LaurentPoly> {
    let n = names.len();
    let terms: Vec<&TermSpec> = match spec {
        ComponentSpec::Text(s) => return parse_poly(s, names).map_err(|e| Error::Parse(format!("{location}: {e}"))),
        ComponentSpec::Term(t) => vec![t],
        ComponentSpec::Terms(ts) => ts.iter().collect(),
    };
    let mut seen = BTreeSet::new();
    let mut out = LaurentPoly::zero(n);
    for t in terms {
        if t.e.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: t.e.len() });
        }
        if !seen.insert(t.e.clone()) {
            return Err(Error::DuplicateTerm { exps: t.e.clone(), location: location.to_string() });
        }
        out.add_term(ExpVec(t.e.clone()), &coeff(&t.c)?);
    }
    Ok(out)
}

impl SystemSpecFile {
    pub fn into_system(self) -> Result<LoadedSystem> {
        let n = self.dim;
        let names = self.var_names.clone().unwrap_or_else(|| default_names(n));
        if names.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: names.len() });
        }
        if self.drift.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.drift.len() });
        }
        if let Some(m) = self.noise_dim {
            if m != self.diffusion.len() {
                return Err(Error::DimensionMismatch { expected: m, found: self.diffusion.len() });
            }
        }
        let drift = self
            .drift
            .iter()
            .enumerate()
            .map(|(i, c)| component(c, &names, &format!("drift[{}]", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let mut diffusions = Vec::new();
        for (k, field) in self.diffusion.iter().enumerate() {
            if field.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: field.len() });
            }
            let comps = field
                .iter()
                .enumerate()
                .map(|(i, c)| component(c, &names, &format!("diffusion[{}][{}]", k + 1, i + 1)))
                .collect::<Result<Vec<_>>>()?;
            diffusions.push(VField::new(comps));
        }
        let candidates = self
            .candidates
            .iter()
            .map(|(k, c)| Ok((k.clone(), component(c, &names, &format!("candidates.{k}"))?)))
            .collect::<Result<Vec<_>>>()?;
        let x0 = match &self.x0 {
            None => None,
            Some(v) if v.len() != n => return Err(Error::DimensionMismatch { expected: n, found: v.len() }),
            Some(v) => Some(v.iter().map(|s| parse_rational(s).map(CRational::real)).collect::<Result<Vec<_>>>()?),
        };
        let system = SdeSystem::new(VField::new(drift), diffusions, Some(names))?;
        Ok(LoadedSystem { system, candidates, x0 })
    }

    /// Canonical form: every component a term list in graded-lex order.
    pub fn from_system(sys: &SdeSystem, candidates: &[(String, LaurentPoly)], x0: Option<&[CRational]>) -> Self {
        SystemSpecFile {
            dim: sys.dim(),
            noise_dim: Some(sys.noise_dim()),
            var_names: Some(sys.var_names.clone()),
            drift: sys.drift.components.iter().map(terms_of).collect(),
            diffusion: sys.diffusions.iter().map(|g| g.components.iter().map(terms_of).collect()).collect(),
            candidates: candidates.iter().map(|(k, p)| (k.clone(), terms_of(p))).collect(),
            x0: x0.map(|v| v.iter().map(|z| rat_to_pq(&z.re)).collect()),
        }
    }
}

pub fn terms_of(p: &LaurentPoly) -> ComponentSpec {
    ComponentSpec::Terms(
        p.terms()
            .map(|(e, c)| TermSpec { c: CoeffSpec::Pair(vec![rat_to_pq(&c.re), rat_to_pq(&c.im)]), e: e.0.clone() })
            .collect(),
    )
}

pub fn parse_system_str(text: &str) -> Result<LoadedSystem> {
    let spec: SystemSpecFile = serde_json::from_str(text)?;
    spec.into_system()
}

pub fn parse_system(path: &Path) -> Result<LoadedSystem> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_system_str(&text)
}

pub fn serialize_system(sys: &LoadedSystem) -> String {
    let spec = SystemSpecFile::from_system(&sys.system, &sys.candidates, sys.x0.as_deref());
    serde_json::to_string_pretty(&spec).expect("serializable")
}

/// A candidate given on the command line: a path to a file holding either a
/// JSON component or polynomial text, or the polynomial text itself.
pub fn parse_candidate(arg: &str, names: &[String]) -> Result<LaurentPoly> {
    let path = Path::new(arg);
    let text = if path.is_file() { std::fs::read_to_string(path)? } else { arg.to_string() };
    let trimmed = text.trim();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        let spec: ComponentSpec = serde_json::from_str(trimmed)?;
        return component(&spec, names, "candidate");
    }
    parse_poly(trimmed, names)
}

/// Initial point from a comma-separated list; exact rationals or decimals
/// are both accepted since the simulation runs in floating point.
pub fn parse_point(arg: &str) -> Result<Vec<Complex64>> {
    arg.split(',')
        .map(|s| {
            let s = s.trim();
            if let Ok(r) = parse_rational(s) {
                return Ok(Complex64::new(r.to_f64().unwrap_or(f64::NAN), 0.0));
            }
            s.parse::<f64>()
                .map(|x| Complex64::new(x, 0.0))
                .map_err(|_| Error::Parse(format!("`{s}` is not a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const GBM: &str = r#"{"dim": 1, "drift": [{"c": ["1/1", "0/1"], "e": [1]}],
        "diffusion": [[{"c": ["1/1", "0/1"], "e": [1]}]]}"#;

    #[test]
    fn elided_gbm_form() {
        let s = parse_system_str(GBM).unwrap();
        assert_eq!(s.system, crate::fixtures::gbm(CRational::one(), CRational::one()).with_names(&["x1"]));
    }

    #[test]
    fn round_trip_is_canonical() {
        let s = parse_system_str(GBM).unwrap();
        let text = serialize_system(&s);
        let again = parse_system_str(&text).unwrap();
        assert_eq!(again.system, s.system);
        assert_eq!(serialize_system(&again), text);
    }

    #[test]
    fn errors() {
        let bad_dim = r#"{"dim": 2, "drift": [[]]}"#;
        assert!(matches!(parse_system_str(bad_dim), Err(Error::DimensionMismatch { .. })));
        let decimal = r#"{"dim": 1, "drift": [[{"c": "0.5", "e": [1]}]]}"#;
        let e = parse_system_str(decimal).unwrap_err().to_string();
        assert!(e.contains("p/q"), "{e}");
        let number = r#"{"dim": 1, "drift": [[{"c": 0.5, "e": [1]}]]}"#;
        assert!(parse_system_str(number).unwrap_err().to_string().contains("1/2"));
        let dup = r#"{"dim": 1, "drift": [[{"c": "1", "e": [1]}, {"c": "2", "e": [1]}]]}"#;
        assert!(matches!(parse_system_str(dup), Err(Error::DuplicateTerm { .. })));
        let noise = r#"{"dim": 1, "noise_dim": 2, "drift": ["x1"], "diffusion": [["x1"]]}"#;
        assert!(matches!(parse_system_str(noise), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn text_components_and_candidates() {
        let src = r#"{"dim": 2, "var_names": ["p", "q"], "drift": ["q", "-p"],
            "candidates": {"H": "p^2 + q^2"}, "x0": ["1", "0"]}"#;
        let s = parse_system_str(src).unwrap();
        assert_eq!(s.system.noise_dim(), 0);
        assert_eq!(s.candidates[0].0, "H");
        assert_eq!(s.system.poly_text(&s.candidates[0].1), "p^2 + q^2");
        assert_eq!(s.x0.unwrap()[0], CRational::one());
    }
}
