//! Sparse multivariate Laurent polynomials over ℚ(i).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::crational::CRational;
use crate::error::{Error, Result};

/// Exponent multi-index. Entries may be negative.
///
/// Ordered graded-lexicographically: first by total degree, then
/// lexicographically with the first variable most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExpVec(pub Vec<i64>);

impl ExpVec {
    pub fn zeros(n: usize) -> Self {
        ExpVec(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        ExpVec(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

impl Ord for ExpVec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExpVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<i64>> for ExpVec {
    fn from(v: Vec<i64>) -> Self {
        ExpVec(v)
    }
}

/// Finite sum `Σ c_e x^e` with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<ExpVec, CRational>,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: CRational) -> Self {
        Self::monomial(dim, ExpVec::zeros(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, CRational::one())
    }

    /// The coordinate function `x_i` (0-based axis).
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "axis {i} out of range for dimension {dim}");
        Self::monomial(dim, ExpVec::unit(dim, i), CRational::one())
    }

    pub fn monomial(dim: usize, exps: impl Into<ExpVec>, c: CRational) -> Self {
        let exps = exps.into();
        assert_eq!(exps.len(), dim, "exponent vector length must equal dimension");
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// Sums the given terms; repeated exponent vectors are merged.
    pub fn from_terms<I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExpVec, CRational)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            assert_eq!(e.len(), dim, "exponent vector length must equal dimension");
            p.add_term(e, &c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the zero polynomial and for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(ExpVec::is_zero)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExpVec, &CRational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &ExpVec) -> CRational {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> CRational {
        self.coeff(&ExpVec::zeros(self.dim))
    }

    /// Largest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&ExpVec, &CRational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, e: ExpVec, c: &CRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    fn check_dim(&self, other: &LaurentPoly) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), &-c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        self.check_dim(other)?;
        let mut out = LaurentPoly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CRational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(self.dim);
        }
        LaurentPoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one(self.dim);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `∂p/∂x_axis` by the power rule (negative exponents included).
    pub fn differentiate(&self, axis: usize) -> LaurentPoly {
        assert!(axis < self.dim, "axis {axis} out of range for dimension {}", self.dim);
        let mut out = LaurentPoly::zero(self.dim);
        for (e, c) in &self.terms {
            let k = e.0[axis];
            if k == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne.0[axis] -= 1;
            out.add_term(ne, &c.scale_int(k));
        }
        out
    }

    pub fn gradient(&self) -> VField {
        VField::new((0..self.dim).map(|i| self.differentiate(i)).collect())
    }

    /// Symmetric matrix of second partials.
    pub fn hessian(&self) -> Vec<Vec<LaurentPoly>> {
        let grad = self.gradient();
        let n = self.dim;
        let mut h = vec![vec![LaurentPoly::zero(n); n]; n];
        for i in 0..n {
            for j in i..n {
                let d = grad.components[i].differentiate(j);
                h[j][i] = d.clone();
                h[i][j] = d;
            }
        }
        h
    }

    /// Whether any term carries a negative power of `x_axis`.
    pub fn has_pole_on(&self, axis: usize) -> bool {
        self.terms.keys().any(|e| e.0[axis] < 0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.0.iter().all(|&k| k >= 0))
    }

    /// Smallest total degree among the terms (`None` for zero).
    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().map(ExpVec::total_degree).min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().map(ExpVec::total_degree).max()
    }

    /// Floating evaluation.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: point.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = c.to_c64();
            for (axis, (&k, x)) in e.0.iter().zip(point).enumerate() {
                if k < 0 && *x == Complex64::new(0.0, 0.0) {
                    return Err(Error::Pole { axis });
                }
                if k != 0 {
                    t *= x.powi(k as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact evaluation at a complex-rational point.
    pub fn evaluate_exact(&self, point: &[CRational]) -> Result<CRational> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: point.len() });
        }
        let mut acc = CRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (axis, (&k, x)) in e.0.iter().zip(point).enumerate() {
                if k != 0 {
                    t = &t * &x.pow(k).ok_or(Error::Pole { axis })?;
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Canonical text using the supplied variable names.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono = monomial_text(e, names);
            let term = match (mono.is_empty(), c) {
                (true, _) => c.to_string(),
                (false, c) if c.is_one() => mono,
                (false, c) if (-c).is_one() => format!("-{mono}"),
                (false, c) => format!("{c}*{mono}"),
            };
            if idx == 0 {
                out.push_str(&term);
            } else if let Some(rest) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        out
    }
}

fn monomial_text(e: &ExpVec, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.0.iter().enumerate() {
        let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
        match k {
            0 => {}
            1 => parts.push(name),
            _ => parts.push(format!("{name}^{k}")),
        }
    }
    parts.join("*")
}

/// Default variable names `x1..xn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(&default_names(self.dim)))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[{}]({self})", self.dim)
    }
}

macro_rules! poly_op {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> std::ops::$tr<&'a LaurentPoly> for &'a LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, o: &LaurentPoly) -> LaurentPoly {
                self.$checked(o).expect("polynomial dimension mismatch")
            }
        }
        impl std::ops::$tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, o: LaurentPoly) -> LaurentPoly {
                (&self).$m(&o)
            }
        }
    };
}
poly_op!(Add, add, checked_add);
poly_op!(Sub, sub, checked_sub);
poly_op!(Mul, mul, checked_mul);

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&CRational::from_int(-1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary arithmetic; scaling is [`LaurentPoly::scale`].
pub fn poly_arith(a: &LaurentPoly, b: &LaurentPoly, op: ArithOp) -> Result<LaurentPoly> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
    }
}

/// A polynomial vector field `x ↦ (p_1(x), …, p_n(x))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VField {
    pub components: Vec<LaurentPoly>,
}

impl VField {
    pub fn new(components: Vec<LaurentPoly>) -> Self {
        if let Some(first) = components.first() {
            let n = first.dim();
            assert!(components.iter().all(|c| c.dim() == n), "vector field components must share a dimension");
        }
        VField { components }
    }

    pub fn zero(dim: usize) -> Self {
        VField { components: vec![LaurentPoly::zero(dim); dim] }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(LaurentPoly::is_zero)
    }

    /// Row `i` is the gradient of component `i`.
    pub fn jacobian(&self) -> Vec<Vec<LaurentPoly>> {
        self.components.iter().map(|c| c.gradient().components).collect()
    }

    /// `Σ_k a_k b_k`.
    pub fn dot(&self, other: &VField) -> LaurentPoly {
        let n = self.components.first().map(LaurentPoly::dim).unwrap_or(0);
        self.components
            .iter()
            .zip(&other.components)
            .fold(LaurentPoly::zero(n), |acc, (a, b)| &acc + &(a * b))
    }

    pub fn add(&self, other: &VField) -> VField {
        VField::new(self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &VField) -> VField {
        VField::new(self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &CRational) -> VField {
        VField::new(self.components.iter().map(|p| p.scale(c)).collect())
    }

    /// `(Dv)·w`, the derivative of `self` along `w`.
    pub fn directional(&self, w: &VField) -> VField {
        VField::new(self.components.iter().map(|c| c.gradient().dot(w)).collect())
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Vec<Complex64>> {
        self.components.iter().map(|c| c.evaluate(point)).collect()
    }
}

/// Quadratic form `aᵀ M a` with polynomial entries.
pub fn quadratic_form(m: &[Vec<LaurentPoly>], a: &VField) -> LaurentPoly {
    let n = a.dim();
    let mut acc = LaurentPoly::zero(n);
    for (i, row) in m.iter().enumerate() {
        if a.components[i].is_zero() {
            continue;
        }
        for (j, mij) in row.iter().enumerate() {
            if mij.is_zero() || a.components[j].is_zero() {
                continue;
            }
            acc = &acc + &(&(&a.components[i] * mij) * &a.components[j]);
        }
    }
    acc
}
