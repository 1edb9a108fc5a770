//! Parser for the canonical polynomial text form, e.g.
//! `1/2*r^2*w - (1+2i)*x1^-1 + 3`.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! poly   := sign? term (sign term)*
//! term   := factor ('*' factor)*
//! factor := rational 'i'? | 'i' | '(' poly ')' | name ('^' '-'? digits)?
//! ```
//!
//! The bare name `i` is reserved for the imaginary unit.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::crational::CRational;
use super::poly::{ExpVec, LaurentPoly};
use crate::error::{Error, Result};

pub fn parse_poly(src: &str, names: &[String]) -> Result<LaurentPoly> {
    let mut p = Parser { chars: src.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, names, src };
    let out = p.poly()?;
    if p.pos != p.chars.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
    src: &'a str,
}

impl Parser<'_> {
    fn dim(&self) -> usize {
        self.names.len()
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn poly(&mut self) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::zero(self.dim());
        let mut first = true;
        loop {
            let neg = if self.eat('-') {
                true
            } else {
                if !self.eat('+') && !first {
                    break;
                }
                false
            };
            let t = self.term()?;
            acc = if neg { &acc - &t } else { &acc + &t };
            first = false;
            if !matches!(self.peek(), Some('+') | Some('-')) {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LaurentPoly> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().ok()
    }

    fn factor(&mut self) -> Result<LaurentPoly> {
        let n = self.dim();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.poly()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits().expect("digit present");
                let den = if self.eat('/') {
                    self.digits().ok_or_else(|| self.err("expected denominator"))?
                } else {
                    BigInt::from(1)
                };
                if matches!(self.peek(), Some('.') | Some('e') | Some('E')) {
                    return Err(self.err("decimal numbers are not exact; write p/q"));
                }
                if den == BigInt::from(0) {
                    return Err(self.err("zero denominator"));
                }
                let r = BigRational::new(num, den);
                let c = if self.peek() == Some('i') && !self.ident_continues_after_i() {
                    self.pos += 1;
                    CRational::new(BigRational::from_integer(0.into()), r)
                } else {
                    CRational::real(r)
                };
                Ok(LaurentPoly::constant(n, c))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                if name == "i" {
                    return Ok(LaurentPoly::constant(n, CRational::i()));
                }
                let axis = self
                    .names
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}` in `{}`", self.src)))?;
                let mut k: i64 = 1;
                if self.eat('^') {
                    let paren = self.eat('(');
                    let neg = self.eat('-');
                    let d = self.digits().ok_or_else(|| self.err("expected exponent"))?;
                    let d: i64 = d.try_into().map_err(|_| self.err("exponent too large"))?;
                    k = if neg { -d } else { d };
                    if paren && !self.eat(')') {
                        return Err(self.err("expected `)`"));
                    }
                }
                let mut e = ExpVec::zeros(n);
                e.0[axis] = k;
                Ok(LaurentPoly::monomial(n, e, CRational::one()))
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }

    // `2i` is an imaginary literal, but `2in` would be a (malformed) product
    fn ident_continues_after_i(&self) -> bool {
        matches!(self.chars.get(self.pos + 1), Some(c) if c.is_alphanumeric() || *c == '_')
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::default_names;

    #[test]
    fn parses_canonical_output() {
        let names = vec!["r".to_string(), "w".to_string()];
        let s = "1/2*r^2*w + (1-2i) - 1/2*r^-1";
        let p = parse_poly(s, &names).unwrap();
        assert_eq!(p.to_text(&names), s);
    }

    #[test]
    fn imaginary_literals() {
        let names = default_names(1);
        let p = parse_poly("3/4i*x1 - i", &names).unwrap();
        assert_eq!(
            p.coeff(&ExpVec(vec![1])),
            CRational::new(BigRational::from_integer(0.into()), BigRational::new(3.into(), 4.into()))
        );
        assert_eq!(p.constant_term(), -CRational::i());
    }

    #[test]
    fn products_of_sums() {
        let names = default_names(2);
        let p = parse_poly("(x1+x2)*(x1-x2)", &names).unwrap();
        let q = parse_poly("x1^2 - x2^2", &names).unwrap();
        assert_eq!(p, q);
        assert_eq!(parse_poly("x1^(-2)", &names).unwrap(), parse_poly("x1^-2", &names).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let names = default_names(2);
        assert!(parse_poly("0.5*x1", &names).is_err());
        assert!(parse_poly("x3", &names).is_err());
        assert!(parse_poly("x1 +", &names).is_err());
        assert!(parse_poly("(x1", &names).is_err());
    }
}
