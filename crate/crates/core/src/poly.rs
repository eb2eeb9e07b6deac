//! Monomials, integer-coefficient polynomials and the relation grammar.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! poly   := term (('+' | '-') term)*
//! term   := ('+' | '-')? factor (('*' | '·') factor)*
//! factor := INTEGER | IDENT ('^' INTEGER)?
//! ```
//!
//! `−` (U+2212) is accepted as a minus sign and `·` (U+00B7) as a product.
//! Parentheses are not part of the grammar.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An exponent vector. The derived order is lexicographic with the first
/// variable most significant; "leading" means largest in this order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|a| a * k).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Multidegree under a per-variable degree table.
    pub fn degree(&self, degrees: &[Vec<i64>]) -> Vec<i64> {
        let d = degrees.first().map_or(0, Vec::len);
        let mut out = vec![0i64; d];
        for (e, deg) in self.0.iter().zip(degrees) {
            for (o, g) in out.iter_mut().zip(deg) {
                *o += *e as i64 * g;
            }
        }
        out
    }

    pub fn weight(&self, weights: &[i64]) -> i64 {
        self.0.iter().zip(weights).map(|(e, w)| *e as i64 * w).sum()
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> MonomialDisplay<'a> {
        MonomialDisplay { m: self, names }
    }
}

pub struct MonomialDisplay<'a> {
    m: &'a Monomial,
    names: &'a [String],
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (e, name) in self.m.0.iter().zip(self.names) {
            if *e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial with integer coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn monomial(m: Monomial, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(m.nvars());
        p.add_term(m, c.into());
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(nvars, i), 1)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Terms in decreasing monomial order (leading term first).
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        assert_eq!(m.nvars(), self.nvars);
        let entry = self.terms.entry(m).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::monomial(Monomial::one(self.nvars), 1);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// The single monomial of a one-term polynomial with coefficient 1.
    pub fn as_monomial(&self) -> Option<&Monomial> {
        match self.terms.iter().next() {
            Some((m, c)) if self.terms.len() == 1 && c.is_one() => Some(m),
            _ => None,
        }
    }

    /// Sets the listed variables to zero.
    pub fn restrict_zero(&self, vars: &[usize]) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            if vars.iter().all(|&v| m.0[v] == 0) {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolynomialDisplay<'a> {
        PolynomialDisplay { p: self, names }
    }
}

pub struct PolynomialDisplay<'a> {
    p: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolynomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.p.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", m.display(self.names))?;
            } else {
                write!(f, "{a}*{}", m.display(self.names))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at offset {offset}")]
    UnexpectedChar { ch: char, offset: usize },
    #[error("unknown variable `{name}` at offset {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("expected {expected} at offset {offset}")]
    Expected { expected: &'static str, offset: usize },
    #[error("exponent `{text}` at offset {offset} is not a small nonnegative integer")]
    BadExponent { text: String, offset: usize },
    #[error("empty expression")]
    Empty,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt, String),
    Ident(String),
    Plus,
    Minus,
    Times,
    Caret,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (off, ch) = chars[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push((Tok::Plus, off));
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push((Tok::Minus, off));
                i += 1;
            }
            '*' | '\u{00B7}' => {
                out.push((Tok::Times, off));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, off));
                i += 1;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|c| c.1).collect();
                let n: BigInt = text.parse().expect("digits parse");
                out.push((Tok::Int(n, text), off));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().map(|c| c.1).collect()), off));
            }
            c => return Err(ParseError::UnexpectedChar { ch: c, offset: off }),
        }
    }
    Ok(out)
}

/// Parses a polynomial over the given ordered variable names.
pub fn parse_polynomial(src: &str, names: &[String]) -> Result<Polynomial, ParseError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let n = names.len();
    let end = src.len();
    let mut pos = 0;
    let mut out = Polynomial::zero(n);
    let mut first = true;
    while pos < toks.len() {
        let mut sign = BigInt::one();
        match toks[pos].0 {
            Tok::Plus => pos += 1,
            Tok::Minus => {
                sign = -sign;
                pos += 1;
            }
            _ if !first => return Err(ParseError::Expected { expected: "'+' or '-'", offset: toks[pos].1 }),
            _ => {}
        }
        first = false;
        let mut coeff = sign;
        let mut mono = Monomial::one(n);
        loop {
            let offset = toks.get(pos).map_or(end, |t| t.1);
            match toks.get(pos).map(|t| &t.0) {
                Some(Tok::Int(v, _)) => {
                    coeff *= v;
                    pos += 1;
                }
                Some(Tok::Ident(name)) => {
                    let idx = names
                        .iter()
                        .position(|v| v == name)
                        .ok_or_else(|| ParseError::UnknownVariable { name: name.clone(), offset })?;
                    pos += 1;
                    let mut exp = 1u32;
                    if matches!(toks.get(pos).map(|t| &t.0), Some(Tok::Caret)) {
                        pos += 1;
                        let offset = toks.get(pos).map_or(end, |t| t.1);
                        match toks.get(pos).map(|t| &t.0) {
                            Some(Tok::Int(_, text)) => {
                                exp =
                                    text.parse().map_err(|_| ParseError::BadExponent { text: text.clone(), offset })?;
                                pos += 1;
                            }
                            _ => return Err(ParseError::Expected { expected: "exponent", offset }),
                        }
                    }
                    mono.0[idx] += exp;
                }
                _ => return Err(ParseError::Expected { expected: "integer or variable", offset }),
            }
            if matches!(toks.get(pos).map(|t| &t.0), Some(Tok::Times)) {
                pos += 1;
            } else {
                break;
            }
        }
        out.add_term(mono, coeff);
    }
    Ok(out)
}
