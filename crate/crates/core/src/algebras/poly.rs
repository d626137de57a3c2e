//! Noncommutative *-polynomials over named generators.
//!
//! Text form: `(0.5+0i)*b0*b1 + (0.5+0i)*b1*b0`, adjoint letters carry a
//! trailing `'`, the empty word is written as a bare coefficient.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{ONE, ZERO};

/// Coefficients with modulus below this are dropped on normalization.
pub const PRUNE_TOL: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: String,
    pub adjoint: bool,
}

impl Letter {
    pub fn new(gen: impl Into<String>) -> Self {
        Letter {
            gen: gen.into(),
            adjoint: false,
        }
    }

    pub fn star(&self) -> Self {
        Letter {
            gen: self.gen.clone(),
            adjoint: !self.adjoint,
        }
    }
}

/// Serialized as the generator name, with a trailing `'` for adjoints.
impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.adjoint {
            s.serialize_str(&format!("{}'", self.gen))
        } else {
            s.serialize_str(&self.gen)
        }
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let (name, adjoint) = match s.strip_suffix('\'') {
            Some(n) => (n, true),
            None => (s.as_str(), false),
        };
        if name.is_empty() {
            return Err(serde::de::Error::custom("empty generator name"));
        }
        Ok(Letter {
            gen: name.to_string(),
            adjoint,
        })
    }
}

/// Product of letters, left to right. The empty word is the unit.
pub type Word = Vec<Letter>;

pub fn word(gens: &[&str]) -> Word {
    gens.iter().map(|g| Letter::new(*g)).collect()
}

pub fn word_adjoint(w: &[Letter]) -> Word {
    w.iter().rev().map(Letter::star).collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StarPolynomial {
    terms: BTreeMap<Word, Complex64>,
}

impl StarPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(ONE)
    }

    pub fn gen(name: &str) -> Self {
        Self::monomial(ONE, vec![Letter::new(name)])
    }

    pub fn monomial(c: Complex64, w: Word) -> Self {
        let mut p = Self::zero();
        p.add_term(c, w);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Complex64, Word)>) -> Self {
        let mut p = Self::zero();
        for (c, w) in terms {
            p.add_term(c, w);
        }
        p
    }

    pub fn add_term(&mut self, c: Complex64, w: Word) {
        let e = self.terms.entry(w).or_insert(ZERO);
        *e += c;
        self.prune();
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &[Letter]) -> Complex64 {
        self.terms.get(w).copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Generator names in first-appearance order of the sorted terms.
    pub fn generators(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for w in self.terms.keys() {
            for l in w {
                if !out.contains(&l.gen) {
                    out.push(l.gen.clone());
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (c * s, w.clone())))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (w, c) in &other.terms {
            p.add_term(*c, w.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale_real(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend(w2.iter().cloned());
                p.add_term(c1 * c2, w);
            }
        }
        p
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (c.conj(), word_adjoint(w))))
    }

    /// Drops adjoint marks; valid when every generator is self-adjoint.
    pub fn assume_self_adjoint_generators(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| {
            let w = w.iter().map(|l| Letter::new(l.gen.clone())).collect();
            (*c, w)
        }))
    }

    /// p == p* as formal polynomials, with self-adjoint generators.
    pub fn is_formally_self_adjoint(&self, tol: f64) -> bool {
        let p = self.assume_self_adjoint_generators();
        let q = p.adjoint().assume_self_adjoint_generators();
        p.sub(&q).terms.values().all(|c| c.norm() <= tol)
    }

    /// Replaces generators by polynomials; adjoint letters get the adjoint image.
    /// Generators missing from `map` are kept.
    pub fn substitute(&self, map: &BTreeMap<String, StarPolynomial>) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            let mut acc = Self::constant(*c);
            for l in w {
                let factor = match map.get(&l.gen) {
                    Some(p) if l.adjoint => p.adjoint(),
                    Some(p) => p.clone(),
                    None => Self::monomial(ONE, vec![l.clone()]),
                };
                acc = acc.mul(&factor);
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.sub(other).terms.values().all(|c| c.norm() <= tol)
    }
}

fn fmt_complex(c: &Complex64) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("({}{}{}i)", c.re, sign, c.im.abs())
}

fn fmt_word(w: &[Letter]) -> String {
    w.iter()
        .map(|l| {
            if l.adjoint {
                format!("{}'", l.gen)
            } else {
                l.gen.clone()
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for StarPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                if w.is_empty() {
                    fmt_complex(c)
                } else {
                    format!("{}*{}", fmt_complex(c), fmt_word(w))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, ch: char) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            Ok(())
        } else {
            Err(self.error(&format!("expected '{ch}'")))
        }
    }

    fn error(&self, msg: &str) -> Error {
        Error::invalid(format!("polynomial parse error at byte {}: {msg}", self.pos))
    }

    fn complex(&mut self) -> Result<Complex64> {
        self.expect('(')?;
        let start = self.pos;
        let end = self.src[start..]
            .find(')')
            .map(|i| start + i)
            .ok_or_else(|| self.error("unterminated coefficient"))?;
        let body: String = self.src[start..end].chars().filter(|c| !c.is_whitespace()).collect();
        self.pos = end + 1;
        parse_complex(&body).ok_or_else(|| Error::invalid(format!("bad coefficient '({body})'")))
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '.'))
            .unwrap_or(rest.len());
        if len == 0 || !rest.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
            return Err(self.error("expected generator name"));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }

    fn term(&mut self) -> Result<(Complex64, Word)> {
        let c = self.complex()?;
        let mut w = Word::new();
        while self.peek() == Some('*') {
            self.pos += 1;
            let mut l = Letter::new(self.ident()?);
            if self.src[self.pos..].starts_with('\'') {
                self.pos += 1;
                l.adjoint = true;
            }
            w.push(l);
        }
        Ok((c, w))
    }
}

fn parse_complex(s: &str) -> Option<Complex64> {
    let body = s.strip_suffix('i')?;
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].trim_start_matches('+').parse().ok()?;
    Some(Complex64::new(re, im))
}

impl Serialize for StarPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for StarPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for StarPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        if p.peek() == Some('0') && s.trim() == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        loop {
            let (c, w) = p.term()?;
            out.add_term(c, w);
            match p.peek() {
                Some('+') => p.pos += 1,
                None => break,
                Some(_) => return Err(p.error("expected '+' or end of input")),
            }
        }
        Ok(out)
    }
}

/// Σ c · u ⊗ v over pairs of words; left words act on Alice, right on Bob.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorPolynomial {
    terms: BTreeMap<(Word, Word), Complex64>,
}

impl TensorPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, c: Complex64, left: Word, right: Word) {
        let e = self.terms.entry((left, right)).or_insert(ZERO);
        *e += c;
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    /// p ⊗ q expanded termwise.
    pub fn tensor(p: &StarPolynomial, q: &StarPolynomial) -> Self {
        let mut t = Self::zero();
        for (u, a) in p.terms() {
            for (v, b) in q.terms() {
                t.add_term(a * b, u.clone(), v.clone());
            }
        }
        t
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut t = self.clone();
        for ((u, v), c) in &other.terms {
            t.add_term(*c, u.clone(), v.clone());
        }
        t
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut t = Self::zero();
        for ((u, v), c) in &self.terms {
            t.add_term(c * s, u.clone(), v.clone());
        }
        t
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Word, &Complex64)> {
        self.terms.iter().map(|((u, v), c)| (u, v, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, left: &[Letter], right: &[Letter]) -> Complex64 {
        self.terms
            .get(&(left.to_vec(), right.to_vec()))
            .copied()
            .unwrap_or(ZERO)
    }

    /// Substitutes on each side independently.
    pub fn substitute(
        &self,
        left: &BTreeMap<String, StarPolynomial>,
        right: &BTreeMap<String, StarPolynomial>,
    ) -> Self {
        let mut out = Self::zero();
        for ((u, v), c) in &self.terms {
            let pu = StarPolynomial::monomial(*c, u.clone()).substitute(left);
            let pv = StarPolynomial::monomial(ONE, v.clone()).substitute(right);
            out = out.add(&Self::tensor(&pu, &pv));
        }
        out
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let diff = self.add(&other.scale(Complex64::new(-1.0, 0.0)));
        diff.terms.values().all(|c| c.norm() <= tol)
    }
}

impl fmt::Display for TensorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let side = |w: &Word| if w.is_empty() { "1".to_string() } else { fmt_word(w) };
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((u, v), c)| format!("{}*{} ⊗ {}", fmt_complex(c), side(u), side(v)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn display_matches_text_format() {
        let ab = StarPolynomial::monomial(c(0.5, 0.0), word(&["b0", "b1"]));
        let ba = StarPolynomial::monomial(c(0.5, 0.0), word(&["b1", "b0"]));
        assert_eq!(ab.add(&ba).to_string(), "(0.5+0i)*b0*b1 + (0.5+0i)*b1*b0");
        assert_eq!(StarPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn parse_round_trip() {
        let s = "(0.5+0i)*b0*b1 + (0.5-0.25i)*b1'*b0 + (-2+1e-3i)";
        let p: StarPolynomial = s.parse().unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.coefficient(&[]), c(-2.0, 1e-3));
        let back: StarPolynomial = p.to_string().parse().unwrap();
        assert_eq!(back, p);
        let adj = vec![
            Letter {
                gen: "b1".into(),
                adjoint: true,
            },
            Letter::new("b0"),
        ];
        assert_eq!(p.coefficient(&adj), c(0.5, -0.25));
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "b0", "(1+0i)*", "(1+0i) b0", "(x+0i)", "(1+0i)*b0 +"] {
            assert!(bad.parse::<StarPolynomial>().is_err(), "{bad}");
        }
        assert!("0".parse::<StarPolynomial>().unwrap().is_empty());
    }

    #[test]
    fn noncommutative_multiplication() {
        let a = StarPolynomial::gen("a");
        let b = StarPolynomial::gen("b");
        let ab = a.mul(&b);
        let ba = b.mul(&a);
        assert_ne!(ab, ba);
        assert!(ab.sub(&ab).is_empty());
    }

    #[test]
    fn adjoint_reverses_and_conjugates() {
        let p = StarPolynomial::monomial(c(1.0, 2.0), word(&["x", "y"]));
        let q = p.adjoint();
        let w = vec![
            Letter {
                gen: "y".into(),
                adjoint: true,
            },
            Letter {
                gen: "x".into(),
                adjoint: true,
            },
        ];
        assert_eq!(q.coefficient(&w), c(1.0, -2.0));
        assert_eq!(q.adjoint(), p);
    }

    #[test]
    fn formal_self_adjointness() {
        let anti = "(1+0i)*b0*b1 + (1+0i)*b1*b0".parse::<StarPolynomial>().unwrap();
        assert!(anti.is_formally_self_adjoint(1e-15));
        let comm = "(1+0i)*b0*b1 + (-1+0i)*b1*b0".parse::<StarPolynomial>().unwrap();
        assert!(!comm.is_formally_self_adjoint(1e-15));
    }

    #[test]
    fn substitution_expands() {
        // b0 = n0 - n1 squared
        let mut map = BTreeMap::new();
        map.insert(
            "b0".to_string(),
            StarPolynomial::gen("n0").sub(&StarPolynomial::gen("n1")),
        );
        let sq = StarPolynomial::monomial(ONE, word(&["b0", "b0"])).substitute(&map);
        assert_eq!(sq.len(), 4);
        assert_eq!(sq.coefficient(&word(&["n0", "n1"])), c(-1.0, 0.0));
    }

    #[test]
    fn zero_terms_pruned() {
        let p = StarPolynomial::gen("a").add(&StarPolynomial::gen("a").scale_real(-1.0));
        assert!(p.is_empty());
    }
}
