//! The noncommutative word algebra `Q⟨x,y⟩` and λ-truncated power series
//! representing elements of the ring `A` generated by `x`, `y`, `λ` and
//! `(1 + yxλ)^{-1}`.
//!
//! Coefficients are exact rationals throughout.

mod lambda;
mod parse;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::params::format_rational;

pub use lambda::{inv_r, LambdaPoly};
pub use parse::parse_expr;

/// Sorted before `Y`, so words order lexicographically with `x < y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    X,
    Y,
}

impl Letter {
    pub fn swapped(self) -> Letter {
        match self {
            Letter::X => Letter::Y,
            Letter::Y => Letter::X,
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::X => 'x',
            Letter::Y => 'y',
        }
    }
}

/// A monomial over `{x, y}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn starts_with_y(&self) -> bool {
        self.0.first() == Some(&Letter::Y)
    }

    pub fn ends_with_x(&self) -> bool {
        self.0.last() == Some(&Letter::X)
    }

    /// Reversal combined with the swap `x ↔ y`.
    pub fn reversed_swapped(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.swapped()).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                'x' => Ok(Letter::X),
                'y' => Ok(Letter::Y),
                _ => Err(Error::MalformedWord(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// A finite rational linear combination of words. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinComb(BTreeMap<Word, BigRational>);

impl LinComb {
    pub fn zero() -> Self {
        LinComb(BTreeMap::new())
    }

    pub fn monomial(w: Word, c: BigRational) -> Self {
        let mut lc = LinComb::zero();
        lc.add_term(w, c);
        lc
    }

    pub fn constant(c: BigRational) -> Self {
        LinComb::monomial(Word::empty(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.0.iter()
    }

    pub fn coeff(&self, w: &Word) -> BigRational {
        self.0.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, w: Word, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(w) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add(&self, other: &LinComb) -> LinComb {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> LinComb {
        if s.is_zero() {
            return LinComb::zero();
        }
        LinComb(self.0.iter().map(|(w, c)| (w.clone(), c * s)).collect())
    }

    /// Noncommutative product: words concatenate, coefficients multiply.
    pub fn mul(&self, other: &LinComb) -> LinComb {
        let mut out = LinComb::zero();
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }

    /// Left and right multiplication by fixed words.
    pub fn wrap(&self, left: &Word, right: &Word) -> LinComb {
        LinComb(self.0.iter().map(|(w, c)| (left.concat(w).concat(right), c.clone())).collect())
    }
}

/// Canonical term rendering shared by `LinComb` and `LambdaPoly`: coefficient
/// (omitted when ±1 on a non-empty monomial) juxtaposed with the word.
pub(crate) fn write_term(out: &mut String, first: bool, c: &BigRational, body: &str) {
    let neg = c.is_negative();
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let mag = c.abs();
    if body.is_empty() {
        out.push_str(&format_rational(&mag));
    } else if mag.is_one() {
        out.push_str(body);
    } else {
        out.push_str(&format_rational(&mag));
        out.push(' ');
        out.push_str(body);
    }
}

impl fmt::Display for LinComb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (w, c)) in self.terms().enumerate() {
            write_term(&mut out, i == 0, c, &w.to_string());
        }
        f.write_str(&out)
    }
}
