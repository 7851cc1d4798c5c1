use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use super::{write_term, Letter, LinComb, Word};
use crate::error::{Error, Result};
use crate::indices::Index;

/// An element of `A` modulo `λ^{N+1}`: coefficient `i` is the word
/// combination multiplying `λ^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaPoly {
    order: usize,
    coeffs: Vec<LinComb>,
}

/// Per-degree `(index, coefficient)` lists.
pub type IndexTerms = Vec<Vec<(Index, BigRational)>>;

impl LambdaPoly {
    pub fn zero(order: usize) -> Self {
        LambdaPoly { order, coeffs: vec![LinComb::zero(); order + 1] }
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        let mut p = LambdaPoly::zero(order);
        p.coeffs[0] = LinComb::constant(c);
        p
    }

    pub fn one(order: usize) -> Self {
        LambdaPoly::constant(BigRational::one(), order)
    }

    pub fn word(w: Word, order: usize) -> Self {
        let mut p = LambdaPoly::zero(order);
        p.coeffs[0] = LinComb::monomial(w, BigRational::one());
        p
    }

    pub fn letter(l: Letter, order: usize) -> Self {
        LambdaPoly::word(Word::letter(l), order)
    }

    /// The indeterminate `λ` (zero when `order == 0`).
    pub fn lambda(order: usize) -> Self {
        LambdaPoly::one(order).shifted(1)
    }

    /// Builds from explicit coefficients, padding or truncating to `order`.
    pub fn from_coeffs(mut coeffs: Vec<LinComb>, order: usize) -> Self {
        coeffs.resize(order + 1, LinComb::zero());
        LambdaPoly { order, coeffs }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, degree: usize) -> &LinComb {
        &self.coeffs[degree]
    }

    pub fn coeffs(&self) -> &[LinComb] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LinComb::is_zero)
    }

    fn check_order(&self, other: &LambdaPoly) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch { left: self.order, right: other.order })
        }
    }

    pub fn add(&self, other: &LambdaPoly) -> Result<LambdaPoly> {
        self.check_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(LambdaPoly { order: self.order, coeffs })
    }

    pub fn sub(&self, other: &LambdaPoly) -> Result<LambdaPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LambdaPoly {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, s: &BigRational) -> LambdaPoly {
        LambdaPoly { order: self.order, coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    /// Multiplication by `λ^k`, dropping degrees above the order.
    pub fn shifted(&self, k: usize) -> LambdaPoly {
        let mut out = LambdaPoly::zero(self.order);
        for i in 0..=self.order {
            if i + k > self.order {
                break;
            }
            out.coeffs[i + k] = self.coeffs[i].clone();
        }
        out
    }

    /// Noncommutative truncated product; degree `i` is `Σ_{j+k=i} u_j·v_k`.
    pub fn mul(&self, other: &LambdaPoly) -> Result<LambdaPoly> {
        self.check_order(other)?;
        let mut out = LambdaPoly::zero(self.order);
        for (j, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in other.coeffs.iter().enumerate().take(self.order + 1 - j) {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[j + k] = out.coeffs[j + k].add(&a.mul(b));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> LambdaPoly {
        let mut acc = LambdaPoly::one(self.order);
        for _ in 0..n {
            acc = acc.mul(self).expect("same order");
        }
        acc
    }

    /// The anti-automorphism `τ_λ`: `x ↦ (1+yxλ)^{-1} y`, `y ↦ x(1+yxλ)`,
    /// `λ ↦ λ`, with `τ(uv) = τ(v)τ(u)`.
    pub fn tau(&self) -> LambdaPoly {
        let n = self.order;
        let tx = tau_x(n);
        let ty = tau_y(n);
        let mut out = LambdaPoly::zero(n);
        for (i, lc) in self.coeffs.iter().enumerate() {
            for (w, c) in lc.terms() {
                let mut img = LambdaPoly::one(n);
                for l in w.letters().iter().rev() {
                    let f = match l {
                        Letter::X => &tx,
                        Letter::Y => &ty,
                    };
                    img = img.mul(f).expect("same order");
                }
                out = out.add(&img.scale(c).shifted(i)).expect("same order");
            }
        }
        out
    }

    /// `y · w · x`.
    pub fn sandwich(&self) -> LambdaPoly {
        let y = Word::letter(Letter::Y);
        let x = Word::letter(Letter::X);
        LambdaPoly { order: self.order, coeffs: self.coeffs.iter().map(|c| c.wrap(&y, &x)).collect() }
    }

    /// Per-degree admissible indices; every monomial must start with `y` and end with `x`.
    pub fn to_index_terms(&self) -> Result<IndexTerms> {
        self.index_terms(true)
    }

    /// Per-degree indices for combinations over `y`-words (non-admissible allowed).
    pub fn y_index_terms(&self) -> Result<IndexTerms> {
        self.index_terms(false)
    }

    fn index_terms(&self, admissible: bool) -> Result<IndexTerms> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(degree, lc)| {
                lc.terms()
                    .map(|(w, c)| {
                        let ok = w.starts_with_y() && (!admissible || w.ends_with_x());
                        if !ok {
                            return Err(if admissible {
                                Error::NonAdmissibleMonomial { word: w.to_string(), degree }
                            } else {
                                Error::MalformedWord(w.to_string())
                            });
                        }
                        Ok((Index::from_word(w)?, c.clone()))
                    })
                    .collect()
            })
            .collect()
    }
}

/// `Σ_{i=0..N} (−1)^i (yx)^i λ^i`, the truncation of `(1 + yxλ)^{-1}`.
pub fn inv_r(order: usize) -> LambdaPoly {
    let mut p = LambdaPoly::zero(order);
    let yx = Word::from_letters(vec![Letter::Y, Letter::X]);
    let mut w = Word::empty();
    let mut sign = BigRational::one();
    for i in 0..=order {
        p.coeffs[i] = LinComb::monomial(w.clone(), sign.clone());
        w = w.concat(&yx);
        sign = -sign;
    }
    p
}

fn tau_x(order: usize) -> LambdaPoly {
    inv_r(order).mul(&LambdaPoly::letter(Letter::Y, order)).expect("same order")
}

fn tau_y(order: usize) -> LambdaPoly {
    let x = LambdaPoly::letter(Letter::X, order);
    let xyx = LambdaPoly::word(Word::from_letters(vec![Letter::X, Letter::Y, Letter::X]), order);
    x.add(&xyx.shifted(1)).expect("same order")
}

impl fmt::Display for LambdaPoly {
    /// Degree-ascending, words lexicographic; the output re-parses with [`super::parse_expr`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let mut first = true;
        for (i, lc) in self.coeffs.iter().enumerate() {
            for (w, c) in lc.terms() {
                let mut body = w.to_string();
                if i > 0 {
                    if !body.is_empty() {
                        body.push(' ');
                    }
                    body.push('L');
                    if i > 1 {
                        body.push_str(&format!("^{i}"));
                    }
                }
                write_term(&mut out, first, c, &body);
                first = false;
            }
        }
        if first {
            out.push('0');
        }
        f.write_str(&out)
    }
}
