//! Recursive-descent parser for elements of `A`.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor+                      juxtaposition = product
//! factor := atom ('^' uint)?
//! atom   := 'x' | 'y' | 'L' | 'R' | rational | '(' expr ')'
//! ```
//!
//! `L` is `λ`, `R` is `(1 + yxλ)^{-1}`; rationals are `n` or `n/d`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{inv_r, LambdaPoly, Letter};
use crate::error::{Error, Result};

const MAX_EXPONENT: u32 = 256;

/// Parses `text` into an element of `A` truncated at `λ^order`.
pub fn parse_expr(text: &str, order: usize) -> Result<LambdaPoly> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, order };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    order: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<LambdaPoly> {
        let negate_first = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut acc = self.term()?;
        if negate_first {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(c: u8) -> bool {
        matches!(c, b'x' | b'y' | b'L' | b'R' | b'(') || c.is_ascii_digit()
    }

    fn term(&mut self) -> Result<LambdaPoly> {
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            if !Self::starts_factor(c) {
                break;
            }
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LambdaPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let n = self.uint()?;
            let n = u32::try_from(&n)
                .ok()
                .filter(|&n| n <= MAX_EXPONENT)
                .ok_or(Error::Syntax { pos: start, msg: format!("exponent above {MAX_EXPONENT}") })?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<LambdaPoly> {
        let n = self.order;
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(LambdaPoly::letter(Letter::X, n))
            }
            Some(b'y') => {
                self.pos += 1;
                Ok(LambdaPoly::letter(Letter::Y, n))
            }
            Some(b'L') => {
                self.pos += 1;
                Ok(LambdaPoly::lambda(n))
            }
            Some(b'R') => {
                self.pos += 1;
                Ok(inv_r(n))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.uint()?;
                let mut r = BigRational::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let den = self.uint()?;
                    if den.is_zero() {
                        return Err(Error::Syntax { pos: at, msg: "zero denominator".into() });
                    }
                    r /= BigRational::from_integer(den);
                }
                Ok(LambdaPoly::constant(r, n))
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an unsigned integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("decimal digits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn atoms() {
        assert_eq!(parse_expr("x", 3).unwrap(), LambdaPoly::letter(Letter::X, 3));
        assert_eq!(parse_expr("  L ", 3).unwrap(), LambdaPoly::lambda(3));
        assert_eq!(parse_expr("3/6", 0).unwrap(), LambdaPoly::constant(rat(1, 2), 0));
    }

    #[test]
    fn r_y_expands() {
        let e = parse_expr("R y", 1).unwrap();
        assert_eq!(e.coeff(0).coeff(&"y".parse::<Word>().unwrap()), rat(1, 1));
        assert_eq!(e.coeff(1).coeff(&"yxy".parse::<Word>().unwrap()), rat(-1, 1));
        assert_eq!(e.coeff(0).len() + e.coeff(1).len(), 2);
    }

    #[test]
    fn inverse_cancels() {
        assert_eq!(parse_expr("(1 + y x L) R", 4).unwrap(), LambdaPoly::one(4));
    }

    #[test]
    fn precedence_and_powers() {
        let a = parse_expr("2 x y^2 - x", 2).unwrap();
        let b = parse_expr("2 xyy - x", 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_expr("(x+y)^2", 0).unwrap(), parse_expr("xx + xy + yx + yy", 0).unwrap());
        assert_eq!(parse_expr("-x + x", 1).unwrap(), LambdaPoly::zero(1));
        assert_eq!(parse_expr("x^0", 1).unwrap(), LambdaPoly::one(1));
        assert_eq!(parse_expr("L^3", 2).unwrap(), LambdaPoly::zero(2));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(parse_expr("x +", 2), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_expr("(x", 2), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_expr("x z", 2), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_expr("1/0", 2), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_expr("x^", 2), Err(Error::Syntax { pos: 2, .. })));
        assert!(parse_expr("", 2).is_err());
        assert!(parse_expr("x^1000", 2).is_err());
    }
}
