//! Numeric carriers.
//!
//! [`Real`] is a fixed-precision binary float (round-to-nearest-even) used for
//! every series evaluation. [`Scalar`] abstracts over `Real` and exact
//! [`BigRational`] so that the finite q-arithmetic kernels can run in either
//! mode with the same code.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: usize = 64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Rounds a requested precision up to the backend's word granularity.
pub fn effective_precision(bits: usize) -> usize {
    bits.max(WORD_BITS).div_ceil(WORD_BITS) * WORD_BITS
}

/// Arbitrary-precision binary floating value.
///
/// Binary operations round to the larger precision of their operands.
#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

impl Real {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        Real { v, prec }
    }

    pub fn zero(prec: usize) -> Self {
        let prec = effective_precision(prec);
        Real::wrap(BigFloat::from_word(0, prec), prec)
    }

    pub fn one(prec: usize) -> Self {
        Real::from_u64(1, prec)
    }

    pub fn from_u64(v: u64, prec: usize) -> Self {
        let prec = effective_precision(prec);
        Real::wrap(BigFloat::from_u64(v, prec), prec)
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        let r = Real::from_u64(v.unsigned_abs(), prec);
        if v < 0 {
            -r
        } else {
            r
        }
    }

    pub fn from_f64(v: f64, prec: usize) -> Self {
        let prec = effective_precision(prec);
        Real::wrap(BigFloat::from_f64(v, prec), prec)
    }

    /// Exact conversion of an integer, then rounding to `prec`.
    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        let prec = effective_precision(prec);
        let (sign, digits) = n.to_u64_digits();
        // Horner in base 2^64 at a precision wide enough to stay exact.
        let wide = effective_precision(digits.len() * WORD_BITS + WORD_BITS);
        let base = BigFloat::from_u64(u64::MAX, wide).add(&BigFloat::from_word(1, wide), wide, RM);
        let mut acc = BigFloat::from_word(0, wide);
        for d in digits.iter().rev() {
            acc = acc.mul(&base, wide, RM).add(&BigFloat::from_u64(*d, wide), wide, RM);
        }
        let mut v = if sign == IntSign::Minus { acc.neg() } else { acc };
        v.set_precision(prec, RM).expect("precision change");
        Real::wrap(v, prec)
    }

    /// Correctly rounded quotient of two exact integers.
    pub fn from_ratio(r: &BigRational, prec: usize) -> Self {
        let prec = effective_precision(prec);
        let wide = prec + 2 * WORD_BITS;
        let num = Real::from_bigint(r.numer(), wide);
        let den = Real::from_bigint(r.denom(), wide);
        let mut q = num.v.div(&den.v, wide, RM);
        q.set_precision(prec, RM).expect("precision change");
        Real::wrap(q, prec)
    }

    pub fn parse(text: &str, prec: usize) -> Option<Self> {
        let prec = effective_precision(prec);
        let v = with_consts(|cc| BigFloat::parse(text, Radix::Dec, prec, RM, cc));
        if v.is_nan() {
            None
        } else {
            Some(Real::wrap(v, prec))
        }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Same value re-rounded to another precision.
    pub fn with_prec(&self, prec: usize) -> Self {
        let prec = effective_precision(prec);
        let mut v = self.v.clone();
        if !(v.is_nan() || v.is_inf()) {
            v.set_precision(prec, RM).expect("precision change");
        }
        Real::wrap(v, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.v.is_nan() || self.v.is_inf())
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn abs(&self) -> Self {
        Real::wrap(self.v.abs(), self.prec)
    }

    pub fn recip(&self) -> Self {
        Real::wrap(self.v.reciprocal(self.prec, RM), self.prec)
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, n: u64) -> Self {
        Real::wrap(self.v.powi(n as usize, self.prec, RM), self.prec)
    }

    /// Real power `self^e` for `self > 0`.
    pub fn pow(&self, e: &Real) -> Self {
        let p = self.prec.max(e.prec);
        Real::wrap(with_consts(|cc| self.v.pow(&e.v, p, RM, cc)), p)
    }

    pub fn ln(&self) -> Self {
        Real::wrap(with_consts(|cc| self.v.ln(self.prec, RM, cc)), self.prec)
    }

    pub fn exp(&self) -> Self {
        Real::wrap(with_consts(|cc| self.v.exp(self.prec, RM, cc)), self.prec)
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Nearest `f64` (truncating the mantissa to its top word first).
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf() {
            return if self.v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        match self.v.as_raw_parts() {
            Some((words, _, sign, exp, _)) => {
                let top = *words.last().expect("non-empty mantissa");
                let frac = top as f64 / 18_446_744_073_709_551_616.0;
                let mag = ldexp(frac, exp as i64);
                if sign == Sign::Neg {
                    -mag
                } else {
                    mag
                }
            }
            None => f64::NAN,
        }
    }

    /// Base-2 exponent `e` with `|self| = f·2^e`, `f ∈ [1/2, 1)`.
    pub fn exponent(&self) -> Option<i64> {
        if self.v.is_zero() {
            None
        } else {
            self.v.exponent().map(|e| e as i64)
        }
    }

    /// Full-precision decimal rendering; deterministic for a given value.
    pub fn to_decimal_string(&self) -> String {
        with_consts(|cc| self.v.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".to_string())
    }

    pub fn as_bigfloat(&self) -> &BigFloat {
        &self.v
    }
}

fn ldexp(x: f64, e: i64) -> f64 {
    if e > 1100 {
        f64::INFINITY
    } else if e < -1100 {
        0.0
    } else if e < -1000 {
        x * 2f64.powi(-1000) * 2f64.powi((e + 1000) as i32)
    } else {
        x * 2f64.powi(e as i32)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({}, {} bits)", self.to_decimal_string(), self.prec)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.partial_cmp(&other.v)
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign_method:ident) => {
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                let p = self.prec.max(rhs.prec);
                Real::wrap(self.v.$method(&rhs.v, p, RM), p)
            }
        }
        impl<'a> $tr<&'a Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
        impl<'a> $assign_tr<&'a Real> for Real {
            fn $assign_method(&mut self, rhs: &'a Real) {
                let p = self.prec.max(rhs.prec);
                self.v = self.v.$method(&rhs.v, p, RM);
                self.prec = p;
            }
        }
        impl $assign_tr<Real> for Real {
            fn $assign_method(&mut self, rhs: Real) {
                self.$assign_method(&rhs);
            }
        }
    };
}

real_binop!(Add, add, AddAssign, add_assign);
real_binop!(Sub, sub, SubAssign, sub_assign);
real_binop!(Mul, mul, MulAssign, mul_assign);
real_binop!(Div, div, DivAssign, div_assign);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(self.v.neg(), self.prec)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(self.v.clone().neg(), self.prec)
    }
}

/// Field operations shared by the float and exact backends.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    fn from_ratio(r: &BigRational, prec: usize) -> Self;

    fn from_u64(v: u64, prec: usize) -> Self;

    fn is_zero_value(&self) -> bool;

    fn zero_at(prec: usize) -> Self {
        Self::from_u64(0, prec)
    }

    fn one_at(prec: usize) -> Self {
        Self::from_u64(1, prec)
    }

    fn pow_u64(&self, n: u64) -> Self;

    /// Approximate magnitude, for error bookkeeping only.
    fn approx_f64(&self) -> f64;
}

impl Scalar for Real {
    fn from_ratio(r: &BigRational, prec: usize) -> Self {
        Real::from_ratio(r, prec)
    }

    fn from_u64(v: u64, prec: usize) -> Self {
        Real::from_u64(v, prec)
    }

    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }

    fn pow_u64(&self, n: u64) -> Self {
        if n == 0 {
            return Real::one(self.prec);
        }
        self.powi(n)
    }

    fn approx_f64(&self) -> f64 {
        self.to_f64()
    }
}

impl Scalar for BigRational {
    fn from_ratio(r: &BigRational, _prec: usize) -> Self {
        r.clone()
    }

    fn from_u64(v: u64, _prec: usize) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }

    fn pow_u64(&self, n: u64) -> Self {
        if n == 0 {
            return BigRational::one();
        }
        num_traits::pow::pow(self.clone(), n as usize)
    }

    fn approx_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
}

/// Lossy conversion of an exact rational, robust to huge numerators/denominators.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let x = Real::from_ratio(r, 128).to_f64();
    if r.is_negative() {
        -x.abs()
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn to_f64_matches_simple_values() {
        for &x in &[1.0, 0.5, -3.25, 1e-30, 6.02e23, -7.5e-300] {
            let r = Real::from_f64(x, 192);
            assert_eq!(r.to_f64(), x, "{x}");
        }
        assert_eq!(Real::zero(192).to_f64(), 0.0);
    }

    #[test]
    fn ratio_conversion_is_correctly_rounded() {
        let third = Real::from_ratio(&rat(1, 3), 192);
        let back = &third * &Real::from_u64(3, 192);
        let err = (back - Real::one(192)).abs().to_f64();
        assert!(err <= 2f64.powi(-190), "{err}");
        assert_eq!(Real::from_ratio(&rat(-7, 100), 192).to_f64(), -0.07);
    }

    #[test]
    fn huge_integers_convert_exactly() {
        let n: BigInt = BigInt::from(2u8).pow(150u32) + BigInt::from(1u8);
        let r = Real::from_bigint(&n, 192);
        let two150 = Real::from_u64(2, 192).powi(150);
        assert_eq!((r - two150).to_f64(), 1.0);
    }

    #[test]
    fn precision_rounds_up_to_words() {
        assert_eq!(effective_precision(192), 192);
        assert_eq!(effective_precision(200), 256);
        assert_eq!(effective_precision(1), 64);
        assert_eq!(Real::one(100).prec(), 128);
    }

    #[test]
    fn pow_and_logs_agree() {
        let q = Real::from_ratio(&rat(1, 2), 192);
        let e = Real::from_ratio(&rat(3, 1), 192);
        let cube = q.pow(&e);
        assert!((cube - q.powi(3)).abs().to_f64() < 1e-55);
        let round = q.ln().exp();
        assert!((round - &q).abs().to_f64() < 1e-55);
    }

    #[test]
    fn scalar_pow_zero_is_one() {
        assert_eq!(Scalar::pow_u64(&rat(3, 7), 0), BigRational::one());
        assert_eq!(Scalar::pow_u64(&Real::zero(192), 0).to_f64(), 1.0);
        assert_eq!(Scalar::pow_u64(&rat(2, 3), 3), rat(8, 27));
    }
}
