//! Ambient constants `q`, `ξ`, `η` plus precision and truncation controls.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::{effective_precision, Real, Scalar};

pub const DEFAULT_PREC_BITS: usize = 192;
pub const DEFAULT_TARGET_ABS_ERR: f64 = 1e-30;
pub const DEFAULT_MAX_TERMS: usize = 1 << 16;
pub const DEFAULT_SLACK: f64 = 1e-10;

/// Parses `p/q`, an integer, or a plain decimal such as `0.07` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || Error::InvalidParams(format!("cannot parse `{text}` as a rational"));
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n = BigInt::from_str(&digits).map_err(|_| bad())?;
    let d = num_traits::pow::pow(BigInt::from(10u8), frac_part.len());
    let r = BigRational::new(n, d);
    Ok(if neg { -r } else { r })
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Clone)]
struct Cached {
    q: Real,
    xi: Real,
    eta: Real,
    gamma: Real,
}

/// Validated parameter set. `q`, `ξ`, `η` are exact rationals; the float
/// images are cached at the working precision.
#[derive(Clone)]
pub struct Params {
    q: BigRational,
    xi: BigRational,
    eta: BigRational,
    prec_bits: usize,
    target_abs_err: f64,
    max_terms: usize,
    slack: f64,
    epsilon: Option<f64>,
    cached: Cached,
}

impl fmt::Debug for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Params")
            .field("q", &format_rational(&self.q))
            .field("xi", &format_rational(&self.xi))
            .field("eta", &format_rational(&self.eta))
            .field("prec_bits", &self.prec_bits)
            .field("target_abs_err", &self.target_abs_err)
            .field("max_terms", &self.max_terms)
            .field("slack", &self.slack)
            .field("epsilon", &self.epsilon)
            .finish()
    }
}

impl Default for Params {
    fn default() -> Self {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        Params::new(r(1, 2), r(1, 10), r(7, 100)).expect("default parameters are valid")
    }
}

impl Params {
    pub fn new(q: BigRational, xi: BigRational, eta: BigRational) -> Result<Self> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        if !(q > zero && q < one) {
            return Err(Error::InvalidParams(format!("q = {} must lie in (0, 1)", format_rational(&q))));
        }
        for (name, v) in [("xi", &xi), ("eta", &eta)] {
            if v.is_negative() || *v >= one {
                return Err(Error::InvalidParams(format!("{name} = {} must lie in [0, 1)", format_rational(v))));
            }
        }
        let gamma = &xi + &eta + (&one - &q) * &xi * &eta;
        if gamma >= one {
            return Err(Error::InvalidParams(format!(
                "gamma = xi + eta + (1-q) xi eta = {} must be below 1",
                format_rational(&gamma)
            )));
        }
        let prime = |d: &BigRational| &one + (&one - &q) * d;
        if prime(&gamma) != prime(&xi) * prime(&eta) {
            return Err(Error::InvalidParams("gamma' != xi' eta'".into()));
        }
        let prec_bits = DEFAULT_PREC_BITS;
        let cached = Cached::build(&q, &xi, &eta, &gamma, prec_bits);
        Ok(Params {
            q,
            xi,
            eta,
            prec_bits,
            target_abs_err: DEFAULT_TARGET_ABS_ERR,
            max_terms: DEFAULT_MAX_TERMS,
            slack: DEFAULT_SLACK,
            epsilon: None,
            cached,
        })
    }

    /// Parses each of `q`, `ξ`, `η` with [`parse_rational`].
    pub fn from_strs(q: &str, xi: &str, eta: &str) -> Result<Self> {
        Params::new(parse_rational(q)?, parse_rational(xi)?, parse_rational(eta)?)
    }

    pub fn with_prec_bits(mut self, bits: usize) -> Self {
        self.prec_bits = effective_precision(bits);
        self.cached = Cached::build(&self.q, &self.xi, &self.eta, &self.gamma(), self.prec_bits);
        self.epsilon = None;
        self
    }

    pub fn with_target_abs_err(mut self, err: f64) -> Self {
        assert!(err > 0.0, "target error must be positive");
        self.target_abs_err = err;
        self
    }

    pub fn with_max_terms(mut self, cap: usize) -> Self {
        self.max_terms = cap.max(1);
        self
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack.max(0.0);
        self
    }

    /// Same controls, different `ξ`, `η`. Clears the ε validation.
    pub fn with_xi_eta(&self, xi: BigRational, eta: BigRational) -> Result<Self> {
        let fresh = Params::new(self.q.clone(), xi, eta)?;
        Ok(Params {
            prec_bits: self.prec_bits,
            target_abs_err: self.target_abs_err,
            max_terms: self.max_terms,
            slack: self.slack,
            cached: Cached::build(&fresh.q, &fresh.xi, &fresh.eta, &fresh.gamma(), self.prec_bits),
            ..fresh
        })
    }

    /// Same controls, different `q`. Clears the ε validation.
    pub fn with_q(&self, q: BigRational) -> Result<Self> {
        let fresh = Params::new(q, self.xi.clone(), self.eta.clone())?;
        Ok(Params {
            prec_bits: self.prec_bits,
            target_abs_err: self.target_abs_err,
            max_terms: self.max_terms,
            slack: self.slack,
            cached: Cached::build(&fresh.q, &fresh.xi, &fresh.eta, &fresh.gamma(), self.prec_bits),
            ..fresh
        })
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn xi(&self) -> &BigRational {
        &self.xi
    }

    pub fn eta(&self) -> &BigRational {
        &self.eta
    }

    /// `γ = ξ + η + (1−q)ξη`.
    pub fn gamma(&self) -> BigRational {
        let one = BigRational::one();
        &self.xi + &self.eta + (&one - &self.q) * &self.xi * &self.eta
    }

    fn prime(&self, d: &BigRational) -> BigRational {
        let one = BigRational::one();
        &one + (&one - &self.q) * d
    }

    pub fn xi_prime(&self) -> BigRational {
        self.prime(&self.xi)
    }

    pub fn eta_prime(&self) -> BigRational {
        self.prime(&self.eta)
    }

    pub fn gamma_prime(&self) -> BigRational {
        self.prime(&self.gamma())
    }

    pub fn prec_bits(&self) -> usize {
        self.prec_bits
    }

    pub fn target_abs_err(&self) -> f64 {
        self.target_abs_err
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Harness slack added to budget-derived tolerances.
    pub fn slack(&self) -> f64 {
        self.slack
    }

    /// `ε = ξη·O((2))` once validated by [`crate::series::validate_epsilon`].
    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub(crate) fn set_epsilon(&mut self, eps: f64) {
        self.epsilon = Some(eps);
    }

    /// Unit roundoff at the working precision.
    pub fn unit_roundoff(&self) -> f64 {
        2f64.powi(1 - self.prec_bits as i32)
    }

    pub fn q_real(&self) -> &Real {
        &self.cached.q
    }

    pub fn xi_real(&self) -> &Real {
        &self.cached.xi
    }

    pub fn eta_real(&self) -> &Real {
        &self.cached.eta
    }

    pub fn gamma_real(&self) -> &Real {
        &self.cached.gamma
    }

    pub fn q_f64(&self) -> f64 {
        self.cached.q.to_f64()
    }

    pub fn xi_f64(&self) -> f64 {
        self.cached.xi.to_f64()
    }

    pub fn eta_f64(&self) -> f64 {
        self.cached.eta.to_f64()
    }

    pub fn gamma_f64(&self) -> f64 {
        self.cached.gamma.to_f64()
    }

    /// `1/((1−ξ)(1−η))`, the per-layer inflation of the generating function
    /// over the plain q-zeta series.
    pub fn kappa_f64(&self) -> f64 {
        1.0 / ((1.0 - self.xi_f64()) * (1.0 - self.eta_f64()))
    }

    /// Parameter images in either backend.
    pub fn q_as<S: Scalar>(&self) -> S {
        S::from_ratio(&self.q, self.prec_bits)
    }

    pub fn xi_as<S: Scalar>(&self) -> S {
        S::from_ratio(&self.xi, self.prec_bits)
    }

    pub fn eta_as<S: Scalar>(&self) -> S {
        S::from_ratio(&self.eta, self.prec_bits)
    }

    pub fn gamma_as<S: Scalar>(&self) -> S {
        S::from_ratio(&self.gamma(), self.prec_bits)
    }
}

impl Cached {
    fn build(q: &BigRational, xi: &BigRational, eta: &BigRational, gamma: &BigRational, prec: usize) -> Self {
        Cached {
            q: Real::from_ratio(q, prec),
            xi: Real::from_ratio(xi, prec),
            eta: Real::from_ratio(eta, prec),
            gamma: Real::from_ratio(gamma, prec),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("1/2").unwrap(), r(1, 2));
        assert_eq!(parse_rational("0.07").unwrap(), r(7, 100));
        assert_eq!(parse_rational(" 3 ").unwrap(), r(3, 1));
        assert_eq!(parse_rational("-.5").unwrap(), r(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn default_parameters() {
        let p = Params::default();
        assert_eq!(format_rational(p.q()), "1/2");
        assert_eq!(format_rational(p.xi()), "1/10");
        assert_eq!(format_rational(p.eta()), "7/100");
        assert_eq!(p.prec_bits(), 192);
        assert!(p.epsilon().is_none());
        assert_eq!(p.gamma_prime(), p.xi_prime() * p.eta_prime());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Params::from_strs("1", "0", "0").is_err());
        assert!(Params::from_strs("0", "0", "0").is_err());
        assert!(Params::from_strs("1/2", "1", "0").is_err());
        assert!(Params::from_strs("1/2", "-1/10", "0").is_err());
        // xi, eta < 1 individually but gamma >= 1
        assert!(Params::from_strs("1/2", "9/10", "9/10").is_err());
        assert!(Params::from_strs("1/2", "0", "0").is_ok());
    }

    #[test]
    fn derived_accessors() {
        let p = Params::from_strs("1/3", "1/7", "1/11").unwrap();
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(p.xi_prime(), r(1, 1) + r(2, 3) * r(1, 7));
        assert_eq!(p.gamma(), r(1, 7) + r(1, 11) + r(2, 3) * r(1, 77));
        assert!((p.gamma_f64() - p.gamma_real().to_f64()).abs() < 1e-16);
    }

    #[test]
    fn controls_survive_parameter_changes() {
        let p = Params::default().with_prec_bits(256).with_slack(1e-12);
        let p0 = p.with_xi_eta(BigRational::zero(), BigRational::zero()).unwrap();
        assert_eq!(p0.prec_bits(), 256);
        assert_eq!(p0.slack(), 1e-12);
        assert_eq!(p0.q_real().prec(), 256);
    }
}
