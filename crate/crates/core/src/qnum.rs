//! q-arithmetic kernel: q-integers, bracketed products `[a;δ]`, q-Pochhammer
//! symbols (finite and infinite), partial `₂φ₁` sums, the constant `c_{ξ,η}`
//! and the angle-bracket reparametrization.
//!
//! The finite operations are generic over [`Scalar`] and therefore run either
//! in exact rational arithmetic or at the working float precision. Products
//! and sums accumulate in index-increasing order.

use crate::error::{Error, Result};
use crate::params::Params;
use crate::real::{Real, Scalar};

/// `[m] = (1 − q^m)/(1 − q)`.
pub fn q_int<S: Scalar>(m: u64, p: &Params) -> S {
    let q: S = p.q_as();
    let one = S::one_at(p.prec_bits());
    (one.clone() - q.pow_u64(m)) / (one - q)
}

/// `[a;δ] = ∏_{i=1..a} ([i] − q^i δ)`; `[0;δ] = 1`.
pub fn bracket_delta<S: Scalar>(a: u64, delta: &S, p: &Params) -> S {
    let q: S = p.q_as();
    let one = S::one_at(p.prec_bits());
    let mut acc = one.clone();
    let mut qi = one.clone();
    let mut qint = S::zero_at(p.prec_bits());
    for _ in 1..=a {
        // [i] = [i-1] + q^{i-1}
        qint = qint + &qi;
        qi = qi * &q;
        acc = acc * (qint.clone() - qi.clone() * delta);
    }
    acc
}

/// `[a]! = [a;0]`.
pub fn q_factorial<S: Scalar>(a: u64, p: &Params) -> S {
    bracket_delta(a, &S::zero_at(p.prec_bits()), p)
}

/// `(a;q)_n = ∏_{i=0..n−1} (1 − a q^i)`.
pub fn q_poch<S: Scalar>(a: &S, n: u64, p: &Params) -> S {
    let q: S = p.q_as();
    let one = S::one_at(p.prec_bits());
    let mut acc = one.clone();
    let mut aqi = a.clone();
    for _ in 0..n {
        acc = acc * (one.clone() - &aqi);
        aqi = aqi * &q;
    }
    acc
}

/// A truncated infinite product together with its relative error bound.
#[derive(Clone, Debug)]
pub struct ProductValue {
    pub value: Real,
    pub factors: usize,
    /// Bound on |computed/true − 1| from truncation and rounding.
    pub rel_bound: f64,
}

/// `(a;q)_∞` with an explicit truncation bound.
///
/// The tail `∏_{i≥T}(1 − a q^i)` satisfies `|log tail| ≤ 2|a|q^T/(1−q)` once
/// `|a| q^T ≤ 1/2`; `T` doubles from 32 until that bound is below half the
/// target error.
pub fn q_poch_inf_bounded(a: &Real, p: &Params) -> Result<ProductValue> {
    let prec = p.prec_bits();
    let q = p.q_real();
    if a.is_zero() {
        return Ok(ProductValue { value: Real::one(prec), factors: 0, rel_bound: 0.0 });
    }
    if (a.abs() * q) >= Real::one(prec) {
        return Err(Error::NonConvergent(format!("|a| = {} is not below 1/q", a.to_f64().abs())));
    }
    let af = a.to_f64().abs();
    let qf = p.q_f64();
    let target = 0.5 * p.target_abs_err();
    let log_tail = |t: usize| -> Option<f64> {
        let head = af * qf.powf(t as f64);
        (head <= 0.5).then(|| 2.0 * head / (1.0 - qf))
    };
    let mut t = 32usize;
    let delta = loop {
        match log_tail(t) {
            Some(d) if d <= target => break d,
            _ => {}
        }
        if t >= p.max_terms() {
            return Err(Error::BudgetExceeded { cap: p.max_terms(), target: p.target_abs_err() });
        }
        t = (2 * t).min(p.max_terms());
    };
    let value = q_poch(a, t as u64, p);
    let rounding = 4.0 * (t as f64 + 2.0) * p.unit_roundoff();
    Ok(ProductValue { value, factors: t, rel_bound: delta.exp_m1() + rounding })
}

/// `(a;q)_∞` for `|a| < 1/q`.
pub fn q_poch_inf(a: &Real, p: &Params) -> Result<Real> {
    q_poch_inf_bounded(a, p).map(|v| v.value)
}

/// `c_{ξ,η} = (q;q)_∞ (qξ′η′;q)_∞ / ((qξ′;q)_∞ (qη′;q)_∞)` with its relative bound.
pub fn c_factor_bounded(p: &Params) -> Result<ProductValue> {
    let prec = p.prec_bits();
    let q = p.q_real().clone();
    let xp = Real::from_ratio(&p.xi_prime(), prec);
    let ep = Real::from_ratio(&p.eta_prime(), prec);
    let num1 = q_poch_inf_bounded(&q, p)?;
    let num2 = q_poch_inf_bounded(&(&q * &xp * &ep), p)?;
    let den1 = q_poch_inf_bounded(&(&q * &xp), p)?;
    let den2 = q_poch_inf_bounded(&(&q * &ep), p)?;
    let value = (num1.value * &num2.value) / (den1.value * &den2.value);
    let rel = num1.rel_bound + num2.rel_bound + den1.rel_bound + den2.rel_bound + 8.0 * p.unit_roundoff();
    let factors = num1.factors.max(num2.factors).max(den1.factors).max(den2.factors);
    Ok(ProductValue { value, factors, rel_bound: rel })
}

pub fn c_factor(p: &Params) -> Result<Real> {
    c_factor_bounded(p).map(|v| v.value)
}

/// Partial sum of a basic hypergeometric `₂φ₁` series.
#[derive(Clone, Debug)]
pub struct Phi21Sum {
    pub value: Real,
    /// Geometric estimate of `Σ_{n>N} |t_n|`; infinite when no contraction is visible yet.
    pub tail_estimate: f64,
}

/// `Σ_{n=0..N} (a;q)_n (b;q)_n / ((c;q)_n (q;q)_n) z^n`.
pub fn phi21_partial(a: &Real, b: &Real, c: &Real, z: &Real, n_terms: usize, p: &Params) -> Result<Phi21Sum> {
    let prec = p.prec_bits();
    let one = Real::one(prec);
    if z.abs() >= one {
        return Err(Error::NonConvergent(format!("|z| = {} is not below 1", z.to_f64().abs())));
    }
    let q = p.q_real();
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut qn = one.clone();
    let mut last_abs = 1.0f64;
    for n in 0..n_terms {
        let cq = c * &qn;
        let den_c = &one - &cq;
        if den_c.is_zero() {
            return Err(Error::SingularParameter { n: n + 1 });
        }
        let qn1 = &qn * q;
        let num = (&one - &(a * &qn)) * (&one - &(b * &qn)) * z;
        let den = den_c * (&one - &qn1);
        term = term * num / den;
        sum += &term;
        last_abs = term.to_f64().abs();
        qn = qn1;
    }
    // Ratio bound for every n ≥ N; decreasing in n once |c| q^N < 1.
    let qf = p.q_f64();
    let qn_f = qf.powi(n_terms as i32);
    let cqn = c.to_f64().abs() * qn_f;
    let tail_estimate = if cqn < 1.0 {
        let rho = (1.0 + a.to_f64().abs() * qn_f) * (1.0 + b.to_f64().abs() * qn_f) * z.to_f64().abs()
            / ((1.0 - cqn) * (1.0 - qn_f * qf));
        if rho < 1.0 {
            last_abs * rho / (1.0 - rho)
        } else {
            f64::INFINITY
        }
    } else {
        f64::INFINITY
    };
    Ok(Phi21Sum { value: sum, tail_estimate })
}

/// `q^a` for real `a`.
pub fn q_pow_real(a: &Real, p: &Params) -> Real {
    if a.is_zero() {
        return Real::one(p.prec_bits());
    }
    p.q_real().pow(a)
}

/// `⟨a⟩ = 1 − q^a`.
pub fn angle(a: &Real, p: &Params) -> Real {
    Real::one(p.prec_bits()) - q_pow_real(a, p)
}

/// `⟨a⟩_n = (q^a;q)_n`.
pub fn angle_poch(a: &Real, n: u64, p: &Params) -> Real {
    q_poch(&q_pow_real(a, p), n, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn half() -> Params {
        Params::default()
    }

    #[test]
    fn q_int_examples() {
        let p = half();
        assert_eq!(q_int::<BigRational>(0, &p), BigRational::zero());
        assert_eq!(q_int::<BigRational>(1, &p), BigRational::one());
        assert_eq!(q_int::<BigRational>(2, &p), rat(3, 2));
        assert_eq!(q_int::<Real>(2, &p).to_f64(), 1.5);
    }

    #[test]
    fn bracket_delta_examples() {
        let p = half();
        let xi: BigRational = p.xi_as();
        assert_eq!(bracket_delta(0, &xi, &p), BigRational::one());
        assert_eq!(bracket_delta(1, &BigRational::zero(), &p), BigRational::one());
        // independent product of ([i] - q^i xi), [i] = sum_{j<i} q^j
        let mut want = BigRational::one();
        for i in 1..=3u32 {
            let qi = num_traits::pow::pow(rat(1, 2), i as usize);
            let mut int_i = BigRational::zero();
            for j in 0..i {
                int_i += num_traits::pow::pow(rat(1, 2), j as usize);
            }
            want *= int_i - qi * rat(1, 10);
        }
        assert_eq!(bracket_delta(3, &xi, &p), want);
        assert_eq!(q_factorial::<BigRational>(3, &p), rat(1, 1) * rat(3, 2) * rat(7, 4));
    }

    #[test]
    fn q_poch_examples() {
        let p = half();
        let q: BigRational = p.q_as();
        assert_eq!(q_poch(&q, 0, &p), BigRational::one());
        assert_eq!(q_poch(&q, 1, &p), rat(1, 2));
    }

    #[test]
    fn pochhammer_bridge_is_exact() {
        // (1-q)^m [m;δ] = (qδ';q)_m
        let p = Params::from_strs("2/7", "1/10", "7/100").unwrap();
        let q: BigRational = p.q_as();
        let one = BigRational::one();
        for (m, delta) in [(0u64, rat(0, 1)), (3, rat(1, 3)), (7, rat(1, 1)), (12, rat(5, 9)), (20, rat(1, 10))] {
            let dp = &one + (&one - &q) * &delta;
            let lhs = num_traits::pow::pow(&one - &q, m as usize) * bracket_delta(m, &delta, &p);
            let rhs = q_poch(&(&q * &dp), m, &p);
            assert_eq!(lhs, rhs, "m={m}");
        }
    }

    #[test]
    fn q_poch_inf_against_long_product() {
        let p = half();
        let q = p.q_real().clone();
        let got = q_poch_inf(&q, &p).unwrap();
        let mut oracle = Real::one(192);
        let mut qi = q.clone();
        for _ in 0..200 {
            oracle *= Real::one(192) - &qi;
            qi *= &q;
        }
        assert!((got - oracle).abs().to_f64() < 1e-30);
        assert_eq!(q_poch_inf(&Real::zero(192), &p).unwrap().to_f64(), 1.0);
    }

    #[test]
    fn q_poch_inf_telescopes() {
        let p = half();
        let a = Real::from_f64(0.375, 192);
        let full = q_poch_inf(&a, &p).unwrap();
        for m in 0..=10u64 {
            let head = q_poch(&a, m, &p);
            let shifted = q_poch_inf(&(&a * &p.q_real().powi(m)), &p).unwrap();
            let diff = (full.clone() / head - shifted).abs().to_f64();
            assert!(diff <= 10.0 * p.target_abs_err(), "m={m}: {diff}");
        }
    }

    #[test]
    fn q_poch_inf_rejects_large_argument() {
        let p = half();
        assert!(matches!(q_poch_inf(&Real::from_u64(2, 192), &p), Err(Error::NonConvergent(_))));
    }

    #[test]
    fn c_factor_properties() {
        let p0 = Params::from_strs("1/2", "0", "0").unwrap();
        assert!((c_factor(&p0).unwrap() - Real::one(192)).abs().to_f64() < 1e-40);
        let p = Params::from_strs("1/2", "1/10", "7/100").unwrap();
        let swapped = Params::from_strs("1/2", "7/100", "1/10").unwrap();
        let a = c_factor(&p).unwrap();
        let b = c_factor(&swapped).unwrap();
        assert!((a.clone() - b).abs().to_f64() < 1e-45);
        // independent evaluation with 300 factors per product
        let q = p.q_real().clone();
        let xp = Real::from_ratio(&p.xi_prime(), 192);
        let ep = Real::from_ratio(&p.eta_prime(), 192);
        let long = |x: Real| q_poch(&x, 300, &p);
        let oracle = long(q.clone()) * long(&q * &xp * &ep) / (long(&q * &xp) * long(&q * &ep));
        assert!((a - oracle).abs().to_f64() < 1e-25);
    }

    #[test]
    fn phi21_trivial_cases() {
        let p = half();
        let r = |x: f64| Real::from_f64(x, 192);
        let s = phi21_partial(&r(0.3), &r(0.2), &r(0.1), &Real::zero(192), 10, &p).unwrap();
        assert_eq!(s.value.to_f64(), 1.0);
        // a = q: (q;q)_n cancels against the denominator; compare with direct recomputation
        let (a, b, c, z) = (r(0.5), r(0.25), r(0.125), r(0.3));
        let got = phi21_partial(&a, &b, &c, &z, 12, &p).unwrap().value;
        let mut want = Real::zero(192);
        for n in 0..=12u64 {
            let t = q_poch(&a, n, &p) * q_poch(&b, n, &p) * z.powi(n) / (q_poch(&c, n, &p) * q_poch(p.q_real(), n, &p));
            want += &t;
        }
        assert!((got - want).abs().to_f64() < 1e-50);
    }

    #[test]
    fn phi21_singular_parameter() {
        let p = half();
        // c = q^{-2}: 1 - c q^2 = 0 at n = 2
        let c = Real::from_u64(4, 192);
        let z = Real::from_f64(0.1, 192);
        let one = Real::one(192);
        let res = phi21_partial(&one, &one, &c, &z, 5, &p);
        assert!(matches!(res, Err(Error::SingularParameter { n: 3 })));
    }

    #[test]
    fn q_gauss_instance() {
        let p = half();
        let prec = 192;
        let q = p.q_real().clone();
        let xp = Real::from_ratio(&p.xi_prime(), prec);
        let ep = Real::from_ratio(&p.eta_prime(), prec);
        let m = 2u64;
        let qm = q.powi(m);
        let a = &q * &xp;
        let b = &q * &ep;
        let c = &qm * &q * &q * &xp * &ep;
        let s = phi21_partial(&a, &b, &c, &qm, 150, &p).unwrap();
        let inf = |x: Real| q_poch_inf(&x, &p).unwrap();
        let rhs = inf(&qm * &q * &xp) * inf(&qm * &q * &ep) / (inf(c.clone()) * inf(qm.clone()));
        assert!(s.tail_estimate < 1e-30);
        assert!((s.value - rhs).abs().to_f64() < 1e-20);
    }

    #[test]
    fn angle_examples() {
        let p = half();
        let r = |x: u64| Real::from_u64(x, 192);
        assert!(angle(&r(0), &p).is_zero());
        let one_minus_q = Real::one(192) - p.q_real();
        assert!((angle(&r(1), &p) / one_minus_q - q_int::<Real>(1, &p)).abs().to_f64() < 1e-50);
        for m in 0..=10 {
            let d = (angle_poch(&r(1), m, &p) - q_poch(p.q_real(), m, &p)).abs().to_f64();
            assert!(d < 1e-50, "m={m}");
        }
    }

    #[test]
    fn bracket_bounds_hold() {
        let p = half();
        let q = p.q_real().clone();
        let one = Real::one(192);
        let deltas = [Real::zero(192), p.xi_real().clone(), p.eta_real().clone(), p.gamma_real().clone()];
        for delta in &deltas {
            let one_minus = &one - delta;
            for m in 1..=64u64 {
                let qm = q_int::<Real>(m, &p);
                let mid = &qm - &(q.powi(m) * delta);
                assert!(&one_minus * &qm <= mid && mid <= qm, "m={m}");
            }
            let qdelta = &one - &(&q * delta);
            for a in 1..=64u64 {
                let val = bracket_delta(a, delta, &p);
                let lower = &qdelta * &q_factorial::<Real>(a - 1, &p);
                assert!(lower <= val && val <= q_factorial::<Real>(a, &p), "a={a}");
            }
        }
    }

    #[test]
    fn exact_and_float_modes_agree() {
        let p = Params::from_strs("3/5", "1/10", "7/100").unwrap();
        let tol = 2f64.powi(-(p.prec_bits() as i32) + 8);
        let rel = |exact: &BigRational, float: &Real| {
            let e = Real::from_ratio(exact, 192);
            ((e.clone() - float) / e).abs().to_f64()
        };
        for m in [1u64, 5, 17, 40] {
            assert!(rel(&q_int(m, &p), &q_int::<Real>(m, &p)) <= tol);
            let xi_e: BigRational = p.xi_as();
            assert!(rel(&bracket_delta(m, &xi_e, &p), &bracket_delta(m, p.xi_real(), &p)) <= tol);
            let a_e = rat(1, 3);
            let a_f = Real::from_ratio(&a_e, 192);
            assert!(rel(&q_poch(&a_e, m, &p), &q_poch(&a_f, m, &p)) <= tol);
        }
    }
}
