//! Nested-series evaluators: `ζ_q(k)`, the generating function `O(k)`,
//! double Ohno sums, the λ-extended `O(ywx)` and Ohno defects.
//!
//! Every evaluation runs the same layered recurrence
//! `S_j(m) = f_j(m) · Σ_{m′<m} S_{j−1}(m′)`; `ζ_q` is `O` at `ξ = η = 0`.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::indices::Index;
use crate::params::Params;
use crate::real::{ratio_to_f64, Real, Scalar};
use crate::words::{LambdaPoly, Letter};

const INITIAL_CUTOFF: usize = 32;

/// Error accounting for one evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SeriesBudget {
    /// Largest value of the outer summation variable.
    pub cutoff: usize,
    pub tail_bound: f64,
    pub rounding_bound: f64,
    /// Bound on the discarded λ-degrees, for λ-series evaluations.
    pub lambda_tail_bound: f64,
}

impl SeriesBudget {
    pub fn total(&self) -> f64 {
        self.tail_bound + self.rounding_bound + self.lambda_tail_bound
    }

    /// Budget of `Σ c_i·x_i` given the budgets of the `x_i`.
    pub fn combine<'a>(terms: impl IntoIterator<Item = (f64, &'a SeriesBudget)>) -> SeriesBudget {
        let mut out = SeriesBudget::default();
        for (c, b) in terms {
            let c = c.abs();
            out.cutoff = out.cutoff.max(b.cutoff);
            out.tail_bound += c * b.tail_bound;
            out.rounding_bound += c * b.rounding_bound;
            out.lambda_tail_bound += c * b.lambda_tail_bound;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: Real,
    pub budget: SeriesBudget,
}

/// Per-`m` quantities shared by every layer: `q^m`, `[m]`, `1/[m]` and
/// `1/(([m]−q^mξ)([m]−q^mη))`, for `0 ≤ m ≤ cutoff`.
pub(crate) struct SeriesTables<S> {
    pub qpow: Vec<S>,
    pub qint: Vec<S>,
    inv_int: Vec<S>,
    inv_den: Vec<S>,
    layers: HashMap<u32, Vec<S>>,
}

impl<S: Scalar> SeriesTables<S> {
    pub fn new(cutoff: usize, xi: &S, eta: &S, p: &Params) -> Self {
        let prec = p.prec_bits();
        let q: S = p.q_as();
        let zero = S::zero_at(prec);
        let one = S::one_at(prec);
        let mut qpow = Vec::with_capacity(cutoff + 1);
        let mut qint = Vec::with_capacity(cutoff + 1);
        let mut inv_int = Vec::with_capacity(cutoff + 1);
        let mut inv_den = Vec::with_capacity(cutoff + 1);
        qpow.push(one.clone());
        qint.push(zero.clone());
        inv_int.push(zero.clone());
        inv_den.push(zero.clone());
        for m in 1..=cutoff {
            let qm = qpow[m - 1].clone() * &q;
            let im = qint[m - 1].clone() + &qpow[m - 1];
            let dx = im.clone() - qm.clone() * xi;
            let de = im.clone() - qm.clone() * eta;
            inv_int.push(one.clone() / &im);
            inv_den.push(one.clone() / (dx * de));
            qpow.push(qm);
            qint.push(im);
        }
        SeriesTables { qpow, qint, inv_int, inv_den, layers: HashMap::new() }
    }

    pub fn cutoff(&self) -> usize {
        self.qpow.len() - 1
    }

    /// `f_k(m) = q^{(k−1)m} / (([m]−q^mξ)([m]−q^mη)[m]^{k−2})`, `f_k(0) = 0`.
    fn layer(&mut self, k: u32) -> &[S] {
        if !self.layers.contains_key(&k) {
            let v: Vec<S> = (0..=self.cutoff())
                .map(|m| {
                    if m == 0 {
                        // inv_den[0] holds zero
                        return self.inv_den[0].clone();
                    }
                    if k == 1 {
                        self.qint[m].clone() * &self.inv_den[m]
                    } else {
                        self.qpow[m].pow_u64(u64::from(k - 1))
                            * &self.inv_den[m]
                            * self.inv_int[m].pow_u64(u64::from(k - 2))
                    }
                })
                .collect();
            self.layers.insert(k, v);
        }
        &self.layers[&k]
    }

    /// `F_k(m)`: the sum over `0 < m_1 < ⋯ < m_r = m` of the layer products.
    /// The empty index has mass 1 at `m = 0`.
    pub fn masses(&mut self, k: &Index) -> Vec<S> {
        let n = self.cutoff() + 1;
        let zero = self.inv_den[0].clone();
        let parts = k.parts();
        if parts.is_empty() {
            let mut v = vec![zero; n];
            v[0] = self.qpow[0].clone();
            return v;
        }
        let mut cur = self.layer(parts[0]).to_vec();
        for &kj in &parts[1..] {
            let f = self.layer(kj);
            let mut next = Vec::with_capacity(n);
            let mut prefix = zero.clone();
            for m in 0..n {
                next.push(f[m].clone() * &prefix);
                prefix = prefix + &cur[m];
            }
            cur = next;
        }
        cur
    }
}

fn sum_in_order<S: Scalar>(v: &[S], prec: usize) -> S {
    v.iter().fold(S::zero_at(prec), |acc, x| acc + x)
}

fn require_admissible(k: &Index) -> Result<()> {
    if k.is_empty() || k.is_admissible() {
        Ok(())
    } else {
        Err(Error::NotAdmissible(k.clone()))
    }
}

/// `O(k)` summed over `m_r ≤ cutoff` in either backend.
pub fn big_o_truncated<S: Scalar>(k: &Index, cutoff: usize, p: &Params) -> Result<S> {
    require_admissible(k)?;
    let mut t = SeriesTables::new(cutoff, &p.xi_as::<S>(), &p.eta_as::<S>(), p);
    Ok(sum_in_order(&t.masses(k), p.prec_bits()))
}

/// `ζ_q(k)` summed over `m_r ≤ cutoff` in either backend.
pub fn zeta_q_truncated<S: Scalar>(k: &Index, cutoff: usize, p: &Params) -> Result<S> {
    require_admissible(k)?;
    let zero = S::zero_at(p.prec_bits());
    let mut t = SeriesTables::new(cutoff, &zero, &zero, p);
    Ok(sum_in_order(&t.masses(k), p.prec_bits()))
}

/// `Σ_{t>T} term(t)` for a sequence whose successive ratio `ratio(t)` is
/// non-increasing in `t`; infinite when the ratio at `T+1` is not below 1.
pub(crate) fn monotone_ratio_tail(ln_term: impl Fn(f64) -> f64, t_first: f64) -> f64 {
    let first = ln_term(t_first);
    let ratio = (ln_term(t_first + 1.0) - first).exp();
    if ratio.is_nan() || ratio >= 1.0 {
        return f64::INFINITY;
    }
    first.exp() / (1.0 - ratio)
}

/// `ln C(t−1, r−1)`, the log of the number of depth-`r` tuples with `m_r = t`.
pub(crate) fn ln_tuple_count(t: f64, r: usize) -> f64 {
    (1..r).map(|i| ((t - r as f64 + i as f64) / i as f64).ln()).sum()
}

/// Bound on `Σ_{m>M} F_k(m)`: each layer factor is at most `κ`, the outermost
/// one carries `q^{(k_r−1)m}`, and there are `C(m−1, r−1)` tuples ending at `m`.
pub(crate) fn series_tail_bound(k: &Index, cutoff: usize, kappa: f64, p: &Params) -> f64 {
    let r = k.depth();
    let Some(kr) = k.last() else { return 0.0 };
    let ln_rho = f64::from(kr - 1) * p.q_f64().ln();
    let scale = kappa.powi(r as i32);
    scale * monotone_ratio_tail(|t| ln_tuple_count(t, r) + t * ln_rho, cutoff as f64 + 1.0)
}

pub(crate) fn rounding_bound(value: f64, ops: usize, p: &Params) -> f64 {
    value.abs() * p.unit_roundoff() * (8 * ops + 16) as f64
}

fn choose_cutoff(tail: impl Fn(usize) -> f64, p: &Params) -> Result<usize> {
    let target = 0.5 * p.target_abs_err();
    let mut m = INITIAL_CUTOFF.min(p.max_terms());
    loop {
        if tail(m) <= target {
            return Ok(m);
        }
        if m >= p.max_terms() {
            return Err(Error::BudgetExceeded { cap: p.max_terms(), target: p.target_abs_err() });
        }
        m = (2 * m).min(p.max_terms());
    }
}

fn evaluate(k: &Index, xi: &Real, eta: &Real, kappa: f64, p: &Params) -> Result<Evaluation> {
    require_admissible(k)?;
    let prec = p.prec_bits();
    if k.is_empty() {
        return Ok(Evaluation { value: Real::one(prec), budget: SeriesBudget::default() });
    }
    let cutoff = choose_cutoff(|m| series_tail_bound(k, m, kappa, p), p)?;
    let mut t = SeriesTables::new(cutoff, xi, eta, p);
    let value = sum_in_order(&t.masses(k), prec);
    let ops = (k.weight() as usize + k.depth()) * 4 + cutoff;
    let budget = SeriesBudget {
        cutoff,
        tail_bound: series_tail_bound(k, cutoff, kappa, p),
        rounding_bound: rounding_bound(value.to_f64(), ops, p),
        lambda_tail_bound: 0.0,
    };
    Ok(Evaluation { value, budget })
}

/// `ζ_q(k)`, with `ζ_q(∅) = 1`.
pub fn zeta_q(k: &Index, p: &Params) -> Result<Evaluation> {
    let zero = Real::zero(p.prec_bits());
    evaluate(k, &zero, &zero, 1.0, p)
}

/// The generating function `O(k; ξ, η)`.
pub fn big_o(k: &Index, p: &Params) -> Result<Evaluation> {
    evaluate(k, p.xi_real(), p.eta_real(), p.kappa_f64(), p)
}

/// All weak compositions of `e` into `r` parts, lexicographically.
pub fn weak_compositions(e: u32, r: usize) -> Vec<Vec<u32>> {
    fn go(e: u32, r: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if r == 1 {
            prefix.push(e);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=e {
            prefix.push(first);
            go(e - first, r - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if r == 0 {
        if e == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(e, r, &mut Vec::with_capacity(r), &mut out);
    out
}

/// Shift vectors `e⃗1 + e⃗2` with their multiplicities.
fn ohno_shifts(r: usize, e1: u32, e2: u32) -> BTreeMap<Vec<u32>, u64> {
    let c2 = weak_compositions(e2, r);
    let mut shifts = BTreeMap::new();
    for a in weak_compositions(e1, r) {
        for b in &c2 {
            let s: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            *shifts.entry(s).or_insert(0u64) += 1;
        }
    }
    shifts
}

/// `O_{e1,e2}(k) = Σ ζ_q(k + e⃗1 + e⃗2)` over weak compositions of `e1` and `e2`.
pub fn ohno_sum(k: &Index, e1: u32, e2: u32, p: &Params) -> Result<Evaluation> {
    if !k.is_admissible() {
        return Err(Error::NotAdmissible(k.clone()));
    }
    let prec = p.prec_bits();
    let mut value = Real::zero(prec);
    let mut parts = Vec::new();
    for (shift, mult) in ohno_shifts(k.depth(), e1, e2) {
        let ev = zeta_q(&k.shifted(&shift), p)?;
        value += &(ev.value * Real::from_u64(mult, prec));
        parts.push((mult as f64, ev.budget));
    }
    let budget = SeriesBudget::combine(parts.iter().map(|(c, b)| (*c, b)));
    Ok(Evaluation { value, budget })
}

/// Computes `ε = ξη·O((2))`, stores it in `p` and returns it. Fails unless `ε < 1`.
pub fn validate_epsilon(p: &mut Params) -> Result<f64> {
    let o2 = big_o(&Index::new(vec![2])?, p)?;
    let eps = p.xi_f64() * p.eta_f64() * (o2.value.to_f64() + o2.budget.total());
    if eps >= 1.0 {
        return Err(Error::EpsilonTooLarge(eps));
    }
    p.set_epsilon(eps);
    Ok(eps)
}

fn validated_epsilon(p: &Params) -> Result<f64> {
    p.epsilon().ok_or(Error::EpsilonNotValidated)
}

/// `Σ_i (ξη)^i Σ_{(j,c)} c·G(j)` over per-degree index terms, with the
/// heuristic λ-tail `C·ε^{N+1}/(1−ε)`, `C = max_i a_i/ε^i`, where `a_i` is
/// the degree-`i` contribution in absolute value.
pub(crate) fn lambda_series<T>(
    degrees: &[Vec<(T, BigRational)>],
    order: usize,
    eps: f64,
    p: &Params,
    mut eval: impl FnMut(&T) -> Result<Evaluation>,
) -> Result<Evaluation> {
    let prec = p.prec_bits();
    let xe = Real::from_ratio(&(p.xi() * p.eta()), prec);
    let xe_f = ratio_to_f64(&(p.xi() * p.eta()));
    let mut value = Real::zero(prec);
    let mut weight = Real::one(prec);
    let mut parts = Vec::new();
    let mut c_max = 0.0f64;
    for (i, terms) in degrees.iter().enumerate() {
        let scale_f = xe_f.powi(i as i32);
        let mut abs_i = 0.0;
        for (j, c) in terms {
            let ev = eval(j)?;
            value += &(ev.value.clone() * Real::from_ratio(c, prec) * &weight);
            let cf = ratio_to_f64(c);
            abs_i += scale_f * cf.abs() * ev.value.to_f64().abs();
            parts.push((scale_f * cf, ev.budget));
        }
        if i > 0 && eps > 0.0 {
            c_max = c_max.max(abs_i / eps.powi(i as i32));
        }
        weight *= &xe;
    }
    let mut budget = SeriesBudget::combine(parts.iter().map(|(c, b)| (*c, b)));
    if eps > 0.0 {
        budget.lambda_tail_bound = c_max * eps.powi(order as i32 + 1) / (1.0 - eps);
    }
    Ok(Evaluation { value, budget })
}

/// `O(ywx) = Σ_i O(y w_i x)(ξη)^i` for `w` truncated at its order. Requires `ε` validated.
pub fn big_o_word(w: &LambdaPoly, p: &Params) -> Result<Evaluation> {
    let eps = validated_epsilon(p)?;
    let degrees = w.sandwich().to_index_terms()?;
    let mut cache: HashMap<Index, Evaluation> = HashMap::new();
    lambda_series(&degrees, w.order(), eps, p, |j| {
        if let Some(ev) = cache.get(j) {
            return Ok(ev.clone());
        }
        let ev = big_o(j, p)?;
        cache.insert(j.clone(), ev.clone());
        Ok(ev)
    })
}

/// `O_{e1,e2}(k) − O_{e1,e2}(k†)`.
pub fn ohno_defect(k: &Index, e1: u32, e2: u32, p: &Params) -> Result<Evaluation> {
    let a = ohno_sum(k, e1, e2, p)?;
    let b = ohno_sum(&k.dual()?, e1, e2, p)?;
    let budget = SeriesBudget::combine([(1.0, &a.budget), (1.0, &b.budget)]);
    Ok(Evaluation { value: a.value - b.value, budget })
}

/// The defect predicted by expanding `O(ywx) = O(yτ_λ(w)x)` with `k = ywx`:
/// `Σ_{i=1..min(e1,e2)} Σ_{(j,c) ∈ τ(w)_i} c·O_{e1−i,e2−i}(y j x)`.
pub fn defect_prediction(k: &Index, e1: u32, e2: u32, p: &Params) -> Result<Evaluation> {
    if !k.is_admissible() {
        return Err(Error::NotAdmissible(k.clone()));
    }
    let order = e1.min(e2) as usize;
    let letters = k.to_word().letters().to_vec();
    let inner = crate::words::Word::from_letters(letters[1..letters.len() - 1].to_vec());
    debug_assert_eq!(letters.first(), Some(&Letter::Y));
    let degrees = LambdaPoly::word(inner, order).tau().sandwich().to_index_terms()?;
    let prec = p.prec_bits();
    let mut value = Real::zero(prec);
    let mut parts = Vec::new();
    for (i, terms) in degrees.iter().enumerate().skip(1) {
        for (j, c) in terms {
            if c.is_zero() {
                continue;
            }
            let ev = ohno_sum(j, e1 - i as u32, e2 - i as u32, p)?;
            value += &(ev.value * Real::from_ratio(c, prec));
            parts.push((ratio_to_f64(&c.abs()), ev.budget));
        }
    }
    let budget = SeriesBudget::combine(parts.iter().map(|(c, b)| (*c, b)));
    Ok(Evaluation { value, budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indices::admissible_indices;
    use crate::words::parse_expr;

    fn idx(s: &str) -> Index {
        s.parse().unwrap()
    }

    fn close(a: &Real, b: &Real, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol
    }

    #[test]
    fn empty_index_is_one() {
        let p = Params::default();
        assert_eq!(zeta_q(&Index::empty(), &p).unwrap().value, Real::one(p.prec_bits()));
        assert_eq!(big_o(&Index::empty(), &p).unwrap().value, Real::one(p.prec_bits()));
    }

    #[test]
    fn non_admissible_rejected() {
        let p = Params::default();
        assert!(matches!(zeta_q(&idx("2,1"), &p), Err(Error::NotAdmissible(_))));
        assert!(matches!(ohno_sum(&Index::empty(), 1, 0, &p), Err(Error::NotAdmissible(_))));
    }

    #[test]
    fn zeta_two_matches_naive_sum() {
        let p = Params::default();
        let q = p.q_real();
        let mut naive = Real::zero(p.prec_bits());
        for m in 1..=200u64 {
            let qm = q.powi(m);
            let im = (Real::one(p.prec_bits()) - &qm) / (Real::one(p.prec_bits()) - q);
            naive += qm / (&im * &im);
        }
        assert!(close(&zeta_q(&idx("2"), &p).unwrap().value, &naive, 1e-25));
    }

    #[test]
    fn big_o_two_matches_naive_sum() {
        let p = Params::default();
        let prec = p.prec_bits();
        let (q, xi, eta) = (p.q_real(), p.xi_real(), p.eta_real());
        let mut naive = Real::zero(prec);
        for m in 1..=200u64 {
            let qm = q.powi(m);
            let im = (Real::one(prec) - &qm) / (Real::one(prec) - q);
            naive += &qm / ((&im - &(&qm * xi)) * (&im - &(&qm * eta)));
        }
        assert!(close(&big_o(&idx("2"), &p).unwrap().value, &naive, 1e-25));
    }

    #[test]
    fn zeta_is_big_o_at_zero_parameters() {
        let p = Params::from_strs("1/2", "0", "0").unwrap();
        for k in admissible_indices(5) {
            assert_eq!(zeta_q(&k, &p).unwrap().value, big_o(&k, &p).unwrap().value);
        }
    }

    #[test]
    fn big_o_bounded_by_inflated_zeta() {
        let p = Params::default();
        for k in admissible_indices(6) {
            let o = big_o(&k, &p).unwrap().value.to_f64();
            let z = zeta_q(&k, &p).unwrap().value.to_f64();
            assert!(o <= p.kappa_f64().powi(k.depth() as i32) * z * (1.0 + 1e-12));
            assert!(o >= z);
        }
    }

    #[test]
    fn tail_bound_dominates_increment() {
        let p = Params::default();
        for k in admissible_indices(5) {
            for m in [8usize, 16, 32] {
                let a: Real = big_o_truncated(&k, m, &p).unwrap();
                let b: Real = big_o_truncated(&k, 2 * m, &p).unwrap();
                let inc = (&b - &a).to_f64();
                assert!(inc >= 0.0);
                assert!(inc <= series_tail_bound(&k, m, p.kappa_f64(), &p), "{k} at {m}");
            }
        }
    }

    #[test]
    fn exact_and_float_truncations_agree() {
        let p = Params::default();
        for k in [idx("2"), idx("1,3"), idx("2,1,2")] {
            let exact: BigRational = big_o_truncated(&k, 12, &p).unwrap();
            let float: Real = big_o_truncated(&k, 12, &p).unwrap();
            let e = Real::from_ratio(&exact, p.prec_bits());
            assert!((&e - &float).abs().to_f64() <= e.to_f64() * 2f64.powi(8 - p.prec_bits() as i32));
        }
    }

    #[test]
    fn duality_at_zero_parameters() {
        let p = Params::default();
        for q in ["3/10", "1/2", "4/5"] {
            let p = p.with_q(crate::params::parse_rational(q).unwrap()).unwrap();
            let a = zeta_q(&idx("1,2"), &p).unwrap().value;
            let b = zeta_q(&idx("3"), &p).unwrap().value;
            assert!(close(&a, &b, 1e-12), "q = {q}");
        }
    }

    #[test]
    fn compositions_and_shifts() {
        assert_eq!(weak_compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(weak_compositions(0, 0), vec![Vec::<u32>::new()]);
        assert!(weak_compositions(1, 0).is_empty());
        let s = ohno_shifts(2, 1, 1);
        assert_eq!(s.values().sum::<u64>(), 4);
        assert_eq!(s[&vec![1, 1]], 2);
    }

    #[test]
    fn ohno_sum_basics() {
        let p = Params::default();
        let k = idx("2,3");
        assert_eq!(ohno_sum(&k, 0, 0, &p).unwrap().value, zeta_q(&k, &p).unwrap().value);
        let a = ohno_sum(&k, 2, 1, &p).unwrap().value;
        let b = ohno_sum(&k, 1, 2, &p).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn generating_function_expansion() {
        let p = Params::default();
        let k = idx("2,3");
        let (xi, eta) = (p.xi_f64(), p.eta_f64());
        let mut acc = 0.0;
        let mut z0 = 0.0;
        for e1 in 0..=4 {
            for e2 in 0..=4 {
                let v = ohno_sum(&k, e1, e2, &p).unwrap().value.to_f64();
                if e1 + e2 == 0 {
                    z0 = v;
                }
                acc += v * xi.powi(e1 as i32) * eta.powi(e2 as i32);
            }
        }
        let o = big_o(&k, &p).unwrap().value.to_f64();
        // Each ζ_q(k + shift) ≤ ζ_q(k), so the discarded mass is dominated by
        // the discarded part of the two geometric series.
        let r = 2;
        let partial = |d: f64| (0..=4).map(|e| binom(e + r - 1, r - 1) * d.powi(e as i32)).sum::<f64>();
        let full = |d: f64| (1.0 - d).powi(-(r as i32));
        let tail = z0 * (full(xi) * full(eta) - partial(xi) * partial(eta));
        assert!((o - acc).abs() <= tail * 1.000001 + 1e-15);
        assert!(o >= acc);
    }

    fn binom(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn epsilon_validation_gate() {
        let mut p = Params::default();
        let w = parse_expr("1", 2).unwrap();
        assert!(matches!(big_o_word(&w, &p), Err(Error::EpsilonNotValidated)));
        let eps = validate_epsilon(&mut p).unwrap();
        assert!(eps > 0.0 && eps < 1.0);
        let v = big_o_word(&w, &p).unwrap().value;
        assert_eq!(v, big_o(&idx("2"), &p).unwrap().value);
    }

    #[test]
    fn word_x_against_its_tau_image() {
        let mut p = Params::default();
        validate_epsilon(&mut p).unwrap();
        let x = parse_expr("x", 6).unwrap();
        let a = big_o_word(&x, &p).unwrap();
        let b = big_o_word(&x.tau(), &p).unwrap();
        let tol = a.budget.total() + b.budget.total() + 1e-12;
        assert!(close(&a.value, &b.value, tol));
    }

    #[test]
    fn bbbl_words_have_no_lambda_content() {
        let mut p = Params::default();
        validate_epsilon(&mut p).unwrap();
        let w = parse_expr("xy yx", 3).unwrap();
        let k = Index::from_word(&w.sandwich().coeff(0).terms().next().unwrap().0.clone()).unwrap();
        assert_eq!(k, idx("2,1,3"));
        assert_eq!(big_o_word(&w, &p).unwrap().value, big_o(&k, &p).unwrap().value);
    }

    #[test]
    fn defect_of_three() {
        let p = Params::default();
        let d = ohno_defect(&idx("3"), 1, 1, &p).unwrap().value;
        let z = zeta_q(&idx("1,2,2"), &p).unwrap().value;
        assert!(close(&d, &-z.clone(), 1e-10));
        assert!(d.to_f64().abs() > 1e-4);
        let pred = defect_prediction(&idx("3"), 1, 1, &p).unwrap().value;
        assert!(close(&pred, &-z, 1e-25));
    }

    #[test]
    fn single_ohno_defect_vanishes() {
        let p = Params::default();
        for k in admissible_indices(5) {
            for e in 0..=2 {
                assert!(ohno_defect(&k, e, 0, &p).unwrap().value.to_f64().abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn budget_exceeded_when_capped() {
        let p = Params::default().with_max_terms(40);
        assert!(matches!(zeta_q(&idx("2"), &p), Err(Error::BudgetExceeded { .. })));
    }
}
