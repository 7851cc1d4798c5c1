//! The connector `c(m,n)`, connected sums `Z(k;l)` and their λ-extension,
//! and residual-producing verifiers for the identities relating them.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::indices::{two_arrow_blocks, Arrow, Index};
use crate::params::Params;
use crate::qnum::{angle_poch, bracket_delta, c_factor_bounded, phi21_partial, q_factorial, q_int, q_poch_inf_bounded};
use crate::real::{Real, Scalar};
use crate::series::{
    big_o, lambda_series, monotone_ratio_tail, rounding_bound, series_tail_bound, Evaluation, SeriesBudget,
    SeriesTables,
};
use crate::words::LambdaPoly;

const INITIAL_CUTOFF: usize = 32;

/// One checked identity: both sides, their distance and the tolerance it is held to.
#[derive(Clone, Debug)]
pub struct Residual {
    pub label: String,
    pub lhs: Real,
    pub rhs: Real,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Residual {
    /// `tolerance = budget + slack`, where `budget` covers both sides.
    pub fn new(label: impl Into<String>, lhs: Real, rhs: Real, budget: f64, slack: f64) -> Self {
        let residual = (&lhs - &rhs).abs().to_f64();
        let tolerance = budget + slack;
        Residual { label: label.into(), lhs, rhs, residual, tolerance, pass: residual <= tolerance }
    }

    pub fn from_evaluations(label: impl Into<String>, lhs: &Evaluation, rhs: &Evaluation, p: &Params) -> Self {
        Residual::new(label, lhs.value.clone(), rhs.value.clone(), lhs.budget.total() + rhs.budget.total(), p.slack())
    }
}

/// `c(m,n) = q^{mn}[m;ξ][m;η][n;ξ][n;η] / ([m]![n]![m+n;γ])`.
pub fn connector<S: Scalar>(m: u64, n: u64, p: &Params) -> S {
    let (xi, eta, gamma) = (p.xi_as::<S>(), p.eta_as::<S>(), p.gamma_as::<S>());
    let q: S = p.q_as();
    let num = q.pow_u64(m * n)
        * bracket_delta(m, &xi, p)
        * bracket_delta(m, &eta, p)
        * bracket_delta(n, &xi, p)
        * bracket_delta(n, &eta, p);
    let den = q_factorial::<S>(m, p) * q_factorial::<S>(n, p) * bracket_delta(m + n, &gamma, p);
    num / den
}

/// `C0 = 1/((1−q)(1−qγ))`, with `c(m,n) ≤ C0·q^{mn}` whenever `m + n ≥ 1`.
pub fn connector_decay_constant(p: &Params) -> f64 {
    let q = p.q_f64();
    1.0 / ((1.0 - q) * (1.0 - q * p.gamma_f64()))
}

/// `u(a) = [a;ξ][a;η]/[a]!` and `[a;γ]` for `a ≤ size`, so that
/// `c(m,n) = q^{mn} u(m) u(n) / [m+n;γ]`.
pub(crate) struct ConnectorTables<S> {
    q: S,
    qpow: Vec<S>,
    u: Vec<S>,
    bracket_gamma: Vec<S>,
}

impl<S: Scalar> ConnectorTables<S> {
    pub fn new(size: usize, p: &Params) -> Self {
        let prec = p.prec_bits();
        let q: S = p.q_as();
        let (xi, eta, gamma) = (p.xi_as::<S>(), p.eta_as::<S>(), p.gamma_as::<S>());
        let one = S::one_at(prec);
        let mut qpow = vec![one.clone()];
        let mut u = vec![one.clone()];
        let mut bracket_gamma = vec![one.clone()];
        let mut qint = S::zero_at(prec);
        for a in 1..=size {
            qint = qint + &qpow[a - 1];
            let qa = qpow[a - 1].clone() * &q;
            let fx = qint.clone() - qa.clone() * &xi;
            let fe = qint.clone() - qa.clone() * &eta;
            let fg = qint.clone() - qa.clone() * &gamma;
            u.push(u[a - 1].clone() * fx * fe / &qint);
            bracket_gamma.push(bracket_gamma[a - 1].clone() * fg);
            qpow.push(qa);
        }
        ConnectorTables { q, qpow, u, bracket_gamma }
    }

    fn q_pow(&self, t: usize) -> S {
        match self.qpow.get(t) {
            Some(v) => v.clone(),
            None => self.q.pow_u64(t as u64),
        }
    }

    pub fn c(&self, m: usize, n: usize) -> S {
        self.q_pow(m * n) * &self.u[m] * &self.u[n] / &self.bracket_gamma[m + n]
    }
}

/// Rejects pairs outside the convergence cases: both non-empty, or one
/// empty and the other empty or admissible.
pub fn check_convergent(k: &Index, l: &Index) -> Result<()> {
    let ok = match (k.is_empty(), l.is_empty()) {
        (false, false) | (true, true) => true,
        (true, false) => l.is_admissible(),
        (false, true) => k.is_admissible(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::DivergencePrecondition { k: k.clone(), l: l.clone() })
    }
}

/// `Z(k;l)` truncated to `m·n ≤ cutoff` when both indices are non-empty, and
/// to `n ≤ cutoff` (resp. `m`) when one is empty. Row-major accumulation.
pub fn connected_sum_truncated<S: Scalar>(k: &Index, l: &Index, cutoff: usize, p: &Params) -> Result<S> {
    check_convergent(k, l)?;
    let prec = p.prec_bits();
    if k.is_empty() && l.is_empty() {
        return Ok(S::one_at(prec));
    }
    let (xi, eta) = (p.xi_as::<S>(), p.eta_as::<S>());
    let mut t = SeriesTables::new(cutoff, &xi, &eta, p);
    let f = t.masses(k);
    let g = t.masses(l);
    let c = ConnectorTables::<S>::new(cutoff + 1, p);
    let mut acc = S::zero_at(prec);
    if k.is_empty() || l.is_empty() {
        let (h, other) = if k.is_empty() { (&g, &f) } else { (&f, &g) };
        debug_assert!(!other[0].is_zero_value());
        for (n, gn) in h.iter().enumerate().skip(1) {
            acc = acc + c.c(0, n) * gn;
        }
        return Ok(acc);
    }
    for (m, fm) in f.iter().enumerate().take(cutoff + 1).skip(1) {
        if fm.is_zero_value() {
            continue;
        }
        let mut row = S::zero_at(prec);
        for (n, gn) in g.iter().enumerate().take(cutoff / m + 1).skip(1) {
            row = row + c.c(m, n) * gn;
        }
        acc = acc + fm.clone() * &row;
    }
    Ok(acc)
}

/// Bound on the part of `Z(k;l)` outside the truncation region.
fn connected_tail_bound(k: &Index, l: &Index, cutoff: usize, p: &Params) -> f64 {
    let c0 = connector_decay_constant(p);
    let kappa = p.kappa_f64();
    match (k.is_empty(), l.is_empty()) {
        (true, true) => 0.0,
        (true, false) => c0 * series_tail_bound(l, cutoff, kappa, p),
        (false, true) => c0 * series_tail_bound(k, cutoff, kappa, p),
        (false, false) => {
            // Σ_{mn=t} C(m−1,r−1)C(n−1,s−1) ≤ d(t)·t^{max(r,s)−1} ≤ 2t^{max(r,s)−1/2}
            let (r, s) = (k.depth(), l.depth());
            let a = r.max(s) as f64 - 0.5;
            let lnq = p.q_f64().ln();
            let scale = 2.0 * c0 * kappa.powi((r + s) as i32);
            scale * monotone_ratio_tail(|t| a * t.ln() + t * lnq, cutoff as f64 + 1.0)
        }
    }
}

/// `Z(k;l)` with an adaptive cutoff and its error budget.
pub fn connected_sum(k: &Index, l: &Index, p: &Params) -> Result<Evaluation> {
    check_convergent(k, l)?;
    let target = 0.5 * p.target_abs_err();
    let mut cutoff = INITIAL_CUTOFF.min(p.max_terms());
    while connected_tail_bound(k, l, cutoff, p) > target {
        if cutoff >= p.max_terms() {
            return Err(Error::BudgetExceeded { cap: p.max_terms(), target: p.target_abs_err() });
        }
        cutoff = (2 * cutoff).min(p.max_terms());
    }
    let value: Real = connected_sum_truncated(k, l, cutoff, p)?;
    let ops = 4 * (k.weight() + l.weight()) as usize + 2 * cutoff;
    let budget = SeriesBudget {
        cutoff,
        tail_bound: connected_tail_bound(k, l, cutoff, p),
        rounding_bound: rounding_bound(value.to_f64(), ops, p),
        lambda_tail_bound: 0.0,
    };
    Ok(Evaluation { value, budget })
}

/// `Z(w;w′) = Σ_{i+j ≤ N} Z(w_i; w′_j)(ξη)^{i+j}` over `y`-words. Requires `ε` validated.
pub fn connected_sum_word(w: &LambdaPoly, w2: &LambdaPoly, p: &Params) -> Result<Evaluation> {
    let eps = p.epsilon().ok_or(Error::EpsilonNotValidated)?;
    if w.order() != w2.order() {
        return Err(Error::OrderMismatch { left: w.order(), right: w2.order() });
    }
    let order = w.order();
    let a = w.y_index_terms()?;
    let b = w2.y_index_terms()?;
    let mut degrees: Vec<Vec<((Index, Index), BigRational)>> = vec![Vec::new(); order + 1];
    for (i, ta) in a.iter().enumerate() {
        for (j, tb) in b.iter().enumerate().take(order + 1 - i) {
            for (ka, ca) in ta {
                for (kb, cb) in tb {
                    degrees[i + j].push(((ka.clone(), kb.clone()), ca * cb));
                }
            }
        }
    }
    let mut cache: HashMap<(Index, Index), Evaluation> = HashMap::new();
    lambda_series(&degrees, order, eps, p, |(k, l)| {
        if let Some(ev) = cache.get(&(k.clone(), l.clone())) {
            return Ok(ev.clone());
        }
        let ev = connected_sum(k, l, p)?;
        cache.insert((k.clone(), l.clone()), ev.clone());
        Ok(ev)
    })
}

fn xe_real(p: &Params) -> Real {
    Real::from_ratio(&(p.xi() * p.eta()), p.prec_bits())
}

/// `a + s·b` with the matching budget.
fn affine(a: &Evaluation, s: &Real, b: &Evaluation) -> Evaluation {
    let sf = s.to_f64();
    Evaluation { value: &a.value + &(s * &b.value), budget: SeriesBudget::combine([(1.0, &a.budget), (sf, &b.budget)]) }
}

/// Transport relations: `Z(k→;l) = Z(k;l↑) + ξη·Z(k→↑;l↑)` when `l ≠ ∅`, and
/// `Z(k↑;l) = Z(k;l→) − ξη·Z(k↑;l→↑)` when `k ≠ ∅`.
pub fn transport_residuals(k: &Index, l: &Index, p: &Params) -> Result<Vec<Residual>> {
    let xe = xe_real(p);
    let mut out = Vec::new();
    if !l.is_empty() {
        let lhs = connected_sum(&k.right(), l, p)?;
        let a = connected_sum(k, &l.up()?, p)?;
        let b = connected_sum(&k.right().up()?, &l.up()?, p)?;
        let rhs = affine(&a, &xe, &b);
        out.push(Residual::from_evaluations(format!("TR1 k=({k}) l=({l})"), &lhs, &rhs, p));
    }
    if !k.is_empty() {
        let lhs = connected_sum(&k.up()?, l, p)?;
        let a = connected_sum(k, &l.right(), p)?;
        let b = connected_sum(&k.up()?, &l.right().up()?, p)?;
        let rhs = affine(&a, &-xe.clone(), &b);
        out.push(Residual::from_evaluations(format!("TR2 k=({k}) l=({l})"), &lhs, &rhs, p));
    }
    Ok(out)
}

fn block_residual(k: &Index, l: &Index, block: [Arrow; 2], p: &Params) -> Result<Residual> {
    let lhs = connected_sum(&k.apply_arrows(&block)?, l, p)?;
    let rhs = connected_sum(k, &l.apply_arrows(&block)?, p)?;
    let name = match block {
        [Arrow::Right, Arrow::Up] => "DT1",
        _ => "DT2",
    };
    Ok(Residual::from_evaluations(format!("{name} k=({k}) l=({l})"), &lhs, &rhs, p))
}

/// `Z(k→↑;l) = Z(k;l→↑)`, and `Z(k↑→;l) = Z(k;l↑→)` when `k, l ≠ ∅`.
pub fn double_transport_residuals(k: &Index, l: &Index, p: &Params) -> Result<Vec<Residual>> {
    let mut out = vec![block_residual(k, l, [Arrow::Right, Arrow::Up], p)?];
    if !k.is_empty() && !l.is_empty() {
        out.push(block_residual(k, l, [Arrow::Up, Arrow::Right], p)?);
    }
    Ok(out)
}

/// Both sides of `[a]{[a+n] − q^{a+n}γ} − q^n([a]−q^aξ)([a]−q^aη) = [a][n] − q^{a+n}ξη`, exactly.
pub fn key_identity_sides(a: u64, n: u64, p: &Params) -> (BigRational, BigRational) {
    let q: BigRational = p.q_as();
    let (xi, eta, gamma) = (p.xi().clone(), p.eta().clone(), p.gamma());
    let qi = |m: u64| q_int::<BigRational>(m, p);
    let qp = |m: u64| q.pow_u64(m);
    let lhs = qi(a) * (qi(a + n) - qp(a + n) * &gamma) - qp(n) * (qi(a) - qp(a) * &xi) * (qi(a) - qp(a) * &eta);
    let rhs = qi(a) * qi(n) - qp(a + n) * &xi * &eta;
    (lhs, rhs)
}

/// Both sides of `c(a−1,n) − c(a,n) = ([a][n] − q^{a+n}ξη)/(q^n([a]−q^aξ)([a]−q^aη))·c(a,n)`, exactly.
pub fn connector_step_sides(a: u64, n: u64, p: &Params) -> (BigRational, BigRational) {
    let q: BigRational = p.q_as();
    let qi = |m: u64| q_int::<BigRational>(m, p);
    let qa = q.pow_u64(a);
    let can: BigRational = connector(a, n, p);
    let lhs = connector::<BigRational>(a - 1, n, p) - &can;
    let num = qi(a) * qi(n) - q.pow_u64(a + n) * p.xi() * p.eta();
    let den = q.pow_u64(n) * (qi(a) - &qa * p.xi()) * (qi(a) - &qa * p.eta());
    (lhs, num / den * can)
}

/// One sampled instance of the algebraic identity behind the transport relations.
#[derive(Clone, Debug)]
pub struct KeySample {
    pub params: Params,
    pub a: u64,
    pub n: u64,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub identity_holds: bool,
    pub step_holds: bool,
}

fn random_rational(rng: &mut ChaCha8Rng, lo_num: i64, den_max: i64, strict_below_one: bool) -> BigRational {
    let d = rng.gen_range(2..=den_max);
    let hi = if strict_below_one { d - 1 } else { d };
    let n = rng.gen_range(lo_num..=hi);
    BigRational::new(n.into(), d.into())
}

/// Exact checks at `samples` seeded random points `(q, ξ, η, a, n)`, `1 ≤ a, n ≤ 12`.
pub fn key_identity_samples(samples: usize, seed: u64) -> Vec<KeySample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let q = random_rational(&mut rng, 1, 30, true);
        let xi = random_rational(&mut rng, 0, 30, true);
        let eta = random_rational(&mut rng, 0, 30, true);
        let Ok(params) = Params::new(q, xi, eta) else { continue };
        let a = rng.gen_range(1..=12u64);
        let n = rng.gen_range(1..=12u64);
        let (l, r) = key_identity_sides(a, n, &params);
        let (sl, sr) = connector_step_sides(a, n, &params);
        out.push(KeySample { params, a, n, identity_holds: l == r, lhs: l, rhs: r, step_holds: sl == sr });
    }
    out
}

/// True iff every sample satisfies both exact identities.
pub fn key_identity_check(samples: usize, seed: u64) -> bool {
    key_identity_samples(samples, seed).iter().all(|s| s.identity_holds && s.step_holds)
}

/// `Σ_{a>m} g(a)·c(a,n)` for `g(a) = [a]/(dx de)` or `q^a/(dx de)`, with tail bound.
fn connector_column_sum(m: usize, n: usize, with_qint: bool, p: &Params) -> Result<Evaluation> {
    let c0 = connector_decay_constant(p);
    let kappa = p.kappa_f64();
    let qn = p.q_f64().powi(n as i32);
    // g(a) ≤ κ, c(a,n) ≤ C0 q^{an}
    let tail = |a_max: usize| kappa * c0 * qn.powi(a_max as i32 + 1) / (1.0 - qn);
    let target = 0.5 * p.target_abs_err();
    let mut a_max = (m + INITIAL_CUTOFF).min(p.max_terms());
    while tail(a_max) > target {
        if a_max >= p.max_terms() {
            return Err(Error::BudgetExceeded { cap: p.max_terms(), target: p.target_abs_err() });
        }
        a_max = (2 * a_max).min(p.max_terms());
    }
    let prec = p.prec_bits();
    let zero = Real::zero(prec);
    let mut t = SeriesTables::new(a_max, p.xi_real(), p.eta_real(), p);
    let g = t.masses(&Index::new(vec![if with_qint { 1 } else { 2 }])?);
    let c = ConnectorTables::<Real>::new(a_max + n, p);
    let mut acc = zero;
    for (a, ga) in g.iter().enumerate().take(a_max + 1).skip(m + 1) {
        acc += ga * &c.c(a, n);
    }
    let budget = SeriesBudget {
        cutoff: a_max,
        tail_bound: tail(a_max),
        rounding_bound: rounding_bound(acc.to_f64(), 2 * a_max, p),
        lambda_tail_bound: 0.0,
    };
    Ok(Evaluation { value: acc, budget })
}

/// The telescoped identity
/// `Σ_{a>m} [a]/(dx de)·c(a,n) = (q^n/[n])·c(m,n) + ξη·(q^n/[n])·Σ_{a>m} q^a/(dx de)·c(a,n)`.
pub fn telescope_check(m: usize, n: usize, p: &Params) -> Result<Residual> {
    if n == 0 {
        return Err(Error::InvalidParams("telescoping requires n ≥ 1".into()));
    }
    let lhs = connector_column_sum(m, n, true, p)?;
    let second = connector_column_sum(m, n, false, p)?;
    let qn_over: Real = p.q_real().powi(n as u64) / q_int::<Real>(n as u64, p);
    let head =
        Evaluation { value: &qn_over * &connector::<Real>(m as u64, n as u64, p), budget: SeriesBudget::default() };
    let rhs = affine(&head, &(&xe_real(p) * &qn_over), &second);
    Ok(Residual::from_evaluations(format!("telescope m={m} n={n}"), &lhs, &rhs, p))
}

/// `1/c_{ξ,η}` with the absolute error of its product truncation.
fn inverse_c_factor(p: &Params) -> Result<(Real, f64)> {
    let c = c_factor_bounded(p)?;
    let inv = c.value.recip();
    let err = inv.to_f64().abs() * (c.rel_bound / (1.0 - c.rel_bound).max(0.5));
    Ok((inv, err))
}

/// `Z(k;(1)) = O(k↑)/c_{ξ,η}`.
pub fn initial_value_residual(k: &Index, p: &Params) -> Result<Residual> {
    if k.is_empty() {
        return Err(Error::UpOnEmpty);
    }
    let lhs = connected_sum(k, &Index::new(vec![1])?, p)?;
    let rhs = scaled_by_inverse_c(&big_o(&k.up()?, p)?, p)?;
    Ok(Residual::from_evaluations(format!("initial k=({k})"), &lhs, &rhs, p))
}

fn scaled_by_inverse_c(ev: &Evaluation, p: &Params) -> Result<Evaluation> {
    let (inv, err) = inverse_c_factor(p)?;
    let invf = inv.to_f64();
    let mut budget = SeriesBudget::combine([(invf, &ev.budget)]);
    budget.rounding_bound += err * ev.value.to_f64().abs() + err * ev.budget.total();
    Ok(Evaluation { value: &ev.value * &inv, budget })
}

/// `Σ_{n≥1} [n]/(dx de)·c(m,n) = (q^m/[m])/c_{ξ,η}`.
pub fn qgauss_residual(m: usize, p: &Params) -> Result<Residual> {
    if m == 0 {
        return Err(Error::InvalidParams("q-Gauss check requires m ≥ 1".into()));
    }
    // symmetric in (m, n): sum over the first argument with the second fixed
    let lhs = connector_column_sum(0, m, true, p)?;
    let head =
        Evaluation { value: p.q_real().powi(m as u64) / q_int::<Real>(m as u64, p), budget: SeriesBudget::default() };
    let rhs = scaled_by_inverse_c(&head, p)?;
    Ok(Residual::from_evaluations(format!("q-Gauss m={m}"), &lhs, &rhs, p))
}

/// `₂φ₁(qξ′, qη′; q^{m+2}ξ′η′; q, q^m)` against its infinite-product evaluation.
pub fn phi21_gauss_residual(m: usize, p: &Params) -> Result<Residual> {
    let prec = p.prec_bits();
    let q = p.q_real();
    let xp = Real::from_ratio(&p.xi_prime(), prec);
    let ep = Real::from_ratio(&p.eta_prime(), prec);
    let qm = q.powi(m as u64);
    let a = q * &xp;
    let b = q * &ep;
    let c = q.powi(m as u64 + 2) * &xp * &ep;
    let mut n_terms = INITIAL_CUTOFF;
    let series = loop {
        let s = phi21_partial(&a, &b, &c, &qm, n_terms, p)?;
        if s.tail_estimate <= 0.5 * p.target_abs_err() {
            break s;
        }
        if n_terms >= p.max_terms() {
            return Err(Error::BudgetExceeded { cap: p.max_terms(), target: p.target_abs_err() });
        }
        n_terms = (2 * n_terms).min(p.max_terms());
    };
    let qm1 = q.powi(m as u64 + 1);
    let n1 = q_poch_inf_bounded(&(&qm1 * &xp), p)?;
    let n2 = q_poch_inf_bounded(&(&qm1 * &ep), p)?;
    let d1 = q_poch_inf_bounded(&c, p)?;
    let d2 = q_poch_inf_bounded(&qm, p)?;
    let rhs = (&n1.value * &n2.value) / (&d1.value * &d2.value);
    let rel = n1.rel_bound + n2.rel_bound + d1.rel_bound + d2.rel_bound;
    let budget = series.tail_estimate + rhs.to_f64().abs() * rel + rounding_bound(rhs.to_f64(), 4 * n_terms, p);
    Ok(Residual::new(format!("2phi1 m={m}"), series.value, rhs, budget, p.slack()))
}

/// The logarithmic parameters `X = −log_q ξ′`, `Y = −log_q η′`.
pub fn log_parameters(p: &Params) -> (Real, Real) {
    let prec = p.prec_bits();
    let lnq = p.q_real().ln();
    let x = -(Real::from_ratio(&p.xi_prime(), prec).ln() / &lnq);
    let y = -(Real::from_ratio(&p.eta_prime(), prec).ln() / &lnq);
    (x, y)
}

/// `(q^{−X} − 1)/(1 − q)`, which recovers `ξ`.
pub fn recover_xi(x: &Real, p: &Params) -> Real {
    let one = Real::one(p.prec_bits());
    (crate::qnum::q_pow_real(&-x.clone(), p) - &one) / (&one - p.q_real())
}

/// `c(m,n) = q^{mn}⟨1−X⟩_m⟨1−Y⟩_m⟨1−X⟩_n⟨1−Y⟩_n / (⟨1⟩_m⟨1⟩_n⟨1−X−Y⟩_{m+n})`.
pub fn connector_alt(m: u64, n: u64, p: &Params) -> Real {
    let prec = p.prec_bits();
    let (x, y) = log_parameters(p);
    let one = Real::one(prec);
    let ax = &one - &x;
    let ay = &one - &y;
    let axy = &ax - &y;
    let num = p.q_real().powi(m * n)
        * angle_poch(&ax, m, p)
        * angle_poch(&ay, m, p)
        * angle_poch(&ax, n, p)
        * angle_poch(&ay, n, p);
    let den = angle_poch(&one, m, p) * angle_poch(&one, n, p) * angle_poch(&axy, m + n, p);
    num / den
}

/// `Z = O/c` at either end of the chain.
fn end_residual(label: String, z: &Evaluation, o: &Evaluation, p: &Params) -> Result<Residual> {
    let rhs = scaled_by_inverse_c(o, p)?;
    Ok(Residual::from_evaluations(label, z, &rhs, p))
}

/// The chain `O(k) = c·Z(h;(1)) = ⋯ = c·Z((1);h′) = O(k†)` for a BBBL index `k`,
/// moving one two-arrow block per step from the left argument to the right.
pub fn dor_chain(k: &Index, p: &Params) -> Result<Vec<Residual>> {
    if k.is_bbbl().is_none() || k.is_empty() {
        return Err(Error::NotBbbl(k.clone()));
    }
    let path = k.arrow_path_from_one()?;
    let (last, body) = path.split_last().expect("an admissible index has a non-empty path");
    debug_assert_eq!(*last, Arrow::Up);
    let blocks = two_arrow_blocks(body).ok_or_else(|| Error::NotBbbl(k.clone()))?;
    let one = Index::new(vec![1])?;
    let mut out = Vec::with_capacity(blocks.len() + 2);

    let mut left = one.apply_arrows(body)?;
    let mut right = one.clone();
    let z = connected_sum(&left, &right, p)?;
    out.push(end_residual(format!("Z(({left});(1)) = O(({k}))/c"), &z, &big_o(k, p)?, p)?);

    for block in blocks.iter().rev() {
        let stem = undo_block(&left, *block)?;
        out.push(block_residual(&stem, &right, *block, p)?);
        right = right.apply_arrows(block)?;
        left = stem;
    }

    let dual = k.dual()?;
    if right.up()? != dual {
        return Err(Error::NotBbbl(k.clone()));
    }
    let z = connected_sum(&left, &right, p)?;
    out.push(end_residual(format!("Z((1);({right})) = O(({dual}))/c"), &z, &big_o(&dual, p)?, p)?);
    Ok(out)
}

/// The index `a` with `a·block = left`.
fn undo_block(left: &Index, block: [Arrow; 2]) -> Result<Index> {
    let parts = left.parts();
    let err = || Error::MalformedIndex(format!("({left}) does not end with the given block"));
    let (&lastp, init) = parts.split_last().ok_or_else(err)?;
    match block {
        // a→↑ = (a, 2)
        [Arrow::Right, Arrow::Up] if lastp == 2 => Index::new(init.to_vec()),
        // a↑→ = (a↑, 1)
        [Arrow::Up, Arrow::Right] if lastp == 1 => {
            let mut v = init.to_vec();
            match v.last_mut() {
                Some(x) if *x >= 2 => {
                    *x -= 1;
                    Index::new(v)
                }
                _ => Err(err()),
            }
        }
        _ => Err(err()),
    }
}

/// Convenience: `O(ywx)` and `c·Z(yw; y)` for the cross-module check.
pub fn main_pipeline_sides(w: &LambdaPoly, p: &Params) -> Result<(Evaluation, Evaluation)> {
    let o = crate::series::big_o_word(w, p)?;
    let y = LambdaPoly::letter(crate::words::Letter::Y, w.order());
    let yw = y.mul(w)?;
    let z = connected_sum_word(&yw, &y, p)?;
    let c = c_factor_bounded(p)?;
    let cz = Evaluation {
        value: &z.value * &c.value,
        budget: {
            let mut b = SeriesBudget::combine([(c.value.to_f64(), &z.budget)]);
            b.rounding_bound += c.rel_bound * (z.value.to_f64().abs() * c.value.to_f64());
            b
        },
    };
    Ok((o, cz))
}

/// `Z(k;l) = Z(l;k)` in exact arithmetic at a fixed cutoff.
pub fn exact_symmetry(k: &Index, l: &Index, cutoff: usize, p: &Params) -> Result<bool> {
    let a: BigRational = connected_sum_truncated(k, l, cutoff, p)?;
    let b: BigRational = connected_sum_truncated(l, k, cutoff, p)?;
    Ok((a - b).is_zero())
}
