//! Named verification suites: case enumeration, parallel execution with a
//! deterministic case order, and report assembly.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::connect::{
    check_convergent, connected_sum, connector, connector_alt, dor_chain, double_transport_residuals,
    initial_value_residual, key_identity_samples, log_parameters, phi21_gauss_residual, qgauss_residual, recover_xi,
    telescope_check, transport_residuals, Residual,
};
use crate::error::{Error, Result};
use crate::indices::{admissible_indices, bbbl_indices, Index};
use crate::params::{format_rational, Params};
use crate::real::{ratio_to_f64, Real};
use crate::report::{CaseRecord, ParamsSnapshot, Report};
use crate::series::{big_o, big_o_word, defect_prediction, ohno_defect, ohno_sum, validate_epsilon, zeta_q};
use crate::words::parse_expr;

pub const DEFAULT_LAMBDA_ORDER: usize = 6;
pub const DEFAULT_SEED: u64 = 20_240_917;

/// The fixed extended-relation expressions, before the random ones.
pub const EXTENDED_WORDS: [&str; 7] = ["x", "y", "xx", "xyx", "R", "xR", "yRx"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Duality,
    SingleOhno,
    DoubleOhno,
    Extended,
    Transport,
    Initial,
    Qgauss,
    KeyIdentity,
    AltConnector,
    Defects,
    All,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Duality,
        Suite::SingleOhno,
        Suite::DoubleOhno,
        Suite::Extended,
        Suite::Transport,
        Suite::Initial,
        Suite::Qgauss,
        Suite::KeyIdentity,
        Suite::AltConnector,
        Suite::Defects,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Duality => "duality",
            Suite::SingleOhno => "single-ohno",
            Suite::DoubleOhno => "double-ohno",
            Suite::Extended => "extended",
            Suite::Transport => "transport",
            Suite::Initial => "initial",
            Suite::Qgauss => "qgauss",
            Suite::KeyIdentity => "key-identity",
            Suite::AltConnector => "alt-connector",
            Suite::Defects => "defects",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// Scope controls shared by all suites.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Overrides the per-suite default weight limit.
    pub max_weight: Option<u32>,
    pub lambda_order: usize,
    pub seed: u64,
    /// Restricts index-driven suites to this index.
    pub index: Option<Index>,
    /// An extra expression for the extended suite.
    pub w_expr: Option<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            max_weight: None,
            lambda_order: DEFAULT_LAMBDA_ORDER,
            seed: DEFAULT_SEED,
            index: None,
            w_expr: None,
        }
    }
}

type CaseFn<'a> = Box<dyn Fn() -> Result<Vec<CaseRecord>> + Send + Sync + 'a>;

struct Case<'a> {
    input: String,
    run: CaseFn<'a>,
}

fn case<'a>(input: impl Into<String>, run: impl Fn() -> Result<Vec<CaseRecord>> + Send + Sync + 'a) -> Case<'a> {
    Case { input: input.into(), run: Box::new(run) }
}

fn residual_case<'a>(input: impl Into<String>, run: impl Fn() -> Result<Vec<Residual>> + Send + Sync + 'a) -> Case<'a> {
    let input = input.into();
    let tag = input.clone();
    case(input, move || Ok(run()?.iter().map(|r| CaseRecord::from_residual(&tag, r)).collect()))
}

fn execute(cases: Vec<Case<'_>>) -> Vec<CaseRecord> {
    cases
        .par_iter()
        .map(|c| match (c.run)() {
            Ok(records) => records,
            Err(e) => vec![CaseRecord::from_error(&c.input, &e)],
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

fn indices_for(opts: &SuiteOptions, default_weight: u32, family: fn(u32) -> Vec<Index>) -> Vec<Index> {
    match &opts.index {
        Some(k) => vec![k.clone()],
        None => family(opts.max_weight.unwrap_or(default_weight)),
    }
}

/// `(e1, e2)` with `e1 + e2 ≤ total`.
fn ohno_pairs(total: u32) -> Vec<(u32, u32)> {
    (0..=total).flat_map(|s| (0..=s).map(move |e1| (e1, s - e1))).collect()
}

fn dual_residual(
    k: &Index,
    p: &Params,
    eval: fn(&Index, &Params) -> Result<crate::series::Evaluation>,
    name: &str,
) -> Result<Vec<Residual>> {
    let d = k.dual()?;
    let a = eval(k, p)?;
    let b = eval(&d, p)?;
    Ok(vec![Residual::from_evaluations(format!("{name}(({k})) = {name}(({d}))"), &a, &b, p)])
}

fn duality_cases<'a>(p: &'a Params, opts: &SuiteOptions) -> Result<Vec<Case<'a>>> {
    let p0 = p.with_xi_eta(BigRational::zero(), BigRational::zero())?;
    Ok(indices_for(opts, 7, admissible_indices)
        .into_iter()
        .map(|k| {
            let p0 = p0.clone();
            residual_case(format!("duality k=({k})"), move || dual_residual(&k, &p0, zeta_q, "zeta_q"))
        })
        .collect())
}

fn single_ohno_cases<'a>(p: &'a Params, opts: &SuiteOptions) -> Result<Vec<Case<'a>>> {
    let p1 = p.with_xi_eta(p.xi().clone(), BigRational::zero())?;
    Ok(indices_for(opts, 7, admissible_indices)
        .into_iter()
        .map(|k| {
            let p1 = p1.clone();
            residual_case(format!("single-ohno k=({k})"), move || dual_residual(&k, &p1, big_o, "O"))
        })
        .collect())
}

fn double_ohno_cases<'a>(p: &'a Params, opts: &SuiteOptions) -> Vec<Case<'a>> {
    let mut cases = Vec::new();
    for k in indices_for(opts, 8, bbbl_indices) {
        let kk = k.clone();
        cases.push(residual_case(format!("double-ohno k=({k})"), move || dual_residual(&kk, p, big_o, "O")));
        for (e1, e2) in ohno_pairs(3) {
            let kk = k.clone();
            cases.push(residual_case(format!("double-ohno k=({k}) e1={e1} e2={e2}"), move || {
                let d = kk.dual()?;
                let a = ohno_sum(&kk, e1, e2, p)?;
                let b = ohno_sum(&d, e1, e2, p)?;
                let label = format!("O_{{{e1},{e2}}}(({kk})) = O_{{{e1},{e2}}}(({d}))");
                Ok(vec![Residual::from_evaluations(label, &a, &b, p)])
            }));
        }
        let kk = k.clone();
        cases.push(residual_case(format!("dor-chain k=({k})"), move || dor_chain(&kk, p)));
    }
    cases
}

/// Random expressions of degree at most 2 in the generators `x, y, R, L`:
/// one to three terms, each a small rational times at most two generators.
pub fn random_expressions(count: usize, seed: u64) -> Vec<String> {
    const GENERATORS: [&str; 4] = ["x", "y", "R", "L"];
    const COEFFS: [&str; 6] = ["1", "2", "1/2", "3/4", "1/3", "5/2"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let terms = rng.gen_range(1..=3);
            let mut out = String::new();
            for t in 0..terms {
                let negative = rng.gen_bool(0.3);
                if t > 0 {
                    out.push_str(if negative { " - " } else { " + " });
                } else if negative {
                    out.push('-');
                }
                out.push_str(COEFFS.choose(&mut rng).expect("non-empty"));
                for _ in 0..rng.gen_range(1..=2) {
                    out.push(' ');
                    out.push_str(GENERATORS.choose(&mut rng).expect("non-empty"));
                }
            }
            out
        })
        .collect()
}

fn extended_cases<'a>(p: &'a Params, opts: &SuiteOptions) -> Vec<Case<'a>> {
    let order = opts.lambda_order;
    let mut exprs: Vec<String> = EXTENDED_WORDS.iter().map(|s| s.to_string()).collect();
    exprs.extend(random_expressions(20, opts.seed));
    exprs.extend(opts.w_expr.clone());
    exprs
        .into_iter()
        .map(|w| {
            residual_case(format!("extended w={w} N={order}"), move || {
                let e = parse_expr(&w, order)?;
                let a = big_o_word(&e, p)?;
                let b = big_o_word(&e.tau(), p)?;
                Ok(vec![Residual::from_evaluations("O(ywx) = O(y tau(w) x)", &a, &b, p)])
            })
        })
        .collect()
}

/// Seeded random pairs of indices of depth ≤ 3 with entries ≤ 3.
pub fn random_index_pairs(count: usize, seed: u64) -> Vec<(Index, Index)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let depth = rng.gen_range(0..=3);
        Index::new((0..depth).map(|_| rng.gen_range(1..=3)).collect()).expect("positive parts")
    };
    (0..count).map(|_| (draw(&mut rng), draw(&mut rng))).collect()
}

fn transport_cases<'a>(p: &'a Params, opts: &SuiteOptions) -> Vec<Case<'a>> {
    random_index_pairs(50, opts.seed)
        .into_iter()
        .map(|(k, l)| {
            residual_case(format!("transport k=({k}) l=({l})"), move || {
                let mut out = transport_residuals(&k, &l, p)?;
                out.extend(double_transport_residuals(&k, &l, p)?);
                if check_convergent(&k, &l).is_ok() {
                    let a = connected_sum(&k, &l, p)?;
                    let b = connected_sum(&l, &k, p)?;
                    out.push(Residual::from_evaluations("symmetry", &a, &b, p));
                }
                Ok(out)
            })
        })
        .collect()
}

pub const INITIAL_INDICES: [&str; 5] = ["1", "2", "1,2", "2,1", "1,1,2"];

fn initial_cases<'a>(p: &'a Params, opts: &SuiteOptions) -> Result<Vec<Case<'a>>> {
    let ks: Vec<Index> = match &opts.index {
        Some(k) => vec![k.clone()],
        None => INITIAL_INDICES.iter().map(|s| s.parse()).collect::<Result<_>>()?,
    };
    let mut cases: Vec<Case<'a>> = ks
        .into_iter()
        .map(|k| residual_case(format!("initial k=({k})"), move || Ok(vec![initial_value_residual(&k, p)?])))
        .collect();
    for m in 0..=3 {
        for n in 1..=3 {
            cases.push(residual_case(format!("telescope m={m} n={n}"), move || Ok(vec![telescope_check(m, n, p)?])));
        }
    }
    Ok(cases)
}

fn qgauss_cases(p: &Params) -> Vec<Case<'_>> {
    (1..=10)
        .map(|m| {
            residual_case(format!("qgauss m={m}"), move || {
                Ok(vec![qgauss_residual(m, p)?, phi21_gauss_residual(m, p)?])
            })
        })
        .collect()
}

pub const KEY_IDENTITY_SAMPLES: usize = 100;

fn key_identity_cases(opts: &SuiteOptions) -> Vec<Case<'static>> {
    key_identity_samples(KEY_IDENTITY_SAMPLES, opts.seed)
        .into_iter()
        .map(|s| {
            let input = format!(
                "key-identity q={} xi={} eta={} a={} n={}",
                format_rational(s.params.q()),
                format_rational(s.params.xi()),
                format_rational(s.params.eta()),
                s.a,
                s.n
            );
            let tag = input.clone();
            case(input, move || {
                Ok(vec![CaseRecord {
                    input: tag.clone(),
                    lhs: Some(format_rational(&s.lhs)),
                    rhs: Some(format_rational(&s.rhs)),
                    residual: Some(ratio_to_f64(&(&s.lhs - &s.rhs)).abs()),
                    tolerance: Some(0.0),
                    pass: s.identity_holds && s.step_holds,
                    error: None,
                }])
            })
        })
        .collect()
}

pub const ALT_CONNECTOR_MAX: u64 = 20;

fn alt_connector_cases(p: &Params) -> Vec<Case<'_>> {
    let mut cases = vec![residual_case("alt-connector xi recovery", move || {
        let (x, _) = log_parameters(p);
        let back = recover_xi(&x, p);
        let budget = 64.0 * p.unit_roundoff();
        Ok(vec![Residual::new("(q^-X - 1)/(1 - q) = xi", back, p.xi_real().clone(), budget, p.slack())])
    })];
    for m in 0..=ALT_CONNECTOR_MAX {
        cases.push(residual_case(format!("alt-connector m={m}"), move || {
            (0..=ALT_CONNECTOR_MAX)
                .map(|n| {
                    let a: Real = connector(m, n, p);
                    let b = connector_alt(m, n, p);
                    let budget = a.to_f64().abs() * p.unit_roundoff() * 1e4 * (m + n + 2) as f64;
                    Ok(Residual::new(format!("c({m},{n})"), a, b, budget, p.slack()))
                })
                .collect()
        }));
    }
    cases
}

fn defect_cases<'a>(p: &'a Params, opts: &SuiteOptions) -> Vec<Case<'a>> {
    let mut cases = Vec::new();
    for k in indices_for(opts, 5, admissible_indices) {
        for (e1, e2) in ohno_pairs(3) {
            let k = k.clone();
            cases.push(residual_case(format!("defect k=({k}) e1={e1} e2={e2}"), move || {
                let d = ohno_defect(&k, e1, e2, p)?;
                let pred = defect_prediction(&k, e1, e2, p)?;
                Ok(vec![Residual::from_evaluations("defect = predicted", &d, &pred, p)])
            }));
        }
    }
    cases
}

fn suite_cases<'a>(suite: Suite, p: &'a Params, opts: &SuiteOptions) -> Result<Vec<Case<'a>>> {
    Ok(match suite {
        Suite::Duality => duality_cases(p, opts)?,
        Suite::SingleOhno => single_ohno_cases(p, opts)?,
        Suite::DoubleOhno => double_ohno_cases(p, opts),
        Suite::Extended => extended_cases(p, opts),
        Suite::Transport => transport_cases(p, opts),
        Suite::Initial => initial_cases(p, opts)?,
        Suite::Qgauss => qgauss_cases(p),
        Suite::KeyIdentity => key_identity_cases(opts),
        Suite::AltConnector => alt_connector_cases(p),
        Suite::Defects => defect_cases(p, opts),
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::ALL.into_iter().filter(|s| *s != Suite::All) {
                all.extend(suite_cases(s, p, opts)?);
            }
            all
        }
    })
}

fn needs_epsilon(suite: Suite) -> bool {
    matches!(suite, Suite::Extended | Suite::All)
}

/// Runs a suite and assembles its report. Setup failures (invalid derived
/// parameters, `ε ≥ 1`) become a single failed case.
pub fn run_suite(suite: Suite, params: &Params, opts: &SuiteOptions) -> Report {
    let start = Instant::now();
    let mut p = params.clone();
    let command = format!("suite {suite}");
    let setup = if needs_epsilon(suite) { validate_epsilon(&mut p).map(|_| ()) } else { Ok(()) };
    let records = match setup.and_then(|_| suite_cases(suite, &p, opts)) {
        Ok(cases) => execute(cases),
        Err(e) => vec![CaseRecord::from_error(&command, &e)],
    };
    Report::new(command, ParamsSnapshot::new(&p, opts.lambda_order), records, start.elapsed().as_secs_f64())
}

/// Runs ad-hoc residual-producing checks and assembles a report.
pub fn run_checks(
    command: &str,
    params: &Params,
    lambda_order: usize,
    checks: Vec<(String, Result<Vec<Residual>>)>,
) -> Report {
    let start = Instant::now();
    let mut records = Vec::new();
    for (input, outcome) in checks {
        match outcome {
            Ok(rs) => records.extend(rs.iter().map(|r| CaseRecord::from_residual(&input, r))),
            Err(e) => records.push(CaseRecord::from_error(&input, &e)),
        }
    }
    Report::new(command, ParamsSnapshot::new(params, lambda_order), records, start.elapsed().as_secs_f64())
}
