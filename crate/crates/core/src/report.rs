//! Machine-readable verification records.

use serde::{Deserialize, Serialize};

use crate::connect::Residual;
use crate::error::Error;
use crate::params::{format_rational, Params};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsSnapshot {
    pub q: String,
    pub xi: String,
    pub eta: String,
    pub prec_bits: usize,
    pub max_terms: usize,
    pub lambda_order: usize,
    pub tolerance: f64,
    pub target_abs_err: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl ParamsSnapshot {
    pub fn new(p: &Params, lambda_order: usize) -> Self {
        ParamsSnapshot {
            q: format_rational(p.q()),
            xi: format_rational(p.xi()),
            eta: format_rational(p.eta()),
            prec_bits: p.prec_bits(),
            max_terms: p.max_terms(),
            lambda_order,
            tolerance: p.slack(),
            target_abs_err: p.target_abs_err(),
            epsilon: p.epsilon(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub input: String,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl CaseRecord {
    pub fn from_residual(input: &str, r: &Residual) -> Self {
        CaseRecord {
            input: format!("{input}: {}", r.label),
            lhs: Some(r.lhs.to_decimal_string()),
            rhs: Some(r.rhs.to_decimal_string()),
            residual: finite(r.residual),
            tolerance: finite(r.tolerance),
            pass: r.pass,
            error: None,
        }
    }

    pub fn from_error(input: &str, e: &Error) -> Self {
        CaseRecord {
            input: input.to_string(),
            lhs: None,
            rhs: None,
            residual: None,
            tolerance: None,
            pass: false,
            error: Some(e.to_string()),
        }
    }

    /// A bare value with its error budget (no right-hand side).
    pub fn value(input: &str, value: String, budget: f64) -> Self {
        CaseRecord {
            input: input.to_string(),
            lhs: Some(value),
            rhs: None,
            residual: None,
            tolerance: finite(budget),
            pass: true,
            error: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cases: usize,
    pub passed: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub params: ParamsSnapshot,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
    pub wall_time: f64,
}

impl Report {
    pub fn new(command: impl Into<String>, params: ParamsSnapshot, cases: Vec<CaseRecord>, wall_time: f64) -> Self {
        let passed = cases.iter().filter(|c| c.pass).count();
        let summary = Summary { cases: cases.len(), passed, failures: cases.len() - passed };
        Report { command: command.into(), params, cases, summary, wall_time }
    }

    pub fn passed(&self) -> bool {
        self.summary.failures == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One line per case followed by the summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let status = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {}", c.input));
            match (&c.lhs, &c.rhs) {
                (Some(l), Some(r)) => out.push_str(&format!("\n     lhs = {l}\n     rhs = {r}")),
                (Some(l), None) => out.push_str(&format!("\n     value = {l}")),
                _ => {}
            }
            if let Some(res) = c.residual {
                out.push_str(&format!("\n     residual = {res:.3e}"));
            }
            if let Some(t) = c.tolerance {
                out.push_str(&format!("  tolerance = {t:.3e}"));
            }
            if let Some(e) = &c.error {
                out.push_str(&format!("\n     error: {e}"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{}: {} cases, {} passed, {} failed ({:.2} s)\n",
            self.command, self.summary.cases, self.summary.passed, self.summary.failures, self.wall_time
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Real;

    #[test]
    fn summary_counts_and_exit_code() {
        let p = Params::default();
        let good = Residual::new("a", Real::one(192), Real::one(192), 0.0, 1e-10);
        let bad = Residual::new("b", Real::one(192), Real::zero(192), 0.0, 1e-10);
        let r = Report::new(
            "verify",
            ParamsSnapshot::new(&p, 6),
            vec![CaseRecord::from_residual("x", &good), CaseRecord::from_error("y", &Error::UpOnEmpty)],
            0.0,
        );
        assert_eq!(r.summary, Summary { cases: 2, passed: 1, failures: 1 });
        assert_eq!(r.exit_code(), 1);
        let r = Report::new("verify", ParamsSnapshot::new(&p, 6), vec![CaseRecord::from_residual("z", &bad)], 0.0);
        assert!(!r.passed());
        assert!(r.to_text().contains("FAIL z: b"));
    }

    #[test]
    fn json_round_trip() {
        let p = Params::default();
        let res = Residual::new("a", Real::from_f64(0.1, 192), Real::from_f64(0.1, 192), 3.5e-31, 1e-10);
        let r = Report::new(
            "suite test",
            ParamsSnapshot::new(&p, 6),
            vec![CaseRecord::from_residual("k", &res), CaseRecord::from_error("e", &Error::UpOnEmpty)],
            1.25,
        );
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(!r.to_json().contains("\"error\": null"));
    }
}
