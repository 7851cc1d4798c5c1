use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use qohno::connect::{
    connected_sum, connector, connector_alt, dor_chain, double_transport_residuals, initial_value_residual,
    key_identity_samples, phi21_gauss_residual, qgauss_residual, telescope_check, transport_residuals, Residual,
};
use qohno::params::{parse_rational, Params, DEFAULT_SLACK};
use qohno::report::{CaseRecord, ParamsSnapshot, Report};
use qohno::series::{big_o, big_o_word, ohno_sum, validate_epsilon, zeta_q, Evaluation};
use qohno::suite::{run_checks, run_suite, Suite, SuiteOptions, DEFAULT_LAMBDA_ORDER, DEFAULT_SEED};
use qohno::{parse_expr, Error, Index, Real};

#[derive(Parser)]
#[command(
    name = "qohno",
    version,
    about = "Evaluate q-MZVs, Ohno generating functions and connected sums, and verify the identities between them"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct GlobalArgs {
    /// q as an exact rational, e.g. 1/2
    #[arg(long, global = true)]
    q: Option<String>,
    #[arg(long, global = true)]
    xi: Option<String>,
    #[arg(long, global = true)]
    eta: Option<String>,
    #[arg(long, global = true)]
    #[serde(alias = "prec_bits")]
    prec_bits: Option<usize>,
    /// Truncation order N of λ-series
    #[arg(long, global = true)]
    #[serde(alias = "lambda_order")]
    lambda_order: Option<usize>,
    #[arg(long, global = true)]
    #[serde(alias = "max_weight")]
    max_weight: Option<u32>,
    /// Hard cap on any summation cutoff
    #[arg(long, global = true)]
    #[serde(alias = "max_terms")]
    max_terms: Option<usize>,
    /// Slack added to budget-derived tolerances
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Word-algebra expression, e.g. "x R + 1/2 y L"
    #[arg(long, global = true)]
    #[serde(alias = "w_expr")]
    w_expr: Option<String>,
    /// Index such as 2,1,3 (empty string for the empty index)
    #[arg(long, global = true)]
    index: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report here ("-" for stdout)
    #[arg(long, global = true)]
    #[serde(skip)]
    json: Option<PathBuf>,
    /// JSON file with the same keys as the flags
    #[arg(long, global = true)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

impl GlobalArgs {
    /// Flags win over the config file.
    fn merged_with(self, file: GlobalArgs) -> GlobalArgs {
        GlobalArgs {
            q: self.q.or(file.q),
            xi: self.xi.or(file.xi),
            eta: self.eta.or(file.eta),
            prec_bits: self.prec_bits.or(file.prec_bits),
            lambda_order: self.lambda_order.or(file.lambda_order),
            max_weight: self.max_weight.or(file.max_weight),
            max_terms: self.max_terms.or(file.max_terms),
            tolerance: self.tolerance.or(file.tolerance),
            w_expr: self.w_expr.or(file.w_expr),
            index: self.index.or(file.index),
            seed: self.seed.or(file.seed),
            json: self.json,
            config: self.config,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single quantity
    Eval {
        #[command(subcommand)]
        what: EvalCmd,
    },
    /// Check one identity instance
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Run a named verification suite
    Suite {
        /// duality, single-ohno, double-ohno, extended, transport, initial,
        /// qgauss, key-identity, alt-connector, defects or all
        name: String,
    },
}

#[derive(Subcommand)]
enum EvalCmd {
    /// ζ_q(k) for --index
    Zeta,
    /// O(k) for --index
    #[command(name = "O")]
    O,
    /// O_{e1,e2}(k) for --index
    OhnoSum {
        #[arg(long, default_value_t = 0)]
        e1: u32,
        #[arg(long, default_value_t = 0)]
        e2: u32,
    },
    /// O(ywx) for --w-expr
    #[command(name = "O-word")]
    OWord,
    /// Z(k;l)
    #[command(name = "Z")]
    Z {
        #[arg(long, allow_hyphen_values = true)]
        k: String,
        #[arg(long, allow_hyphen_values = true)]
        l: String,
    },
    /// τ_λ(w) for --w-expr
    Tau,
    /// The dual of --index
    Dual,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Transport relations for Z(k;l)
    Transport {
        #[arg(long)]
        k: String,
        #[arg(long)]
        l: String,
    },
    /// Double transport for Z(k;l)
    DoubleTransport {
        #[arg(long)]
        k: String,
        #[arg(long)]
        l: String,
    },
    /// Z(k;(1)) = O(k↑)/c for --index
    Initial,
    /// The q-Gauss instance at m
    Qgauss {
        #[arg(long)]
        m: usize,
    },
    /// The telescoped connector identity
    Telescope {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Exact checks of the transport algebra at random rational points
    KeyIdentity {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// The transport chain O(k) → O(k†) for a BBBL --index
    DorChain,
    /// The reparametrized connector against the original, for m, n ≤ --max
    AltConnector {
        #[arg(long, default_value_t = 20)]
        max: u64,
    },
}

struct Settings {
    params: Params,
    lambda_order: usize,
    seed: u64,
    max_weight: Option<u32>,
    index: Option<String>,
    w_expr: Option<String>,
}

fn load_settings(args: GlobalArgs) -> Result<(Settings, Option<PathBuf>), String> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
            serde_json::from_str::<GlobalArgs>(&text).map_err(|e| format!("parsing {}: {e}", path.display()))?
        }
        None => GlobalArgs::default(),
    };
    let a = args.merged_with(file);
    let rat = |s: Option<&String>, default: &str| parse_rational(s.map_or(default, |v| v.as_str()));
    let mut params = Params::new(
        rat(a.q.as_ref(), "1/2").map_err(|e| e.to_string())?,
        rat(a.xi.as_ref(), "1/10").map_err(|e| e.to_string())?,
        rat(a.eta.as_ref(), "7/100").map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    if let Some(bits) = a.prec_bits {
        if bits < 64 {
            return Err("--prec-bits must be at least 64".into());
        }
        params = params.with_prec_bits(bits);
    }
    if let Some(cap) = a.max_terms {
        params = params.with_max_terms(cap);
    }
    let slack = a.tolerance.unwrap_or(DEFAULT_SLACK);
    if !(slack >= 0.0 && slack.is_finite()) {
        return Err("--tolerance must be a non-negative number".into());
    }
    params = params.with_slack(slack);
    let settings = Settings {
        params,
        lambda_order: a.lambda_order.unwrap_or(DEFAULT_LAMBDA_ORDER),
        seed: a.seed.unwrap_or(DEFAULT_SEED),
        max_weight: a.max_weight,
        index: a.index,
        w_expr: a.w_expr,
    };
    Ok((settings, a.json))
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str, String> {
    v.as_deref().ok_or_else(|| format!("{flag} is required for this command"))
}

fn parse_index(text: &str) -> Result<Index, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

fn value_report(command: &str, s: &Settings, input: String, outcome: qohno::Result<Evaluation>) -> Report {
    let start = Instant::now();
    let case = match outcome {
        Ok(ev) => CaseRecord::value(&input, ev.value.to_decimal_string(), ev.budget.total()),
        Err(e) => CaseRecord::from_error(&input, &e),
    };
    Report::new(command, ParamsSnapshot::new(&s.params, s.lambda_order), vec![case], start.elapsed().as_secs_f64())
}

fn text_report(command: &str, s: &Settings, input: String, outcome: qohno::Result<String>) -> Report {
    let case = match outcome {
        Ok(text) => CaseRecord::value(&input, text, 0.0),
        Err(e) => CaseRecord::from_error(&input, &e),
    };
    Report::new(command, ParamsSnapshot::new(&s.params, s.lambda_order), vec![case], 0.0)
}

fn eval(cmd: EvalCmd, s: &mut Settings) -> Result<Report, String> {
    let p = &s.params;
    Ok(match cmd {
        EvalCmd::Zeta => {
            let k = parse_index(required(&s.index, "--index")?)?;
            value_report("eval zeta", s, format!("zeta_q(({k}))"), zeta_q(&k, p))
        }
        EvalCmd::O => {
            let k = parse_index(required(&s.index, "--index")?)?;
            value_report("eval O", s, format!("O(({k}))"), big_o(&k, p))
        }
        EvalCmd::OhnoSum { e1, e2 } => {
            let k = parse_index(required(&s.index, "--index")?)?;
            value_report("eval ohno-sum", s, format!("O_{{{e1},{e2}}}(({k}))"), ohno_sum(&k, e1, e2, p))
        }
        EvalCmd::OWord => {
            let text = required(&s.w_expr, "--w-expr")?.to_string();
            let outcome = validate_epsilon(&mut s.params)
                .and_then(|_| parse_expr(&text, s.lambda_order))
                .and_then(|w| big_o_word(&w, &s.params));
            value_report("eval O-word", s, format!("O(y({text})x) N={}", s.lambda_order), outcome)
        }
        EvalCmd::Z { k, l } => {
            let (k, l) = (parse_index(&k)?, parse_index(&l)?);
            value_report("eval Z", s, format!("Z(({k});({l}))"), connected_sum(&k, &l, p))
        }
        EvalCmd::Tau => {
            let text = required(&s.w_expr, "--w-expr")?.to_string();
            let outcome = parse_expr(&text, s.lambda_order).map(|w| w.tau().to_string());
            text_report("eval tau", s, format!("tau({text}) N={}", s.lambda_order), outcome)
        }
        EvalCmd::Dual => {
            let k = parse_index(required(&s.index, "--index")?)?;
            text_report("eval dual", s, format!("dual(({k}))"), k.dual().map(|d| d.to_string()))
        }
    })
}

fn verify(cmd: VerifyCmd, s: &Settings) -> Result<Report, String> {
    let p = &s.params;
    let n = s.lambda_order;
    let one = |command: &str, input: String, outcome: qohno::Result<Vec<Residual>>| {
        run_checks(command, p, n, vec![(input, outcome)])
    };
    Ok(match cmd {
        VerifyCmd::Transport { k, l } => {
            let (k, l) = (parse_index(&k)?, parse_index(&l)?);
            one("verify transport", format!("k=({k}) l=({l})"), transport_residuals(&k, &l, p))
        }
        VerifyCmd::DoubleTransport { k, l } => {
            let (k, l) = (parse_index(&k)?, parse_index(&l)?);
            one("verify double-transport", format!("k=({k}) l=({l})"), double_transport_residuals(&k, &l, p))
        }
        VerifyCmd::Initial => {
            let k = parse_index(required(&s.index, "--index")?)?;
            one("verify initial", format!("k=({k})"), initial_value_residual(&k, p).map(|r| vec![r]))
        }
        VerifyCmd::Qgauss { m } => {
            let outcome = qgauss_residual(m, p).and_then(|a| Ok(vec![a, phi21_gauss_residual(m, p)?]));
            one("verify qgauss", format!("m={m}"), outcome)
        }
        VerifyCmd::Telescope { m, n: nn } => {
            one("verify telescope", format!("m={m} n={nn}"), telescope_check(m, nn, p).map(|r| vec![r]))
        }
        VerifyCmd::KeyIdentity { samples } => {
            let start = Instant::now();
            let cases = key_identity_samples(samples, s.seed)
                .into_iter()
                .map(|k| CaseRecord {
                    input: format!(
                        "q={} xi={} eta={} a={} n={}",
                        qohno::params::format_rational(k.params.q()),
                        qohno::params::format_rational(k.params.xi()),
                        qohno::params::format_rational(k.params.eta()),
                        k.a,
                        k.n
                    ),
                    lhs: Some(qohno::params::format_rational(&k.lhs)),
                    rhs: Some(qohno::params::format_rational(&k.rhs)),
                    residual: Some(if k.identity_holds { 0.0 } else { 1.0 }),
                    tolerance: Some(0.0),
                    pass: k.identity_holds && k.step_holds,
                    error: None,
                })
                .collect();
            Report::new("verify key-identity", ParamsSnapshot::new(p, n), cases, start.elapsed().as_secs_f64())
        }
        VerifyCmd::DorChain => {
            let k = parse_index(required(&s.index, "--index")?)?;
            one("verify dor-chain", format!("k=({k})"), dor_chain(&k, p))
        }
        VerifyCmd::AltConnector { max } => {
            let mut rs = Vec::new();
            for m in 0..=max {
                for nn in 0..=max {
                    let a: Real = connector(m, nn, p);
                    let b = connector_alt(m, nn, p);
                    let budget = a.to_f64().abs() * p.unit_roundoff() * 1e4 * (m + nn + 2) as f64;
                    rs.push(Residual::new(format!("c({m},{nn})"), a, b, budget, p.slack()));
                }
            }
            one("verify alt-connector", format!("m,n <= {max}"), Ok(rs))
        }
    })
}

fn emit(report: &Report, json: Option<&Path>) -> Result<(), String> {
    let text = match json {
        Some(path) if path.as_os_str() == "-" => report.to_json() + "\n",
        Some(path) => {
            fs::write(path, report.to_json() + "\n").map_err(|e| format!("writing {}: {e}", path.display()))?;
            report.to_text()
        }
        None => report.to_text(),
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = io::stdout().lock().write_all(text.as_bytes());
    Ok(())
}

fn run(cli: Cli) -> Result<Report, String> {
    let (mut settings, json) = load_settings(cli.global)?;
    let report = match cli.command {
        Command::Eval { what } => eval(what, &mut settings)?,
        Command::Verify { what } => verify(what, &settings)?,
        Command::Suite { name } => {
            let suite: Suite = name.parse().map_err(|e: Error| e.to_string())?;
            let opts = SuiteOptions {
                max_weight: settings.max_weight,
                lambda_order: settings.lambda_order,
                seed: settings.seed,
                index: settings.index.as_deref().map(parse_index).transpose()?,
                w_expr: settings.w_expr.clone(),
            };
            run_suite(suite, &settings.params, &opts)
        }
    };
    emit(&report, json.as_deref())?;
    Ok(report)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => ExitCode::from(report.exit_code() as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
