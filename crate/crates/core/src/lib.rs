//! High-precision evaluation of q-multiple zeta values, two-parameter Ohno
//! generating functions and connected sums, with verifiers that check the
//! identities relating them against explicit error budgets.
//!
//! ```
//! use qohno::{big_o, Index, Params};
//!
//! let p = Params::default();
//! let k: Index = "2,1,3".parse().unwrap();
//! let a = big_o(&k, &p).unwrap();
//! let b = big_o(&k.dual().unwrap(), &p).unwrap();
//! assert!((&a.value - &b.value).abs().to_f64() < 1e-25);
//! ```

pub mod connect;
pub mod error;
pub mod indices;
pub mod params;
pub mod qnum;
pub mod real;
pub mod report;
pub mod series;
pub mod suite;
pub mod words;

pub use connect::{connected_sum, connected_sum_word, connector, connector_alt, Residual};
pub use error::{Error, Result};
pub use indices::{Arrow, Index};
pub use params::Params;
pub use real::{Real, Scalar};
pub use report::Report;
pub use series::{big_o, big_o_word, ohno_sum, validate_epsilon, zeta_q, Evaluation, SeriesBudget};
pub use suite::{run_suite, Suite, SuiteOptions};
pub use words::{parse_expr, LambdaPoly, Letter, LinComb, Word};
