use thiserror::Error;

use crate::indices::Index;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("index `{0}` is not admissible")]
    NotAdmissible(Index),

    #[error("index `{0}` is not of BBBL type")]
    NotBbbl(Index),

    #[error("cannot raise the last entry of the empty index")]
    UpOnEmpty,

    #[error("malformed index text `{0}`")]
    MalformedIndex(String),

    #[error("malformed word `{0}`")]
    MalformedWord(String),

    #[error("monomial `{word}` at lambda degree {degree} does not correspond to an admissible index")]
    NonAdmissibleMonomial { word: String, degree: usize },

    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("infinite product does not converge: {0}")]
    NonConvergent(String),

    #[error("singular basic hypergeometric parameter: (c;q)_{n} vanishes")]
    SingularParameter { n: usize },

    #[error("series needs more than {cap} terms to meet the error budget {target:e}")]
    BudgetExceeded { cap: usize, target: f64 },

    #[error("epsilon = xi*eta*O((2)) has not been validated for these parameters")]
    EpsilonNotValidated,

    #[error("epsilon = xi*eta*O((2)) = {0} is not below 1")]
    EpsilonTooLarge(f64),

    #[error("connected sum Z({k}; {l}) does not satisfy a convergence condition")]
    DivergencePrecondition { k: Index, l: Index },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}
