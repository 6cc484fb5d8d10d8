use thiserror::Error;

/// Failures surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration budget exceeded: C({n}, {k}) = {} subsets, budget {budget}", fmt_count(.subsets))]
    BudgetExceeded {
        n: usize,
        k: usize,
        /// `None` when the binomial does not fit in 128 bits.
        subsets: Option<u128>,
        budget: u128,
    },

    #[error("column {column} has norm {norm}, not 1 within {tol:e}")]
    NotUnitColumns { column: usize, norm: f64, tol: f64 },

    #[error("vertices {0} and {1} are not adjacent, subset is not a clique")]
    NotClique(usize, usize),

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn fmt_count(count: &Option<u128>) -> String {
    match count {
        Some(c) => c.to_string(),
        None => "more than 2^128".to_string(),
    }
}
