//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("power iteration did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("coefficient vector is zero")]
    ZeroVector,

    #[error("modulus {0} unsupported: composite character groups are enumerated only up to {1}")]
    UnsupportedModulus(u64, u64),

    #[error("no ordered subgroup element for p={p}, q={q} at any dimension in [2, {s_max}]")]
    NoOrderedElement { p: u64, q: u64, s_max: usize },

    #[error("identity check '{name}' failed: lhs={lhs}, rhs={rhs}")]
    IdentityCheckFailed { name: String, lhs: f64, rhs: f64 },

    #[error("alternating maximization objective decreased at step {step}: {prev} -> {next}")]
    MonotonicityViolated { step: usize, prev: f64, next: f64 },

    #[error("config error: {0}")]
    Config(String),
}
