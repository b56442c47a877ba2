use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Binary polynomial operation on operands of different arity.
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),

    /// Division by (t_i - t_j) left a nonzero remainder. This signals a
    /// violated antisymmetry precondition upstream, so it is fatal.
    #[error("nonzero remainder dividing by (t{i} - t{j})")]
    NonzeroRemainder { i: usize, j: usize },

    /// A polynomial handed to the basis inversion does not lie in the span
    /// of products of xi polynomials.
    #[error("not in the xi-basis span: {0}")]
    NotInXiSpan(String),

    /// The brute-force enumeration would visit more leaves than allowed.
    /// Never silently approximated.
    #[error("oracle infeasible: {needed} leaf visits exceed budget {budget}")]
    OracleInfeasible { needed: u128, budget: u64 },

    /// A mathematical invariant the pipeline guarantees failed to hold;
    /// always indicates an implementation bug, never bad user input.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed or version-incompatible cache file.
    #[error("cache format error: {0}")]
    CacheFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
