//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the kernels and checks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WsError {
    /// An exponent of `x` does not specialize to an integer power of `t`.
    #[error("exponent {exponent} is not integral at the evaluation point: {component} contributes {value}")]
    NonIntegralExponent {
        exponent: String,
        component: &'static str,
        value: String,
    },
    /// Invalid evaluation point or other malformed input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// `series_exp` needs a series without constant or negative part.
    #[error("series has a nonzero coefficient at exponent {0}; exp needs strictly positive support")]
    NotPositiveSupport(i64),
    /// `series_log` needs constant term one.
    #[error("series log needs constant term 1")]
    LogNeedsUnitConstant,
    /// A rational function has a pole at the origin where none is allowed.
    #[error("pole at z = 0")]
    PoleAtZero,
    /// A pole of order two or more was met where only simple poles are expected.
    #[error("pole of order {order} at {point}")]
    HigherOrderPole { order: u32, point: String },
    /// A denominator factor outside the declared candidate set.
    #[error("undeclared pole: {0}")]
    UndeclaredPole(String),
    /// Division by zero in exact arithmetic.
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    /// Inconsistent diagram data.
    #[error("diagram error: {0}")]
    Diagram(String),
    /// A precondition of an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, WsError>;
