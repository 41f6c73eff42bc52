use thiserror::Error;

use crate::numerics::QuadratureResult;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature budget of {budget} evaluations exceeded (best estimate {} +/- {})", .estimate.value, .estimate.error_estimate)]
    BudgetExceeded {
        budget: usize,
        estimate: QuadratureResult,
    },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("nested h-inverse chain infeasible at j = {j}: argument does not exceed 1")]
    ChainInfeasible { j: u32 },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("tail undetermined: {0}")]
    TailUndetermined(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
