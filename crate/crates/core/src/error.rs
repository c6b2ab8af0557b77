use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid too coarse: {0}")]
    BandLimit(String),

    #[error("value {value} outside covered range [{lo}, {hi}] of {what}")]
    Coverage {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("iteration failed to converge: {0}")]
    Convergence(String),

    #[error("step size underflow at r* = {r_star} (h = {step:e})")]
    StepUnderflow { r_star: f64, step: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate design matrix: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
