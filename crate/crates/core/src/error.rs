use thiserror::Error;

use crate::metric::ValidationReport;
use crate::scalarfield::ExprError;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("profile bound b0 must be positive and finite, got {0}")]
    InvalidBound(f64),
    #[error("s = {s} lies outside the profile interval (-{b0}, {b0})")]
    OutsideProfileInterval { s: f64, b0: f64 },
    #[error("profile does not define a Finsler metric: {}", .0.summary())]
    NotFinsler(Box<ValidationReport>),
    #[error("sup b(x) = {b_max} at x = ({}, {}) is not below b0 = {b0}", .at[0], .at[1])]
    FormTooLong { b_max: f64, at: [f64; 2], b0: f64 },
    #[error("strong convexity fails: p + p33 = {value} at x = ({}, {}), t = {t}", .x[0], .x[1])]
    Convexity { value: f64, x: [f64; 2], t: f64 },
    #[error("fundamental tensor is not positive definite at x = ({}, {}), y = ({}, {})", .x[0], .x[1], .y[0], .y[1])]
    SingularHessian { x: [f64; 2], y: [f64; 2] },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
