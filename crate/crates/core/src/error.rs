use thiserror::Error;

use crate::catalog::GroupLabel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("determinant {det} is not positive; cannot project onto adS3")]
    NonPositiveDeterminant { det: f64 },
    #[error("determinant {det} is not 1 within tolerance")]
    NotOnAdS { det: f64 },
    #[error("{label} takes {expected} parameters, got {got}")]
    ParamArity { label: GroupLabel, expected: usize, got: usize },
    #[error("unknown group label `{0}`")]
    UnknownLabel(String),
    #[error("orbit dimension {0} has no Gram form")]
    DimensionOutOfRange(usize),
    #[error("unexpected signature {0:?} on a {1}-dimensional orbit")]
    UnexpectedSignature((usize, usize, usize), usize),
    #[error("points lie on different orbits")]
    NotSameOrbit,
    #[error("transporter solve failed (residual {residual:e} after {iterations} iterations)")]
    SolveFailed { residual: f64, iterations: usize },
    #[error("basis is not closed under intersection: {0}")]
    MalformedBasis(String),
}
