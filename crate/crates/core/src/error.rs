use thiserror::Error;

use crate::dsl::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("point {0:?} lies outside the chart domain")]
    OutsideDomain([f64; 3]),
    #[error("metric is not positive-definite at {0:?}")]
    NotPositiveDefinite([f64; 3]),
    #[error("metric condition number {cond:e} at {point:?} exceeds the limit")]
    IllConditioned { point: [f64; 3], cond: f64 },
    #[error("jet of order {have} is too low, {needed} required")]
    JetOrder { needed: usize, have: usize },
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: &'static str,
    },
    #[error("grid: {0}")]
    Grid(String),
    #[error("unsupported tensor rank {0} (expected 2 or 4)")]
    UnsupportedRank(usize),
    #[error("Ricci eigenframe undefined: {0}")]
    FrameUndefined(String),
    #[error("eigenframe gauge flip detected across the stencil")]
    GaugeFlip,
    #[error("fit: {0}")]
    Fit(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
