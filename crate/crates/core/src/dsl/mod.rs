//! Metric-component expression language: parsing, symbolic differentiation, jets.

mod expr;
mod metric;
mod parse;

pub use expr::{BinaryOp, EvalError, Expr, Named, Params, UnaryOp, Wrt};
pub use metric::{
    component_index, metric_jet, CompiledExpr, CompiledMetric, Domain, Interval, Mat3, MetricJet, MetricSpec, Tensor3,
    Tensor4, Tensor5, COMPONENTS,
};
pub use parse::{parse_expression, parse_with, ParseError, Symbols};

/// Symbolic `∂/∂x_axis`.
pub fn differentiate(expr: &Expr, axis: usize) -> Expr {
    expr.differentiate(Wrt::Axis(axis))
}
