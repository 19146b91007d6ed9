//! Expression trees for metric components and scalar potentials.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Named real parameters referenced by [`Expr::Param`] nodes.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl UnaryOp {
    /// Function-call spellings accepted by the parser.
    pub const FUNCTIONS: [(&'static str, UnaryOp); 8] = [
        ("sin", UnaryOp::Sin),
        ("cos", UnaryOp::Cos),
        ("exp", UnaryOp::Exp),
        ("log", UnaryOp::Log),
        ("sqrt", UnaryOp::Sqrt),
        ("sinh", UnaryOp::Sinh),
        ("cosh", UnaryOp::Cosh),
        ("tanh", UnaryOp::Tanh),
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<UnaryOp> {
        Self::FUNCTIONS.iter().find(|(n, _)| *n == name).map(|(_, op)| *op)
    }

    fn apply(self, v: f64) -> Result<f64, EvalError> {
        let out = match self {
            UnaryOp::Neg => -v,
            UnaryOp::Sin => v.sin(),
            UnaryOp::Cos => v.cos(),
            UnaryOp::Exp => v.exp(),
            UnaryOp::Log => {
                if v <= 0.0 {
                    return Err(EvalError::Domain { op: "log", value: v });
                }
                v.ln()
            }
            UnaryOp::Sqrt => {
                if v < 0.0 {
                    return Err(EvalError::Domain { op: "sqrt", value: v });
                }
                v.sqrt()
            }
            UnaryOp::Sinh => v.sinh(),
            UnaryOp::Cosh => v.cosh(),
            UnaryOp::Tanh => v.tanh(),
        };
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Pow => "^",
        }
    }
}

/// Variable a derivative is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wrt<'a> {
    Axis(usize),
    Param(&'a str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{op} is undefined at {value}")]
    Domain { op: &'static str, value: f64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-integer power of non-positive base {base}")]
    FractionalPower { base: f64 },
    #[error("parameter `{0}` has no value")]
    UnboundParameter(String),
    #[error("expression evaluated to a non-finite value")]
    NonFinite,
}

/// A real-valued expression over the chart coordinates `x0, x1, x2` and named parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Chart coordinate, index 0..=2.
    Var(usize),
    Param(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub const ZERO: Expr = Expr::Const(0.0);
    pub const ONE: Expr = Expr::Const(1.0);

    pub fn var(axis: usize) -> Expr {
        assert!(axis < 3, "coordinate index out of range");
        Expr::Var(axis)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, value: f64) -> bool {
        self.as_const() == Some(value)
    }

    // Smart constructors. They fold constants and drop 0/1 identities; nothing more.

    pub fn unary(op: UnaryOp, a: Expr) -> Expr {
        if let Expr::Const(c) = a {
            if let Ok(v) = op.apply(c) {
                if v.is_finite() {
                    return Expr::Const(v);
                }
            }
        }
        if op == UnaryOp::Neg {
            if let Expr::Unary(UnaryOp::Neg, inner) = a {
                return *inner;
            }
        }
        Expr::Unary(op, Box::new(a))
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::unary(UnaryOp::Neg, a)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => match b {
                Expr::Unary(UnaryOp::Neg, inner) => Expr::Binary(BinaryOp::Sub, Box::new(a), inner),
                b => Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b)),
            },
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (Some(0.0), _) => Expr::neg(b),
            (_, Some(0.0)) => a,
            _ => Expr::Binary(BinaryOp::Sub, Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(0.0), _) | (_, Some(0.0)) => Expr::ZERO,
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            (Some(-1.0), _) => Expr::neg(b),
            (_, Some(-1.0)) => Expr::neg(a),
            _ => Expr::Binary(BinaryOp::Mul, Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
            (Some(0.0), _) => Expr::ZERO,
            (_, Some(1.0)) => a,
            _ => Expr::Binary(BinaryOp::Div, Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => match pow_value(x, y) {
                Ok(v) if v.is_finite() => Expr::Const(v),
                _ => Expr::Binary(BinaryOp::Pow, Box::new(a), Box::new(b)),
            },
            (_, Some(0.0)) => Expr::ONE,
            (_, Some(1.0)) => a,
            _ => Expr::Binary(BinaryOp::Pow, Box::new(a), Box::new(b)),
        }
    }

    pub fn eval(&self, x: &[f64; 3], params: &Params) -> Result<f64, EvalError> {
        let v = self.eval_inner(x, params)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    fn eval_inner(&self, x: &[f64; 3], params: &Params) -> Result<f64, EvalError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(i) => Ok(x[*i]),
            Expr::Param(name) => params
                .get(name)
                .copied()
                .ok_or_else(|| EvalError::UnboundParameter(name.clone())),
            Expr::Unary(op, a) => op.apply(a.eval_inner(x, params)?),
            Expr::Binary(op, a, b) => {
                let u = a.eval_inner(x, params)?;
                let v = b.eval_inner(x, params)?;
                match op {
                    BinaryOp::Add => Ok(u + v),
                    BinaryOp::Sub => Ok(u - v),
                    BinaryOp::Mul => Ok(u * v),
                    BinaryOp::Div => {
                        if v == 0.0 {
                            Err(EvalError::DivisionByZero)
                        } else {
                            Ok(u / v)
                        }
                    }
                    BinaryOp::Pow => pow_value(u, v),
                }
            }
        }
    }

    /// Exact partial derivative.
    pub fn differentiate(&self, wrt: Wrt<'_>) -> Expr {
        match self {
            Expr::Const(_) => Expr::ZERO,
            Expr::Var(i) => match wrt {
                Wrt::Axis(j) if *i == j => Expr::ONE,
                _ => Expr::ZERO,
            },
            Expr::Param(name) => match wrt {
                Wrt::Param(p) if p == name => Expr::ONE,
                _ => Expr::ZERO,
            },
            Expr::Unary(op, a) => {
                let da = a.differentiate(wrt);
                if da.is_const(0.0) {
                    return Expr::ZERO;
                }
                let a = (**a).clone();
                let outer = match op {
                    UnaryOp::Neg => return Expr::neg(da),
                    UnaryOp::Sin => Expr::unary(UnaryOp::Cos, a),
                    UnaryOp::Cos => Expr::neg(Expr::unary(UnaryOp::Sin, a)),
                    UnaryOp::Exp => Expr::unary(UnaryOp::Exp, a),
                    UnaryOp::Log => return Expr::div(da, a),
                    UnaryOp::Sqrt => return Expr::div(da, Expr::mul(Expr::Const(2.0), Expr::unary(UnaryOp::Sqrt, a))),
                    UnaryOp::Sinh => Expr::unary(UnaryOp::Cosh, a),
                    UnaryOp::Cosh => Expr::unary(UnaryOp::Sinh, a),
                    UnaryOp::Tanh => Expr::sub(Expr::ONE, Expr::pow(Expr::unary(UnaryOp::Tanh, a), Expr::Const(2.0))),
                };
                Expr::mul(outer, da)
            }
            Expr::Binary(op, a, b) => {
                let da = a.differentiate(wrt);
                let db = b.differentiate(wrt);
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinaryOp::Add => Expr::add(da, db),
                    BinaryOp::Sub => Expr::sub(da, db),
                    BinaryOp::Mul => Expr::add(Expr::mul(da, b), Expr::mul(a, db)),
                    BinaryOp::Div => {
                        if db.is_const(0.0) {
                            Expr::div(da, b)
                        } else {
                            Expr::div(
                                Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a, db)),
                                Expr::pow(b, Expr::Const(2.0)),
                            )
                        }
                    }
                    BinaryOp::Pow => {
                        if let Some(c) = b.as_const() {
                            // d(u^c) = c u^(c-1) u'
                            Expr::mul(Expr::mul(Expr::Const(c), Expr::pow(a, Expr::Const(c - 1.0))), da)
                        } else if da.is_const(0.0) {
                            // d(a^v) = a^v log(a) v'
                            Expr::mul(Expr::mul(self.clone(), Expr::unary(UnaryOp::Log, a)), db)
                        } else {
                            // d(u^v) = u^v (v' log u + v u'/u)
                            Expr::mul(
                                self.clone(),
                                Expr::add(
                                    Expr::mul(db, Expr::unary(UnaryOp::Log, a.clone())),
                                    Expr::div(Expr::mul(b, da), a),
                                ),
                            )
                        }
                    }
                }
            }
        }
    }

    /// Replace parameters that have a value in `params` by constants and refold.
    pub fn substitute_params(&self, params: &Params) -> Expr {
        match self {
            Expr::Param(name) => match params.get(name) {
                Some(v) => Expr::Const(*v),
                None => self.clone(),
            },
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Unary(op, a) => Expr::unary(*op, a.substitute_params(params)),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.substitute_params(params), b.substitute_params(params));
                match op {
                    BinaryOp::Add => Expr::add(a, b),
                    BinaryOp::Sub => Expr::sub(a, b),
                    BinaryOp::Mul => Expr::mul(a, b),
                    BinaryOp::Div => Expr::div(a, b),
                    BinaryOp::Pow => Expr::pow(a, b),
                }
            }
        }
    }

    /// Names of all parameters referenced by the tree.
    pub fn parameters(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_params(&self, out: &mut Vec<String>) {
        match self {
            Expr::Param(name) => out.push(name.clone()),
            Expr::Unary(_, a) => a.collect_params(out),
            Expr::Binary(_, a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Expr::Const(_) | Expr::Var(_) => {}
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => 1,
            Expr::Unary(_, a) => 1 + a.node_count(),
            Expr::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => 1,
            Expr::Unary(_, a) => 1 + a.depth(),
            Expr::Binary(_, a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

fn pow_value(base: f64, exp: f64) -> Result<f64, EvalError> {
    if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
        if base == 0.0 && exp < 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(base.powi(exp as i32))
    } else if base > 0.0 {
        Ok(base.powf(exp))
    } else {
        Err(EvalError::FractionalPower { base })
    }
}

// Fully parenthesized output; round-trips through the parser.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, None)
    }
}

/// Display adapter printing coordinates by name instead of `x0, x1, x2`.
pub struct Named<'a> {
    expr: &'a Expr,
    coords: &'a [String; 3],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, Some(self.coords))
    }
}

impl Expr {
    pub fn named<'a>(&'a self, coords: &'a [String; 3]) -> Named<'a> {
        Named { expr: self, coords }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, coords: Option<&[String; 3]>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 {
                    write!(f, "({c:?})")
                } else {
                    write!(f, "{c:?}")
                }
            }
            Expr::Var(i) => match coords {
                Some(c) => f.write_str(&c[*i]),
                None => write!(f, "x{i}"),
            },
            Expr::Param(name) => f.write_str(name),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "(-{})", DisplayWith(a, coords)),
            Expr::Unary(op, a) => write!(f, "{}({})", op.name(), DisplayWith(a, coords)),
            Expr::Binary(op, a, b) => write!(
                f,
                "({} {} {})",
                DisplayWith(a, coords),
                op.symbol(),
                DisplayWith(b, coords)
            ),
        }
    }
}

struct DisplayWith<'a>(&'a Expr, Option<&'a [String; 3]>);

impl fmt::Display for DisplayWith<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.write(f, self.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(e: &Expr, x: [f64; 3]) -> f64 {
        e.eval(&x, &Params::new()).unwrap()
    }

    #[test]
    fn power_rule() {
        let e = Expr::pow(Expr::var(0), Expr::Const(2.0));
        let d = e.differentiate(Wrt::Axis(0));
        assert_eq!(at(&d, [3.0, 0.0, 0.0]), 6.0);
    }

    #[test]
    fn constant_folding_and_identities() {
        assert_eq!(Expr::add(Expr::Const(1.0), Expr::Const(2.0)), Expr::Const(3.0));
        assert_eq!(Expr::mul(Expr::ONE, Expr::var(1)), Expr::var(1));
        assert_eq!(Expr::mul(Expr::ZERO, Expr::var(1)), Expr::ZERO);
        assert_eq!(Expr::neg(Expr::neg(Expr::var(2))), Expr::var(2));
        assert_eq!(Expr::var(0).differentiate(Wrt::Axis(1)), Expr::ZERO);
    }

    #[test]
    fn named_display_round_trips() {
        use crate::dsl::{parse_with, Symbols};
        let coords = ["t".to_string(), "theta".to_string(), "phi".to_string()];
        let sym = Symbols::new(Some(coords.clone()), ["kappa".to_string()]);
        let e = parse_with("sin(theta)^2/kappa - t*phi", &sym).unwrap();
        let shown = e.named(&coords).to_string();
        assert!(shown.contains("theta") && !shown.contains("x1"));
        assert_eq!(parse_with(&shown, &sym).unwrap(), e);
    }

    #[test]
    fn evaluation_errors() {
        let p = Params::new();
        let log = Expr::unary(UnaryOp::Log, Expr::var(0));
        assert!(matches!(log.eval(&[-1.0, 0.0, 0.0], &p), Err(EvalError::Domain { .. })));
        let frac = Expr::pow(Expr::var(0), Expr::Const(0.5));
        assert!(matches!(
            frac.eval(&[-1.0, 0.0, 0.0], &p),
            Err(EvalError::FractionalPower { .. })
        ));
        assert_eq!(frac.eval(&[4.0, 0.0, 0.0], &p), Ok(2.0));
        let int = Expr::pow(Expr::var(0), Expr::Const(3.0));
        assert_eq!(int.eval(&[-2.0, 0.0, 0.0], &p), Ok(-8.0));
        let div = Expr::div(Expr::ONE, Expr::var(0));
        assert_eq!(div.eval(&[0.0; 3], &p), Err(EvalError::DivisionByZero));
        let unbound = Expr::Param("k".into());
        assert!(matches!(
            unbound.eval(&[0.0; 3], &p),
            Err(EvalError::UnboundParameter(_))
        ));
    }

    #[test]
    fn parameter_derivative_and_substitution() {
        // k * x0^2
        let e = Expr::mul(Expr::Param("k".into()), Expr::pow(Expr::var(0), Expr::Const(2.0)));
        let dk = e.differentiate(Wrt::Param("k"));
        assert_eq!(at(&dk, [3.0, 0.0, 0.0]), 9.0);
        let mut p = Params::new();
        p.insert("k".into(), 2.0);
        let s = e.substitute_params(&p);
        assert!(s.parameters().is_empty());
        assert_eq!(at(&s, [3.0, 0.0, 0.0]), 18.0);
    }

    #[test]
    fn general_power_derivative() {
        // x0^x1 at (2, 3): d/dx0 = 3*2^2 = 12, d/dx1 = 8 ln 2
        let e = Expr::pow(Expr::var(0), Expr::var(1));
        let x = [2.0, 3.0, 0.0];
        assert!((at(&e.differentiate(Wrt::Axis(0)), x) - 12.0).abs() < 1e-12);
        assert!((at(&e.differentiate(Wrt::Axis(1)), x) - 8.0 * 2f64.ln()).abs() < 1e-12);
    }
}
