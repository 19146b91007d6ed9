#![allow(dead_code)]

use curvlab::dsl::{BinaryOp, Expr, Params, UnaryOp, Wrt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random expression over `x0..x2` that is smooth on all of R^3: divisions
/// and logs only see arguments bounded away from zero.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 || rng.random_bool(0.2) {
        return if rng.random_bool(0.6) {
            Expr::Var(rng.random_range(0..3))
        } else {
            Expr::Const((rng.random_range(-20..=20) as f64) / 8.0)
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_expr(rng, depth - 1);
    let positive = |e: Expr| {
        Expr::Binary(
            BinaryOp::Add,
            Box::new(Expr::Const(1.0)),
            Box::new(Expr::Binary(BinaryOp::Pow, Box::new(e), Box::new(Expr::Const(2.0)))),
        )
    };
    match rng.random_range(0..10) {
        0 => Expr::Binary(BinaryOp::Add, Box::new(sub(rng)), Box::new(sub(rng))),
        1 => Expr::Binary(BinaryOp::Sub, Box::new(sub(rng)), Box::new(sub(rng))),
        2 => Expr::Binary(BinaryOp::Mul, Box::new(sub(rng)), Box::new(sub(rng))),
        3 => Expr::Binary(BinaryOp::Div, Box::new(sub(rng)), Box::new(positive(sub(rng)))),
        4 => Expr::Binary(
            BinaryOp::Pow,
            Box::new(sub(rng)),
            Box::new(Expr::Const(rng.random_range(2..=3) as f64)),
        ),
        5 => Expr::Unary(UnaryOp::Sin, Box::new(sub(rng))),
        6 => Expr::Unary(UnaryOp::Cos, Box::new(sub(rng))),
        7 => Expr::Unary(UnaryOp::Tanh, Box::new(sub(rng))),
        8 => Expr::Unary(UnaryOp::Log, Box::new(positive(sub(rng)))),
        _ => Expr::Unary(UnaryOp::Neg, Box::new(sub(rng))),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> [f64; 3] {
    std::array::from_fn(|_| rng.random_range(lo..hi))
}

/// Fourth-order central difference of `e` along `axis`.
pub fn central_difference(e: &Expr, p: [f64; 3], axis: usize, h: f64, params: &Params) -> Option<f64> {
    let at = |s: f64| {
        let mut q = p;
        q[axis] += s * h;
        e.eval(&q, params).ok()
    };
    Some((8.0 * (at(1.0)? - at(-1.0)?) - (at(2.0)? - at(-2.0)?)) / (12.0 * h))
}

/// Largest relative gap between a symbolic derivative `∂_axis e` and the
/// difference quotient of `e`, where the symbolic value is of moderate size.
pub fn derivative_gap(e: &Expr, p: [f64; 3], axis: usize, params: &Params) -> Option<f64> {
    let d = e.differentiate(Wrt::Axis(axis));
    let exact = d.eval(&p, params).ok()?;
    let value = e.eval(&p, params).ok()?;
    if !exact.is_finite() || exact.abs() > 1e4 || value.abs() > 1e4 {
        return None;
    }
    let fd = central_difference(e, p, axis, 1e-3, params)?;
    Some((exact - fd).abs() / exact.abs().max(1.0))
}

/// Checks `∂^α e` for every multi-index up to `order`, each level against a
/// difference quotient of the level below. Returns the worst gap.
pub fn derivative_tower_gap(e: &Expr, p: [f64; 3], order: usize, params: &Params) -> Option<f64> {
    let mut level = vec![e.clone()];
    let mut worst: f64 = 0.0;
    for _ in 0..order {
        let mut next = Vec::new();
        for f in &level {
            for axis in 0..3 {
                worst = worst.max(derivative_gap(f, p, axis, params)?);
                next.push(f.differentiate(Wrt::Axis(axis)));
            }
        }
        level = next;
    }
    Some(worst)
}
