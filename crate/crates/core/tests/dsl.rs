mod common;

use common::{derivative_tower_gap, random_expr, random_point, rng};
use curvlab::dsl::{parse_expression, parse_with, Expr, Params, Wrt};
use curvlab::geometry::{catalog, random_points};
use proptest::prelude::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn expr_strategy() -> impl Strategy<Value = (Expr, [f64; 3])> {
    (any::<u64>(), 1usize..5).prop_map(|(seed, depth)| {
        let mut r = rng(seed);
        let e = random_expr(&mut r, depth);
        (e, random_point(&mut r, -1.0, 1.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symbolic_matches_difference_quotients((e, p) in expr_strategy()) {
        if let Some(gap) = derivative_tower_gap(&e, p, 2, &Params::new()) {
            prop_assert!(gap <= 1e-5, "{e} at {p:?}: gap {gap:e}");
        }
    }

    #[test]
    fn mixed_partials_commute((e, p) in expr_strategy(), a in 0usize..3, b in 0usize..3) {
        let params = Params::new();
        let ab = e.differentiate(Wrt::Axis(a)).differentiate(Wrt::Axis(b));
        let ba = e.differentiate(Wrt::Axis(b)).differentiate(Wrt::Axis(a));
        if let (Ok(x), Ok(y)) = (ab.eval(&p, &params), ba.eval(&p, &params)) {
            prop_assert!(close(x, y, 1e-9), "{x} vs {y}");
        }
    }

    #[test]
    fn display_reparses_to_the_same_function((e, p) in expr_strategy()) {
        let back = parse_expression(&e.to_string()).unwrap();
        let params = Params::new();
        if let (Ok(x), Ok(y)) = (e.eval(&p, &params), back.eval(&p, &params)) {
            prop_assert!(close(x, y, 1e-12));
        }
    }

    #[test]
    fn derivative_is_linear((e, p) in expr_strategy(), axis in 0usize..3, c in -3.0f64..3.0) {
        let params = Params::new();
        let scaled = Expr::mul(Expr::Const(c), e.clone()).differentiate(Wrt::Axis(axis));
        let d = e.differentiate(Wrt::Axis(axis));
        if let (Ok(x), Ok(y)) = (scaled.eval(&p, &params), d.eval(&p, &params)) {
            prop_assert!(close(x, c * y, 1e-10));
        }
    }
}

#[test]
fn catalog_components_to_third_order() {
    for entry in catalog() {
        let pts = random_points(&entry.default_box, 10, 17);
        for c in &entry.spec.components {
            let c = c.substitute_params(&entry.spec.params);
            for p in &pts {
                let gap = derivative_tower_gap(&c, *p, 3, &Params::new()).expect("smooth in the box");
                assert!(gap <= 1e-5, "{}: {c} at {p:?}: {gap:e}", entry.name);
            }
        }
    }
}

#[test]
fn parameter_derivatives() {
    let sym = curvlab::dsl::Symbols::new(None, ["kappa".to_string()]);
    let e = parse_with("sin(kappa*x0)/kappa", &sym).unwrap();
    let d = e.differentiate(Wrt::Param("kappa"));
    let mut params = Params::new();
    params.insert("kappa".into(), 2.0);
    let x = [0.3, 0.0, 0.0];
    let expected = (0.3 * (0.6f64).cos() * 2.0 - (0.6f64).sin()) / 4.0;
    assert!((d.eval(&x, &params).unwrap() - expected).abs() < 1e-14);
}
