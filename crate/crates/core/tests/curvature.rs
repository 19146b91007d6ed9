mod common;

use common::{random_expr, random_point, rng};
use curvlab::dsl::{metric_jet, Domain, Expr, MetricSpec, Params, UnaryOp};
use curvlab::geometry::catalog_lookup;
use curvlab::symmetry::{classify_point, PointClass, SpectrumPattern};
use curvlab::tensor::{
    covariant_derivative_riemann, curvature, first_bianchi_residual, norm4, reconstruct_curvature_3d,
    second_bianchi_residual, sub4,
};
use curvlab::Tolerances;
use proptest::prelude::*;

fn on_axis(e: &Expr, axis: usize) -> Expr {
    match e {
        Expr::Var(_) => Expr::Var(axis),
        Expr::Unary(op, a) => Expr::Unary(*op, Box::new(on_axis(a, axis))),
        Expr::Binary(op, a, b) => Expr::Binary(*op, Box::new(on_axis(a, axis)), Box::new(on_axis(b, axis))),
        other => other.clone(),
    }
}

/// `exp(tanh(e))`: positive and bounded away from 0 and infinity.
fn positive(e: Expr) -> Expr {
    Expr::Unary(UnaryOp::Exp, Box::new(Expr::Unary(UnaryOp::Tanh, Box::new(e))))
}

fn spec(components: [Expr; 6]) -> MetricSpec {
    MetricSpec {
        name: "random".into(),
        coords: ["x".into(), "y".into(), "z".into()],
        components,
        domain: Domain::everywhere(),
        params: Params::new(),
    }
}

/// Diagonal metric with positive, coordinate-dependent entries.
fn diagonal_metric() -> impl Strategy<Value = (MetricSpec, [f64; 3])> {
    any::<u64>().prop_map(|seed| {
        let mut r = rng(seed);
        let mut d = || positive(random_expr(&mut r, 3));
        let (a, b, c) = (d(), d(), d());
        let z = Expr::Const(0.0);
        let s = spec([a, z.clone(), z.clone(), b, z, c]);
        (s, random_point(&mut rng(seed ^ 0x5eed), -1.0, 1.0))
    })
}

/// `dt^2 + w(t)^2 (dx^2 + dy^2)`: the Ricci operator has a double eigenvalue everywhere.
fn warped_metric() -> impl Strategy<Value = (MetricSpec, [f64; 3])> {
    any::<u64>().prop_map(|seed| {
        let mut r = rng(seed);
        let w = positive(on_axis(&random_expr(&mut r, 3), 0));
        let w2 = Expr::pow(w, Expr::Const(2.0));
        let z = Expr::Const(0.0);
        let s = spec([Expr::Const(1.0), z.clone(), z.clone(), w2.clone(), z, w2]);
        (s, random_point(&mut r, -1.0, 1.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_symmetries_and_bianchi((s, p) in diagonal_metric()) {
        let Ok(jet) = metric_jet(&s, p, 3) else { return Ok(()) };
        let Ok(b) = curvature(&jet) else { return Ok(()) };
        let scale = norm4(&b.riemann04).max(1.0);
        prop_assert!(first_bianchi_residual(&b.riemann04) <= 1e-10 * scale);
        let nabla = covariant_derivative_riemann(&b).unwrap();
        let nscale = curvlab::tensor::norm5(nabla).max(1.0);
        prop_assert!(second_bianchi_residual(nabla) <= 1e-9 * nscale);
        let rec = reconstruct_curvature_3d(&b);
        prop_assert!(norm4(&sub4(&rec, &b.riemann04, 1.0)) <= 1e-10 * scale);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((b.ricci[i][j] - b.ricci[j][i]).abs() <= 1e-10 * scale);
            }
        }
        let trace: f64 = (0..3).map(|i| b.ricci_op[i][i]).sum();
        prop_assert!((trace - b.scalar).abs() <= 1e-10 * scale);
    }

    #[test]
    fn double_ricci_eigenvalue_means_pseudo_symmetric((s, p) in warped_metric()) {
        let Ok(jet) = metric_jet(&s, p, 2) else { return Ok(()) };
        let Ok(b) = curvature(&jet) else { return Ok(()) };
        let v = classify_point(&b, &Tolerances::default());
        if let SpectrumPattern::Pair { simple, .. } = v.spectrum.pattern {
            prop_assert!(v.in_set_u);
            prop_assert!(v.cross_check_passed, "{v:?}");
            if let Some(l) = v.l_tensor {
                prop_assert!((l - simple / 2.0).abs() <= 1e-6 * l.abs().max(1.0));
                prop_assert!(v.dependence_residual <= 1e-8);
            }
        }
    }

    #[test]
    fn homothety_scales_curvature(c in 0.2f64..5.0, p in prop::array::uniform3(-1.0f64..1.0)) {
        let nil = catalog_lookup("nil3", &Params::new()).unwrap().spec;
        let mut scaled = nil.clone();
        scaled.components = nil.components.clone().map(|e| Expr::mul(Expr::Const(c), e));
        let tol = Tolerances::default();
        let a = classify_point(&curvature(&metric_jet(&nil, p, 2).unwrap()).unwrap(), &tol);
        let b = classify_point(&curvature(&metric_jet(&scaled, p, 2).unwrap()).unwrap(), &tol);
        prop_assert!((b.scalar - a.scalar / c).abs() <= 1e-10);
        prop_assert_eq!(a.class, PointClass::PseudoSymmetric);
        prop_assert_eq!(b.class, PointClass::PseudoSymmetric);
        prop_assert!((b.l().unwrap() - a.l().unwrap() / c).abs() <= 1e-9);
    }

    #[test]
    fn constant_curvature_is_recognised(k in 0.1f64..4.0, p in prop::array::uniform3(-0.5f64..0.5)) {
        let mut params = Params::new();
        params.insert("kappa".into(), k);
        let sphere = catalog_lookup("sphere3", &params).unwrap().spec;
        let b = curvature(&metric_jet(&sphere, p, 2).unwrap()).unwrap();
        let v = classify_point(&b, &Tolerances::default());
        prop_assert_eq!(v.class, PointClass::ConstantCurvature);
        prop_assert!(!v.in_set_u);
        prop_assert!((v.scalar - 6.0 * k).abs() <= 1e-9 * k.max(1.0));
    }
}
