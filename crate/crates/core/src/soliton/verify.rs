use serde::{Deserialize, Serialize};

use super::kind::{soliton_type, SolitonKind, SolitonType};
use crate::dsl::{CompiledExpr, CompiledMetric, Expr, Mat3, Tensor3};
use crate::error::{Error, Result};
use crate::linalg;
use crate::parallel::{try_map_points, Execution};
use crate::symmetry::ricci_in_orthonormal_frame;
use crate::tensor::{
    curvature, gradient, hessian, norm_covector, norm_lower3, operator_norm_g, trace_g, CurvatureBundle, ScalarFieldJet,
};
use crate::tolerances::Tolerances;

/// A closed-form potential and constant to be checked against a metric.
#[derive(Debug, Clone)]
pub struct SolitonCandidate {
    pub kind: SolitonKind,
    pub potential: Expr,
    pub lambda: f64,
}

/// Residuals of the consequence identities of a gradient Ricci soliton.
pub const RICCI_IDENTITIES: [&str; 4] = ["curvature_gradient", "trace", "scalar_derivative", "weighted_laplacian"];

/// Yamabe identities. Only the `_derived` forms and `trace` are contracted; the
/// `_literal` forms carry the opposite sign or coefficient and are reported for
/// comparison.
pub const YAMABE_IDENTITIES: [&str; 5] = [
    "trace",
    "ricci_gradient_literal",
    "ricci_gradient_derived",
    "gradient_norm_literal",
    "gradient_norm_derived",
];

fn contracted(kind: SolitonKind, name: &str) -> bool {
    match kind {
        SolitonKind::Ricci => true,
        SolitonKind::Yamabe => !name.ends_with("_literal"),
    }
}

/// `‖Hess f + Ric - λ g‖`, largest eigenvalue magnitude relative to g.
pub fn ricci_residual(b: &CurvatureBundle, f: &ScalarFieldJet, lambda: f64) -> f64 {
    let h = hessian(f, &b.gamma);
    let t: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| h[i][j] + b.ricci[i][j] - lambda * b.g[i][j]));
    operator_norm_g(&t, &b.g)
}

/// `‖Hess f - (λ - r) g‖`
pub fn yamabe_residual(b: &CurvatureBundle, f: &ScalarFieldJet, lambda: f64) -> f64 {
    let h = hessian(f, &b.gamma);
    let c = lambda - b.scalar;
    let t: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| h[i][j] - c * b.g[i][j]));
    operator_norm_g(&t, &b.g)
}

fn require_derivatives(b: &CurvatureBundle) -> Result<(&Tensor3, &[f64; 3], &Mat3)> {
    match (&b.nabla_ricci_op, &b.d_scalar, &b.d2_scalar) {
        (Some(ns), Some(dr), Some(ddr)) => Ok((ns, dr, ddr)),
        (Some(_), Some(_), None) => Err(Error::JetOrder { needed: 4, have: 3 }),
        _ => Err(Error::JetOrder { needed: 4, have: 2 }),
    }
}

/// `|Ric|² = tr(S²)`
pub fn ricci_norm_squared(b: &CurvatureBundle) -> f64 {
    let s = ricci_in_orthonormal_frame(b);
    s.iter().flatten().map(|v| v * v).sum()
}

/// Residuals of the four consequences of `Hess f + Ric = λ g`, in the order of
/// [`RICCI_IDENTITIES`]:
///
/// * `R(X,Y)∇f = (∇_Y S)X - (∇_X S)Y`
/// * `Δf = 3λ - r`
/// * `∇f(r) = 2 Ric(∇f, ∇f)`
/// * `Δr - ∇f(r) = 2λr - 2|Ric|²`
pub fn ricci_identity_suite(b: &CurvatureBundle, f: &ScalarFieldJet, lambda: f64) -> Result<[f64; 4]> {
    let (ns, dr, ddr) = require_derivatives(b)?;
    let grad = gradient(f, &b.g_inverse);

    // t[i][j][m] = g_ml (R(∂i,∂j)∇f - (∇_j S)∂i + (∇_i S)∂j)^l
    let mut upper = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                let rf: f64 = (0..3).map(|k| b.riemann13[i][j][k][l] * grad[k]).sum();
                upper[i][j][l] = rf - ns[j][l][i] + ns[i][l][j];
            }
        }
    }
    let lowered: Tensor3 = std::array::from_fn(|i| {
        std::array::from_fn(|j| std::array::from_fn(|m| (0..3).map(|l| b.g[m][l] * upper[i][j][l]).sum()))
    });
    let curvature_gradient = norm_lower3(&lowered, &b.g);

    let lap_f = trace_g(&hessian(f, &b.gamma), &b.g_inverse);
    let trace = (lap_f - (3.0 * lambda - b.scalar)).abs();

    let grad_r = linalg::dot(&grad, dr);
    let ric_ff = linalg::inner(&b.ricci, &grad, &grad);
    let scalar_derivative = (grad_r - 2.0 * ric_ff).abs();

    let r_jet = ScalarFieldJet {
        value: b.scalar,
        d: *dr,
        dd: *ddr,
    };
    let lap_r = trace_g(&hessian(&r_jet, &b.gamma), &b.g_inverse);
    let weighted_laplacian = ((lap_r - grad_r) - (2.0 * lambda * b.scalar - 2.0 * ricci_norm_squared(b))).abs();

    Ok([curvature_gradient, trace, scalar_derivative, weighted_laplacian])
}

/// `∂_i (g^{ab} f_a f_b)`
fn gradient_norm_derivative(b: &CurvatureBundle, f: &ScalarFieldJet) -> [f64; 3] {
    let grad = gradient(f, &b.g_inverse);
    std::array::from_fn(|i| {
        // ∂_i g_cd = g_cm Γ^m_id + g_dm Γ^m_ic, and ∂_i g^{ab} = -g^{ac} ∂_i g_cd g^{db}
        let mut s = 0.0;
        for c in 0..3 {
            for d in 0..3 {
                let dg: f64 = (0..3)
                    .map(|m| b.g[c][m] * b.gamma[m][i][d] + b.g[d][m] * b.gamma[m][i][c])
                    .sum();
                s -= grad[c] * dg * grad[d];
            }
        }
        s + 2.0 * (0..3).map(|a| grad[a] * f.dd[a][i]).sum::<f64>()
    })
}

/// Residuals in the order of [`YAMABE_IDENTITIES`]:
///
/// * `Δf = 3(λ - r)`
/// * literal `-Ric(∇f, ·) = 2 dr`, derived `Ric(∇f, ·) = 2 dr`
/// * literal `d|∇f|² = 2r df`, derived `d|∇f|² = 2(λ - r) df`
pub fn yamabe_identity_suite(b: &CurvatureBundle, f: &ScalarFieldJet, lambda: f64) -> Result<[f64; 5]> {
    let (_, dr, _) = require_derivatives(b)?;
    let grad = gradient(f, &b.g_inverse);
    let lap_f = trace_g(&hessian(f, &b.gamma), &b.g_inverse);
    let trace = (lap_f - 3.0 * (lambda - b.scalar)).abs();

    let ric_grad = linalg::matvec(&b.ricci, &grad);
    let ric_literal: [f64; 3] = std::array::from_fn(|i| -ric_grad[i] - 2.0 * dr[i]);
    let ric_derived: [f64; 3] = std::array::from_fn(|i| ric_grad[i] - 2.0 * dr[i]);

    let d_norm = gradient_norm_derivative(b, f);
    let grad_literal: [f64; 3] = std::array::from_fn(|i| d_norm[i] - 2.0 * b.scalar * f.d[i]);
    let grad_derived: [f64; 3] = std::array::from_fn(|i| d_norm[i] - 2.0 * (lambda - b.scalar) * f.d[i]);

    let n = |w: &[f64; 3]| norm_covector(w, &b.g_inverse);
    Ok([
        trace,
        n(&ric_literal),
        n(&ric_derived),
        n(&grad_literal),
        n(&grad_derived),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub sup: f64,
    pub rms: f64,
}

impl ResidualSummary {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut sup, mut sq, mut n) = (0.0_f64, 0.0, 0usize);
        for v in values {
            sup = sup.max(v);
            sq += v * v;
            n += 1;
        }
        ResidualSummary {
            sup,
            rms: if n == 0 { 0.0 } else { (sq / n as f64).sqrt() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub name: String,
    pub residual: ResidualSummary,
    /// Whether this identity counts towards pass/fail.
    pub contracted: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSolitonRecord {
    pub point: [f64; 3],
    pub defining: f64,
    pub identities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonReport {
    pub kind: SolitonKind,
    pub lambda: f64,
    pub soliton_type: SolitonType,
    /// Whether the potential is non-constant on the sample.
    pub nontrivial: bool,
    pub defining: ResidualSummary,
    pub identities: Vec<IdentityResidual>,
    /// Which Yamabe identity forms agree with the defining equation.
    pub yamabe_forms: Option<YamabeForms>,
    pub points: Vec<PointSolitonRecord>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YamabeForms {
    pub ricci_gradient: FormAgreement,
    pub gradient_norm: FormAgreement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormAgreement {
    Both,
    LiteralOnly,
    DerivedOnly,
    Neither,
}

impl FormAgreement {
    fn from_holds(literal: bool, derived: bool) -> Self {
        match (literal, derived) {
            (true, true) => FormAgreement::Both,
            (true, false) => FormAgreement::LiteralOnly,
            (false, true) => FormAgreement::DerivedOnly,
            (false, false) => FormAgreement::Neither,
        }
    }
}

/// Evaluate the defining equation and its identities at every point.
pub fn verify_soliton(
    metric: &CompiledMetric,
    candidate: &SolitonCandidate,
    points: &[[f64; 3]],
    tol: &Tolerances,
    exec: Execution,
) -> Result<SolitonReport> {
    if metric.order() < 4 {
        return Err(Error::JetOrder {
            needed: 4,
            have: metric.order(),
        });
    }
    let f = CompiledExpr::new(&candidate.potential, &metric.spec().params, 2);
    let kind = candidate.kind;
    let lambda = candidate.lambda;
    let records = try_map_points(exec, points, |p| -> Result<(PointSolitonRecord, [f64; 3])> {
        let b = curvature(&metric.jet(*p, 4)?)?;
        let fj = ScalarFieldJet::from_compiled(&f, p)?;
        let (defining, identities) = match kind {
            SolitonKind::Ricci => (
                ricci_residual(&b, &fj, lambda),
                ricci_identity_suite(&b, &fj, lambda)?.to_vec(),
            ),
            SolitonKind::Yamabe => (
                yamabe_residual(&b, &fj, lambda),
                yamabe_identity_suite(&b, &fj, lambda)?.to_vec(),
            ),
        };
        Ok((
            PointSolitonRecord {
                point: *p,
                defining,
                identities,
            },
            fj.d,
        ))
    })?;
    let nontrivial = records.iter().any(|(_, d)| d.iter().any(|v| v.abs() > tol.identity));
    let points: Vec<PointSolitonRecord> = records.into_iter().map(|(r, _)| r).collect();

    let names: &[&str] = match kind {
        SolitonKind::Ricci => &RICCI_IDENTITIES,
        SolitonKind::Yamabe => &YAMABE_IDENTITIES,
    };
    let identities: Vec<IdentityResidual> = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let residual = ResidualSummary::from_values(points.iter().map(|p| p.identities[k]));
            IdentityResidual {
                name: name.to_string(),
                residual,
                contracted: contracted(kind, name),
                holds: residual.sup <= tol.identity,
            }
        })
        .collect();
    let defining = ResidualSummary::from_values(points.iter().map(|p| p.defining));
    let yamabe_forms = (kind == SolitonKind::Yamabe).then(|| {
        let holds = |n: &str| identities.iter().find(|i| i.name == n).is_some_and(|i| i.holds);
        YamabeForms {
            ricci_gradient: FormAgreement::from_holds(holds("ricci_gradient_literal"), holds("ricci_gradient_derived")),
            gradient_norm: FormAgreement::from_holds(holds("gradient_norm_literal"), holds("gradient_norm_derived")),
        }
    });
    let passed = defining.sup <= tol.soliton && identities.iter().all(|i| !i.contracted || i.holds);
    Ok(SolitonReport {
        kind,
        lambda,
        soliton_type: soliton_type(lambda, tol.soliton),
        nontrivial,
        defining,
        identities,
        yamabe_forms,
        points,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_with, Params};
    use crate::geometry::{catalog_lookup, random_points};

    fn check(name: &str, kind: SolitonKind, f: &str, lambda: f64) -> SolitonReport {
        let e = catalog_lookup(name, &Params::new()).unwrap();
        let potential = parse_with(f, &e.spec.symbols()).unwrap();
        let metric = CompiledMetric::new(e.spec.clone(), 4);
        let pts = random_points(&e.default_box, 20, 11);
        let c = SolitonCandidate {
            kind,
            potential,
            lambda,
        };
        verify_soliton(&metric, &c, &pts, &Tolerances::default(), Execution::Sequential).unwrap()
    }

    #[test]
    fn cylinder() {
        let r = check("r_x_s2", SolitonKind::Ricci, "t^2/2", 1.0);
        assert!(r.passed, "{r:?}");
        assert_eq!(r.soliton_type, SolitonType::Expanding);
        let off = check("r_x_s2", SolitonKind::Ricci, "t^2/2", 2.0);
        assert!((off.defining.sup - 1.0).abs() < 1e-12);
        assert!(!off.passed);
    }

    #[test]
    fn cigar_exercises_curvature_gradient_identity() {
        let r = check("r_x_cigar", SolitonKind::Ricci, "-log(1 + x^2 + y^2)", 0.0);
        assert!(r.defining.sup < 1e-9, "{:?}", r.defining);
        assert!(r.passed, "{:?}", r.identities);
        assert_eq!(r.soliton_type, SolitonType::Steady);
    }

    #[test]
    fn constant_shift_leaves_residuals_unchanged() {
        let a = check("r_x_h2", SolitonKind::Ricci, "-t^2/2 + 0.3*x", -1.0);
        let b = check("r_x_h2", SolitonKind::Ricci, "-t^2/2 + 0.3*x + 7", -1.0);
        assert_eq!(a.defining, b.defining);
        assert_eq!(a.identities, b.identities);
    }

    #[test]
    fn yamabe_forms_on_flat_gaussian() {
        let r = check("euclidean", SolitonKind::Yamabe, "(x^2 + y^2 + z^2)/2", 1.0);
        assert!(r.passed);
        let forms = r.yamabe_forms.unwrap();
        assert_eq!(forms.gradient_norm, FormAgreement::DerivedOnly);
        assert_eq!(forms.ricci_gradient, FormAgreement::Both);
        let h = check("r_x_h2", SolitonKind::Yamabe, "t", -2.0);
        assert!(h.passed && h.nontrivial);
        assert_eq!(h.soliton_type, SolitonType::Shrinking);
    }

    #[test]
    fn needs_fourth_order_jets() {
        let e = catalog_lookup("euclidean", &Params::new()).unwrap();
        let metric = CompiledMetric::new(e.spec, 3);
        let c = SolitonCandidate {
            kind: SolitonKind::Ricci,
            potential: Expr::Const(0.0),
            lambda: 0.0,
        };
        assert!(matches!(
            verify_soliton(&metric, &c, &[[0.0; 3]], &Tolerances::default(), Execution::Sequential),
            Err(Error::JetOrder { needed: 4, .. })
        ));
    }
}
