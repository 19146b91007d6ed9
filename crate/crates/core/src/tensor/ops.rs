use super::engine::CurvatureBundle;
use crate::dsl::{CompiledExpr, Expr, Mat3, Params, Tensor3, Tensor4, Tensor5};
use crate::error::{Error, Result};
use crate::linalg;

/// Endomorphism `Z ↦ g(Y, Z) X - g(X, Z) Y` as a matrix acting on coordinate vectors.
pub fn wedge(x: &[f64; 3], y: &[f64; 3], g: &Mat3) -> Mat3 {
    let gx = linalg::matvec(g, x);
    let gy = linalg::matvec(g, y);
    std::array::from_fn(|m| std::array::from_fn(|a| gy[a] * x[m] - gx[a] * y[m]))
}

/// `G_ijkl = g((∂i ∧ ∂j)∂l, ∂k) = g_ik g_jl - g_il g_jk`, in the layout of `riemann04`.
pub fn g_tensor(g: &Mat3) -> Tensor4 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| std::array::from_fn(|k| std::array::from_fn(|l| g[i][k] * g[j][l] - g[i][l] * g[j][k])))
    })
}

/// The dimension-3 curvature `R(X,Y) = SX∧Y + X∧SY - (r/2) X∧Y`, lowered like `riemann04`.
pub fn reconstruct_curvature_3d(b: &CurvatureBundle) -> Tensor4 {
    let (g, ric, r) = (&b.g, &b.ricci, b.scalar);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                std::array::from_fn(|l| {
                    ric[i][k] * g[j][l] - ric[i][l] * g[j][k] + g[i][k] * ric[j][l]
                        - g[i][l] * ric[j][k]
                        - 0.5 * r * (g[i][k] * g[j][l] - g[i][l] * g[j][k])
                })
            })
        })
    })
}

pub fn norm4(t: &Tensor4) -> f64 {
    t.iter()
        .flatten()
        .flatten()
        .flatten()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

pub fn sub4(a: &Tensor4, b: &Tensor4, scale: f64) -> Tensor4 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| std::array::from_fn(|k| std::array::from_fn(|l| a[i][j][k][l] - scale * b[i][j][k][l])))
    })
}

/// Largest violation of the Riemann symmetries and the first Bianchi identity.
pub fn first_bianchi_residual(r: &Tensor4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let v = r[i][j][k][l];
                    worst = worst
                        .max((v + r[j][k][i][l] + r[k][i][j][l]).abs())
                        .max((v + r[j][i][k][l]).abs())
                        .max((v + r[i][j][l][k]).abs())
                        .max((v - r[k][l][i][j]).abs());
                }
            }
        }
    }
    worst
}

/// `∇R` from a bundle built on an order-3 jet.
pub fn covariant_derivative_riemann(b: &CurvatureBundle) -> Result<&Tensor5> {
    b.nabla_riemann.as_deref().ok_or(Error::JetOrder { needed: 3, have: 2 })
}

/// `max |∇_m R_ijkl + ∇_i R_jmkl + ∇_j R_mikl|`.
pub fn second_bianchi_residual(nabla: &Tensor5) -> f64 {
    let mut worst: f64 = 0.0;
    for m in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let s = nabla[m][i][j][k][l] + nabla[i][j][m][k][l] + nabla[j][m][i][k][l];
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
    }
    worst
}

pub fn norm5(t: &Tensor5) -> f64 {
    t.iter()
        .flatten()
        .flatten()
        .flatten()
        .flatten()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}

/// Value, coordinate gradient and coordinate Hessian of a scalar field at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarFieldJet {
    pub value: f64,
    pub d: [f64; 3],
    pub dd: Mat3,
}

impl ScalarFieldJet {
    pub fn from_compiled(f: &CompiledExpr, point: &[f64; 3]) -> Result<Self> {
        let t = f.taylor(point, 2)?;
        Ok(ScalarFieldJet {
            value: t.value(),
            d: std::array::from_fn(|i| t.partial(&[i])),
            dd: std::array::from_fn(|i| std::array::from_fn(|j| t.partial(&[i, j]))),
        })
    }

    pub fn from_expr(f: &Expr, params: &Params, point: &[f64; 3]) -> Result<Self> {
        Self::from_compiled(&CompiledExpr::new(f, params, 2), point)
    }
}

/// `Hess f_ij = ∂i∂j f - Γ^k_ij ∂k f`
pub fn hessian(f: &ScalarFieldJet, gamma: &Tensor3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| f.dd[i][j] - (0..3).map(|k| gamma[k][i][j] * f.d[k]).sum::<f64>()))
}

/// `(∇f)^i = g^ij ∂j f`
pub fn gradient(f: &ScalarFieldJet, g_inverse: &Mat3) -> [f64; 3] {
    linalg::matvec(g_inverse, &f.d)
}

pub fn laplacian(f: &ScalarFieldJet, b: &CurvatureBundle) -> f64 {
    trace_g(&hessian(f, &b.gamma), &b.g_inverse)
}

pub fn trace_g(t: &Mat3, g_inverse: &Mat3) -> f64 {
    (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| g_inverse[i][j] * t[i][j])
        .sum()
}

/// Largest |eigenvalue| of the g-self-adjoint operator of a symmetric (0,2) tensor.
pub fn operator_norm_g(t: &Mat3, g: &Mat3) -> f64 {
    let e = linalg::orthonormal_frame(g);
    let tf = linalg::matmul(&linalg::matmul(&linalg::transpose(&e), t), &e);
    let sym: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (tf[i][j] + tf[j][i])));
    linalg::sym_eigenvalues(&sym).iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `sqrt(g^ij w_i w_j)` for a 1-form.
pub fn norm_covector(w: &[f64; 3], g_inverse: &Mat3) -> f64 {
    linalg::inner(g_inverse, w, w).max(0.0).sqrt()
}

/// Frobenius norm of a covariant 3-tensor in a g-orthonormal frame.
pub fn norm_lower3(t: &Tensor3, g: &Mat3) -> f64 {
    let e = linalg::orthonormal_frame(g);
    let mut s = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let mut v = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            v += t[i][j][k] * e[i][a] * e[j][b] * e[k][c];
                        }
                    }
                }
                s += v * v;
            }
        }
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    const E: [[f64; 3]; 3] = linalg::IDENTITY;

    #[test]
    fn wedge_on_orthonormal_frame() {
        let w = wedge(&E[0], &E[1], &E);
        assert_eq!(linalg::matvec(&w, &E[1]), E[0]);
        assert_eq!(linalg::matvec(&w, &E[2]), [0.0; 3]);
    }

    #[test]
    fn wedge_antisymmetry_and_skew_adjointness() {
        let g = [[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 0.5]];
        let x = [0.3, -1.2, 0.7];
        let y = [1.1, 0.4, -0.5];
        let z = [-0.2, 0.9, 1.3];
        let xx = linalg::matvec(&wedge(&x, &x, &g), &z);
        assert!(xx.iter().all(|v| v.abs() < 1e-15));
        let wxy = wedge(&x, &y, &g);
        let wyx = wedge(&y, &x, &g);
        for i in 0..3 {
            for j in 0..3 {
                assert!((wxy[i][j] + wyx[i][j]).abs() < 1e-15);
            }
        }
        // g(W z, u) = -g(z, W u)
        let u = [0.5, 0.5, -1.0];
        let lhs = linalg::inner(&g, &linalg::matvec(&wxy, &z), &u);
        let rhs = -linalg::inner(&g, &z, &linalg::matvec(&wxy, &u));
        assert!((lhs - rhs).abs() < 1e-14);
    }

    #[test]
    fn g_tensor_components() {
        let g = g_tensor(&E);
        assert_eq!(g[0][1][0][1], 1.0);
        assert_eq!(g[0][1][1][0], -1.0);
        assert_eq!(g[0][0][0][1], 0.0);
        assert_eq!(first_bianchi_residual(&g), 0.0);
    }

    #[test]
    fn hessian_of_quadratics_on_flat_space() {
        let f = ScalarFieldJet {
            value: 9.0,
            d: [6.0, 0.0, 0.0],
            dd: [[2.0, 0.0, 0.0], [0.0; 3], [0.0; 3]],
        };
        let h = hessian(&f, &[[[0.0; 3]; 3]; 3]);
        assert_eq!(h, [[2.0, 0.0, 0.0], [0.0; 3], [0.0; 3]]);
        assert_eq!(trace_g(&h, &E), 2.0);
        assert_eq!(gradient(&f, &E), [6.0, 0.0, 0.0]);
    }

    #[test]
    fn operator_norm_of_metric_is_one() {
        let g = [[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 0.5]];
        assert!((operator_norm_g(&g, &g) - 1.0).abs() < 1e-12);
    }
}
