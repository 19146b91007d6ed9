//! Levi-Civita connection and curvature from a metric jet.
//!
//! Index conventions (all arrays dense, coordinate basis):
//!
//! * `gamma[k][i][j] = Γ^k_ij`, so `∇_{∂i} ∂j = Γ^k_ij ∂k`.
//! * `riemann13[i][j][k][l]` is the `∂l` component of `R(∂i, ∂j)∂k`, with
//!   `R(X, Y) = [∇_X, ∇_Y] - ∇_[X,Y]`.
//! * `riemann04[i][j][k][l] = g(R(∂i, ∂j)∂l, ∂k)`, so `R_1212` is the sectional
//!   curvature of an orthonormal pair and the unit round sphere has `R = G`.
//! * `ricci[j][k] = Σ_i riemann13[i][j][k][i]`; `ricci_op[i][j] = S^i_j`.

use crate::dsl::{Mat3, MetricJet, Tensor3, Tensor4, Tensor5};
use crate::error::{Error, Result};
use crate::linalg;
use crate::taylor::Taylor;

/// Points whose metric condition number exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e8;

/// Curvature data at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureBundle {
    pub point: [f64; 3],
    pub g: Mat3,
    pub g_inverse: Mat3,
    pub gamma: Tensor3,
    pub riemann13: Tensor4,
    pub riemann04: Tensor4,
    pub ricci: Mat3,
    pub ricci_op: Mat3,
    pub scalar: f64,
    /// `nabla_riemann[m][i][j][k][l] = ∇_m R_ijkl`; needs a jet of order 3.
    pub nabla_riemann: Option<Box<Tensor5>>,
    /// `nabla_ricci_op[m][i][j] = (∇_m S)^i_j`; needs order 3.
    pub nabla_ricci_op: Option<Tensor3>,
    /// `∂_i r`; needs order 3.
    pub d_scalar: Option<[f64; 3]>,
    /// `∂_i ∂_j r`; needs order 4.
    pub d2_scalar: Option<Mat3>,
}

fn checked_inverse(g: &Mat3, point: [f64; 3]) -> Result<Mat3> {
    let cond = linalg::condition_number(g);
    if !cond.is_finite() {
        return Err(Error::NotPositiveDefinite(point));
    }
    if cond > MAX_CONDITION {
        return Err(Error::IllConditioned { point, cond });
    }
    Ok(linalg::inverse(g).unwrap())
}

/// Christoffel symbols of the second kind at the jet point.
pub fn christoffel(jet: &MetricJet) -> Result<Tensor3> {
    if jet.order < 1 {
        return Err(Error::JetOrder {
            needed: 1,
            have: jet.order,
        });
    }
    let ginv = checked_inverse(&jet.g(), jet.point)?;
    let dg = jet.dg();
    let mut first = [[[0.0; 3]; 3]; 3];
    for (l, fl) in first.iter_mut().enumerate() {
        for (i, fli) in fl.iter_mut().enumerate() {
            for (j, v) in fli.iter_mut().enumerate() {
                *v = 0.5 * (dg[j][l][i] + dg[i][l][j] - dg[i][j][l]);
            }
        }
    }
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for (i, gki) in gk.iter_mut().enumerate() {
            for (j, v) in gki.iter_mut().enumerate() {
                *v = (0..3).map(|l| ginv[k][l] * first[l][i][j]).sum();
            }
        }
    }
    Ok(gamma)
}

type TMat = [[Taylor; 3]; 3];

fn taylor_inverse(g: &TMat) -> TMat {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| g[r0][c0] * g[r1][c1] - g[r0][c1] * g[r1][c0];
    let mut adj: TMat = [[Taylor::zero(0); 3]; 3];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = cof((j + 1) % 3, (j + 2) % 3, (i + 1) % 3, (i + 2) % 3);
        }
    }
    let det = g[0][0] * adj[0][0] + g[0][1] * adj[1][0] + g[0][2] * adj[2][0];
    let inv_det = det.recip();
    adj.map(|row| row.map(|v| v * inv_det))
}

/// Full curvature bundle. Derivative fields are filled as far as the jet order allows.
pub fn curvature(jet: &MetricJet) -> Result<CurvatureBundle> {
    let n = jet.order;
    if n < 2 {
        return Err(Error::JetOrder { needed: 2, have: n });
    }
    let g_val = jet.g();
    let g_inverse = checked_inverse(&g_val, jet.point)?;

    let g: TMat = std::array::from_fn(|i| std::array::from_fn(|j| jet.taylor(i, j)));
    let ginv = taylor_inverse(&g);
    // dg[k][i][j] = ∂_k g_ij
    let dg: [TMat; 3] = std::array::from_fn(|k| g.map(|row| row.map(|v| v.deriv(k))));

    let mut gamma_t = [[[Taylor::zero(n - 1); 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in i..3 {
                let mut s = Taylor::zero(n - 1);
                for l in 0..3 {
                    let first = (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]).scale(0.5);
                    s = s + ginv[k][l] * first;
                }
                gamma_t[k][i][j] = s;
                gamma_t[k][j][i] = s;
            }
        }
    }

    let mut r13_t = [[[[Taylor::zero(n - 2); 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let mut s = gamma_t[l][j][k].deriv(i) - gamma_t[l][i][k].deriv(j);
                    for m in 0..3 {
                        s = s + gamma_t[m][j][k] * gamma_t[l][i][m] - gamma_t[m][i][k] * gamma_t[l][j][m];
                    }
                    r13_t[i][j][k][l] = s;
                    r13_t[j][i][k][l] = -s;
                }
            }
        }
    }

    let mut r04_t = [[[[Taylor::zero(n - 2); 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let mut s = Taylor::zero(n - 2);
                    for m in 0..3 {
                        s = s + r13_t[i][j][l][m] * g[m][k];
                    }
                    r04_t[i][j][k][l] = s;
                }
            }
        }
    }

    let mut ricci_t: TMat = [[Taylor::zero(n - 2); 3]; 3];
    for (j, row) in ricci_t.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            let mut s = Taylor::zero(n - 2);
            for i in 0..3 {
                s = s + r13_t[i][j][k][i];
            }
            *v = s;
        }
    }
    let mut s_t: TMat = [[Taylor::zero(n - 2); 3]; 3];
    for (i, row) in s_t.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let mut s = Taylor::zero(n - 2);
            for k in 0..3 {
                s = s + ginv[i][k] * ricci_t[k][j];
            }
            *v = s;
        }
    }
    let scalar_t = s_t[0][0] + s_t[1][1] + s_t[2][2];

    let gamma: Tensor3 = gamma_t.map(|a| a.map(|b| b.map(|v| v.value())));
    let riemann13: Tensor4 = r13_t.map(|a| a.map(|b| b.map(|c| c.map(|v| v.value()))));
    let riemann04: Tensor4 = r04_t.map(|a| a.map(|b| b.map(|c| c.map(|v| v.value()))));
    let ricci: Mat3 = ricci_t.map(|r| r.map(|v| v.value()));
    let ricci_op: Mat3 = s_t.map(|r| r.map(|v| v.value()));

    let (nabla_riemann, nabla_ricci_op, d_scalar) = if n >= 3 {
        let mut nr = Box::new([[[[[0.0; 3]; 3]; 3]; 3]; 3]);
        for m in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            let mut v = r04_t[i][j][k][l].partial(&[m]);
                            for p in 0..3 {
                                v -= gamma[p][m][i] * riemann04[p][j][k][l]
                                    + gamma[p][m][j] * riemann04[i][p][k][l]
                                    + gamma[p][m][k] * riemann04[i][j][p][l]
                                    + gamma[p][m][l] * riemann04[i][j][k][p];
                            }
                            nr[m][i][j][k][l] = v;
                        }
                    }
                }
            }
        }
        let mut ns = [[[0.0; 3]; 3]; 3];
        for (m, nsm) in ns.iter_mut().enumerate() {
            for (i, row) in nsm.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    let mut x = s_t[i][j].partial(&[m]);
                    for p in 0..3 {
                        x += gamma[i][m][p] * ricci_op[p][j] - gamma[p][m][j] * ricci_op[i][p];
                    }
                    *v = x;
                }
            }
        }
        let ds = std::array::from_fn(|m| scalar_t.partial(&[m]));
        (Some(nr), Some(ns), Some(ds))
    } else {
        (None, None, None)
    };
    let d2_scalar = (n >= 4).then(|| std::array::from_fn(|i| std::array::from_fn(|j| scalar_t.partial(&[i, j]))));

    Ok(CurvatureBundle {
        point: jet.point,
        g: g_val,
        g_inverse,
        gamma,
        riemann13,
        riemann04,
        ricci,
        ricci_op,
        scalar: scalar_t.value(),
        nabla_riemann,
        nabla_ricci_op,
        d_scalar,
        d2_scalar,
    })
}

impl CurvatureBundle {
    /// Algebraic curvature data expressed in the frame `e` (columns g-orthonormal).
    ///
    /// The result has `g = I`; connection and derivative fields are dropped.
    pub fn in_frame(&self, e: &Mat3) -> CurvatureBundle {
        let r04 = super::DenseTensor::from(&self.riemann04).to_frame(e);
        let riemann04: Tensor4 = std::array::from_fn(|i| {
            std::array::from_fn(|j| std::array::from_fn(|k| std::array::from_fn(|l| r04.get(&[i, j, k, l]))))
        });
        // with g = I, R(e_i, e_j) e_k has e_l component R_ijlk
        let riemann13: Tensor4 = std::array::from_fn(|i| {
            std::array::from_fn(|j| std::array::from_fn(|k| std::array::from_fn(|l| riemann04[i][j][l][k])))
        });
        let ricci = linalg::matmul(&linalg::matmul(&linalg::transpose(e), &self.ricci), e);
        CurvatureBundle {
            point: self.point,
            g: linalg::IDENTITY,
            g_inverse: linalg::IDENTITY,
            gamma: [[[0.0; 3]; 3]; 3],
            riemann13,
            riemann04,
            ricci,
            ricci_op: ricci,
            scalar: self.scalar,
            nabla_riemann: None,
            nabla_ricci_op: None,
            d_scalar: None,
            d2_scalar: None,
        }
    }

    /// Sectional curvature of the plane spanned by coordinate vectors `u`, `v`.
    pub fn sectional(&self, u: &[f64; 3], v: &[f64; 3]) -> f64 {
        let mut num = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        // R(u, v, u, v) = g(R(u,v)v, u)
                        num += self.riemann04[i][j][k][l] * u[i] * v[j] * u[k] * v[l];
                    }
                }
            }
        }
        let guu = linalg::inner(&self.g, u, u);
        let gvv = linalg::inner(&self.g, v, v);
        let guv = linalg::inner(&self.g, u, v);
        num / (guu * gvv - guv * guv)
    }
}
