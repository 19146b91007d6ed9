//! Ricci eigenframes on pair-pattern regions, their connection coefficients
//! `B_ijk = g(∇_{e_i} e_j, e_k)` and the frame-level curvature relations.

use serde::{Deserialize, Serialize};

use crate::dsl::{CompiledMetric, Mat3, Tensor3};
use crate::error::{Error, Result};
use crate::linalg;
use crate::symmetry::{ricci_spectrum, SpectrumPattern};
use crate::tensor::{curvature, CurvatureBundle, DenseTensor};

/// Orthonormal Ricci eigenframe at a point, with `S e0 = 2L e0`, `S e1 = μ e1`,
/// `S e2 = μ e2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameData {
    pub point: [f64; 3],
    /// Coordinate components: `vectors[a][i]` is component `i` of `e_a`.
    pub vectors: [[f64; 3]; 3],
    pub mu: f64,
    pub l: f64,
    /// Coordinate axis whose projection fixes `e1`.
    pub gauge_axis: usize,
    /// `max |g(e_a, e_b) - δ_ab|`
    pub orthonormality: f64,
    /// `max_a ‖S e_a - σ_a e_a‖`
    pub eigen_residual: f64,
}

fn sub(a: &[f64; 3], b: &[f64; 3], s: f64) -> [f64; 3] {
    std::array::from_fn(|i| a[i] - s * b[i])
}

fn normalized(g: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    let n = linalg::inner(g, v, v).sqrt();
    v.map(|x| x / n)
}

fn axis(k: usize) -> [f64; 3] {
    std::array::from_fn(|i| if i == k { 1.0 } else { 0.0 })
}

/// `e2` completing `(e0, e1)` to a positively oriented orthonormal frame.
fn oriented_completion(g: &Mat3, g_inverse: &Mat3, e0: &[f64; 3], e1: &[f64; 3]) -> [f64; 3] {
    let c = linalg::cross(e0, e1);
    let s = linalg::det3(g).sqrt();
    linalg::matvec(g_inverse, &c).map(|x| x * s)
}

/// Eigenframe with `e1` fixed by the projection of coordinate axis `gauge_axis`
/// (or the first axis with a usable projection when `None`).
fn eigenframe(b: &CurvatureBundle, tol: f64, gauge_axis: Option<usize>) -> Result<FrameData> {
    let spectrum = ricci_spectrum(b, tol);
    let (mu, simple) = match spectrum.pattern {
        SpectrumPattern::Pair { mu, simple, .. } if !spectrum.ambiguous => (mu, simple),
        SpectrumPattern::AllEqual => {
            return Err(Error::FrameUndefined(format!(
                "Ricci eigenvalues {:?} have no simple eigenvalue",
                spectrum.eigenvalues
            )))
        }
        _ => {
            return Err(Error::FrameUndefined(format!(
                "Ricci eigenvalues {:?} do not form a double/simple pair",
                spectrum.eigenvalues
            )))
        }
    };
    let e = linalg::orthonormal_frame(&b.g);
    let s = crate::symmetry::ricci_in_orthonormal_frame(b);
    let v = linalg::sym_eigenvector(&s, simple);
    let mut e0 = linalg::matvec(&e, &v);
    e0 = normalized(&b.g, &e0);

    let usable = |k: usize| {
        let a = axis(k);
        let w = sub(&a, &e0, linalg::inner(&b.g, &a, &e0));
        let n = linalg::inner(&b.g, &w, &w).sqrt();
        (n >= 0.1 * b.g[k][k].sqrt()).then_some(w)
    };
    let k = match gauge_axis {
        Some(k) => k,
        None => (0..3)
            .find(|&k| usable(k).is_some())
            .expect("three axes cannot all be parallel to e0"),
    };
    let w = usable(k).ok_or_else(|| Error::FrameUndefined(format!("gauge axis {k} is parallel to e0")))?;
    let e1 = normalized(&b.g, &w);

    // sign of e0: positive along the first axis it has a clear component on
    let s0 = (0..3)
        .map(|a| (linalg::inner(&b.g, &e0, &axis(a)), b.g[a][a].sqrt()))
        .find(|(c, n)| c.abs() >= 0.1 * n)
        .map_or(1.0, |(c, _)| c);
    if s0 < 0.0 {
        e0 = e0.map(|x| -x);
    }
    let e2 = oriented_completion(&b.g, &b.g_inverse, &e0, &e1);
    Ok(finish(b, [e0, e1, e2], mu, 0.5 * simple, k))
}

fn finish(b: &CurvatureBundle, vectors: [[f64; 3]; 3], mu: f64, l: f64, gauge_axis: usize) -> FrameData {
    let mut orth: f64 = 0.0;
    for a in 0..3 {
        for c in 0..3 {
            let d = if a == c { 1.0 } else { 0.0 };
            orth = orth.max((linalg::inner(&b.g, &vectors[a], &vectors[c]) - d).abs());
        }
    }
    let sigma = [2.0 * l, mu, mu];
    let mut eig: f64 = 0.0;
    for a in 0..3 {
        let se = linalg::matvec(&b.ricci_op, &vectors[a]);
        let r = sub(&se, &vectors[a], sigma[a]);
        eig = eig.max(linalg::inner(&b.g, &r, &r).sqrt());
    }
    FrameData {
        point: b.point,
        vectors,
        mu,
        l,
        gauge_axis,
        orthonormality: orth,
        eigen_residual: eig,
    }
}

/// Ricci eigenframe at a point with a pair pattern.
pub fn ricci_eigenframe(b: &CurvatureBundle, tol: f64) -> Result<FrameData> {
    eigenframe(b, tol, None)
}

/// Eigenframe using `reference`'s gauge axis, with signs matched to `reference`.
fn aligned_eigenframe(b: &CurvatureBundle, tol: f64, reference: &FrameData) -> Result<FrameData> {
    let mut f = eigenframe(b, tol, Some(reference.gauge_axis))?;
    for a in 0..2 {
        let c = linalg::inner(&b.g, &f.vectors[a], &reference.vectors[a]);
        if c.abs() < 0.5 {
            return Err(Error::GaugeFlip);
        }
        if c < 0.0 {
            f.vectors[a] = f.vectors[a].map(|x| -x);
        }
    }
    f.vectors[2] = oriented_completion(&b.g, &b.g_inverse, &f.vectors[0], &f.vectors[1]);
    if linalg::inner(&b.g, &f.vectors[2], &reference.vectors[2]) < 0.5 {
        return Err(Error::GaugeFlip);
    }
    Ok(f)
}

const OFFSETS: [f64; 4] = [1.0, -1.0, 2.0, -2.0];

/// Frames at `p ± h ∂_a` and `p ± 2h ∂_a` aligned with the center frame.
#[derive(Debug, Clone)]
pub struct FrameStencil {
    pub center: FrameData,
    pub gamma: Tensor3,
    pub step: f64,
    /// `[axis][n]` at `p + OFFSETS[n] h ∂_axis` with offsets `+1, -1, +2, -2`.
    pub neighbours: [[FrameData; 4]; 3],
}

pub fn frame_stencil(metric: &CompiledMetric, point: [f64; 3], tol: f64, step: f64) -> Result<FrameStencil> {
    let cb = curvature(&metric.jet(point, 2)?)?;
    let center = ricci_eigenframe(&cb, tol)?;
    let at = |a: usize, s: f64| -> Result<FrameData> {
        let mut p = point;
        p[a] += s * step;
        let b = curvature(&metric.jet(p, 2)?)?;
        aligned_eigenframe(&b, tol, &center).map_err(|e| match e {
            Error::FrameUndefined(m) => Error::FrameUndefined(format!("pair pattern lost on stencil: {m}")),
            e => e,
        })
    };
    let mut neighbours = [[center; 4]; 3];
    for (a, row) in neighbours.iter_mut().enumerate() {
        for (slot, s) in row.iter_mut().zip(OFFSETS) {
            *slot = at(a, s)?;
        }
    }
    Ok(FrameStencil {
        center,
        gamma: cb.gamma,
        step,
        neighbours,
    })
}

/// Coordinate derivative of a frame quantity, fourth-order central differences.
fn central(st: &FrameStencil, q: impl Fn(&FrameData) -> f64) -> [f64; 3] {
    std::array::from_fn(|a| {
        let n = &st.neighbours[a];
        (8.0 * (q(&n[0]) - q(&n[1])) - (q(&n[2]) - q(&n[3]))) / (12.0 * st.step)
    })
}

/// `B_ijk = g(∇_{e_i} e_j, e_k)` from differenced frame components plus
/// Christoffel terms.
pub fn connection_coefficients(st: &FrameStencil, g: &Mat3) -> Tensor3 {
    let e = &st.center.vectors;
    // d[j][a][m] = ∂_a e_j^m
    let d: [[[f64; 3]; 3]; 3] = std::array::from_fn(|j| {
        let cols: [[f64; 3]; 3] = std::array::from_fn(|m| central(st, |f| f.vectors[j][m]));
        std::array::from_fn(|a| std::array::from_fn(|m| cols[m][a]))
    });
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let nabla: [f64; 3] = std::array::from_fn(|m| {
                (0..3)
                    .map(|a| e[i][a] * (d[j][a][m] + (0..3).map(|n| st.gamma[m][a][n] * e[j][n]).sum::<f64>()))
                    .sum()
            });
            std::array::from_fn(|k| linalg::inner(g, &nabla, &e[k]))
        })
    })
}

/// `max |B_ijk + B_ikj|`
pub fn antisymmetry_residual(b: &Tensor3) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                worst = worst.max((b[i][j][k] + b[i][k][j]).abs());
            }
        }
    }
    worst
}

/// Derivatives of `μ` and `L` along the frame vectors at the center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameDerivatives {
    /// `e_i(μ)`
    pub mu: [f64; 3],
    /// `e_i(L)`
    pub l: [f64; 3],
}

pub fn frame_derivatives(st: &FrameStencil) -> FrameDerivatives {
    let dmu = central(st, |f| f.mu);
    let dl = central(st, |f| f.l);
    let e = &st.center.vectors;
    FrameDerivatives {
        mu: std::array::from_fn(|i| linalg::dot(&e[i], &dmu)),
        l: std::array::from_fn(|i| linalg::dot(&e[i], &dl)),
    }
}

/// Residuals of the relations that the second Bianchi identity imposes on a
/// pair-pattern eigenframe:
///
/// * `e0(μ - L) = (2L - μ)(B_101 + B_202)`
/// * `e1(L) = (μ - 2L) B_010`
/// * `e2(L) = (μ - 2L) B_020`
pub fn bianchi_frame_check(frame: &FrameData, b: &Tensor3, d: &FrameDerivatives) -> [f64; 3] {
    let (mu, l) = (frame.mu, frame.l);
    [
        ((d.mu[0] - d.l[0]) - (2.0 * l - mu) * (b[1][0][1] + b[2][0][2])).abs(),
        (d.l[1] - (mu - 2.0 * l) * b[0][1][0]).abs(),
        (d.l[2] - (mu - 2.0 * l) * b[0][2][0]).abs(),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenframeResiduals {
    /// `‖R(e1,e2) - (μ - L) e1∧e2‖`
    pub r12: f64,
    /// `‖R(e1,e0) - L e1∧e0‖`
    pub r10: f64,
    /// `‖R(e2,e0) - L e2∧e0‖`
    pub r20: f64,
    /// `|r - 2(μ + L)|`
    pub scalar: f64,
    /// `|Ric(e0,e0) - 2L|`
    pub ricci: f64,
    /// `‖R - R_blocks‖` with the curvature assembled from the three blocks.
    pub reassembly: f64,
}

impl EigenframeResiduals {
    pub fn max(&self) -> f64 {
        [self.r12, self.r10, self.r20, self.scalar, self.ricci, self.reassembly]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Frame component `⟨(e_a ∧ e_b) e_c, e_d⟩`.
fn wedge_component(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let delta = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
    delta(b, c) * delta(a, d) - delta(a, c) * delta(b, d)
}

pub fn eigenframe_curvature_check(frame: &FrameData, b: &CurvatureBundle) -> EigenframeResiduals {
    let e: Mat3 = linalg::transpose(&frame.vectors);
    let rf = DenseTensor::from(&b.riemann04).to_frame(&e);
    // g(R(e_a,e_b)e_c, e_d) = rf[a][b][d][c]
    let (mu, l) = (frame.mu, frame.l);
    let coefficient = |a: usize, bb: usize| -> f64 {
        match (a.min(bb), a.max(bb)) {
            (1, 2) => mu - l,
            (0, _) => l,
            _ => 0.0,
        }
    };
    let block = |a: usize, bb: usize| {
        let mut s = 0.0;
        for c in 0..3 {
            for d in 0..3 {
                let v = rf.get(&[a, bb, d, c]) - coefficient(a, bb) * wedge_component(a, bb, c, d);
                s += v * v;
            }
        }
        s.sqrt()
    };
    let mut reassembly = 0.0;
    for a in 0..3 {
        for bb in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let k = if a == bb { 0.0 } else { coefficient(a, bb) };
                    let v = rf.get(&[a, bb, d, c]) - k * wedge_component(a, bb, c, d);
                    reassembly += v * v;
                }
            }
        }
    }
    let ric00 = linalg::inner(&b.ricci, &frame.vectors[0], &frame.vectors[0]);
    EigenframeResiduals {
        r12: block(1, 2),
        r10: block(1, 0),
        r20: block(2, 0),
        scalar: (b.scalar - 2.0 * (mu + l)).abs(),
        ricci: (ric00 - 2.0 * l).abs(),
        reassembly: f64::sqrt(reassembly),
    }
}

/// All frame diagnostics at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameDiagnostic {
    pub frame: FrameData,
    pub b: Tensor3,
    pub b_antisymmetry: f64,
    pub derivatives: FrameDerivatives,
    pub bianchi: [f64; 3],
    pub curvature: EigenframeResiduals,
}

pub fn frame_diagnostic(metric: &CompiledMetric, point: [f64; 3], tol: f64, step: f64) -> Result<FrameDiagnostic> {
    let st = frame_stencil(metric, point, tol, step)?;
    let cb = curvature(&metric.jet(point, 2)?)?;
    let b = connection_coefficients(&st, &cb.g);
    let derivatives = frame_derivatives(&st);
    Ok(FrameDiagnostic {
        frame: st.center,
        b,
        b_antisymmetry: antisymmetry_residual(&b),
        derivatives,
        bianchi: bianchi_frame_check(&st.center, &b, &derivatives),
        curvature: eigenframe_curvature_check(&st.center, &cb),
    })
}
