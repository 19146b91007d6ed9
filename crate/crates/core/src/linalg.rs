//! Closed-form 3×3 linear algebra.

use std::f64::consts::PI;

use crate::dsl::Mat3;

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn det3(a: &Mat3) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Transposed cofactor matrix, so that `a · adj(a) = det(a) I`.
pub fn adjugate(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            *v = a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
        }
    }
    out
}

pub fn inverse(a: &Mat3) -> Option<Mat3> {
    let d = det3(a);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let adj = adjugate(a);
    Some(adj.map(|row| row.map(|v| v / d)))
}

pub fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn transpose(a: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn matvec(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| (0..3).map(|k| a[i][k] * v[k]).sum())
}

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `g(u, v)` for coordinate vectors.
pub fn inner(g: &Mat3, u: &[f64; 3], v: &[f64; 3]) -> f64 {
    dot(u, &matvec(g, v))
}

pub fn frobenius(a: &Mat3) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Frobenius-norm condition number of an invertible matrix.
pub fn condition_number(a: &Mat3) -> f64 {
    match inverse(a) {
        Some(inv) => frobenius(a) * frobenius(&inv),
        None => f64::INFINITY,
    }
}

/// Columns form a g-orthonormal frame obtained by Gram–Schmidt on the coordinate
/// basis (`E[i][a]` is component `i` of frame vector `a`), so `Eᵀ g E = I`.
pub fn orthonormal_frame(g: &Mat3) -> Mat3 {
    let mut vecs: [[f64; 3]; 3] = IDENTITY;
    for a in 0..3 {
        for b in 0..a {
            let proj = inner(g, &vecs[a], &vecs[b]);
            for i in 0..3 {
                vecs[a][i] -= proj * vecs[b][i];
            }
        }
        let n = inner(g, &vecs[a], &vecs[a]).sqrt();
        for i in 0..3 {
            vecs[a][i] /= n;
        }
    }
    transpose(&vecs)
}

/// Eigenvalues of a real symmetric 3×3 matrix, ascending, by the trigonometric
/// closed form (Smith's method).
pub fn sym_eigenvalues(a: &Mat3) -> [f64; 3] {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if p1 == 0.0 {
        let mut d = [a[0][0], a[1][1], a[2][2]];
        d.sort_by(f64::total_cmp);
        return d;
    }
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = *a;
    for (i, row) in b.iter_mut().enumerate() {
        row[i] -= q;
        for v in row.iter_mut() {
            *v /= p;
        }
    }
    let r = (det3(&b) / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let mid = 3.0 * q - hi - lo;
    [lo, mid, hi]
}

/// Unit eigenvector of symmetric `a` for a simple eigenvalue `lambda`, from the
/// largest cross product of rows of `a - lambda I`.
pub fn sym_eigenvector(a: &Mat3, lambda: f64) -> [f64; 3] {
    let mut m = *a;
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let candidates = [cross(&m[0], &m[1]), cross(&m[0], &m[2]), cross(&m[1], &m[2])];
    let best = candidates
        .iter()
        .max_by(|x, y| dot(x, x).total_cmp(&dot(y, y)))
        .unwrap();
    let n = dot(best, best).sqrt();
    if n == 0.0 {
        // rank ≤ 1: lambda is at least double; any vector orthogonal to the row space works
        let row = m.iter().max_by(|x, y| dot(x, x).total_cmp(&dot(y, y))).unwrap();
        let axis = if row[0].abs() < 0.9 * row.iter().map(|v| v.abs()).fold(0.0, f64::max) {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let v = cross(row, &axis);
        let nv = dot(&v, &v).sqrt();
        if nv == 0.0 {
            return [1.0, 0.0, 0.0];
        }
        return v.map(|x| x / nv);
    }
    best.map(|x| x / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix3, SymmetricEigen};

    fn oracle(a: &Mat3) -> [f64; 3] {
        let m = Matrix3::from_fn(|i, j| a[i][j]);
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2]]
    }

    #[test]
    fn closed_form_matches_iterative_solver() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let mut a = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in i..3 {
                    let v: f64 = rng.random_range(-3.0..3.0);
                    a[i][j] = v;
                    a[j][i] = v;
                }
            }
            let got = sym_eigenvalues(&a);
            let want = oracle(&a);
            for k in 0..3 {
                assert!((got[k] - want[k]).abs() < 1e-10, "{got:?} vs {want:?}");
            }
            for &l in &got {
                // eigenvector check only where the eigenvalue is well separated
                if got.iter().filter(|&&m| (m - l).abs() < 1e-3).count() == 1 {
                    let v = sym_eigenvector(&a, l);
                    let av = matvec(&a, &v);
                    for i in 0..3 {
                        assert!((av[i] - l * v[i]).abs() < 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        assert_eq!(
            sym_eigenvalues(&[[2.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]]),
            [-1.0, 2.0, 2.0]
        );
        // rotated diag(1, 1, 4)
        let c = 0.6;
        let s = 0.8;
        let r = [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
        let d = [[4.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let a = matmul(&matmul(&r, &d), &transpose(&r));
        let ev = sym_eigenvalues(&a);
        assert!((ev[0] - 1.0).abs() < 1e-7 && (ev[1] - 1.0).abs() < 1e-7 && (ev[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn frame_is_orthonormal() {
        let g = [[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 0.7]];
        let e = orthonormal_frame(&g);
        let m = matmul(&matmul(&transpose(&e), &g), &e);
        for i in 0..3 {
            for j in 0..3 {
                assert!((m[i][j] - IDENTITY[i][j]).abs() < 1e-14);
            }
        }
        let inv = inverse(&g).unwrap();
        let id = matmul(&g, &inv);
        assert!((0..3).all(|i| (0..3).all(|j| (id[i][j] - IDENTITY[i][j]).abs() < 1e-14)));
    }
}
