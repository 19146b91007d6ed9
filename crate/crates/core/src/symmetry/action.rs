use crate::dsl::Mat3;
use crate::error::{Error, Result};
use crate::tensor::{wedge, CurvatureBundle, DenseTensor};

/// `(A·T)(X_1..X_k; X, Y) = -Σ_s T(.., A(X,Y) X_s, ..)` where `endo(x, y)[m][a]` is
/// the `m` component of `A(∂x, ∂y) ∂a`.
fn derivation_action(t: &DenseTensor, endo: impl Fn(usize, usize) -> Mat3) -> Result<DenseTensor> {
    let k = t.rank();
    if k != 2 && k != 4 {
        return Err(Error::UnsupportedRank(k));
    }
    let mut out = DenseTensor::zeros(k + 2);
    let mut idx = vec![0usize; k];
    let mut full = vec![0usize; k + 2];
    for x in 0..3 {
        for y in 0..3 {
            if x == y {
                continue;
            }
            let a = endo(x, y);
            for flat in 0..3usize.pow(k as u32) {
                t.unravel(flat, &mut idx);
                let mut s = 0.0;
                for slot in 0..k {
                    let orig = idx[slot];
                    for (m, row) in a.iter().enumerate() {
                        let c = row[orig];
                        if c != 0.0 {
                            idx[slot] = m;
                            s += c * t.get(&idx);
                        }
                    }
                    idx[slot] = orig;
                }
                full[..k].copy_from_slice(&idx);
                full[k] = x;
                full[k + 1] = y;
                out.set(&full, -s);
            }
        }
    }
    Ok(out)
}

/// `R·T`: the curvature operators acting as derivations on a covariant tensor of rank 2 or 4.
pub fn curvature_action(t: &DenseTensor, b: &CurvatureBundle) -> Result<DenseTensor> {
    derivation_action(t, |x, y| {
        std::array::from_fn(|m| std::array::from_fn(|a| b.riemann13[x][y][a][m]))
    })
}

/// `Q(g,T)`: the endomorphisms `X ∧_g Y` acting as derivations on `T`.
pub fn q_tensor(t: &DenseTensor, g: &Mat3) -> Result<DenseTensor> {
    derivation_action(t, |x, y| {
        let ex: [f64; 3] = std::array::from_fn(|i| if i == x { 1.0 } else { 0.0 });
        let ey: [f64; 3] = std::array::from_fn(|i| if i == y { 1.0 } else { 0.0 });
        wedge(&ex, &ey, g)
    })
}
