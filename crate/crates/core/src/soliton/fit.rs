//! Recover `(f, λ)` on a lattice from the linear equation
//! `Hess f - λ g = b` with `b = -Ric` (Ricci) or `b = -r g` (Yamabe).

use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use serde::{Deserialize, Serialize};

use super::kind::{soliton_type, SolitonKind, SolitonType};
use crate::dsl::{CompiledMetric, COMPONENTS};
use crate::error::{Error, Result};
use crate::geometry::{GridPurpose, GridSpec};
use crate::parallel::{try_map_points, Execution};
use crate::tensor::curvature;
use crate::tolerances::Tolerances;

/// `‖a⊥‖/‖a‖` below this means λ cannot be separated from the potential.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: SolitonKind,
    pub grid: GridSpec,
    pub lambda: f64,
    pub soliton_type: SolitonType,
    /// `‖A(f, λ) - b‖ / ‖b‖` for the least-squares optimum.
    pub relative_residual: f64,
    /// Share of the λ column not reproducible by a discrete Hessian.
    pub lambda_sensitivity: f64,
    pub degenerate: bool,
    /// Coordinates whose linear functions the discrete Hessian annihilates.
    pub affine_null_directions: Vec<String>,
    /// Row-major potential values; `None` at lattice corners, which no stencil reaches.
    pub f_values: Vec<Option<f64>>,
    pub equations: usize,
    pub unknowns: usize,
    pub notes: Vec<String>,
    pub passed: bool,
}

struct System {
    a_f: CscMatrix<f64>,
    a_col: DVector<f64>,
    b: DVector<f64>,
    /// lattice flat index -> unknown column
    column: Vec<Option<usize>>,
    unknowns: usize,
}

fn interior(grid: &GridSpec) -> Vec<[usize; 3]> {
    let n = grid.counts;
    let mut out = Vec::new();
    for i in 1..n[0] - 1 {
        for j in 1..n[1] - 1 {
            for k in 1..n[2] - 1 {
                out.push([i, j, k]);
            }
        }
    }
    out
}

fn is_corner(grid: &GridSpec, idx: [usize; 3]) -> bool {
    (0..3).all(|a| idx[a] == 0 || idx[a] == grid.counts[a] - 1)
}

fn shifted(idx: [usize; 3], a: usize, s: isize) -> [usize; 3] {
    let mut out = idx;
    out[a] = (idx[a] as isize + s) as usize;
    out
}

fn assemble(kind: SolitonKind, metric: &CompiledMetric, grid: &GridSpec, exec: Execution) -> Result<System> {
    let nodes = interior(grid);
    let h = grid.spacing();
    let bundles = try_map_points(exec, &nodes, |idx| curvature(&metric.jet(grid.node(*idx), 2)?))?;

    let mut column = vec![None; grid.len()];
    let mut unknowns = 0;
    for i in 0..grid.counts[0] {
        for j in 0..grid.counts[1] {
            for k in 0..grid.counts[2] {
                if !is_corner(grid, [i, j, k]) {
                    column[grid.flat_index([i, j, k])] = Some(unknowns);
                    unknowns += 1;
                }
            }
        }
    }
    let rows = 6 * nodes.len() + 1;
    let mut coo = CooMatrix::new(rows, unknowns);
    let mut a_col = DVector::zeros(rows);
    let mut b = DVector::zeros(rows);
    let col = |idx: [usize; 3]| column[grid.flat_index(idx)].expect("stencil node is an unknown");

    for (n, (idx, bundle)) in nodes.iter().zip(&bundles).enumerate() {
        for (c, &(i, j)) in COMPONENTS.iter().enumerate() {
            let row = 6 * n + c;
            if i == j {
                let w = 1.0 / (h[i] * h[i]);
                coo.push(row, col(shifted(*idx, i, 1)), w);
                coo.push(row, col(*idx), -2.0 * w);
                coo.push(row, col(shifted(*idx, i, -1)), w);
            } else {
                let w = 1.0 / (4.0 * h[i] * h[j]);
                for (si, sj, sign) in [(1, 1, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)] {
                    coo.push(row, col(shifted(shifted(*idx, i, si), j, sj)), sign * w);
                }
            }
            for k in 0..3 {
                let w = -bundle.gamma[k][i][j] / (2.0 * h[k]);
                if w != 0.0 {
                    coo.push(row, col(shifted(*idx, k, 1)), w);
                    coo.push(row, col(shifted(*idx, k, -1)), -w);
                }
            }
            a_col[row] = -bundle.g[i][j];
            b[row] = match kind {
                SolitonKind::Ricci => -bundle.ricci[i][j],
                SolitonKind::Yamabe => -bundle.scalar * bundle.g[i][j],
            };
        }
    }
    // gauge: f(center) = 0, weighted like the second-difference rows
    let center = grid.counts.map(|n| n / 2);
    let hmin = h.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    coo.push(rows - 1, col(center), 1.0 / (hmin * hmin));

    Ok(System {
        a_f: CscMatrix::from(&coo),
        a_col,
        b,
        column,
        unknowns,
    })
}

/// Least-squares solver for `min ‖A y - c‖` through regularized normal
/// equations with iterative refinement, which converges to a minimizer even
/// when `A` has a null space.
struct NormalSolver {
    a: CscMatrix<f64>,
    at: CscMatrix<f64>,
    chol: CscCholesky<f64>,
}

impl NormalSolver {
    fn new(a: &CscMatrix<f64>) -> Result<Self> {
        let at = a.transpose();
        let ata = &at * a;
        let max_diag = ata
            .diagonal_as_csc()
            .values()
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let delta = 1e-12 * max_diag.max(1.0);
        let n = ata.ncols();
        let mut reg = CooMatrix::new(n, n);
        for i in 0..n {
            reg.push(i, i, delta);
        }
        let m = &ata + &CscMatrix::from(&reg);
        let chol = CscCholesky::factor(&m).map_err(|e| Error::Fit(format!("normal equations: {e}")))?;
        Ok(NormalSolver { a: a.clone(), at, chol })
    }

    fn apply(&self, y: &DVector<f64>) -> DVector<f64> {
        let r = &self.a * y;
        r.column(0).into_owned()
    }

    fn solve(&self, c: &DVector<f64>) -> DVector<f64> {
        let step = |r: &DVector<f64>| -> DVector<f64> {
            let rhs = &self.at * r;
            self.chol.solve(&rhs).column(0).into_owned()
        };
        let mut y = step(c);
        for _ in 0..30 {
            let r = c - self.apply(&y);
            let dy = step(&r);
            let done = dy.norm() <= 1e-15 * y.norm().max(1e-300);
            y += dy;
            if done {
                break;
            }
        }
        y
    }
}

/// Fit a gradient soliton potential and constant on the lattice.
pub fn fit_potential(
    kind: SolitonKind,
    metric: &CompiledMetric,
    grid: &GridSpec,
    tol: &Tolerances,
    exec: Execution,
) -> Result<FitResult> {
    grid.validate(&metric.spec().domain, GridPurpose::Fitting)?;
    if metric.order() < 2 {
        return Err(Error::JetOrder {
            needed: 2,
            have: metric.order(),
        });
    }
    let sys = assemble(kind, metric, grid, exec)?;
    let solver = NormalSolver::new(&sys.a_f)?;
    let y_a = solver.solve(&sys.a_col);
    let y_b = solver.solve(&sys.b);
    let a_perp = &sys.a_col - solver.apply(&y_a);
    let b_perp = &sys.b - solver.apply(&y_b);

    let a_norm = sys.a_col.norm();
    let b_norm = sys.b.norm();
    let sensitivity = if a_norm > 0.0 { a_perp.norm() / a_norm } else { 0.0 };
    let degenerate = sensitivity < DEGENERACY_THRESHOLD;
    let mut notes = Vec::new();
    let lambda = if degenerate {
        notes.push(
            "lambda is not determined: g itself is (up to discretization) a Hessian on this chart, \
             so every lambda pairs with some potential; lambda pinned to 0"
                .to_string(),
        );
        0.0
    } else {
        a_perp.dot(&b_perp) / a_perp.norm_squared()
    };
    let f = &y_b - lambda * &y_a;
    let misfit = (&b_perp - lambda * &a_perp).norm();
    let relative_residual = if b_norm > f64::MIN_POSITIVE {
        misfit / b_norm
    } else {
        misfit
    };

    let affine_null_directions = affine_null(&sys, grid, metric);
    if !affine_null_directions.is_empty() {
        notes.push(format!(
            "potential is determined only up to adding linear functions of {}",
            affine_null_directions.join(", ")
        ));
    }
    let f_values = sys.column.iter().map(|c| c.map(|k| f[k])).collect();
    Ok(FitResult {
        kind,
        grid: *grid,
        lambda,
        soliton_type: soliton_type(lambda, tol.soliton),
        relative_residual,
        lambda_sensitivity: sensitivity,
        degenerate,
        affine_null_directions,
        f_values,
        equations: sys.a_f.nrows(),
        unknowns: sys.unknowns,
        notes,
        passed: relative_residual <= tol.fit,
    })
}

/// Coordinate functions (shifted to vanish at the gauge node) that the discrete
/// Hessian maps to zero.
fn affine_null(sys: &System, grid: &GridSpec, metric: &CompiledMetric) -> Vec<String> {
    let center = grid.node(grid.counts.map(|n| n / 2));
    let scale = sys.a_f.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    for axis in 0..3 {
        let mut phi = DVector::zeros(sys.unknowns);
        for i in 0..grid.counts[0] {
            for j in 0..grid.counts[1] {
                for k in 0..grid.counts[2] {
                    if let Some(c) = sys.column[grid.flat_index([i, j, k])] {
                        phi[c] = grid.node([i, j, k])[axis] - center[axis];
                    }
                }
            }
        }
        let image = (&sys.a_f * &phi).column(0).norm();
        if image <= 1e-9 * scale * phi.norm() {
            out.push(metric.spec().coords[axis].clone());
        }
    }
    out
}

/// `log2(coarse / fine)` for residuals measured at spacing `h` and `h/2`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::Params;
    use crate::geometry::catalog_lookup;

    fn metric(name: &str) -> CompiledMetric {
        CompiledMetric::new(catalog_lookup(name, &Params::new()).unwrap().spec, 2)
    }

    #[test]
    fn cylinder_recovers_lambda() {
        let grid = GridSpec {
            bounds: [(-1.0, 1.0), (1.0, 2.1), (0.0, 1.0)],
            counts: [7; 3],
        };
        let fit = fit_potential(
            SolitonKind::Ricci,
            &metric("r_x_s2"),
            &grid,
            &Tolerances::default(),
            Execution::Sequential,
        )
        .unwrap();
        assert!((fit.lambda - 1.0).abs() < 1e-6, "{}", fit.lambda);
        assert!(fit.relative_residual < 1e-6);
        assert!(!fit.degenerate);
        assert_eq!(fit.affine_null_directions, vec!["t".to_string()]);
        assert_eq!(fit.f_values.iter().filter(|v| v.is_none()).count(), 8);
    }

    #[test]
    fn flat_space_is_degenerate() {
        let grid = GridSpec::cube(-1.0, 1.0, 5);
        let fit = fit_potential(
            SolitonKind::Ricci,
            &metric("euclidean"),
            &grid,
            &Tolerances::default(),
            Execution::Sequential,
        )
        .unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.lambda, 0.0);
        assert!(fit.relative_residual < 1e-9);
        assert_eq!(fit.affine_null_directions.len(), 3);
        assert!(!fit.notes.is_empty());
    }

    #[test]
    fn rejects_thin_grid() {
        let grid = GridSpec {
            bounds: [(-1.0, 1.0); 3],
            counts: [5, 2, 5],
        };
        assert!(matches!(
            fit_potential(
                SolitonKind::Ricci,
                &metric("euclidean"),
                &grid,
                &Tolerances::default(),
                Execution::Sequential
            ),
            Err(Error::Grid(_))
        ));
    }

    #[test]
    fn nil_has_no_gradient_soliton() {
        let grid = GridSpec::cube(-1.0, 1.0, 5);
        let fit = fit_potential(
            SolitonKind::Ricci,
            &metric("nil3"),
            &grid,
            &Tolerances::default(),
            Execution::Sequential,
        )
        .unwrap();
        assert!(fit.relative_residual > 1e-2, "{}", fit.relative_residual);
        assert!(!fit.passed);
    }
}
