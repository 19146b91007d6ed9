use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dsl::Domain;
use crate::error::{Error, Result};

/// A uniform lattice strictly inside an axis-aligned box.
///
/// Along an axis with bounds `(lo, hi)` and `n` points the nodes are
/// `lo + (i + 1)(hi - lo)/(n + 1)`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub bounds: [(f64, f64); 3],
    pub counts: [usize; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPurpose {
    Sampling,
    /// Finite-difference stencils need interior neighbours: ≥ 3 nodes per axis.
    Fitting,
}

impl GridSpec {
    pub fn cube(lo: f64, hi: f64, n: usize) -> Self {
        GridSpec {
            bounds: [(lo, hi); 3],
            counts: [n; 3],
        }
    }

    pub fn spacing(&self) -> [f64; 3] {
        std::array::from_fn(|a| (self.bounds[a].1 - self.bounds[a].0) / (self.counts[a] as f64 + 1.0))
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, idx: [usize; 3]) -> [f64; 3] {
        let h = self.spacing();
        std::array::from_fn(|a| self.bounds[a].0 + (idx[a] as f64 + 1.0) * h[a])
    }

    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.counts[1] + idx[1]) * self.counts[2] + idx[2]
    }

    /// Same box with the spacing halved; every old node is a new node.
    pub fn refined(&self) -> Self {
        GridSpec {
            bounds: self.bounds,
            counts: self.counts.map(|n| 2 * n + 1),
        }
    }

    /// Row-major lattice (last axis fastest).
    pub fn points(&self) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.counts[0] {
            for j in 0..self.counts[1] {
                for k in 0..self.counts[2] {
                    out.push(self.node([i, j, k]));
                }
            }
        }
        out
    }

    pub fn validate(&self, domain: &Domain, purpose: GridPurpose) -> Result<()> {
        for a in 0..3 {
            let (lo, hi) = self.bounds[a];
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Grid(format!("axis {a}: invalid bounds ({lo}, {hi})")));
            }
            if self.counts[a] == 0 {
                return Err(Error::Grid(format!("axis {a}: zero points")));
            }
            if purpose == GridPurpose::Fitting && self.counts[a] < 3 {
                return Err(Error::Grid(format!(
                    "axis {a}: {} point(s), finite-difference stencils need at least 3",
                    self.counts[a]
                )));
            }
            if !domain.axes[a].covers(lo, hi) {
                return Err(Error::Grid(format!(
                    "axis {a}: box ({lo}, {hi}) extends outside the chart domain ({}, {})",
                    domain.axes[a].lo, domain.axes[a].hi
                )));
            }
        }
        Ok(())
    }
}

/// Validated row-major lattice points.
pub fn sample_grid(spec: &GridSpec, domain: &Domain, purpose: GridPurpose) -> Result<Vec<[f64; 3]>> {
    spec.validate(domain, purpose)?;
    let pts = spec.points();
    if let Some(p) = pts.iter().find(|p| !domain.contains(p)) {
        return Err(Error::OutsideDomain(*p));
    }
    Ok(pts)
}

/// Uniform random points in the open box, reproducible for a given seed.
pub fn random_points(bounds: &[(f64, f64); 3], n: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            std::array::from_fn(|a| {
                let (lo, hi) = bounds[a];
                let u: f64 = rng.random_range(0.0..1.0);
                // keep a margin so points never touch the box faces
                lo + (hi - lo) * (0.01 + 0.98 * u)
            })
        })
        .collect()
}
