use serde::{Deserialize, Serialize};

use super::action::{curvature_action, q_tensor};
use super::spectrum::{ricci_spectrum, semi_symmetry_condition, RicciSpectrum, SpectrumPattern};
use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::{g_tensor, CurvatureBundle, DenseTensor};
use crate::tolerances::Tolerances;

/// Least-squares fit of `R·R = L Q(g,R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LEstimate {
    pub l: Option<f64>,
    /// `‖R·R - L Q‖ / max(‖R·R‖, floor)`, with `L = 0` when degenerate.
    pub residual: f64,
    pub degenerate: bool,
    pub q_norm: f64,
    pub rr_norm: f64,
}

/// Project `rr` onto `q`. `q` counts as zero when `‖q‖ ≤ degenerate_tol`.
pub fn estimate_l(rr: &DenseTensor, q: &DenseTensor, degenerate_tol: f64) -> LEstimate {
    let q_norm = q.norm();
    let rr_norm = rr.norm();
    let floor = 1e-12 * q_norm.max(1.0).powi(2);
    let degenerate = q_norm <= degenerate_tol;
    let l = if degenerate {
        None
    } else {
        Some(rr.dot(q) / (q_norm * q_norm))
    };
    let diff = rr.axpy(-l.unwrap_or(0.0), q).norm();
    LEstimate {
        l,
        residual: diff / rr_norm.max(floor),
        degenerate,
        q_norm,
        rr_norm,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PointClass {
    ConstantCurvature,
    SemiSymmetric,
    PseudoSymmetric,
    NotPseudoSymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionClass {
    ConstantCurvature,
    SemiSymmetric,
    PseudoSymmetricConstantType,
    PseudoSymmetricVariable,
    NotPseudoSymmetric,
    Mixed,
}

impl std::fmt::Display for PointClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

impl std::fmt::Display for RegionClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryVerdict {
    pub point: [f64; 3],
    pub class: PointClass,
    /// Projection estimate of L (absent outside U or when Q(g,R) vanishes).
    pub l_tensor: Option<f64>,
    /// Half the simple Ricci eigenvalue (pair patterns only).
    pub l_spectral: Option<f64>,
    pub dependence_residual: f64,
    pub in_set_u: bool,
    /// `‖R - (r/6)G‖` in an orthonormal frame.
    pub constant_curvature_deviation: f64,
    pub spectrum: RicciSpectrum,
    pub scalar: f64,
    pub semi_symmetry_condition: bool,
    /// `|L_tensor - L_spectral|` when both exist.
    pub l_discrepancy: Option<f64>,
    pub cross_check_passed: bool,
}

impl SymmetryVerdict {
    /// L reported for the point: spectral for pair patterns, otherwise the projection.
    pub fn l(&self) -> Option<f64> {
        match self.class {
            PointClass::ConstantCurvature => None,
            PointClass::SemiSymmetric | PointClass::PseudoSymmetric => self.l_spectral.or(self.l_tensor),
            PointClass::NotPseudoSymmetric => self.l_tensor,
        }
    }
}

pub fn classify_point(b: &CurvatureBundle, tol: &Tolerances) -> SymmetryVerdict {
    let fb = b.in_frame(&linalg::orthonormal_frame(&b.g));
    let r = DenseTensor::from(&fb.riemann04);
    let r_norm = r.norm();
    let scale = r_norm.max(1.0);
    let g = DenseTensor::from(&g_tensor(&linalg::IDENTITY));
    let deviation = r.axpy(-fb.scalar / 6.0, &g).norm();
    let in_set_u = deviation > tol.constant_curvature * scale;
    let spectrum = ricci_spectrum(b, tol.multiplicity);
    let semi = semi_symmetry_condition(&spectrum, b.scalar, tol.multiplicity);

    let mut verdict = SymmetryVerdict {
        point: b.point,
        class: PointClass::ConstantCurvature,
        l_tensor: None,
        l_spectral: None,
        dependence_residual: 0.0,
        in_set_u,
        constant_curvature_deviation: deviation,
        spectrum,
        scalar: b.scalar,
        semi_symmetry_condition: semi,
        l_discrepancy: None,
        cross_check_passed: true,
    };
    if !in_set_u {
        return verdict;
    }

    // R(X,Y) and X∧Y act on frame components; both tensors are exact there.
    let rr = curvature_action(&r, &fb).expect("rank 4");
    let q = q_tensor(&r, &linalg::IDENTITY).expect("rank 4");
    let est = estimate_l(&rr, &q, tol.degenerate * scale);
    verdict.l_tensor = est.l;
    verdict.dependence_residual = est.residual;

    match spectrum.pattern {
        // Einstein in dimension 3 is constant curvature; reaching this arm
        // means the spectrum is only tight to within the merge threshold.
        SpectrumPattern::AllEqual => {
            verdict.l_tensor = None;
        }
        SpectrumPattern::AllDistinct => {
            verdict.class = PointClass::NotPseudoSymmetric;
        }
        SpectrumPattern::Pair { .. } => {
            let ls = spectrum.l_spectral().unwrap();
            verdict.l_spectral = Some(ls);
            if let Some(lt) = est.l {
                let gap = (lt - ls).abs();
                verdict.l_discrepancy = Some(gap);
                verdict.cross_check_passed = gap <= tol.cross_check * ls.abs().max(1.0);
            }
            verdict.class = if ls.abs() <= tol.semi_symmetric * spectrum.spectral_radius().max(1.0) {
                PointClass::SemiSymmetric
            } else {
                PointClass::PseudoSymmetric
            };
        }
    }
    verdict
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunningStats {
    pub count: usize,
    pub mean: f64,
    m2: f64,
    pub min: f64,
    pub max: f64,
}

impl RunningStats {
    pub fn push(mut self, x: f64) -> Self {
        if self.count == 0 {
            self.min = x;
            self.max = x;
        } else {
            self.min = self.min.min(x);
            self.max = self.max.max(x);
        }
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self
    }

    /// Population standard deviation.
    pub fn stdev(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.m2 / self.count as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionVerdict {
    pub class: RegionClass,
    pub points: usize,
    pub class_counts: Vec<(PointClass, usize)>,
    pub mean_l: Option<f64>,
    pub stdev_l: Option<f64>,
    pub min_l: Option<f64>,
    pub max_l: Option<f64>,
    pub min_residual: f64,
    pub max_residual: f64,
    /// Range of the double eigenvalue over pair-pattern points.
    pub mu_range: Option<(f64, f64)>,
    pub ambiguous_points: usize,
    pub cross_check_failures: usize,
}

pub const MIN_REGION_POINTS: usize = 8;

/// Aggregate point verdicts, folding in the given order.
pub fn classify_region(verdicts: &[SymmetryVerdict], tol: &Tolerances) -> Result<RegionVerdict> {
    if verdicts.len() < MIN_REGION_POINTS {
        return Err(Error::Grid(format!(
            "region classification needs at least {MIN_REGION_POINTS} points, got {}",
            verdicts.len()
        )));
    }
    let mut counts = std::collections::BTreeMap::new();
    let mut l_stats = RunningStats::default();
    let mut mu_stats = RunningStats::default();
    let mut min_residual = f64::INFINITY;
    let mut max_residual: f64 = 0.0;
    let mut ambiguous = 0;
    let mut failures = 0;
    for v in verdicts {
        *counts.entry(v.class).or_insert(0usize) += 1;
        if let Some(l) = v.l() {
            l_stats = l_stats.push(l);
        }
        if let (SpectrumPattern::Pair { mu, .. }, true) = (v.spectrum.pattern, v.in_set_u) {
            mu_stats = mu_stats.push(mu);
        }
        min_residual = min_residual.min(v.dependence_residual);
        max_residual = max_residual.max(v.dependence_residual);
        ambiguous += v.spectrum.ambiguous as usize;
        failures += (!v.cross_check_passed) as usize;
    }
    let n = verdicts.len();
    let only = |c: PointClass| counts.get(&c) == Some(&n);
    let pseudo_family = counts
        .keys()
        .all(|c| matches!(c, PointClass::SemiSymmetric | PointClass::PseudoSymmetric));
    let class = if only(PointClass::ConstantCurvature) {
        RegionClass::ConstantCurvature
    } else if only(PointClass::SemiSymmetric) {
        RegionClass::SemiSymmetric
    } else if pseudo_family {
        if l_stats.stdev() / l_stats.mean.abs().max(1.0) <= tol.constant_type {
            RegionClass::PseudoSymmetricConstantType
        } else {
            RegionClass::PseudoSymmetricVariable
        }
    } else if only(PointClass::NotPseudoSymmetric) {
        RegionClass::NotPseudoSymmetric
    } else {
        RegionClass::Mixed
    };
    let has_l = l_stats.count > 0;
    Ok(RegionVerdict {
        class,
        points: n,
        class_counts: counts.into_iter().collect(),
        mean_l: has_l.then_some(l_stats.mean),
        stdev_l: has_l.then(|| l_stats.stdev()),
        min_l: has_l.then_some(l_stats.min),
        max_l: has_l.then_some(l_stats.max),
        min_residual,
        max_residual,
        mu_range: (mu_stats.count > 0).then_some((mu_stats.min, mu_stats.max)),
        ambiguous_points: ambiguous,
        cross_check_failures: failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{metric_jet, Params};
    use crate::geometry::{catalog_lookup, GridSpec};
    use crate::tensor::curvature;

    fn verdict(name: &str, p: [f64; 3]) -> SymmetryVerdict {
        let e = catalog_lookup(name, &Params::new()).unwrap();
        classify_point(
            &curvature(&metric_jet(&e.spec, p, 2).unwrap()).unwrap(),
            &Tolerances::default(),
        )
    }

    fn region(name: &str) -> RegionVerdict {
        let e = catalog_lookup(name, &Params::new()).unwrap();
        let grid = GridSpec {
            bounds: e.default_box,
            counts: [5; 3],
        };
        let v: Vec<_> = grid
            .points()
            .into_iter()
            .map(|p| {
                classify_point(
                    &curvature(&metric_jet(&e.spec, p, 2).unwrap()).unwrap(),
                    &Tolerances::default(),
                )
            })
            .collect();
        classify_region(&v, &Tolerances::default()).unwrap()
    }

    #[test]
    fn estimate_l_projection() {
        let mut q = DenseTensor::zeros(2);
        q.set(&[0, 1], 2.0);
        let rr = q.axpy(-0.75, &q);
        let e = estimate_l(&rr, &q, 1e-10);
        assert!((e.l.unwrap() - 0.25).abs() < 1e-15);
        assert!(e.residual < 1e-15);
        let e = estimate_l(&DenseTensor::zeros(2), &DenseTensor::zeros(2), 1e-10);
        assert!(e.degenerate && e.l.is_none());
    }

    #[test]
    fn point_verdicts() {
        assert_eq!(
            verdict("hyperbolic3", [0.1, 0.2, 1.0]).class,
            PointClass::ConstantCurvature
        );
        assert!(!verdict("sphere3", [0.1, 0.2, 0.3]).in_set_u);
        let h = verdict("r_x_h2", [0.0, 0.3, 1.2]);
        assert_eq!(h.class, PointClass::SemiSymmetric);
        assert_eq!(h.l_spectral, Some(0.0));
        let n = verdict("nil3", [0.0; 3]);
        assert_eq!(n.class, PointClass::PseudoSymmetric);
        assert!((n.l_tensor.unwrap() - 0.25).abs() < 1e-6);
        assert!(n.dependence_residual < 1e-8);
        let s = verdict("sol3", [0.0; 3]);
        assert!((s.l_tensor.unwrap() + 1.0).abs() < 1e-6);
        assert!(s.cross_check_passed);
    }

    #[test]
    fn region_verdicts() {
        let s = region("sol3");
        assert_eq!(s.class, RegionClass::PseudoSymmetricConstantType);
        assert!((s.mean_l.unwrap() + 1.0).abs() < 1e-9);
        let n = region("nil3");
        assert_eq!(n.class, RegionClass::PseudoSymmetricConstantType);
        assert!((n.mean_l.unwrap() - 0.25).abs() < 1e-9);
        let c = region("r_x_cigar");
        assert_eq!(c.class, RegionClass::SemiSymmetric);
        let (lo, hi) = c.mu_range.unwrap();
        assert!(hi - lo > 0.1);
        assert_eq!(region("sphere3").class, RegionClass::ConstantCurvature);
    }

    #[test]
    fn too_few_points() {
        let v = verdict("nil3", [0.0; 3]);
        assert!(classify_region(&[v; 7], &Tolerances::default()).is_err());
        assert!(classify_region(&[v; 8], &Tolerances::default()).is_ok());
    }

    #[test]
    fn mixed_classes_are_reported() {
        let mut v = vec![verdict("nil3", [0.0; 3]); 8];
        v.push(verdict("euclidean", [0.0; 3]));
        assert_eq!(
            classify_region(&v, &Tolerances::default()).unwrap().class,
            RegionClass::Mixed
        );
    }

    #[test]
    fn welford_matches_two_pass() {
        let xs = [0.3, -1.2, 4.5, 0.0, 2.2, 2.2];
        let s = xs.iter().fold(RunningStats::default(), |s, &x| s.push(x));
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 6.0;
        assert!((s.mean - mean).abs() < 1e-14);
        assert!((s.stdev() - var.sqrt()).abs() < 1e-14);
        assert_eq!((s.min, s.max), (-1.2, 4.5));
    }
}
