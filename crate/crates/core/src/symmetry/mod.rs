//! Curvature acting as a derivation, the pseudo-symmetry function L and
//! point/region classification.

mod action;
mod classify;
mod spectrum;

pub use action::{curvature_action, q_tensor};
pub use classify::{
    classify_point, classify_region, estimate_l, LEstimate, PointClass, RegionClass, RegionVerdict, RunningStats,
    SymmetryVerdict, MIN_REGION_POINTS,
};
pub use spectrum::{
    ricci_in_orthonormal_frame, ricci_spectrum, semi_symmetry_condition, RicciSpectrum, SpectrumPattern,
};
