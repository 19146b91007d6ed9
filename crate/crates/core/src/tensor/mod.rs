//! Curvature objects and differential operators at a point.

mod dense;
mod engine;
mod ops;

pub use dense::DenseTensor;
pub use engine::{christoffel, curvature, CurvatureBundle, MAX_CONDITION};
pub use ops::{
    covariant_derivative_riemann, first_bianchi_residual, g_tensor, gradient, hessian, laplacian, norm4, norm5,
    norm_covector, norm_lower3, operator_norm_g, reconstruct_curvature_3d, second_bianchi_residual, sub4, trace_g,
    wedge, ScalarFieldJet,
};
