//! Gradient Ricci and Yamabe solitons: residuals of the defining equations,
//! their consequence identities, and lattice fitting of the potential.
//!
//! Labels follow the sign of λ for both kinds: positive is expanding, zero
//! steady, negative shrinking. For Ricci solitons this is the reverse of the
//! more common convention.

mod fit;
mod kind;
mod verify;

pub use fit::{fit_potential, observed_order, FitResult, DEGENERACY_THRESHOLD};
pub use kind::{soliton_type, SolitonKind, SolitonType};
pub use verify::{
    ricci_identity_suite, ricci_norm_squared, ricci_residual, verify_soliton, yamabe_identity_suite, yamabe_residual,
    FormAgreement, IdentityResidual, PointSolitonRecord, ResidualSummary, SolitonCandidate, SolitonReport, YamabeForms,
    RICCI_IDENTITIES, YAMABE_IDENTITIES,
};
