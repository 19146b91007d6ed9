//! Curvature of Riemannian 3-manifold charts given by symbolic metric
//! components: exact jets, pseudo-symmetry classification, gradient Ricci and
//! Yamabe soliton checks and fitting, and Ricci eigenframe diagnostics.

#![allow(clippy::needless_range_loop)]

pub mod dsl;
pub mod error;
pub mod frame;
pub mod geometry;
pub mod linalg;
pub mod manifest;
pub mod parallel;
pub mod report;
pub mod run;
pub mod soliton;
pub mod symmetry;
pub(crate) mod taylor;
pub mod tensor;
pub mod tolerances;

pub use error::{Error, Result};
pub use manifest::Manifest;
pub use report::Report;
pub use run::{exit_code, run, run_manifest, RunOptions};
pub use tolerances::Tolerances;
