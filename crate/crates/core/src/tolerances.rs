use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every numerical threshold used by the classifier, soliton checks and frame
/// diagnostics. Overridable by name from manifests and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Eigenvalues closer than this times `max(1, spectral radius)` are merged.
    pub multiplicity: f64,
    /// `‖R - (r/6)G‖ ≤ constant_curvature · max(1, ‖R‖)` puts a point outside U.
    pub constant_curvature: f64,
    /// `|L| ≤ semi_symmetric · max(1, spectral radius)` means semi-symmetric.
    pub semi_symmetric: f64,
    /// Allowed relative gap between the tensor and spectral estimates of L.
    pub cross_check: f64,
    /// `‖Q(g,R)‖ ≤ degenerate · max(1, ‖R‖)` leaves L undefined.
    pub degenerate: f64,
    /// Relative spread of L across a region still counted as constant type.
    pub constant_type: f64,
    /// Defining soliton equation residual.
    pub soliton: f64,
    /// Consequence identities of a soliton.
    pub identity: f64,
    /// Relative residual of a fitted potential.
    pub fit: f64,
    /// Frame relations computed by differencing.
    pub frame: f64,
    /// `|B_ijk + B_ikj|` for differenced connection coefficients.
    pub frame_antisymmetry: f64,
    /// Algebraic eigenframe relations.
    pub frame_algebraic: f64,
    /// Agreement with a catalog entry's closed-form curvature data.
    pub expected: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            multiplicity: 1e-6,
            constant_curvature: 1e-8,
            semi_symmetric: 1e-8,
            cross_check: 1e-6,
            degenerate: 1e-10,
            constant_type: 1e-6,
            soliton: 1e-9,
            identity: 1e-6,
            fit: 1e-3,
            frame: 1e-5,
            frame_antisymmetry: 1e-6,
            frame_algebraic: 1e-7,
            expected: 1e-7,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 13] = [
        "multiplicity",
        "constant_curvature",
        "semi_symmetric",
        "cross_check",
        "degenerate",
        "constant_type",
        "soliton",
        "identity",
        "fit",
        "frame",
        "frame_antisymmetry",
        "frame_algebraic",
        "expected",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "multiplicity" => &mut self.multiplicity,
            "constant_curvature" => &mut self.constant_curvature,
            "semi_symmetric" => &mut self.semi_symmetric,
            "cross_check" => &mut self.cross_check,
            "degenerate" => &mut self.degenerate,
            "constant_type" => &mut self.constant_type,
            "soliton" => &mut self.soliton,
            "identity" => &mut self.identity,
            "fit" => &mut self.fit,
            "frame" => &mut self.frame,
            "frame_antisymmetry" => &mut self.frame_antisymmetry,
            "frame_algebraic" => &mut self.frame_algebraic,
            "expected" => &mut self.expected,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidParameter {
                name: name.to_string(),
                value,
                reason: "tolerances must be positive and finite",
            });
        }
        let slot = self.slot(name).ok_or_else(|| {
            Error::Manifest(format!(
                "unknown tolerance `{name}` (known: {})",
                Self::NAMES.join(", ")
            ))
        })?;
        *slot = value;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let mut copy = *self;
        for name in Self::NAMES {
            let v = *copy.slot(name).unwrap();
            copy.set(name, v)?;
        }
        Ok(())
    }
}
