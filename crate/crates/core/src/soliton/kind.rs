use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolitonKind {
    /// `Hess f + Ric = λ g`
    Ricci,
    /// `Hess f = (λ - r) g`
    Yamabe,
}

impl std::fmt::Display for SolitonKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolitonKind::Ricci => "ricci",
            SolitonKind::Yamabe => "yamabe",
        })
    }
}

impl std::str::FromStr for SolitonKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ricci" => Ok(SolitonKind::Ricci),
            "yamabe" => Ok(SolitonKind::Yamabe),
            _ => Err(format!("unknown soliton kind `{s}` (expected ricci or yamabe)")),
        }
    }
}

/// Label by the sign of λ: positive expanding, zero steady, negative shrinking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolitonType {
    Expanding,
    Steady,
    Shrinking,
}

pub fn soliton_type(lambda: f64, tol: f64) -> SolitonType {
    if lambda.abs() <= tol {
        SolitonType::Steady
    } else if lambda > 0.0 {
        SolitonType::Expanding
    } else {
        SolitonType::Shrinking
    }
}
