use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::tensor::CurvatureBundle;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumPattern {
    AllEqual,
    /// A double eigenvalue `mu` and a simple one at position `simple_index`
    /// of the ascending list.
    Pair {
        mu: f64,
        simple: f64,
        simple_index: usize,
    },
    AllDistinct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciSpectrum {
    /// Ascending principal Ricci curvatures.
    pub eigenvalues: [f64; 3],
    pub pattern: SpectrumPattern,
    /// Absolute merge threshold that was applied.
    pub threshold: f64,
    /// Both neighbouring gaps fell under the threshold without the whole
    /// spectrum being tight, so no eigenvalue is singled out.
    pub ambiguous: bool,
}

impl RicciSpectrum {
    pub fn from_eigenvalues(eigenvalues: [f64; 3], tol: f64) -> Self {
        let rho = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let threshold = tol * rho.max(1.0);
        let [a, b, c] = eigenvalues;
        let low = b - a <= threshold;
        let high = c - b <= threshold;
        let (pattern, ambiguous) = match (low, high) {
            (true, true) => (SpectrumPattern::AllEqual, c - a > threshold),
            (true, false) => (
                SpectrumPattern::Pair {
                    mu: 0.5 * (a + b),
                    simple: c,
                    simple_index: 2,
                },
                false,
            ),
            (false, true) => (
                SpectrumPattern::Pair {
                    mu: 0.5 * (b + c),
                    simple: a,
                    simple_index: 0,
                },
                false,
            ),
            (false, false) => (SpectrumPattern::AllDistinct, false),
        };
        RicciSpectrum {
            eigenvalues,
            pattern,
            threshold,
            ambiguous,
        }
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Half the simple eigenvalue of a pair pattern.
    pub fn l_spectral(&self) -> Option<f64> {
        match self.pattern {
            SpectrumPattern::Pair { simple, .. } => Some(0.5 * simple),
            _ => None,
        }
    }

    pub fn mu(&self) -> Option<f64> {
        match self.pattern {
            SpectrumPattern::Pair { mu, .. } => Some(mu),
            SpectrumPattern::AllEqual => Some(self.eigenvalues.iter().sum::<f64>() / 3.0),
            SpectrumPattern::AllDistinct => None,
        }
    }
}

/// Symmetric matrix of the Ricci operator in a g-orthonormal frame.
pub fn ricci_in_orthonormal_frame(b: &CurvatureBundle) -> crate::dsl::Mat3 {
    let e = linalg::orthonormal_frame(&b.g);
    let m = linalg::matmul(&linalg::matmul(&linalg::transpose(&e), &b.ricci), &e);
    std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (m[i][j] + m[j][i])))
}

/// Principal Ricci curvatures with multiplicities merged at `tol · max(1, ρ)`.
pub fn ricci_spectrum(b: &CurvatureBundle, tol: f64) -> RicciSpectrum {
    RicciSpectrum::from_eigenvalues(linalg::sym_eigenvalues(&ricci_in_orthonormal_frame(b)), tol)
}

/// `(μ_i - μ_j)(2(μ_i + μ_j) - r) = 0` for every pair, up to `tol · max(1, ρ²)`.
pub fn semi_symmetry_condition(spectrum: &RicciSpectrum, r: f64, tol: f64) -> bool {
    let mu = spectrum.eigenvalues;
    let scale = spectrum.spectral_radius().max(1.0).powi(2);
    (0..3).all(|i| ((i + 1)..3).all(|j| ((mu[i] - mu[j]) * (2.0 * (mu[i] + mu[j]) - r)).abs() <= tol * scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns() {
        let s = RicciSpectrum::from_eigenvalues([0.0, 1.0, 1.0], 1e-6);
        assert_eq!(
            s.pattern,
            SpectrumPattern::Pair {
                mu: 1.0,
                simple: 0.0,
                simple_index: 0
            }
        );
        assert_eq!(s.l_spectral(), Some(0.0));
        let n = RicciSpectrum::from_eigenvalues([-0.5, -0.5, 0.5], 1e-6);
        assert_eq!(n.l_spectral(), Some(0.25));
        assert_eq!(
            RicciSpectrum::from_eigenvalues([0.0; 3], 1e-6).pattern,
            SpectrumPattern::AllEqual
        );
        assert_eq!(
            RicciSpectrum::from_eigenvalues([-1.0, 0.0, 2.0], 1e-6).pattern,
            SpectrumPattern::AllDistinct
        );
    }

    #[test]
    fn near_triple_is_ambiguous() {
        let s = RicciSpectrum::from_eigenvalues([1.0, 1.0 + 8e-7, 1.0 + 1.6e-6], 1e-6);
        assert_eq!(s.pattern, SpectrumPattern::AllEqual);
        assert!(s.ambiguous);
        assert!(!RicciSpectrum::from_eigenvalues([2.0; 3], 1e-6).ambiguous);
    }

    #[test]
    fn semi_symmetry_arithmetic() {
        let t = 1e-10;
        assert!(semi_symmetry_condition(
            &RicciSpectrum::from_eigenvalues([0.0, 1.0, 1.0], t),
            2.0,
            t
        ));
        assert!(!semi_symmetry_condition(
            &RicciSpectrum::from_eigenvalues([-0.5, -0.5, 0.5], t),
            -0.5,
            t
        ));
        assert!(semi_symmetry_condition(
            &RicciSpectrum::from_eigenvalues([3.0; 3], t),
            9.0,
            t
        ));
        assert!(!semi_symmetry_condition(
            &RicciSpectrum::from_eigenvalues([-2.0, 0.0, 0.0], t),
            -2.0,
            t
        ));
    }
}
