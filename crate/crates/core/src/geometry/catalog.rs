//! Built-in charts: the five local models, two Thurston-geometry negatives and a
//! steady-soliton product fixture.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dsl::{parse_with, Domain, Expr, Interval, MetricSpec, Params};
use crate::error::{Error, Result};
use crate::soliton::SolitonKind;
use crate::symmetry::RegionClass;

pub const CATALOG_NAMES: [&str; 8] = [
    "euclidean",
    "sphere3",
    "hyperbolic3",
    "r_x_s2",
    "r_x_h2",
    "nil3",
    "sol3",
    "r_x_cigar",
];

#[derive(Debug, Clone)]
pub struct KnownSoliton {
    pub kind: SolitonKind,
    pub potential: Expr,
    pub potential_source: String,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct ExpectedData {
    /// Ricci-operator eigenvalues in ascending order, possibly point-dependent.
    pub ricci_eigenvalues: [Expr; 3],
    /// Human-readable pattern, e.g. `(mu, mu, 0)`.
    pub pattern: &'static str,
    pub scalar: Expr,
    pub class: RegionClass,
    /// Pseudo-symmetry function where it is a known constant.
    pub l: Option<f64>,
    pub solitons: Vec<KnownSoliton>,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub spec: MetricSpec,
    /// Box used for random test points and default grids.
    pub default_box: [(f64, f64); 3],
    pub expected: ExpectedData,
}

impl CatalogEntry {
    pub fn expected_eigenvalues(&self, p: &[f64; 3]) -> Result<[f64; 3]> {
        let mut out = [0.0; 3];
        for (o, e) in out.iter_mut().zip(&self.expected.ricci_eigenvalues) {
            *o = e.eval(p, &self.spec.params)?;
        }
        Ok(out)
    }

    pub fn expected_scalar(&self, p: &[f64; 3]) -> Result<f64> {
        Ok(self.expected.scalar.eval(p, &self.spec.params)?)
    }
}

/// Serializable summary used by the `catalog` command.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogSummary {
    pub name: String,
    pub description: String,
    pub coords: [String; 3],
    pub components: Vec<String>,
    pub parameters: Params,
    pub ricci_pattern: String,
    pub ricci_eigenvalues: Vec<String>,
    pub scalar_curvature: String,
    pub expected_class: RegionClass,
    pub l: Option<f64>,
    pub solitons: Vec<String>,
}

impl From<&CatalogEntry> for CatalogSummary {
    fn from(e: &CatalogEntry) -> Self {
        CatalogSummary {
            name: e.name.to_string(),
            description: e.description.to_string(),
            coords: e.spec.coords.clone(),
            components: e
                .spec
                .components
                .iter()
                .map(|c| c.named(&e.spec.coords).to_string())
                .collect(),
            parameters: e.spec.params.clone(),
            ricci_pattern: e.expected.pattern.to_string(),
            ricci_eigenvalues: e
                .expected
                .ricci_eigenvalues
                .iter()
                .map(|c| c.named(&e.spec.coords).to_string())
                .collect(),
            scalar_curvature: e.expected.scalar.named(&e.spec.coords).to_string(),
            expected_class: e.expected.class,
            l: e.expected.l,
            solitons: e
                .expected
                .solitons
                .iter()
                .map(|s| format!("{}: f = {}, lambda = {}", s.kind, s.potential_source, s.lambda))
                .collect(),
        }
    }
}

struct Template {
    name: &'static str,
    description: &'static str,
    coords: [&'static str; 3],
    components: [&'static str; 6],
    domain: Domain,
    default_box: [(f64, f64); 3],
    kappa: bool,
    eigenvalues: [&'static str; 3],
    pattern: &'static str,
    scalar: &'static str,
    class: RegionClass,
    l: Option<f64>,
    solitons: &'static [(SolitonKind, &'static str, &'static str)],
}

fn half_space(axis: usize) -> Domain {
    let mut d = Domain::everywhere();
    d.axes[axis] = Interval::open(0.0, f64::INFINITY);
    d
}

fn template(name: &str) -> Option<Template> {
    use RegionClass::*;
    use SolitonKind::{Ricci, Yamabe};
    let cube = [(-1.0, 1.0); 3];
    let t = match name {
        "euclidean" => Template {
            name: "euclidean",
            description: "flat R^3",
            coords: ["x", "y", "z"],
            components: ["1", "0", "0", "1", "0", "1"],
            domain: Domain::everywhere(),
            default_box: cube,
            kappa: false,
            eigenvalues: ["0", "0", "0"],
            pattern: "(0, 0, 0)",
            scalar: "0",
            class: ConstantCurvature,
            l: None,
            solitons: &[
                (Ricci, "(x^2 + y^2 + z^2)/2", "1"),
                (Yamabe, "(x^2 + y^2 + z^2)/2", "1"),
            ],
        },
        "sphere3" => Template {
            name: "sphere3",
            description: "round S^3 of curvature kappa, stereographic chart",
            coords: ["x", "y", "z"],
            components: [
                "4/(1 + kappa*(x^2 + y^2 + z^2))^2",
                "0",
                "0",
                "4/(1 + kappa*(x^2 + y^2 + z^2))^2",
                "0",
                "4/(1 + kappa*(x^2 + y^2 + z^2))^2",
            ],
            domain: Domain::everywhere(),
            default_box: cube,
            kappa: true,
            eigenvalues: ["2*kappa", "2*kappa", "2*kappa"],
            pattern: "(mu, mu, mu)",
            scalar: "6*kappa",
            class: ConstantCurvature,
            l: None,
            solitons: &[(Ricci, "0", "2*kappa")],
        },
        "hyperbolic3" => Template {
            name: "hyperbolic3",
            description: "H^3 of curvature -kappa, upper half-space chart",
            coords: ["x", "y", "z"],
            components: ["1/(kappa*z^2)", "0", "0", "1/(kappa*z^2)", "0", "1/(kappa*z^2)"],
            domain: half_space(2),
            default_box: [(-1.0, 1.0), (-1.0, 1.0), (0.5, 2.0)],
            kappa: true,
            eigenvalues: ["-2*kappa", "-2*kappa", "-2*kappa"],
            pattern: "(mu, mu, mu)",
            scalar: "-6*kappa",
            class: ConstantCurvature,
            l: None,
            solitons: &[(Ricci, "0", "-2*kappa")],
        },
        "r_x_s2" => Template {
            name: "r_x_s2",
            description: "R x S^2, sphere factor of curvature kappa, polar chart",
            coords: ["t", "theta", "phi"],
            components: ["1", "0", "0", "1/kappa", "0", "sin(theta)^2/kappa"],
            domain: Domain {
                axes: [
                    Interval::real_line(),
                    Interval::open(0.2, PI - 0.2),
                    Interval::real_line(),
                ],
            },
            default_box: [(-1.0, 1.0), (0.4, PI - 0.4), (0.0, 3.0)],
            kappa: true,
            eigenvalues: ["0", "kappa", "kappa"],
            pattern: "(mu, mu, 0)",
            scalar: "2*kappa",
            class: SemiSymmetric,
            l: Some(0.0),
            solitons: &[(Ricci, "kappa*t^2/2", "kappa"), (Yamabe, "t", "2*kappa")],
        },
        "r_x_h2" => Template {
            name: "r_x_h2",
            description: "R x H^2, hyperbolic factor of curvature -kappa, half-plane chart",
            coords: ["t", "x", "y"],
            components: ["1", "0", "0", "1/(kappa*y^2)", "0", "1/(kappa*y^2)"],
            domain: half_space(2),
            default_box: [(-1.0, 1.0), (-1.0, 1.0), (0.5, 2.0)],
            kappa: true,
            eigenvalues: ["-kappa", "-kappa", "0"],
            pattern: "(mu, mu, 0)",
            scalar: "-2*kappa",
            class: SemiSymmetric,
            l: Some(0.0),
            solitons: &[(Ricci, "-kappa*t^2/2", "-kappa"), (Yamabe, "t", "-2*kappa")],
        },
        "nil3" => Template {
            name: "nil3",
            description: "Heisenberg group Nil, left-invariant metric dx^2 + dy^2 + (dz - x dy)^2",
            coords: ["x", "y", "z"],
            components: ["1", "0", "0", "1 + x^2", "-x", "1"],
            domain: Domain::everywhere(),
            default_box: cube,
            kappa: false,
            eigenvalues: ["-1/2", "-1/2", "1/2"],
            pattern: "(mu, mu, 2L), mu = -1/2, L = 1/4",
            scalar: "-1/2",
            class: PseudoSymmetricConstantType,
            l: Some(0.25),
            solitons: &[],
        },
        "sol3" => Template {
            name: "sol3",
            description: "Sol, left-invariant metric e^(2z) dx^2 + e^(-2z) dy^2 + dz^2",
            coords: ["x", "y", "z"],
            components: ["exp(2*z)", "0", "0", "exp(-2*z)", "0", "1"],
            domain: Domain::everywhere(),
            default_box: cube,
            kappa: false,
            eigenvalues: ["-2", "0", "0"],
            pattern: "(mu, mu, 2L), mu = 0, L = -1",
            scalar: "-2",
            class: PseudoSymmetricConstantType,
            l: Some(-1.0),
            solitons: &[],
        },
        "r_x_cigar" => Template {
            name: "r_x_cigar",
            description: "R x cigar, (dx^2 + dy^2)/(1 + x^2 + y^2) on the second factor",
            coords: ["t", "x", "y"],
            components: ["1", "0", "0", "1/(1 + x^2 + y^2)", "0", "1/(1 + x^2 + y^2)"],
            domain: Domain::everywhere(),
            default_box: cube,
            kappa: false,
            eigenvalues: ["0", "2/(1 + x^2 + y^2)", "2/(1 + x^2 + y^2)"],
            pattern: "(mu, mu, 0), mu non-constant",
            scalar: "4/(1 + x^2 + y^2)",
            class: SemiSymmetric,
            l: Some(0.0),
            solitons: &[(Ricci, "-log(1 + x^2 + y^2)", "0")],
        },
        _ => return None,
    };
    Some(t)
}

/// Look up a catalog chart. `kappa` (default 1, must be positive) scales the
/// curvature of the space forms and the curved factor of the products.
pub fn catalog_lookup(name: &str, params: &Params) -> Result<CatalogEntry> {
    let t = template(name).ok_or_else(|| Error::UnknownCatalog(name.to_string()))?;
    let mut resolved = Params::new();
    for (k, &v) in params {
        if !(t.kappa && k == "kappa") {
            return Err(Error::InvalidParameter {
                name: k.clone(),
                value: v,
                reason: "not a parameter of this catalog entry",
            });
        }
    }
    if t.kappa {
        let kappa = params.get("kappa").copied().unwrap_or(1.0);
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "kappa".into(),
                value: kappa,
                reason: "curvature scale must be positive",
            });
        }
        resolved.insert("kappa".into(), kappa);
    }
    let spec = MetricSpec::parse(t.name, t.coords, t.components, t.domain, resolved.clone())?;
    let symbols = spec.symbols();
    let parse = |s: &str| parse_with(s, &symbols);
    let ricci_eigenvalues = [
        parse(t.eigenvalues[0])?,
        parse(t.eigenvalues[1])?,
        parse(t.eigenvalues[2])?,
    ];
    let mut solitons = Vec::new();
    for &(kind, f, lambda) in t.solitons {
        let lambda = parse(lambda)?.eval(&[0.0; 3], &resolved)?;
        solitons.push(KnownSoliton {
            kind,
            potential: parse(f)?,
            potential_source: f.to_string(),
            lambda,
        });
    }
    Ok(CatalogEntry {
        name: t.name,
        description: t.description,
        default_box: t.default_box,
        expected: ExpectedData {
            ricci_eigenvalues,
            pattern: t.pattern,
            scalar: parse(t.scalar)?,
            class: t.class,
            l: t.l,
            solitons,
        },
        spec,
    })
}

/// Every entry with default parameters.
pub fn catalog() -> Vec<CatalogEntry> {
    CATALOG_NAMES
        .iter()
        .map(|n| catalog_lookup(n, &Params::new()).expect("built-in catalog entry"))
        .collect()
}
