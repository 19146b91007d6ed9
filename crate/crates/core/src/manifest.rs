//! Run manifests (TOML).
//!
//! ```toml
//! task = "classify"            # classify | verify-soliton | fit-soliton | diagnostics
//! seed = 0                     # optional, used with grid.random
//! execution = "parallel"       # optional, or "sequential"
//!
//! [metric]
//! catalog = "nil3"             # a built-in chart ...
//! params = { kappa = 1.0 }
//! # ... or inline components:
//! # name = "warped"
//! # coords = ["t", "x", "y"]
//! # components = { g00 = "1", g11 = "(1 + t^2)^2", g22 = "(1 + t^2)^2" }
//! # domain = [[-inf, inf], [-inf, inf], [0.0, inf]]   # open intervals
//!
//! [grid]
//! bounds = [[-1, 1], [-1, 1], [-1, 1]]   # defaults to the catalog box
//! counts = 5                              # or [nx, ny, nz]
//! # random = 50                           # random points instead of a lattice
//!
//! [tolerances]                            # any subset of the named tolerances
//! fit = 1e-3
//!
//! [soliton]                               # verify-soliton / fit-soliton
//! kind = "ricci"                          # or "yamabe"
//! potential = "t^2/2"                     # or "fit"
//! lambda = 1.0                            # or "fit"
//!
//! [output]
//! path = "report.json"                    # stdout when absent
//! format = "json"                         # or "text"
//! csv = "points.csv"                      # optional per-point table
//! ```
//!
//! Missing components default to `"0"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dsl::{component_index, Domain, Interval, MetricSpec, Params};
use crate::error::{Error, Result};
use crate::geometry::{catalog_lookup, CatalogEntry, GridSpec};
use crate::parallel::Execution;
use crate::soliton::SolitonKind;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Classify,
    VerifySoliton,
    FitSoliton,
    Diagnostics,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Task::Classify => "classify",
            Task::VerifySoliton => "verify-soliton",
            Task::FitSoliton => "fit-soliton",
            Task::Diagnostics => "diagnostics",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<[String; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<[[f64; 2]; 3]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: Params,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Counts {
    Uniform(usize),
    PerAxis([usize; 3]),
}

impl Counts {
    pub fn per_axis(self) -> [usize; 3] {
        match self {
            Counts::Uniform(n) => [n; 3],
            Counts::PerAxis(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<[[f64; 2]; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<Counts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueOrFit {
    Value(f64),
    Keyword(String),
}

impl ValueOrFit {
    fn is_fit(&self) -> bool {
        matches!(self, ValueOrFit::Keyword(k) if k == "fit")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonSection {
    pub kind: SolitonKind,
    #[serde(default = "fit_keyword")]
    pub potential: String,
    #[serde(default = "fit_value")]
    pub lambda: ValueOrFit,
}

fn fit_keyword() -> String {
    "fit".into()
}

fn fit_value() -> ValueOrFit {
    ValueOrFit::Keyword("fit".into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format `{s}` (expected json or text)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub execution: Execution,
    pub metric: MetricSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soliton: Option<SolitonSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// The metric a manifest resolves to, with catalog data when it came from the catalog.
#[derive(Debug, Clone)]
pub struct ResolvedMetric {
    pub spec: MetricSpec,
    pub catalog: Option<CatalogEntry>,
}

/// What the soliton block asks for once validated against the task.
#[derive(Debug, Clone, PartialEq)]
pub enum SolitonRequest {
    Verify {
        kind: SolitonKind,
        potential: String,
        lambda: f64,
    },
    Fit {
        kind: SolitonKind,
    },
}

const DEFAULT_COUNT: usize = 5;

impl Manifest {
    pub fn from_toml(src: &str) -> Result<Self> {
        let m: Manifest = toml::from_str(src).map_err(|e| Error::Manifest(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| Error::Manifest(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&src)
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerances()?;
        self.resolve_metric()?;
        self.soliton_request()?;
        if let Some(Counts::Uniform(0)) = self.grid.counts {
            return Err(Error::Grid("grid counts must be positive".into()));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for (k, v) in &self.tolerances {
            t.set(k, *v)?;
        }
        Ok(t)
    }

    pub fn resolve_metric(&self) -> Result<ResolvedMetric> {
        let m = &self.metric;
        match (&m.catalog, &m.components) {
            (Some(_), Some(_)) => Err(Error::Manifest(
                "metric: give either `catalog` or `components`, not both".into(),
            )),
            (None, None) => Err(Error::Manifest("metric: `catalog` or `components` is required".into())),
            (Some(name), None) => {
                if m.coords.is_some() || m.domain.is_some() {
                    return Err(Error::Manifest(
                        "metric: `coords` and `domain` apply only to inline components".into(),
                    ));
                }
                let entry = catalog_lookup(name, &m.params)?;
                Ok(ResolvedMetric {
                    spec: entry.spec.clone(),
                    catalog: Some(entry),
                })
            }
            (None, Some(components)) => {
                let mut sources: [String; 6] = std::array::from_fn(|_| "0".to_string());
                for (key, src) in components {
                    let idx = parse_component_key(key)?;
                    sources[idx] = src.clone();
                }
                let coords = m
                    .coords
                    .clone()
                    .unwrap_or_else(|| ["x".to_string(), "y".to_string(), "z".to_string()]);
                let domain = match m.domain {
                    None => Domain::everywhere(),
                    Some(d) => Domain {
                        axes: d.map(|[lo, hi]| Interval::open(lo, hi)),
                    },
                };
                let name = m.name.clone().unwrap_or_else(|| "inline".to_string());
                let coord_refs: [&str; 3] = std::array::from_fn(|i| coords[i].as_str());
                let src_refs: [&str; 6] = std::array::from_fn(|i| sources[i].as_str());
                let spec = MetricSpec::parse(&name, coord_refs, src_refs, domain, m.params.clone())?;
                Ok(ResolvedMetric { spec, catalog: None })
            }
        }
    }

    pub fn soliton_request(&self) -> Result<Option<SolitonRequest>> {
        let needs = matches!(self.task, Task::VerifySoliton | Task::FitSoliton);
        let s = match (&self.soliton, needs) {
            (None, true) => {
                return Err(Error::Manifest(format!("task {} needs a [soliton] section", self.task)));
            }
            (_, false) => return Ok(None),
            (Some(s), true) => s,
        };
        let fit_f = s.potential == "fit";
        let fit_l = s.lambda.is_fit();
        match (self.task, fit_f, fit_l, &s.lambda) {
            (Task::VerifySoliton, false, false, ValueOrFit::Value(l)) => Ok(Some(SolitonRequest::Verify {
                kind: s.kind,
                potential: s.potential.clone(),
                lambda: *l,
            })),
            (Task::VerifySoliton, ..) => Err(Error::Manifest(
                "verify-soliton needs a potential expression and a numeric lambda (use fit-soliton to fit them)".into(),
            )),
            (_, true, true, _) => Ok(Some(SolitonRequest::Fit { kind: s.kind })),
            _ => Err(Error::Manifest(
                "fit-soliton fits the potential and lambda together; set both to \"fit\"".into(),
            )),
        }
    }

    /// Lattice for the run: explicit bounds, else the catalog box.
    pub fn grid_spec(&self, metric: &ResolvedMetric) -> Result<GridSpec> {
        let bounds = match (self.grid.bounds, &metric.catalog) {
            (Some(b), _) => b.map(|[lo, hi]| (lo, hi)),
            (None, Some(entry)) => entry.default_box,
            (None, None) => {
                return Err(Error::Manifest("grid: `bounds` is required for inline metrics".into()));
            }
        };
        let counts = self.grid.counts.map_or([DEFAULT_COUNT; 3], Counts::per_axis);
        Ok(GridSpec { bounds, counts })
    }
}

fn parse_component_key(key: &str) -> Result<usize> {
    let digits: Vec<usize> = key
        .strip_prefix('g')
        .map(|d| d.chars().filter_map(|c| c.to_digit(10).map(|v| v as usize)).collect())
        .unwrap_or_default();
    match digits.as_slice() {
        [i, j] if key.len() == 3 && *i < 3 && *j < 3 => Ok(component_index(*i, *j)),
        _ => Err(Error::Manifest(format!(
            "metric: unknown component `{key}` (expected g00, g01, g02, g11, g12 or g22)"
        ))),
    }
}

/// Parse a grid argument: `"(-1,1)^3:5"`, `"(-1,1)x(0.5,2)x(0,1):5x5x9"`, or just
/// counts (`"7"`, `"5x5x9"`) to keep the default box.
pub fn parse_grid_arg(s: &str) -> Result<GridSection> {
    let bad = |why: &str| Error::Grid(format!("cannot parse grid `{s}`: {why}"));
    let (box_part, count_part) = match s.rsplit_once(':') {
        Some((b, c)) => (Some(b.trim()), c.trim()),
        None => (None, s.trim()),
    };
    let counts: Vec<usize> = count_part
        .split('x')
        .map(|c| {
            c.trim()
                .parse::<usize>()
                .map_err(|_| bad("counts must be positive integers"))
        })
        .collect::<Result<_>>()?;
    let counts = match counts.as_slice() {
        [n] => Counts::Uniform(*n),
        [a, b, c] => Counts::PerAxis([*a, *b, *c]),
        _ => return Err(bad("give one count or three separated by `x`")),
    };
    let bounds = match box_part {
        None => None,
        Some(b) => {
            let parse_interval = |t: &str| -> Result<[f64; 2]> {
                let inner = t
                    .trim()
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(|| bad("intervals look like (lo,hi)"))?;
                let (lo, hi) = inner
                    .split_once(',')
                    .ok_or_else(|| bad("intervals look like (lo,hi)"))?;
                let lo = lo
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad("interval bounds must be numbers"))?;
                let hi = hi
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad("interval bounds must be numbers"))?;
                Ok([lo, hi])
            };
            if let Some(one) = b.strip_suffix("^3") {
                Some([parse_interval(one)?; 3])
            } else {
                let parts: Vec<&str> = b.split(")x(").collect();
                if parts.len() != 3 {
                    return Err(bad("give (lo,hi)^3 or three intervals joined by `x`"));
                }
                let fix = |i: usize| {
                    let mut t = parts[i].to_string();
                    if i > 0 {
                        t.insert(0, '(');
                    }
                    if i < 2 {
                        t.push(')');
                    }
                    t
                };
                Some([
                    parse_interval(&fix(0))?,
                    parse_interval(&fix(1))?,
                    parse_interval(&fix(2))?,
                ])
            }
        }
    };
    if counts.per_axis().contains(&0) {
        return Err(bad("counts must be positive"));
    }
    Ok(GridSection {
        bounds,
        counts: Some(counts),
        random: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_manifest() {
        let m = Manifest::from_toml(
            r#"
            task = "classify"
            [metric]
            catalog = "sol3"
            [grid]
            counts = 5
            "#,
        )
        .unwrap();
        let r = m.resolve_metric().unwrap();
        let g = m.grid_spec(&r).unwrap();
        assert_eq!(g.counts, [5; 3]);
        assert_eq!(g.bounds, r.catalog.unwrap().default_box);
    }

    #[test]
    fn inline_manifest() {
        let m = Manifest::from_toml(
            r#"
            task = "verify-soliton"
            [metric]
            coords = ["t", "x", "y"]
            components = { g00 = "1", g11 = "1/(1 + x^2 + y^2)", g22 = "1/(1 + x^2 + y^2)" }
            [grid]
            bounds = [[-1, 1], [-1, 1], [-1, 1]]
            counts = [3, 4, 5]
            [soliton]
            kind = "ricci"
            potential = "-log(1 + x^2 + y^2)"
            lambda = 0.0
            "#,
        )
        .unwrap();
        let r = m.resolve_metric().unwrap();
        assert!(r.catalog.is_none());
        assert_eq!(r.spec.components[1].to_string(), "0.0");
        assert_eq!(m.grid_spec(&r).unwrap().counts, [3, 4, 5]);
        assert!(matches!(
            m.soliton_request().unwrap(),
            Some(SolitonRequest::Verify { .. })
        ));
    }

    #[test]
    fn schema_errors() {
        let bad = [
            "task = \"classify\"\n[metric]\ncatalog = \"nil3\"\nbogus = 1\n",
            "task = \"explode\"\n[metric]\ncatalog = \"nil3\"\n",
            "task = \"classify\"\n[metric]\ncatalog = \"nil4\"\n",
            "task = \"verify-soliton\"\n[metric]\ncatalog = \"nil3\"\n",
            "task = \"verify-soliton\"\n[metric]\ncatalog = \"nil3\"\n[soliton]\nkind = \"ricci\"\n",
            "task = \"fit-soliton\"\n[metric]\ncatalog = \"nil3\"\n[soliton]\nkind = \"ricci\"\nlambda = 1.0\n",
            "task = \"classify\"\n[metric]\ncatalog = \"nil3\"\n[tolerances]\nfit = -1.0\n",
            "task = \"classify\"\n[metric]\ncomponents = { g33 = \"1\" }\n",
            "task = \"classify\"\n[metric]\ncomponents = { g00 = \"1 +\" }\n",
        ];
        for src in bad {
            assert!(Manifest::from_toml(src).is_err(), "{src}");
        }
    }

    #[test]
    fn grid_arguments() {
        let g = parse_grid_arg("(-1,1)^3:5").unwrap();
        assert_eq!(g.bounds, Some([[-1.0, 1.0]; 3]));
        assert_eq!(g.counts, Some(Counts::Uniform(5)));
        let g = parse_grid_arg("(-1,1)x(0.5,2)x(0,1):5x5x9").unwrap();
        assert_eq!(g.bounds.unwrap()[1], [0.5, 2.0]);
        assert_eq!(g.counts, Some(Counts::PerAxis([5, 5, 9])));
        assert_eq!(parse_grid_arg("7").unwrap().bounds, None);
        for bad in ["", "(-1,1)^3:", "(a,1)^3:5", "(-1,1)^3:0", "(-1,1)x(0,1):5", "5x5"] {
            assert!(parse_grid_arg(bad).is_err(), "{bad}");
        }
    }
}
