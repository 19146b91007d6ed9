//! Run reports: JSON (schema 1), plain text and an optional per-point CSV.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::frame::FrameDiagnostic;
use crate::geometry::GridSpec;
use crate::manifest::{Format, Manifest, Task};
use crate::soliton::{FitResult, SolitonReport};
use crate::symmetry::{RegionVerdict, SymmetryVerdict};
use crate::tolerances::Tolerances;

pub const SCHEMA_VERSION: u32 = 1;

pub const CONVENTIONS: [&str; 6] = [
    "R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]; R_ijkl = g(R(d_i,d_j)d_l, d_k), so R_1212 is the sectional curvature and the unit sphere has R = G",
    "G_ijkl = g_ik g_jl - g_il g_jk; (X ^ Y)Z = g(Y,Z)X - g(X,Z)Y",
    "soliton labels follow the sign of lambda for both kinds: lambda > 0 expanding, lambda = 0 steady, lambda < 0 shrinking; for Ricci solitons this is the reverse of the more common convention",
    "Yamabe identities are reported in literal form (-Ric(grad f, .) = 2 dr, d|grad f|^2 = 2r df) and in the form derived from Hess f = (lambda - r)g (Ric(grad f, .) = 2 dr, d|grad f|^2 = 2(lambda - r) df); only the derived forms are checked",
    "|Ric|^2 = tr(S^2) with S the Ricci operator",
    "residual norms: symmetric (0,2) tensors by the largest eigenvalue magnitude relative to g, 1-forms and vectors by the g-norm, higher tensors by the Frobenius norm in an orthonormal frame",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricEcho {
    pub name: String,
    pub coords: [String; 3],
    pub components: Vec<String>,
    pub params: crate::dsl::Params,
    pub catalog: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub points: Vec<SymmetryVerdict>,
    pub region: Option<RegionVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub point: [f64; 3],
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub step: f64,
    pub points: Vec<FrameDiagnostic>,
    pub skipped: Vec<SkippedPoint>,
    pub max_orthonormality: f64,
    pub max_b_antisymmetry: f64,
    pub max_bianchi: f64,
    pub max_curvature_forms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub task: Task,
    pub manifest: Manifest,
    pub metric: MetricEcho,
    pub tolerances: Tolerances,
    pub grid: Option<GridSpec>,
    pub sample_points: usize,
    pub conventions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub soliton: Option<SolitonReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let _ = writeln!(o, "{} {}  task: {}", self.tool, self.version, self.task);
        let _ = writeln!(o, "metric: {} ({})", self.metric.name, self.metric.coords.join(", "));
        for (i, c) in self.metric.components.iter().enumerate() {
            let (a, b) = crate::dsl::COMPONENTS[i];
            let _ = writeln!(o, "  g{a}{b} = {c}");
        }
        if let Some(g) = &self.grid {
            let b: Vec<String> = g.bounds.iter().map(|(lo, hi)| format!("({lo}, {hi})")).collect();
            let _ = writeln!(o, "grid: {} x {:?}", b.join(" x "), g.counts);
        }
        let _ = writeln!(o, "points: {}", self.sample_points);
        if let Some(c) = &self.classification {
            text_classification(&mut o, c);
        }
        if let Some(s) = &self.soliton {
            text_soliton(&mut o, s);
        }
        if let Some(f) = &self.fit {
            text_fit(&mut o, f);
        }
        if let Some(d) = &self.diagnostics {
            text_diagnostics(&mut o, d);
        }
        if !self.checks.is_empty() {
            let _ = writeln!(o, "\nchecks:");
            for c in &self.checks {
                let _ = writeln!(
                    o,
                    "  [{}] {}: {}",
                    if c.passed { "pass" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
        }
        for n in &self.notes {
            let _ = writeln!(o, "note: {n}");
        }
        let _ = writeln!(o, "\nresult: {}", if self.passed { "PASSED" } else { "FAILED" });
        if let Some(t) = self.timing_ms {
            let _ = writeln!(o, "time: {t:.1} ms");
        }
        o
    }

    /// Per-point table for plotting; `None` for tasks without point data.
    pub fn to_csv(&self) -> Option<String> {
        let mut o = String::new();
        if let Some(c) = &self.classification {
            o.push_str("x0,x1,x2,class,l,l_tensor,l_spectral,residual,mu1,mu2,mu3,scalar\n");
            for v in &c.points {
                let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:e}"));
                let _ = writeln!(
                    o,
                    "{:e},{:e},{:e},{},{},{},{},{:e},{:e},{:e},{:e},{:e}",
                    v.point[0],
                    v.point[1],
                    v.point[2],
                    v.class,
                    opt(v.l()),
                    opt(v.l_tensor),
                    opt(v.l_spectral),
                    v.dependence_residual,
                    v.spectrum.eigenvalues[0],
                    v.spectrum.eigenvalues[1],
                    v.spectrum.eigenvalues[2],
                    v.scalar
                );
            }
            return Some(o);
        }
        if let Some(s) = &self.soliton {
            let names: Vec<&str> = s.identities.iter().map(|i| i.name.as_str()).collect();
            let _ = writeln!(o, "x0,x1,x2,defining,{}", names.join(","));
            for p in &s.points {
                let ids: Vec<String> = p.identities.iter().map(|v| format!("{v:e}")).collect();
                let _ = writeln!(
                    o,
                    "{:e},{:e},{:e},{:e},{}",
                    p.point[0],
                    p.point[1],
                    p.point[2],
                    p.defining,
                    ids.join(",")
                );
            }
            return Some(o);
        }
        if let Some(f) = &self.fit {
            o.push_str("x0,x1,x2,f\n");
            for (p, v) in f.grid.points().iter().zip(&f.f_values) {
                let _ = writeln!(
                    o,
                    "{:e},{:e},{:e},{}",
                    p[0],
                    p[1],
                    p[2],
                    v.map_or(String::new(), |v| format!("{v:e}"))
                );
            }
            return Some(o);
        }
        if let Some(d) = &self.diagnostics {
            o.push_str("x0,x1,x2,mu,l,bianchi0,bianchi1,bianchi2,curvature_forms\n");
            for p in &d.points {
                let x = p.frame.point;
                let _ = writeln!(
                    o,
                    "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                    x[0],
                    x[1],
                    x[2],
                    p.frame.mu,
                    p.frame.l,
                    p.bianchi[0],
                    p.bianchi[1],
                    p.bianchi[2],
                    p.curvature.max()
                );
            }
            return Some(o);
        }
        None
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or("-".to_string(), |v| format!("{v:.6}"))
}

fn text_classification(o: &mut String, c: &Classification) {
    if let Some(r) = &c.region {
        let _ = writeln!(o, "\nregion: {}", r.class);
        let _ = writeln!(
            o,
            "  L = {}  (stdev {}, range {} .. {})",
            opt(r.mean_l),
            r.stdev_l.map_or("-".into(), |v| format!("{v:.2e}")),
            opt(r.min_l),
            opt(r.max_l)
        );
        if let Some((lo, hi)) = r.mu_range {
            let _ = writeln!(o, "  mu in [{lo:.6}, {hi:.6}]");
        }
        let _ = writeln!(
            o,
            "  dependence residual in [{:.2e}, {:.2e}]",
            r.min_residual, r.max_residual
        );
        let counts: Vec<String> = r.class_counts.iter().map(|(c, n)| format!("{c}: {n}")).collect();
        let _ = writeln!(o, "  point classes: {}", counts.join(", "));
    }
    let _ = writeln!(
        o,
        "\n{:>10} {:>10} {:>10}  {:>11} {:>11} {:>11}  {:<20} {:>10} {:>9}",
        "x0", "x1", "x2", "mu1", "mu2", "mu3", "class", "L", "residual"
    );
    for v in &c.points {
        let e = v.spectrum.eigenvalues;
        let _ = writeln!(
            o,
            "{:>10.4} {:>10.4} {:>10.4}  {:>11.6} {:>11.6} {:>11.6}  {:<20} {:>10} {:>9.1e}",
            v.point[0],
            v.point[1],
            v.point[2],
            e[0],
            e[1],
            e[2],
            v.class.to_string(),
            opt(v.l()),
            v.dependence_residual
        );
    }
}

fn text_soliton(o: &mut String, s: &SolitonReport) {
    let _ = writeln!(o, "\n{} soliton, lambda = {} ({:?})", s.kind, s.lambda, s.soliton_type);
    let _ = writeln!(
        o,
        "  defining equation: sup {:.3e}, rms {:.3e}",
        s.defining.sup, s.defining.rms
    );
    for i in &s.identities {
        let _ = writeln!(
            o,
            "  {:<24} sup {:.3e}  rms {:.3e}{}",
            i.name,
            i.residual.sup,
            i.residual.rms,
            if i.contracted { "" } else { "  (reported only)" }
        );
    }
    if let Some(f) = &s.yamabe_forms {
        let _ = writeln!(
            o,
            "  consistent forms: ricci_gradient {:?}, gradient_norm {:?}",
            f.ricci_gradient, f.gradient_norm
        );
    }
    if !s.nontrivial {
        let _ = writeln!(o, "  potential is constant on the sample (trivial soliton)");
    }
}

fn text_fit(o: &mut String, f: &FitResult) {
    let _ = writeln!(o, "\nfitted {} soliton", f.kind);
    let _ = writeln!(o, "  lambda = {:.9} ({:?})", f.lambda, f.soliton_type);
    let _ = writeln!(o, "  relative residual = {:.3e}", f.relative_residual);
    let _ = writeln!(
        o,
        "  lambda sensitivity = {:.3e}, degenerate = {}",
        f.lambda_sensitivity, f.degenerate
    );
    let _ = writeln!(o, "  {} equations, {} unknowns", f.equations, f.unknowns);
    if !f.affine_null_directions.is_empty() {
        let _ = writeln!(o, "  affine null directions: {}", f.affine_null_directions.join(", "));
    }
}

fn text_diagnostics(o: &mut String, d: &Diagnostics) {
    let _ = writeln!(
        o,
        "\nframe diagnostics (step {:.2e}), {} points, {} skipped",
        d.step,
        d.points.len(),
        d.skipped.len()
    );
    let _ = writeln!(o, "  max |g(e_a,e_b) - delta|     {:.3e}", d.max_orthonormality);
    let _ = writeln!(o, "  max |B_ijk + B_ikj|          {:.3e}", d.max_b_antisymmetry);
    let _ = writeln!(o, "  max Bianchi frame relation   {:.3e}", d.max_bianchi);
    let _ = writeln!(o, "  max curvature-form residual  {:.3e}", d.max_curvature_forms);
    if let Some(p) = d.points.first() {
        let _ = writeln!(o, "  first point: mu = {:.6}, L = {:.6}", p.frame.mu, p.frame.l);
    }
    for s in d.skipped.iter().take(5) {
        let _ = writeln!(o, "  skipped {:?}: {}", s.point, s.reason);
    }
}
