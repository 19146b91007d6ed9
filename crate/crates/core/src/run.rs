//! Manifest execution.

use std::path::Path;
use std::time::Instant;

use crate::dsl::{parse_with, CompiledMetric, COMPONENTS};
use crate::error::{Error, Result};
use crate::frame::frame_diagnostic;
use crate::geometry::{random_points, sample_grid, CatalogEntry, GridPurpose, GridSpec};
use crate::manifest::{Manifest, OutputSection, ResolvedMetric, SolitonRequest, Task};
use crate::parallel::{map_points, try_map_points, Execution};
use crate::report::{
    Check, Classification, Diagnostics, MetricEcho, Report, SkippedPoint, CONVENTIONS, SCHEMA_VERSION,
};
use crate::soliton::{fit_potential, verify_soliton, SolitonCandidate};
use crate::symmetry::{classify_point, classify_region, PointClass, MIN_REGION_POINTS};
use crate::tensor::curvature;
use crate::tolerances::Tolerances;

/// Frame stencils use this fraction of the box diameter as their step.
pub const FRAME_STEP_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record wall-clock time in the report (breaks byte-for-byte reproducibility).
    pub timing: bool,
    /// Overrides the manifest's execution mode.
    pub execution: Option<Execution>,
}

/// Process exit status for a run result: 0 passed, 2 a check failed, 1 the
/// input could not be processed.
pub fn exit_code(result: &Result<Report>) -> i32 {
    match result {
        Ok(r) if r.passed => 0,
        Ok(_) => 2,
        Err(_) => 1,
    }
}

pub fn run_manifest(path: &Path, opts: RunOptions) -> Result<Report> {
    run(&Manifest::load(path)?, opts)
}

struct Context<'a> {
    manifest: &'a Manifest,
    metric: ResolvedMetric,
    tol: Tolerances,
    exec: Execution,
    grid: GridSpec,
}

pub fn run(manifest: &Manifest, opts: RunOptions) -> Result<Report> {
    let start = Instant::now();
    manifest.validate()?;
    let metric = manifest.resolve_metric()?;
    let grid = manifest.grid_spec(&metric)?;
    let ctx = Context {
        manifest,
        tol: manifest.tolerances()?,
        exec: opts.execution.unwrap_or(manifest.execution),
        grid,
        metric,
    };
    let spec = &ctx.metric.spec;
    let mut report = Report {
        schema: SCHEMA_VERSION,
        tool: "curvlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        task: manifest.task,
        manifest: manifest.clone(),
        metric: MetricEcho {
            name: spec.name.clone(),
            coords: spec.coords.clone(),
            components: spec
                .components
                .iter()
                .map(|c| c.named(&spec.coords).to_string())
                .collect(),
            params: spec.params.clone(),
            catalog: ctx.metric.catalog.is_some(),
        },
        tolerances: ctx.tol,
        grid: Some(ctx.grid),
        sample_points: 0,
        conventions: CONVENTIONS.iter().map(|s| s.to_string()).collect(),
        classification: None,
        soliton: None,
        fit: None,
        diagnostics: None,
        checks: Vec::new(),
        notes: Vec::new(),
        passed: false,
        timing_ms: None,
    };
    match manifest.task {
        Task::Classify => run_classify(&ctx, &mut report)?,
        Task::VerifySoliton => run_verify(&ctx, &mut report)?,
        Task::FitSoliton => run_fit(&ctx, &mut report)?,
        Task::Diagnostics => run_diagnostics(&ctx, &mut report)?,
    }
    report.passed = report.checks.iter().all(|c| c.passed);
    if opts.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

fn sample(ctx: &Context, report: &mut Report) -> Result<Vec<[f64; 3]>> {
    let domain = &ctx.metric.spec.domain;
    let pts = match ctx.manifest.grid.random {
        None => sample_grid(&ctx.grid, domain, GridPurpose::Sampling)?,
        Some(n) => {
            ctx.grid.validate(domain, GridPurpose::Sampling)?;
            report.grid = None;
            report
                .notes
                .push(format!("{n} random points, seed {}", ctx.manifest.seed));
            let b = ctx.grid.bounds;
            random_points(&b, n, ctx.manifest.seed)
        }
    };
    if pts.is_empty() {
        return Err(Error::Grid("no sample points".into()));
    }
    report.sample_points = pts.len();
    Ok(pts)
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

fn run_classify(ctx: &Context, report: &mut Report) -> Result<()> {
    let pts = sample(ctx, report)?;
    let metric = CompiledMetric::new(ctx.metric.spec.clone(), 2);
    let tol = ctx.tol;
    let verdicts = try_map_points(ctx.exec, &pts, |p| -> Result<_> {
        Ok(classify_point(&curvature(&metric.jet(*p, 2)?)?, &tol))
    })?;
    let region = if verdicts.len() >= MIN_REGION_POINTS {
        Some(classify_region(&verdicts, &tol)?)
    } else {
        report.notes.push(format!(
            "region verdict needs at least {MIN_REGION_POINTS} points; only point verdicts are given"
        ));
        None
    };

    let worst_gap = verdicts.iter().filter_map(|v| v.l_discrepancy).fold(0.0, f64::max);
    report.checks.push(check(
        "route_consistency",
        verdicts.iter().all(|v| v.cross_check_passed),
        format!("max |L_tensor - L_spectral| = {worst_gap:.3e}"),
    ));
    if verdicts.iter().any(|v| v.spectrum.ambiguous) {
        report
            .notes
            .push("some points have a near-triple Ricci spectrum; no simple eigenvalue was singled out there".into());
    }
    if let Some(entry) = &ctx.metric.catalog {
        expected_checks(entry, &verdicts, region.as_ref(), &tol, &mut report.checks)?;
    }
    report.classification = Some(Classification {
        points: verdicts,
        region,
    });
    Ok(())
}

fn expected_checks(
    entry: &CatalogEntry,
    verdicts: &[crate::symmetry::SymmetryVerdict],
    region: Option<&crate::symmetry::RegionVerdict>,
    tol: &Tolerances,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let mut scalar_err: f64 = 0.0;
    let mut eig_err: f64 = 0.0;
    for v in verdicts {
        scalar_err = scalar_err.max((v.scalar - entry.expected_scalar(&v.point)?).abs());
        let mut expected = entry.expected_eigenvalues(&v.point)?;
        expected.sort_by(f64::total_cmp);
        for (a, b) in v.spectrum.eigenvalues.iter().zip(expected) {
            eig_err = eig_err.max((a - b).abs());
        }
    }
    checks.push(check(
        "expected_scalar_curvature",
        scalar_err <= tol.expected,
        format!("max |r - {}| = {scalar_err:.3e}", entry.expected.scalar),
    ));
    checks.push(check(
        "expected_ricci_eigenvalues",
        eig_err <= tol.expected,
        format!("pattern {}, max deviation {eig_err:.3e}", entry.expected.pattern),
    ));
    if let Some(r) = region {
        checks.push(check(
            "expected_class",
            r.class == entry.expected.class,
            format!("region {} (expected {})", r.class, entry.expected.class),
        ));
        if let (Some(l), Some(mean)) = (entry.expected.l, r.mean_l) {
            let in_u = verdicts.iter().all(|v| v.class != PointClass::ConstantCurvature);
            if in_u {
                checks.push(check(
                    "expected_l",
                    (mean - l).abs() <= tol.cross_check * l.abs().max(1.0),
                    format!("mean L = {mean:.9} (expected {l})"),
                ));
            }
        }
    }
    Ok(())
}

fn run_verify(ctx: &Context, report: &mut Report) -> Result<()> {
    let Some(SolitonRequest::Verify {
        kind,
        potential,
        lambda,
    }) = ctx.manifest.soliton_request()?
    else {
        unreachable!("validated manifest")
    };
    let spec = &ctx.metric.spec;
    let expr = parse_with(&potential, &spec.symbols())?;
    let pts = sample(ctx, report)?;
    let metric = CompiledMetric::new(spec.clone(), 4);
    let candidate = SolitonCandidate {
        kind,
        potential: expr,
        lambda,
    };
    let s = verify_soliton(&metric, &candidate, &pts, &ctx.tol, ctx.exec)?;
    report.checks.push(check(
        "defining_equation",
        s.defining.sup <= ctx.tol.soliton,
        format!(
            "sup residual {:.3e} (tolerance {:.1e})",
            s.defining.sup, ctx.tol.soliton
        ),
    ));
    for i in s.identities.iter().filter(|i| i.contracted) {
        report.checks.push(check(
            &format!("identity_{}", i.name),
            i.holds,
            format!(
                "sup residual {:.3e} (tolerance {:.1e})",
                i.residual.sup, ctx.tol.identity
            ),
        ));
    }
    if !s.nontrivial {
        report.notes.push("the potential is constant on the sample".into());
    }
    report.soliton = Some(s);
    Ok(())
}

fn run_fit(ctx: &Context, report: &mut Report) -> Result<()> {
    let Some(SolitonRequest::Fit { kind }) = ctx.manifest.soliton_request()? else {
        unreachable!("validated manifest")
    };
    if ctx.manifest.grid.random.is_some() {
        return Err(Error::Grid("fitting needs a lattice; remove `random`".into()));
    }
    let metric = CompiledMetric::new(ctx.metric.spec.clone(), 2);
    let fit = fit_potential(kind, &metric, &ctx.grid, &ctx.tol, ctx.exec)?;
    report.sample_points = ctx.grid.len();
    report.checks.push(check(
        "fit_residual",
        fit.passed,
        format!(
            "relative residual {:.3e} (tolerance {:.1e}), lambda = {:.9}",
            fit.relative_residual, ctx.tol.fit, fit.lambda
        ),
    ));
    report.fit = Some(fit);
    Ok(())
}

fn run_diagnostics(ctx: &Context, report: &mut Report) -> Result<()> {
    let pts = sample(ctx, report)?;
    let metric = CompiledMetric::new(ctx.metric.spec.clone(), 2);
    let diameter = ctx
        .grid
        .bounds
        .iter()
        .map(|(lo, hi)| (hi - lo).powi(2))
        .sum::<f64>()
        .sqrt();
    let step = FRAME_STEP_FRACTION * diameter;
    let tol = ctx.tol;
    let results = map_points(ctx.exec, &pts, |p| {
        frame_diagnostic(&metric, *p, tol.multiplicity, step)
    });
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (p, r) in pts.iter().zip(results) {
        match r {
            Ok(d) => points.push(d),
            Err(e @ (Error::FrameUndefined(_) | Error::GaugeFlip)) => skipped.push(SkippedPoint {
                point: *p,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    if points.is_empty() {
        return Err(Error::FrameUndefined(format!(
            "no sample point has a double/simple Ricci spectrum ({})",
            skipped.first().map_or(String::new(), |s| s.reason.clone())
        )));
    }
    let max = |f: &dyn Fn(&crate::frame::FrameDiagnostic) -> f64| points.iter().map(f).fold(0.0, f64::max);
    let orth = max(&|d| d.frame.orthonormality.max(d.frame.eigen_residual));
    let anti = max(&|d| d.b_antisymmetry);
    let bianchi = max(&|d| d.bianchi.iter().copied().fold(0.0, f64::max));
    let forms = max(&|d| d.curvature.max());
    report.checks.push(check(
        "frame_orthonormal_eigenframe",
        orth <= tol.frame_algebraic,
        format!("max {orth:.3e}"),
    ));
    report.checks.push(check(
        "connection_antisymmetry",
        anti <= tol.frame_antisymmetry,
        format!("max {anti:.3e}"),
    ));
    report.checks.push(check(
        "bianchi_frame_relations",
        bianchi <= tol.frame,
        format!("max {bianchi:.3e}"),
    ));
    report.checks.push(check(
        "eigenframe_curvature_forms",
        forms <= tol.frame_algebraic,
        format!("max {forms:.3e}"),
    ));
    if !skipped.is_empty() {
        report.notes.push(format!(
            "{} point(s) skipped: Ricci eigenframe undefined there",
            skipped.len()
        ));
    }
    report.diagnostics = Some(Diagnostics {
        step,
        points,
        skipped,
        max_orthonormality: orth,
        max_b_antisymmetry: anti,
        max_bianchi: bianchi,
        max_curvature_forms: forms,
    });
    Ok(())
}

/// Write the report (and CSV) where the output section says. Returns the
/// rendered report when it should go to standard output instead.
pub fn write_outputs(report: &Report, output: &OutputSection) -> Result<Option<String>> {
    let text = report.render(output.format);
    if let Some(csv_path) = &output.csv {
        let csv = report
            .to_csv()
            .ok_or_else(|| Error::Manifest("this task has no per-point data for CSV".into()))?;
        std::fs::write(csv_path, csv)?;
    }
    match &output.path {
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

/// Component labels `g00 .. g22` in storage order.
pub fn component_labels() -> [String; 6] {
    COMPONENTS.map(|(i, j)| format!("g{i}{j}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(src: &str) -> Manifest {
        Manifest::from_toml(src).unwrap()
    }

    #[test]
    fn classify_sol() {
        let r = run(
            &manifest("task = \"classify\"\n[metric]\ncatalog = \"sol3\"\n[grid]\ncounts = 5\n"),
            RunOptions::default(),
        )
        .unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert_eq!(exit_code(&Ok(r.clone())), 0);
        let region = r.classification.unwrap().region.unwrap();
        assert!((region.mean_l.unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn cylinder_off_by_lambda_fails() {
        let src = |l: &str| {
            format!(
                "task = \"verify-soliton\"\n[metric]\ncatalog = \"r_x_s2\"\n[grid]\ncounts = 3\n\
                 [soliton]\nkind = \"ricci\"\npotential = \"t^2/2\"\nlambda = {l}\n"
            )
        };
        let ok = run(&manifest(&src("1.0")), RunOptions::default());
        assert_eq!(exit_code(&ok), 0);
        let off = run(&manifest(&src("2.0")), RunOptions::default());
        assert_eq!(exit_code(&off), 2);
        assert!((off.unwrap().soliton.unwrap().defining.sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_on_sphere_is_an_input_error() {
        let r = run(
            &manifest("task = \"diagnostics\"\n[metric]\ncatalog = \"sphere3\"\n[grid]\ncounts = 2\n"),
            RunOptions::default(),
        );
        assert!(matches!(r, Err(Error::FrameUndefined(_))));
        assert_eq!(exit_code(&r), 1);
    }

    #[test]
    fn random_points_follow_seed() {
        let src = "task = \"classify\"\nseed = 9\n[metric]\ncatalog = \"nil3\"\n[grid]\nrandom = 10\n";
        let a = run(&manifest(src), RunOptions::default()).unwrap();
        let b = run(&manifest(src), RunOptions::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.grid.is_none());
    }

    #[test]
    fn timing_only_on_request() {
        let m = manifest("task = \"classify\"\n[metric]\ncatalog = \"euclidean\"\n[grid]\ncounts = 2\n");
        assert!(run(&m, RunOptions::default()).unwrap().timing_ms.is_none());
        let t = run(
            &m,
            RunOptions {
                timing: true,
                execution: None,
            },
        )
        .unwrap();
        assert!(t.timing_ms.is_some());
    }

    #[test]
    fn json_round_trips() {
        let r = run(
            &manifest("task = \"diagnostics\"\n[metric]\ncatalog = \"nil3\"\n[grid]\ncounts = 2\n"),
            RunOptions::default(),
        )
        .unwrap();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.to_json(), r.to_json());
        assert!(r.to_text().contains("PASSED"));
        assert_eq!(component_labels()[4], "g12");
    }
}
