use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use curvlab::geometry::{catalog, CatalogSummary};
use curvlab::manifest::{
    parse_grid_arg, Format, Manifest, MetricSection, OutputSection, SolitonSection, Task, ValueOrFit,
};
use curvlab::parallel::Execution;
use curvlab::run::{exit_code, run, write_outputs, RunOptions};
use curvlab::soliton::SolitonKind;
use curvlab::{Error, Result};

/// Curvature, pseudo-symmetry and soliton checks for 3-dimensional metric charts.
///
/// Exit status: 0 when every check passed, 2 when a check failed, 1 on bad input.
#[derive(Parser)]
#[command(name = "curvlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in metrics with their expected curvature data.
    Catalog {
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Classify the curvature (semi-/pseudo-symmetry, L) over a grid.
    Classify(TaskArgs),
    /// Check a given gradient soliton potential and constant.
    VerifySoliton(SolitonTaskArgs),
    /// Fit a gradient soliton potential and constant on a grid.
    FitSoliton(FitTaskArgs),
    /// Ricci eigenframe connection and curvature diagnostics.
    Diagnostics(TaskArgs),
}

#[derive(Args)]
struct TaskArgs {
    /// Run a TOML manifest. Cannot be combined with the inline flags below.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Catalog metric name (see `curvlab catalog`).
    #[arg(long)]
    metric: Option<String>,
    /// Catalog parameter, e.g. `kappa=2`. Repeatable.
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Sample grid: `(-1,1)^3:5`, `(a,b)x(c,d)x(e,f):5x5x9` or a bare count.
    #[arg(long)]
    grid: Option<String>,
    /// Use this many random points from the grid box instead of the lattice.
    #[arg(long)]
    random: Option<usize>,
    /// Seed for random point selection.
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override, e.g. `fit=1e-2`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tolerances: Vec<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<String>,
    /// Report format; inline runs default to text, manifests to their own setting.
    #[arg(long)]
    format: Option<Format>,
    /// Also write a per-point CSV table.
    #[arg(long)]
    csv: Option<String>,
    /// Run the grid sweep on one thread.
    #[arg(long)]
    sequential: bool,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SolitonTaskArgs {
    #[command(flatten)]
    common: TaskArgs,
    /// `ricci` or `yamabe`.
    #[arg(long)]
    kind: Option<SolitonKind>,
    /// Potential f as an expression in the chart coordinates.
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    /// Soliton constant.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
}

#[derive(Args)]
struct FitTaskArgs {
    #[command(flatten)]
    common: TaskArgs,
    /// `ricci` or `yamabe`.
    #[arg(long)]
    kind: Option<SolitonKind>,
}

fn split_pair(s: &str, what: &str) -> Result<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Manifest(format!("{what} `{s}` must look like name=value")))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::Manifest(format!("{what} `{s}`: `{v}` is not a number")))?;
    Ok((k.trim().to_string(), v))
}

impl TaskArgs {
    fn has_inline(&self) -> bool {
        self.metric.is_some()
            || !self.params.is_empty()
            || self.grid.is_some()
            || self.random.is_some()
            || self.seed.is_some()
            || !self.tolerances.is_empty()
            || self.out.is_some()
            || self.format.is_some()
            || self.csv.is_some()
    }

    fn build(&self, task: Task, soliton: Option<SolitonSection>, has_soliton_flags: bool) -> Result<Manifest> {
        if let Some(path) = &self.manifest {
            if self.has_inline() || has_soliton_flags {
                return Err(Error::Manifest(
                    "--manifest cannot be combined with inline metric, grid, tolerance, soliton or output flags".into(),
                ));
            }
            let m = Manifest::load(path)?;
            if m.task != task {
                return Err(Error::Manifest(format!(
                    "manifest task is `{}` but the `{task}` subcommand was used",
                    m.task
                )));
            }
            return Ok(m);
        }
        let name = self
            .metric
            .clone()
            .ok_or_else(|| Error::Manifest("either --manifest or --metric is required".into()))?;
        let mut params = BTreeMap::new();
        for p in &self.params {
            let (k, v) = split_pair(p, "--param")?;
            params.insert(k, v);
        }
        let mut tolerances = BTreeMap::new();
        for t in &self.tolerances {
            let (k, v) = split_pair(t, "--tol")?;
            tolerances.insert(k, v);
        }
        let mut grid = match &self.grid {
            Some(g) => parse_grid_arg(g)?,
            None => Default::default(),
        };
        grid.random = self.random;
        Ok(Manifest {
            task,
            seed: self.seed.unwrap_or(0),
            execution: Execution::default(),
            metric: MetricSection {
                catalog: Some(name),
                params,
                ..Default::default()
            },
            grid,
            tolerances,
            soliton,
            output: OutputSection {
                path: self.out.clone(),
                format: self.format.unwrap_or(Format::Text),
                csv: self.csv.clone(),
            },
        })
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            timing: self.timing,
            execution: self.sequential.then_some(Execution::Sequential),
        }
    }
}

fn catalog_listing(format: Format) -> String {
    let entries: Vec<CatalogSummary> = catalog().iter().map(CatalogSummary::from).collect();
    if format == Format::Json {
        let mut s = serde_json::to_string_pretty(&entries).expect("catalog serializes");
        s.push('\n');
        return s;
    }
    let mut o = String::new();
    for e in &entries {
        let _ = writeln!(o, "{}  ({})", e.name, e.description);
        let _ = writeln!(o, "  coordinates: {}", e.coords.join(", "));
        if !e.parameters.is_empty() {
            let p: Vec<String> = e.parameters.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            let _ = writeln!(o, "  parameters: {}", p.join(", "));
        }
        let _ = writeln!(
            o,
            "  Ricci eigenvalues: {} [{}]",
            e.ricci_pattern,
            e.ricci_eigenvalues.join(", ")
        );
        let _ = writeln!(o, "  scalar curvature: {}", e.scalar_curvature);
        match e.l {
            Some(l) => {
                let _ = writeln!(o, "  class: {} (L = {l})", e.expected_class);
            }
            None => {
                let _ = writeln!(o, "  class: {}", e.expected_class);
            }
        }
        for s in &e.solitons {
            let _ = writeln!(o, "  soliton: {s}");
        }
    }
    o
}

fn execute(cli: Cli) -> Result<i32> {
    let (manifest, opts) = match cli.command {
        Command::Catalog { format } => {
            print!("{}", catalog_listing(format));
            return Ok(0);
        }
        Command::Classify(a) => (a.build(Task::Classify, None, false)?, a.options()),
        Command::Diagnostics(a) => (a.build(Task::Diagnostics, None, false)?, a.options()),
        Command::VerifySoliton(a) => {
            let flags = a.kind.is_some() || a.potential.is_some() || a.lambda.is_some();
            let soliton = if a.common.manifest.is_none() {
                let missing = |f: &str| Error::Manifest(format!("verify-soliton needs --{f}"));
                Some(SolitonSection {
                    kind: a.kind.ok_or_else(|| missing("kind"))?,
                    potential: a.potential.clone().ok_or_else(|| missing("potential"))?,
                    lambda: ValueOrFit::Value(a.lambda.ok_or_else(|| missing("lambda"))?),
                })
            } else {
                None
            };
            (a.common.build(Task::VerifySoliton, soliton, flags)?, a.common.options())
        }
        Command::FitSoliton(a) => {
            let soliton = if a.common.manifest.is_none() {
                Some(SolitonSection {
                    kind: a.kind.unwrap_or(SolitonKind::Ricci),
                    potential: "fit".into(),
                    lambda: ValueOrFit::Keyword("fit".into()),
                })
            } else {
                None
            };
            (
                a.common.build(Task::FitSoliton, soliton, a.kind.is_some())?,
                a.common.options(),
            )
        }
    };
    let result = run(&manifest, opts);
    let code = exit_code(&result);
    let report = result?;
    if let Some(text) = write_outputs(&report, &manifest.output)? {
        print!("{text}");
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
