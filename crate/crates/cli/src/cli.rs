//! clap argument definitions and dispatch.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use eigendecay_core::{MultiPoly, SolveOptions, WedgeModel};

use crate::formats;
use crate::run::{self, EmitFlags};

#[derive(Parser)]
#[command(
    name = "eigendecay",
    version,
    about = "Directional exponential decay rates of eigenfunctions of elliptic operators"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: certify, sweep, assemble, filter, certify smoothness,
    /// emit reports and plots.
    Analyze(AnalyzeArgs),
    /// Rotation-invariant reduction: roots of G(w) = lambda.
    Rotinv(RotinvArgs),
    /// One-dimensional rates: imaginary parts of the roots of Q(z) = lambda.
    #[command(name = "1d")]
    OneD(RotinvArgs),
    /// Smoothness certificates for the solutions at one direction.
    Smoothness(SmoothnessArgs),
    /// Emit the reference wedge-example figure (SVG + CSV).
    Example(ExampleArgs),
}

#[derive(Args)]
struct PolySource {
    /// Polynomial JSON file: {"dim": d, "terms": [{"alpha": [..], "coeff": c}, ..]}
    #[arg(long, value_name = "FILE", conflicts_with = "builtin")]
    poly: Option<PathBuf>,
    /// Built-in constructor: "laplacian_power k" or "section4 eps"
    #[arg(long, value_name = "NAME ARGS")]
    builtin: Option<String>,
    /// Dimension for built-in constructors
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

impl PolySource {
    fn resolve(&self) -> Result<MultiPoly> {
        match (&self.poly, &self.builtin) {
            (Some(path), None) => formats::load_poly(path),
            (None, Some(spec)) => formats::build_builtin(spec, self.dim),
            _ => bail!("exactly one of --poly or --builtin is required"),
        }
    }
}

#[derive(Args)]
struct SolverFlags {
    /// Random starts per direction (global system and critical values use 4x)
    #[arg(long, default_value_t = 500)]
    starts: usize,
    /// RNG seed; identical seeds give bit-identical outputs
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Residual acceptance threshold for solutions
    #[arg(long, default_value_t = 1e-9)]
    residual_tol: f64,
    /// Solution-space deduplication tolerance
    #[arg(long, default_value_t = 1e-6)]
    dedup_tol: f64,
    /// Multiplier on the multistart box radius
    #[arg(long, default_value_t = 1.0)]
    box_scale: f64,
}

impl SolverFlags {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            n_starts: self.starts,
            seed: self.seed,
            residual_tol: self.residual_tol,
            dedup_tol: self.dedup_tol,
            box_scale: self.box_scale,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: PolySource,
    /// Eigenvalue lambda
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    /// Direction-grid size (>= 90 for d = 2)
    #[arg(long, default_value_t = 720)]
    grid: usize,
    #[command(flatten)]
    solver: SolverFlags,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Comma-separated outputs to emit: json,csv,svg
    #[arg(long, default_value = "json,csv,svg")]
    emit: String,
}

#[derive(Args)]
struct RotinvArgs {
    #[command(flatten)]
    source: PolySource,
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    /// Optional output directory for JSON
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SmoothnessArgs {
    #[command(flatten)]
    source: PolySource,
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    /// Direction theta as comma-separated components, e.g. "0,1"
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExampleArgs {
    /// Build the model from eps in (0, 1/2)
    #[arg(long, conflicts_with = "ratio")]
    eps: Option<f64>,
    /// Build the model from the ratio 2*lambda0/eps (the reference figure
    /// uses 6)
    #[arg(long)]
    ratio: Option<f64>,
    /// Samples along each curve
    #[arg(long, default_value_t = 720)]
    samples: usize,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[arg(long, default_value = "json,csv,svg")]
    emit: String,
}

fn parse_theta(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad theta component {s:?}"))
        })
        .collect()
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    // Thread-count variable accepted for compatibility; execution is
    // sequential so results never depend on it.
    if let Ok(v) = std::env::var("EIGENDECAY_THREADS") {
        if v.parse::<usize>().is_err() {
            eprintln!("warning: ignoring unparsable EIGENDECAY_THREADS={v:?}");
        }
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path.
            let _ = e.print();
            return if e.use_stderr() { run::EXIT_INPUT } else { run::EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            run::EXIT_INPUT
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze(a) => {
            let cfg = run::AnalyzeConfig {
                poly: a.source.resolve()?,
                lambda: a.lambda,
                grid: a.grid,
                opts: a.solver.options(),
                out: a.out,
                emit: EmitFlags::parse(&a.emit)?,
            };
            run::cmd_analyze(&cfg)
        }
        Command::Rotinv(a) => run::cmd_rotinv(&run::RotinvConfig {
            poly: a.source.resolve()?,
            lambda: a.lambda,
            out: a.out,
        }),
        Command::OneD(a) => run::cmd_1d(&run::OneDConfig {
            poly: a.source.resolve()?,
            lambda: a.lambda,
            out: a.out,
        }),
        Command::Smoothness(a) => run::cmd_smoothness(&run::SmoothnessConfig {
            poly: a.source.resolve()?,
            lambda: a.lambda,
            theta: parse_theta(&a.theta)?,
            opts: a.solver.options(),
            out: a.out,
        }),
        Command::Example(a) => {
            let model = match (a.eps, a.ratio) {
                (Some(eps), None) => WedgeModel::new(2, eps),
                (None, Some(r)) => WedgeModel::from_ratio(2, r),
                (None, None) => WedgeModel::from_ratio(2, 6.0),
                _ => bail!("give at most one of --eps or --ratio"),
            }
            .map_err(|e| anyhow::anyhow!("{e}"))?;
            run::cmd_example(&run::ExampleConfig {
                model,
                samples: a.samples,
                out: a.out,
                emit: EmitFlags::parse(&a.emit)?,
            })
        }
    }
}
