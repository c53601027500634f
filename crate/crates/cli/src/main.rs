//! Command-line front end: validate triangulation files, solve for the
//! complete (or Dehn-filled) hyperbolic structure, and evaluate volume
//! lower bounds at supplied angle assignments.
//!
//! Exit codes are a stable contract:
//! - `check`: 0 valid and feasible, 2 valid but infeasible, 1 invalid/error
//! - `solve`: 0 interior critical point, 3 boundary maximum, 2 infeasible,
//!   1 error
//! - `bound`: 0 ok, 2 point not feasible, 1 error

mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cusped::solver::{self, SolveOptions, SolveStatus};
use cusped::{ConstraintSystem, Triangulation};

#[derive(Parser)]
#[command(name = "atri", version, about = "Hyperbolic structures on cusped 3-manifolds from ideal triangulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a triangulation; report combinatorics and whether
    /// the angle polytope is nonempty.
    Check { path: PathBuf },
    /// Maximize the volume over the angle polytope (or filling slices) and
    /// report the resulting structure.
    Solve(SolveArgs),
    /// Evaluate the volume lower bound at a supplied feasible angle vector.
    Bound {
        path: PathBuf,
        /// File listing 3n angles in radians, whitespace-separated.
        #[arg(long)]
        angles: PathBuf,
    },
}

#[derive(Args)]
struct SolveArgs {
    path: PathBuf,
    /// Infinity-norm tolerance on the reduced gradient.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Dehn filling `CUSP:P/Q`; repeat for multiple cusps.
    #[arg(long = "fill", value_name = "C:P/Q")]
    fill: Vec<String>,
    /// Write the machine-readable report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Suppress the human-readable summary line.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Check { path } => cmd_check(&path),
        Command::Solve(args) => cmd_solve(&args),
        Command::Bound { path, angles } => cmd_bound(&path, &angles),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &PathBuf) -> Result<(String, Triangulation)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let tri = Triangulation::parse(&text)
        .with_context(|| format!("invalid triangulation in {}", path.display()))?;
    Ok((text, tri))
}

fn cmd_check(path: &PathBuf) -> Result<ExitCode> {
    let (_, tri) = load(path)?;
    let n = tri.tet_count();
    let k = tri.cusps().len();
    println!("tetrahedra {n}");
    let degrees: Vec<String> = tri
        .edge_classes()
        .iter()
        .map(|e| e.degree().to_string())
        .collect();
    println!("edge degrees {}", degrees.join(" "));
    println!("cusps {k}");
    let cs = ConstraintSystem::build(&tri);
    let (rank, dim) = cs.rank_and_dimension();
    println!("rank A = {rank}");
    println!("dim A = {dim}");
    match cusped::angles::initial_point(&cs) {
        Ok((_, margin)) => {
            println!("feasible (margin {margin:.6})");
            Ok(ExitCode::from(0))
        }
        Err(cusped::angles::AngleError::Infeasible { margin })
        | Err(cusped::angles::AngleError::ThinPolytope { margin }) => {
            println!("infeasible (margin optimum {margin:.6})");
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e.into()),
    }
}

fn parse_filling(spec: &str) -> Result<(usize, i64, i64)> {
    let err = || format!("filling '{spec}' is not of the form C:P/Q");
    let (cusp, pq) = spec.split_once(':').with_context(err)?;
    let (p, q) = pq.split_once('/').with_context(err)?;
    Ok((
        cusp.trim().parse().with_context(err)?,
        p.trim().parse().with_context(err)?,
        q.trim().parse().with_context(err)?,
    ))
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode> {
    let (text, tri) = load(&args.path)?;
    let mut fillings = Vec::new();
    for spec in &args.fill {
        fillings.push(parse_filling(spec)?);
    }
    let opts = SolveOptions {
        gradient_tolerance: args.tol,
        max_iterations: args.max_iters,
        ..SolveOptions::default()
    };
    let rep = solver::solve(&tri, &opts, &fillings)?;

    if !args.quiet {
        match rep.status {
            SolveStatus::InteriorCriticalPoint => println!(
                "{}: volume {:.12} ({} iterations, residuals {:.2e} / {:.2e})",
                rep.status.as_str(),
                rep.volume,
                rep.iterations,
                rep.edge_residual,
                rep.completeness_residual
            ),
            SolveStatus::BoundaryMaximum => println!(
                "{}: volume bound {:.12} after {} iterations",
                rep.status.as_str(),
                rep.volume,
                rep.iterations
            ),
            SolveStatus::Infeasible => println!(
                "{}: margin optimum {:.6}",
                rep.status.as_str(),
                rep.margin
            ),
        }
    }
    if let Some(out) = &args.report {
        let doc = report::render(&rep, &text);
        std::fs::write(out, doc).with_context(|| format!("cannot write {}", out.display()))?;
    }
    Ok(ExitCode::from(match rep.status {
        SolveStatus::InteriorCriticalPoint => 0,
        SolveStatus::BoundaryMaximum => 3,
        SolveStatus::Infeasible => 2,
    }))
}

fn cmd_bound(path: &PathBuf, angles_path: &PathBuf) -> Result<ExitCode> {
    let (_, tri) = load(path)?;
    let text = std::fs::read_to_string(angles_path)
        .with_context(|| format!("cannot read {}", angles_path.display()))?;
    let mut angles = Vec::new();
    for tok in text.split_whitespace() {
        angles.push(
            tok.parse::<f64>()
                .with_context(|| format!("bad angle value '{tok}'"))?,
        );
    }
    if angles.len() != tri.coord_count() {
        bail!(
            "expected {} angles, found {}",
            tri.coord_count(),
            angles.len()
        );
    }
    let cs = ConstraintSystem::build(&tri);
    match solver::volume_lower_bound(&cs, &angles) {
        Ok(v) => {
            // The bound certifies vol(M) >= V(q) whenever some triangulation
            // of M carries an interior critical point.
            println!("volume lower bound {v:.12}");
            Ok(ExitCode::from(0))
        }
        Err(solver::SolveError::NotFeasible { residual }) => {
            eprintln!("angle vector is not feasible (residual {residual:.3e})");
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e.into()),
    }
}
