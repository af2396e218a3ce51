use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use projsplit_cli::config::parse_real;
use projsplit_cli::{run_experiment, run_solve, Experiment, ExperimentConfig, SolveRequest};
use projsplit_core::{Result, SchemeKind};

#[derive(Parser)]
#[command(
    name = "projsplit",
    version,
    about = "Splitting methods for projecting onto subspace intersections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral radius and operator norm over a λ grid.
    Exp1(SweepArgs),
    /// Iterations to reach ε over a λ grid.
    Exp2(SweepArgs),
    /// Per-iteration distances at a fixed λ per algorithm.
    Exp3(SweepArgs),
    /// Rate bounds for three lines through the origin.
    ThreeLines(SweepArgs),
    /// Project a start vector onto the intersection of subspaces read from files.
    Solve(SolveArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Flat key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dim: Option<usize>,
    /// Comma-separated, e.g. 5,5,5.
    #[arg(long)]
    subspace_dims: Option<String>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    starts: Option<usize>,
    /// start:step:end or a comma-separated list.
    #[arg(long)]
    lambda_grid: Option<String>,
    /// start:step:end or a comma-separated list; `pi` is accepted, e.g. pi/12.
    #[arg(long)]
    theta_grid: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Comma-separated subset of ryu,mt,campoy,pocs.
    #[arg(long)]
    algorithms: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use the instance counts of the original study.
    #[arg(long)]
    paper_scale: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Basis matrix file (repeat once per subspace).
    #[arg(long = "subspace", required = true)]
    subspaces: Vec<PathBuf>,
    /// Treat the subspace files as orthogonal projectors.
    #[arg(long)]
    projector: bool,
    /// Anchor vector file (repeat once per subspace for affine sets).
    #[arg(long = "anchor")]
    anchors: Vec<PathBuf>,
    #[arg(long)]
    start: PathBuf,
    #[arg(long, default_value = "ryu")]
    algorithm: SchemeKind,
    #[arg(long, default_value = "0.5")]
    lambda: String,
    #[arg(long, default_value = "1e-10")]
    epsilon: String,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Write T, M, P_fix, P_Z and the shadow map here.
    #[arg(long)]
    dump_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn sweep_config(experiment: Experiment, a: SweepArgs) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::new(experiment);
    if let Some(path) = &a.config {
        c.load_file(path)?;
    }
    let settings: [(&str, Option<String>); 11] = [
        ("seed", a.seed.map(|v| v.to_string())),
        ("dim", a.dim.map(|v| v.to_string())),
        ("subspace-dims", a.subspace_dims),
        ("instances", a.instances.map(|v| v.to_string())),
        ("starts", a.starts.map(|v| v.to_string())),
        ("lambda-grid", a.lambda_grid),
        ("theta-grid", a.theta_grid),
        ("epsilon", a.epsilon),
        ("max-iters", a.max_iters.map(|v| v.to_string())),
        ("algorithms", a.algorithms),
        ("out", a.out.map(|p| p.display().to_string())),
    ];
    for (key, value) in settings {
        if let Some(v) = value {
            c.set(key, &v)?;
        }
    }
    if a.paper_scale {
        c.paper_scale();
    }
    c.validate()?;
    Ok(c)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let (experiment, args) = match cli.command {
        Command::Exp1(a) => (Experiment::Exp1, a),
        Command::Exp2(a) => (Experiment::Exp2, a),
        Command::Exp3(a) => (Experiment::Exp3, a),
        Command::ThreeLines(a) => (Experiment::ThreeLines, a),
        Command::Solve(a) => {
            let req = SolveRequest {
                subspaces: a.subspaces,
                projector_input: a.projector,
                anchors: a.anchors,
                start: a.start,
                algorithm: a.algorithm,
                lambda: parse_real(&a.lambda)?,
                epsilon: parse_real(&a.epsilon)?,
                max_iters: a.max_iters,
                dump_dir: a.dump_dir,
            };
            let result = run_solve(&req)?;
            return emit(&result.to_csv(), a.out.as_ref());
        }
    };
    let config = sweep_config(experiment, args)?;
    let csv = run_experiment(&config)?;
    emit(&csv, config.output_path.as_ref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
