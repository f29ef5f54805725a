use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use rodplan_cli::config::{self, Overrides};
use rodplan_cli::verify::VerifyOptions;

/// Formation motion planning on a Cosserat rod model.
#[derive(Parser)]
#[command(name = "rodplan", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario, verify the result and export agent trajectories.
    ///
    /// Exits 0 only if the written solution passes verification.
    Solve(SolveArgs),
    /// Check a stored solution against a scenario without running the solver.
    Verify(VerifyArgs),
    /// Write norm grids, bound planes and agent paths for plotting.
    Plotdata(PlotArgs),
    /// Resample agent trajectories from a stored solution.
    Extract(ExtractArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Scenario file (TOML), or a bundled name: case1, case2, line_to_line.
    scenario: String,
    #[arg(long, default_value = "out")]
    output: PathBuf,
    /// Number of agents to extract.
    #[arg(long = "agents", value_name = "N")]
    agents: Option<usize>,
    /// Polynomial degrees in s and t.
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    order: Option<Vec<usize>>,
    /// Subdivision depth of the clearance constraint.
    #[arg(long, value_name = "D")]
    max_depth: Option<usize>,
    /// Solver equality and inequality tolerance.
    #[arg(long, value_name = "EPS")]
    tol: Option<f64>,
    /// Seed of the cold-start jitter (used when the scenario sets initial_jitter).
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
    /// Time samples per agent.
    #[arg(long, value_name = "K")]
    samples: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Solution file written by `solve`.
    solution: PathBuf,
    /// Scenario file or bundled name.
    scenario: String,
    /// Subdivision depth of the clearance certificate.
    #[arg(long, value_name = "D", default_value_t = 10)]
    max_depth: usize,
    /// Tolerance on kinematic residuals over the refined grid.
    #[arg(long, value_name = "EPS", default_value_t = 1e-5)]
    tol: f64,
}

#[derive(Args)]
struct PlotArgs {
    solution: PathBuf,
    #[arg(long, default_value = "plot")]
    output: PathBuf,
    /// Samples per axis of the norm grids.
    #[arg(long, default_value_t = 50)]
    grid: usize,
}

#[derive(Args)]
struct ExtractArgs {
    solution: PathBuf,
    #[arg(long, default_value = "out")]
    output: PathBuf,
    #[arg(long = "agents", value_name = "N")]
    agents: Option<usize>,
    #[arg(long, value_name = "K")]
    samples: Option<usize>,
}

fn scenario(arg: &str) -> Result<rodplan::transcription::Scenario> {
    match config::bundled::get(arg) {
        Some(text) if !std::path::Path::new(arg).exists() => config::parse_scenario(text),
        _ => config::load_scenario(arg.as_ref()),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve(a) => {
            let overrides = Overrides {
                agents: a.agents,
                order: a.order.map(|o| [o[0], o[1]]),
                max_depth: a.max_depth,
                tol: a.tol,
                seed: a.seed,
                samples: a.samples,
            };
            let sc = overrides.apply(scenario(&a.scenario)?)?;
            let out = rodplan_cli::solve(&sc, &a.output, &VerifyOptions::default())?;
            print!("{}", rodplan_cli::format_summary(&out.summary));
            print!("{}", rodplan_cli::format_verification(&out.summary.verification));
            println!("files written to {}", out.dir.display());
            Ok(out.verified)
        }
        Command::Verify(a) => {
            let sc = scenario(&a.scenario)?;
            let opts = VerifyOptions { clearance_depth: a.max_depth, dynamics_tol: a.tol, ..Default::default() };
            let v = rodplan_cli::verify_files(&a.solution, &sc, &opts)?;
            print!("{}", rodplan_cli::format_verification(&v));
            Ok(v.passed())
        }
        Command::Plotdata(a) => {
            for p in rodplan_cli::plotdata(&a.solution, &a.output, a.grid)? {
                println!("wrote {}", p.display());
            }
            Ok(true)
        }
        Command::Extract(a) => {
            let (path, secs) = rodplan_cli::extract(&a.solution, &a.output, a.agents, a.samples)?;
            println!("wrote {} (extraction {secs:.3e} s)", path.display());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
