//! Command implementations behind the `rodplan` binary.
//!
//! Every command reads and writes plain files: a TOML scenario, a JSON
//! solution holding the control nets, CSV exports and a JSON summary.

pub mod config;
pub mod export;
pub mod solution;
pub mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rodplan::cosserat::RodFields;
use rodplan::solver::minimize;
use rodplan::transcription::{assemble, extract_agents, uniform_times, AgentTrajectory, Scenario};

use export::{BoundPlanes, Summary};
use solution::SolutionFile;
use verify::{Verification, VerifyOptions};

pub const SOLUTION_FILE: &str = "solution.json";
pub const AGENTS_FILE: &str = "agents.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const NORMS_FILE: &str = "norms.csv";
pub const BOUNDS_FILE: &str = "bounds.json";
pub const PATHS_FILE: &str = "paths.csv";

/// Result of [`solve`]; `verified` decides the exit status.
pub struct SolveOutcome {
    pub verified: bool,
    pub summary: Summary,
    pub solution: SolutionFile,
    pub dir: PathBuf,
}

/// Samples `count` agents at `samples` uniform times and measures how long it took.
pub fn sample_agents(f: &RodFields<f64>, count: usize, samples: usize) -> Result<(Vec<AgentTrajectory>, f64)> {
    let start = Instant::now();
    let agents = extract_agents(f, count, &uniform_times(samples, f.t_length()))?;
    Ok((agents, start.elapsed().as_secs_f64()))
}

/// Solves `sc`, writes the solution, verifies it from the written file, then
/// exports agents and the summary into `out`.
pub fn solve(sc: &Scenario, out: &Path, opts: &VerifyOptions) -> Result<SolveOutcome> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let problem = assemble(sc)?;
    let (x, mut report) = minimize(&problem, &sc.solver)?;
    let (fields, t_final) = problem.unpack(&x)?;

    let sol_path = out.join(SOLUTION_FILE);
    SolutionFile::new(&fields, sc, Some(report.clone())).save(&sol_path)?;
    // verify what was written, not what is in memory
    let solution = SolutionFile::load(&sol_path)?;
    let stored = solution.fields()?;
    let verification = verify::verify(&stored, sc, opts)?;
    report.min_clearance = verification.min_clearance();

    let (agents, extract_time_s) = sample_agents(&stored, sc.agents, sc.samples)?;
    export::write_agents_csv(&out.join(AGENTS_FILE), &agents)?;

    let feasible = report.is_feasible(sc.solver.equality_tolerance, sc.solver.inequality_tolerance);
    let summary = Summary {
        scenario: sc.name.clone(),
        order: sc.order,
        verified: verification.passed() && feasible,
        cost: report.cost,
        t_final,
        termination: report.termination,
        max_equality_violation: report.max_equality_violation,
        max_inequality_violation: report.max_inequality_violation,
        min_clearance: report.min_clearance,
        epsilon: sc.epsilon,
        solve_time_s: report.wall_time_s,
        outer_iterations: report.outer_iterations,
        inner_iterations: report.inner_iterations,
        agents: sc.agents,
        extract_time_s,
        report,
        verification,
    };
    export::write_json(&out.join(SUMMARY_FILE), &summary)?;
    Ok(SolveOutcome { verified: summary.verified, summary, solution, dir: out.to_path_buf() })
}

/// Loads a stored solution and checks it against `sc`.
pub fn verify_files(solution: &Path, sc: &Scenario, opts: &VerifyOptions) -> Result<Verification> {
    let file = SolutionFile::load(solution)?;
    verify::verify(&file.fields()?, sc, opts)
}

/// Writes norm grids, bound planes and agent paths for plotting.
pub fn plotdata(solution: &Path, out: &Path, grid: usize) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let file = SolutionFile::load(solution)?;
    let f = file.fields()?;
    let paths = [out.join(NORMS_FILE), out.join(BOUNDS_FILE), out.join(PATHS_FILE)];
    export::write_norm_grid(&paths[0], &export::norm_grid(&f, grid)?)?;
    export::write_json(&paths[1], &BoundPlanes::from(&file.scenario.bounds))?;
    let (agents, _) = sample_agents(&f, file.scenario.agents, file.scenario.samples)?;
    export::write_paths_csv(&paths[2], &agents)?;
    Ok(paths.to_vec())
}

/// Resamples agents from a stored solution; returns the CSV path and the extraction time.
pub fn extract(solution: &Path, out: &Path, agents: Option<usize>, samples: Option<usize>) -> Result<(PathBuf, f64)> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let file = SolutionFile::load(solution)?;
    let f = file.fields()?;
    let (traj, secs) = sample_agents(
        &f,
        agents.unwrap_or(file.scenario.agents),
        samples.unwrap_or(file.scenario.samples),
    )?;
    let path = out.join(AGENTS_FILE);
    export::write_agents_csv(&path, &traj)?;
    Ok((path, secs))
}

/// Human-readable table of the checks, failures first.
pub fn format_verification(v: &Verification) -> String {
    let mut s = String::new();
    let mut rows: Vec<_> = v.checks.iter().collect();
    rows.sort_by_key(|c| c.passed);
    for c in rows {
        let _ = writeln!(
            s,
            "{} {:<32} worst {:>12.4e}  limit {:>10.3e}  at {}",
            if c.passed { "ok  " } else { "FAIL" },
            c.name,
            c.worst,
            c.limit,
            c.location
        );
    }
    let _ = writeln!(s, "{}", if v.passed() { "verification passed" } else { "verification FAILED" });
    s
}

pub fn format_summary(s: &Summary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {} order {:?}", s.scenario, s.order);
    let _ = writeln!(out, "termination {:?} after {} outer / {} inner iterations", s.termination, s.outer_iterations, s.inner_iterations);
    let _ = writeln!(out, "cost {:.6e}  t_f {:.4} s  solve time {:.1} s", s.cost, s.t_final, s.solve_time_s);
    let _ = writeln!(out, "max violation: equality {:.3e}, inequality {:.3e}", s.max_equality_violation, s.max_inequality_violation);
    if let Some(c) = s.min_clearance {
        let _ = writeln!(out, "min clearance {c:.6e} m (epsilon {})", s.epsilon);
    }
    let _ = writeln!(out, "{} agents extracted in {:.3e} s", s.agents, s.extract_time_s);
    out
}
