//! Files written by the commands: agent trajectories, plot grids, run summary.

use std::path::Path;

use anyhow::{Context, Result};
use rodplan::cosserat::RodFields;
use rodplan::solver::{SolveReport, Termination};
use rodplan::transcription::{AgentTrajectory, Bounds};
use serde::{Deserialize, Serialize};

use crate::verify::Verification;

pub const AGENT_COLUMNS: [&str; 15] =
    ["agent", "s", "t", "x", "y", "z", "roll", "pitch", "yaw", "vx", "vy", "vz", "wx", "wy", "wz"];

/// One row per agent and time, sorted by `(agent, t)`.
pub fn write_agents_csv(path: &Path, agents: &[AgentTrajectory]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(AGENT_COLUMNS)?;
    for a in agents {
        for p in &a.samples {
            let mut row = vec![a.index.to_string(), a.s.to_string(), p.t.to_string()];
            for v in [p.position, p.euler, p.velocity, p.angular_velocity] {
                row.extend(v.iter().map(f64::to_string));
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Squared norms of the constrained fields on a uniform `(s, t)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NormGrid {
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    /// `[a][b]` flattened with `t` fastest, one vector per field in
    /// [`NORM_FIELDS`] order.
    pub values: [Vec<f64>; 4],
}

pub const NORM_FIELDS: [&str; 4] = ["l2", "h2", "v2", "omega2"];

pub fn norm_grid(f: &RodFields<f64>, count: usize) -> Result<NormGrid> {
    let count = count.max(2);
    let s: Vec<f64> = (0..count).map(|k| f.s_length() * k as f64 / (count - 1) as f64).collect();
    let t: Vec<f64> = (0..count).map(|k| f.t_length() * k as f64 / (count - 1) as f64).collect();
    let mut values: [Vec<f64>; 4] = Default::default();
    for (out, field) in values.iter_mut().zip([&f.l, &f.h, &f.v, &f.omega]) {
        for &sa in &s {
            for &tb in &t {
                out.push(field.eval(sa, tb)?.iter().map(|c| c * c).sum());
            }
        }
    }
    Ok(NormGrid { s, t, values })
}

/// Bound planes for the norm plots (squared thresholds).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundPlanes {
    pub nu_min2: f64,
    pub nu_max2: f64,
    pub mu_max2: f64,
    pub v_max2: f64,
    pub omega_max2: f64,
}

impl From<&Bounds> for BoundPlanes {
    fn from(b: &Bounds) -> Self {
        Self {
            nu_min2: b.nu_min * b.nu_min,
            nu_max2: b.nu_max * b.nu_max,
            mu_max2: b.mu_max * b.mu_max,
            v_max2: b.v_max * b.v_max,
            omega_max2: b.omega_max * b.omega_max,
        }
    }
}

pub fn write_norm_grid(path: &Path, g: &NormGrid) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["s", "t"];
    header.extend(NORM_FIELDS);
    w.write_record(&header)?;
    for (a, sa) in g.s.iter().enumerate() {
        for (b, tb) in g.t.iter().enumerate() {
            let k = a * g.t.len() + b;
            let mut row = vec![sa.to_string(), tb.to_string()];
            row.extend(g.values.iter().map(|v| v[k].to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Agent paths as 3D polylines: `agent, s, t, x, y, z`.
pub fn write_paths_csv(path: &Path, agents: &[AgentTrajectory]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["agent", "s", "t", "x", "y", "z"])?;
    for a in agents {
        for p in &a.samples {
            let mut row = vec![a.index.to_string(), a.s.to_string(), p.t.to_string()];
            row.extend(p.position.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Run summary written next to the solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub order: [usize; 2],
    pub verified: bool,
    pub cost: f64,
    pub t_final: f64,
    pub termination: Termination,
    pub max_equality_violation: f64,
    pub max_inequality_violation: f64,
    /// Certified lower bound at the verification depth.
    pub min_clearance: Option<f64>,
    pub epsilon: f64,
    pub solve_time_s: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub agents: usize,
    pub extract_time_s: f64,
    pub report: SolveReport,
    pub verification: Verification,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
