use serde::{Deserialize, Serialize};

use super::problem::BlockKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Feasible within tolerance and stationary (or objective stalled).
    Converged,
    /// Outer iteration limit reached.
    MaxIterations,
    /// Penalty saturated or violation stopped decreasing.
    Stalled,
    /// Wall-clock budget exhausted.
    TimeLimit,
}

/// Worst violation inside one named constraint block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub name: String,
    pub kind: BlockKind,
    pub count: usize,
    pub max_violation: f64,
}

/// One outer iteration of the augmented Lagrangian loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub penalty: f64,
    pub violation: f64,
    pub objective: f64,
    pub inner_iterations: usize,
    pub accepted: bool,
}

/// Outcome of a solve. Violations are recomputed from the returned point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub cost: f64,
    pub max_equality_violation: f64,
    pub max_inequality_violation: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub termination: Termination,
    pub wall_time_s: f64,
    pub final_penalty: f64,
    pub blocks: Vec<BlockSummary>,
    /// Filled in by callers that post-verify obstacle clearance.
    pub min_clearance: Option<f64>,
    pub history: Vec<OuterRecord>,
}

impl SolveReport {
    pub fn is_feasible(&self, eq_tol: f64, ineq_tol: f64) -> bool {
        self.max_equality_violation <= eq_tol && self.max_inequality_violation <= ineq_tol
    }
}
