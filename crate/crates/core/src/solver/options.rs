use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Algorithm used for each augmented Lagrangian subproblem.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerSolver {
    /// Damped Gauss-Newton on the penalty terms; uses constraint Jacobians.
    #[default]
    GaussNewton,
    /// Projected L-BFGS; uses only Jacobian-transpose products.
    Lbfgs,
}

/// Tuning knobs for [`super::minimize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub max_outer_iterations: usize,
    pub max_inner_iterations: usize,
    pub equality_tolerance: f64,
    pub inequality_tolerance: f64,
    /// Relative objective change between outer iterations treated as stalled.
    pub stall_tolerance: f64,
    /// Projected-gradient tolerance of the final subproblem.
    pub optimality_tolerance: f64,
    pub fd_step: f64,
    pub central_differences: bool,
    pub penalty_growth: f64,
    pub initial_penalty: f64,
    pub max_penalty: f64,
    pub lbfgs_memory: usize,
    pub inner_solver: InnerSolver,
    /// Iterations of objective-free least squares on the violations run
    /// before the first subproblem when the start is infeasible; 0 disables.
    pub restoration_iterations: usize,
    /// Wall-clock budget in seconds, checked between outer iterations.
    pub max_wall_time_s: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_outer_iterations: 30,
            max_inner_iterations: 200,
            equality_tolerance: 1e-6,
            inequality_tolerance: 1e-6,
            stall_tolerance: 1e-10,
            optimality_tolerance: 1e-6,
            fd_step: 1e-6,
            central_differences: false,
            penalty_growth: 10.0,
            initial_penalty: 1.0,
            max_penalty: 1e12,
            lbfgs_memory: 10,
            inner_solver: InnerSolver::GaussNewton,
            restoration_iterations: 200,
            max_wall_time_s: None,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let positive = [
            ("equality_tolerance", self.equality_tolerance),
            ("inequality_tolerance", self.inequality_tolerance),
            ("stall_tolerance", self.stall_tolerance),
            ("optimality_tolerance", self.optimality_tolerance),
            ("fd_step", self.fd_step),
            ("initial_penalty", self.initial_penalty),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                errs.push(format!("solver.{name} must be positive, got {v}"));
            }
        }
        if !(self.penalty_growth > 1.0) {
            errs.push(format!("solver.penalty_growth must exceed 1, got {}", self.penalty_growth));
        }
        if !(self.max_penalty >= self.initial_penalty) {
            errs.push("solver.max_penalty must be at least initial_penalty".into());
        }
        if self.max_outer_iterations == 0 || self.max_inner_iterations == 0 || self.lbfgs_memory == 0 {
            errs.push("solver iteration limits and lbfgs_memory must be positive".into());
        }
        if let Some(t) = self.max_wall_time_s {
            if !(t > 0.0) {
                errs.push(format!("solver.max_wall_time_s must be positive, got {t}"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}
