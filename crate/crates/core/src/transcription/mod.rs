//! Transcription of the formation planning problem into a nonlinear program.
//!
//! The decision vector holds the control nets of every rod field plus the
//! final time. The cost and the constraints (kinematics at collocation
//! nodes, formations on the time edges, coefficient bounds on squared
//! norms, obstacle clearance) are all evaluated from control points.

mod agents;
mod constraints;
mod cost;
mod derivatives;
mod formation;
mod layout;
mod problem;
mod scenario;

pub use agents::{extract_agents, uniform_times, AgentSample, AgentSampler, AgentTrajectory};
pub use constraints::{
    build_bound_constraints, build_boundary_constraints, build_dynamics_constraints, build_obstacle_constraints,
    ClearanceConstraint,
    BoundaryConditions, EdgeTarget, BOUND_BLOCKS,
};
pub use cost::{build_cost, CostSpec, CostTerm, LeaderTargets, RunningWeights};
pub use formation::TargetCurve;
pub use layout::{pack, unpack, Layout, SCALAR_NETS};
pub use problem::{assemble, NlpProblem};
pub use scenario::{
    Bounds, CostConfig, CostKind, FormationKind, FormationSpec, ObstacleKind, ObstacleSpec, Parameterization,
    Scenario, TimeSpec,
};
