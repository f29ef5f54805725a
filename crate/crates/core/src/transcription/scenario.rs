use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::SolverOptions;

/// Kind of curve a formation follows along the rod.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormationKind {
    Line,
    Ellipse,
    Helix,
    Points,
}

/// How rod arclength maps onto a curve parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    /// Curve parameter linear in `s`.
    #[default]
    Uniform,
    /// Equal arclength of the curve per unit `s`.
    ArcLength,
}

/// Formation curve plus the pose targets on one time edge.
///
/// Only the keys relevant to `kind` may be present:
/// - line: `origin`, `direction` (position is `origin + s * direction`)
/// - ellipse: `center`, `semi_axes`, `axis1`, `axis2`, `parameter_range`, `parameterization`, `reverse`
/// - helix: `center`, `axis`, `radius`, `pitch`, `slope`, `parameter_range`, `reverse`
/// - points: `points`, optional `s_values`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormationSpec {
    pub kind: FormationKind,
    /// Line start point (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<[f64; 3]>,
    /// Line direction per unit `s` (dimensionless).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<[f64; 3]>,
    /// Ellipse center or a point on the helix axis (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 3]>,
    /// Ellipse semi-axes along `axis1` and `axis2` (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semi_axes: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis1: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<[f64; 3]>,
    /// Helix axis direction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    /// Helix radius (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Helix rise per turn (m).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pitch: Option<f64>,
    /// Helix slope angle (rad); must agree with `pitch / (2 pi radius)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    /// Curve parameter interval (rad) covered by `s` in `[0, s_length]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameterization: Option<Parameterization>,
    /// Place `s = 0` at the upper end of `parameter_range`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reverse: Option<bool>,
    /// Sampled formation points (m), joined piecewise linearly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 3]>>,
    /// Rod coordinates of `points` (m); uniform over the rod when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_values: Option<Vec<f64>>,
    /// Constant roll, pitch, yaw target (rad).
    #[serde(default)]
    pub attitude: [f64; 3],
    /// Require zero velocity and angular velocity on this edge.
    #[serde(default = "default_true")]
    pub rest: bool,
    /// Impose the formation as hard equalities on the edge control points.
    #[serde(default = "default_true")]
    pub enforce: bool,
}

fn default_true() -> bool {
    true
}

impl FormationSpec {
    pub fn line(origin: [f64; 3], direction: [f64; 3]) -> Self {
        Self {
            kind: FormationKind::Line,
            origin: Some(origin),
            direction: Some(direction),
            center: None,
            semi_axes: None,
            axis1: None,
            axis2: None,
            axis: None,
            radius: None,
            pitch: None,
            slope: None,
            parameter_range: None,
            parameterization: None,
            reverse: None,
            points: None,
            s_values: None,
            attitude: [0.0; 3],
            rest: true,
            enforce: true,
        }
    }

    fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut mark = |name: &'static str, present: bool| {
            if present {
                keys.push(name);
            }
        };
        mark("origin", self.origin.is_some());
        mark("direction", self.direction.is_some());
        mark("center", self.center.is_some());
        mark("semi_axes", self.semi_axes.is_some());
        mark("axis1", self.axis1.is_some());
        mark("axis2", self.axis2.is_some());
        mark("axis", self.axis.is_some());
        mark("radius", self.radius.is_some());
        mark("pitch", self.pitch.is_some());
        mark("slope", self.slope.is_some());
        mark("parameter_range", self.parameter_range.is_some());
        mark("parameterization", self.parameterization.is_some());
        mark("reverse", self.reverse.is_some());
        mark("points", self.points.is_some());
        mark("s_values", self.s_values.is_some());
        keys
    }

    fn validate(&self, path: &str, s_length: f64, errs: &mut Vec<String>) {
        let (required, optional): (&[&str], &[&str]) = match self.kind {
            FormationKind::Line => (&["origin", "direction"], &[]),
            FormationKind::Ellipse => (
                &["center", "semi_axes", "axis1", "axis2", "parameter_range"],
                &["parameterization", "reverse"],
            ),
            FormationKind::Helix => (
                &["center", "axis", "radius", "pitch", "parameter_range"],
                &["slope", "reverse", "parameterization"],
            ),
            FormationKind::Points => (&["points"], &["s_values"]),
        };
        let present = self.present_keys();
        for key in required {
            if !present.contains(key) {
                errs.push(format!("{path}.{key} is required for kind {:?}", self.kind));
            }
        }
        for key in &present {
            if !required.contains(key) && !optional.contains(key) {
                errs.push(format!("{path}.{key} is not used by kind {:?}", self.kind));
            }
        }
        let finite = |name: &str, vals: &[f64], errs: &mut Vec<String>| {
            if vals.iter().any(|v| !v.is_finite()) {
                errs.push(format!("{path}.{name} must be finite"));
            }
        };
        let nonzero = |name: &str, v: &[f64; 3], errs: &mut Vec<String>| {
            if v.iter().map(|x| x * x).sum::<f64>() <= 0.0 {
                errs.push(format!("{path}.{name} must be a nonzero vector"));
            }
        };
        finite("attitude", &self.attitude, errs);
        if self.attitude[1].cos().abs() <= crate::cosserat::GIMBAL_LOCK_THRESHOLD {
            errs.push(format!("{path}.attitude pitch is at gimbal lock"));
        }
        for (name, v) in [("origin", self.origin), ("center", self.center)] {
            if let Some(v) = v {
                finite(name, &v, errs);
            }
        }
        for (name, v) in [("direction", self.direction), ("axis1", self.axis1), ("axis2", self.axis2), ("axis", self.axis)] {
            if let Some(v) = v {
                finite(name, &v, errs);
                nonzero(name, &v, errs);
            }
        }
        if let Some([a, b]) = self.semi_axes {
            if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                errs.push(format!("{path}.semi_axes must be positive"));
            }
        }
        if let Some([lo, hi]) = self.parameter_range {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                errs.push(format!("{path}.parameter_range must be increasing, got [{lo}, {hi}]"));
            }
        }
        for (name, v) in [("radius", self.radius), ("pitch", self.pitch)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    errs.push(format!("{path}.{name} must be positive, got {v}"));
                }
            }
        }
        if let (Some(slope), Some(pitch), Some(radius)) = (self.slope, self.pitch, self.radius) {
            let implied = (pitch / (2.0 * std::f64::consts::PI * radius)).atan();
            if (implied - slope).abs() > 1e-9 * slope.abs().max(1.0) {
                errs.push(format!("{path}.slope {slope} disagrees with pitch and radius (implied {implied})"));
            }
        }
        if let Some(points) = &self.points {
            if points.len() < 2 {
                errs.push(format!("{path}.points needs at least 2 points"));
            }
            if points.iter().flatten().any(|v| !v.is_finite()) {
                errs.push(format!("{path}.points must be finite"));
            }
            if let Some(s) = &self.s_values {
                if s.len() != points.len() {
                    errs.push(format!("{path}.s_values has {} entries for {} points", s.len(), points.len()));
                } else {
                    let increasing = s.windows(2).all(|w| w[0] < w[1]);
                    let spans = s.first().map_or(false, |&a| a.abs() <= 1e-12)
                        && s.last().map_or(false, |&b| (b - s_length).abs() <= 1e-12 * s_length.max(1.0));
                    if !increasing || !spans {
                        errs.push(format!("{path}.s_values must increase from 0 to s_length"));
                    }
                }
            }
        }
    }
}

/// Final time: fixed, or a decision variable within `[min, max]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSpec {
    /// Fixed final time (s).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed: Option<f64>,
    /// Lower bound on a free final time (s).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    /// Upper bound on a free final time (s).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    /// Starting value for a free final time (s); midpoint by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<f64>,
}

impl TimeSpec {
    /// `(lower, upper, initial)`; equal bounds when fixed.
    pub fn resolve(&self) -> Option<(f64, f64, f64)> {
        match (self.fixed, self.min, self.max) {
            (Some(t), None, None) if self.initial.is_none() => Some((t, t, t)),
            (None, Some(lo), Some(hi)) => Some((lo, hi, self.initial.unwrap_or(0.5 * (lo + hi)))),
            _ => None,
        }
    }
}

/// Feasibility limits on strains and velocities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    /// Minimum translational strain norm (dimensionless).
    pub nu_min: f64,
    /// Maximum translational strain norm (dimensionless).
    pub nu_max: f64,
    /// Maximum bending strain norm (rad per m of rod).
    pub mu_max: f64,
    /// Maximum speed (m/s).
    pub v_max: f64,
    /// Maximum angular speed (rad/s).
    pub omega_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    Sphere,
    Polytope,
}

/// A convex obstacle: sphere (`center`, `radius`) or convex hull of `vertices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleSpec {
    pub kind: ObstacleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 3]>>,
}

impl ObstacleSpec {
    pub fn sphere(center: [f64; 3], radius: f64) -> Self {
        Self { kind: ObstacleKind::Sphere, center: Some(center), radius: Some(radius), vertices: None }
    }

    fn validate(&self, path: &str, errs: &mut Vec<String>) {
        match self.kind {
            ObstacleKind::Sphere => {
                match self.center {
                    Some(c) if c.iter().all(|v| v.is_finite()) => {}
                    Some(_) => errs.push(format!("{path}.center must be finite")),
                    None => errs.push(format!("{path}.center is required for a sphere")),
                }
                match self.radius {
                    Some(r) if r > 0.0 && r.is_finite() => {}
                    Some(r) => errs.push(format!("{path}.radius must be positive, got {r}")),
                    None => errs.push(format!("{path}.radius is required for a sphere")),
                }
                if self.vertices.is_some() {
                    errs.push(format!("{path}.vertices is not used by a sphere"));
                }
            }
            ObstacleKind::Polytope => {
                match &self.vertices {
                    Some(v) if !v.is_empty() && v.iter().flatten().all(|x| x.is_finite()) => {}
                    Some(_) => errs.push(format!("{path}.vertices must be a nonempty list of finite points")),
                    None => errs.push(format!("{path}.vertices is required for a polytope")),
                }
                if self.center.is_some() || self.radius.is_some() {
                    errs.push(format!("{path}: center and radius are not used by a polytope"));
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostKind {
    /// Track the final pose with the two end agents.
    #[default]
    Leader,
    /// Quadrature of a quadratic running cost over the control nets.
    Running,
}

/// Cost selection. Leader targets default to the final formation's end
/// points and attitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostConfig {
    #[serde(default)]
    pub kind: CostKind,
    /// Weight on the final time (1/s).
    #[serde(default)]
    pub time_weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_position: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_attitude: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_position: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_attitude: Option<[f64; 3]>,
    /// Running-cost weight on `|v|^2`.
    #[serde(default)]
    pub velocity_weight: f64,
    /// Running-cost weight on `|omega|^2`.
    #[serde(default)]
    pub angular_velocity_weight: f64,
    /// Running-cost weight on `|h|^2`.
    #[serde(default)]
    pub bending_weight: f64,
}

impl Default for CostConfig {
    fn default() -> Self {
        Self {
            kind: CostKind::Leader,
            time_weight: 0.0,
            start_position: None,
            start_attitude: None,
            end_position: None,
            end_attitude: None,
            velocity_weight: 0.0,
            angular_velocity_weight: 0.0,
            bending_weight: 0.0,
        }
    }
}

fn default_epsilon() -> f64 {
    0.005
}
fn default_depth() -> usize {
    6
}
fn default_smoothing() -> f64 {
    1e-4
}
fn default_agents() -> usize {
    20
}
fn default_samples() -> usize {
    100
}
fn default_margin() -> f64 {
    1e-5
}
fn default_theta_limit() -> f64 {
    1.4
}

/// Full description of a planning problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    /// Polynomial degrees `[m, n]` in `s` and `t`.
    pub order: [usize; 2],
    /// Rod parameter length `s_f` (m).
    pub s_length: f64,
    pub time: TimeSpec,
    pub bounds: Bounds,
    pub initial_formation: FormationSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_formation: Option<FormationSpec>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    /// Clearance margin (m).
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Subdivision depth of the clearance constraint.
    #[serde(default = "default_depth")]
    pub clearance_depth: usize,
    /// Length scale (m) of the soft minimum over clearance patches.
    #[serde(default = "default_smoothing")]
    pub clearance_smoothing: f64,
    #[serde(default)]
    pub cost: CostConfig,
    /// Number of agents sampled from the solution.
    #[serde(default = "default_agents")]
    pub agents: usize,
    /// Number of time samples per agent in exports.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Collocation nodes `[N_s, N_t]`; `[2m+1, 2n+1]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    /// Slack subtracted from every inequality so returned points are strictly feasible.
    #[serde(default = "default_margin")]
    pub inequality_margin: f64,
    /// Box bound on pitch control points (rad), keeping the rate map regular.
    #[serde(default = "default_theta_limit")]
    pub pitch_limit: f64,
    /// Half-width of seeded uniform noise added to the cold start; 0 keeps it exact.
    #[serde(default)]
    pub initial_jitter: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverOptions,
}

impl Scenario {
    /// Collocation grid size.
    pub fn grid_size(&self) -> (usize, usize) {
        let [m, n] = self.order;
        match self.grid {
            Some([a, b]) => (a, b),
            None => (2 * m + 1, 2 * n + 1),
        }
    }

    /// Checks every invariant, reporting all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let [m, n] = self.order;
        if m == 0 || n == 0 {
            errs.push(format!("order must be at least [1, 1], got [{m}, {n}]"));
        }
        if m > crate::bernstein::EXACT_BINOMIAL_MAX || n > crate::bernstein::EXACT_BINOMIAL_MAX {
            errs.push(format!("order [{m}, {n}] exceeds {}", crate::bernstein::EXACT_BINOMIAL_MAX));
        }
        if !(self.s_length > 0.0 && self.s_length.is_finite()) {
            errs.push(format!("s_length must be positive, got {}", self.s_length));
        }
        match self.time.resolve() {
            None => errs.push("time needs either `fixed` or both `min` and `max` (plus optional `initial`)".into()),
            Some((lo, hi, init)) => {
                if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                    errs.push(format!("time bounds must satisfy 0 < min <= max, got [{lo}, {hi}]"));
                } else if !(init >= lo && init <= hi) {
                    errs.push(format!("time.initial {init} lies outside [{lo}, {hi}]"));
                }
            }
        }
        let b = &self.bounds;
        for (name, v) in [
            ("nu_min", b.nu_min),
            ("nu_max", b.nu_max),
            ("mu_max", b.mu_max),
            ("v_max", b.v_max),
            ("omega_max", b.omega_max),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                errs.push(format!("bounds.{name} must be positive, got {v}"));
            }
        }
        if !(b.nu_min < b.nu_max) {
            errs.push(format!("bounds.nu_min ({}) must be less than bounds.nu_max ({})", b.nu_min, b.nu_max));
        }
        self.initial_formation.validate("initial_formation", self.s_length, &mut errs);
        if !self.initial_formation.enforce {
            errs.push("initial_formation.enforce must be true".into());
        }
        if let Some(f) = &self.final_formation {
            f.validate("final_formation", self.s_length, &mut errs);
        }
        for (k, o) in self.obstacles.iter().enumerate() {
            o.validate(&format!("obstacles[{k}]"), &mut errs);
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            errs.push(format!("epsilon must be non-negative, got {}", self.epsilon));
        }
        if self.clearance_depth > crate::geometry::MAX_SUBDIVISION_DEPTH {
            errs.push(format!(
                "clearance_depth {} exceeds {}",
                self.clearance_depth,
                crate::geometry::MAX_SUBDIVISION_DEPTH
            ));
        }
        if !(self.clearance_smoothing > 0.0 && self.clearance_smoothing.is_finite()) {
            errs.push(format!("clearance_smoothing must be positive, got {}", self.clearance_smoothing));
        }
        let c = &self.cost;
        if !(c.time_weight >= 0.0 && c.time_weight.is_finite()) {
            errs.push(format!("cost.time_weight must be non-negative, got {}", c.time_weight));
        }
        match c.kind {
            CostKind::Leader => {
                let targets = [c.start_position, c.start_attitude, c.end_position, c.end_attitude];
                if self.final_formation.is_none() && targets.iter().any(Option::is_none) {
                    errs.push("leader cost needs a final_formation or all four explicit leader targets".into());
                }
                if c.velocity_weight != 0.0 || c.angular_velocity_weight != 0.0 || c.bending_weight != 0.0 {
                    errs.push("running-cost weights are not used by the leader cost".into());
                }
            }
            CostKind::Running => {
                for (name, w) in [
                    ("velocity_weight", c.velocity_weight),
                    ("angular_velocity_weight", c.angular_velocity_weight),
                    ("bending_weight", c.bending_weight),
                ] {
                    if !(w >= 0.0 && w.is_finite()) {
                        errs.push(format!("cost.{name} must be non-negative, got {w}"));
                    }
                }
                let targets = [c.start_position, c.start_attitude, c.end_position, c.end_attitude];
                if targets.iter().any(Option::is_some) {
                    errs.push("leader targets are not used by the running cost".into());
                }
            }
        }
        for v in [c.start_position, c.start_attitude, c.end_position, c.end_attitude].into_iter().flatten() {
            if v.iter().any(|x| !x.is_finite()) {
                errs.push("cost leader targets must be finite".into());
            }
        }
        if self.agents == 0 {
            errs.push("agents must be at least 1".into());
        }
        if self.samples < 2 {
            errs.push(format!("samples must be at least 2, got {}", self.samples));
        }
        let (ns, nt) = self.grid_size();
        if ns < m + 1 || nt < n + 1 {
            errs.push(format!("grid [{ns}, {nt}] is coarser than the control net [{}, {}]", m + 1, n + 1));
        }
        if !(self.inequality_margin >= 0.0 && self.inequality_margin.is_finite()) {
            errs.push(format!("inequality_margin must be non-negative, got {}", self.inequality_margin));
        }
        if !(self.pitch_limit > 0.0 && self.pitch_limit.cos() > crate::cosserat::GIMBAL_LOCK_THRESHOLD) {
            errs.push(format!("pitch_limit must lie in (0, pi/2), got {}", self.pitch_limit));
        }
        if !(self.initial_jitter >= 0.0 && self.initial_jitter.is_finite()) {
            errs.push(format!("initial_jitter must be non-negative, got {}", self.initial_jitter));
        }
        if let Err(Error::Validation(more)) = self.solver.validate() {
            errs.extend(more);
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}
