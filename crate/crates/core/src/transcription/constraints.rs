use super::formation::TargetCurve;
use super::scenario::{Bounds, FormationSpec, Scenario};
use crate::bernstein::BernsteinSurface;
use crate::cosserat::{kinematic_residuals, CollocationGrid, RodFields};
use crate::error::{shape_err, Result};
use crate::geometry::{smooth_clearance, Obstacle};
use crate::vec3::Vec3;

/// Inequality blocks produced by [`build_bound_constraints`], in order.
pub const BOUND_BLOCKS: [&str; 5] = ["strain_lower", "strain_upper", "bending", "speed", "angular_speed"];

/// Coefficient bounds on the squared norms of `l`, `h`, `v`, `omega`.
///
/// Returns `5 (2m+1)(2n+1)` values `g <= 0`, blockwise in the order of
/// [`BOUND_BLOCKS`]. `margin` is added to every value.
pub fn build_bound_constraints(fields: &RodFields<f64>, bounds: &Bounds, margin: f64) -> Result<Vec<f64>> {
    let l = fields.l.norm_squared()?;
    let h = fields.h.norm_squared()?;
    let v = fields.v.norm_squared()?;
    let w = fields.omega.norm_squared()?;
    let mut out = Vec::with_capacity(5 * l.net().len());
    out.extend(l.net().iter().map(|c| bounds.nu_min * bounds.nu_min - c + margin));
    out.extend(l.net().iter().map(|c| c - bounds.nu_max * bounds.nu_max + margin));
    out.extend(h.net().iter().map(|c| c - bounds.mu_max * bounds.mu_max + margin));
    out.extend(v.net().iter().map(|c| c - bounds.v_max * bounds.v_max + margin));
    out.extend(w.net().iter().map(|c| c - bounds.omega_max * bounds.omega_max + margin));
    Ok(out)
}

/// Kinematic residuals at the collocation nodes (equalities).
pub fn build_dynamics_constraints(fields: &RodFields<f64>, grid: &CollocationGrid<f64>) -> Result<Vec<f64>> {
    kinematic_residuals(fields, grid)
}

/// Formation and pose targets on one time edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTarget {
    pub curve: TargetCurve,
    /// Position control points of the edge, `m + 1` of them.
    pub position: Vec<Vec3<f64>>,
    pub attitude: Vec3<f64>,
    /// Zero velocity and angular velocity on the edge.
    pub rest: bool,
}

impl EdgeTarget {
    pub fn new(curve: TargetCurve, m: usize, attitude: Vec3<f64>, rest: bool) -> Result<Self> {
        let position = curve.edge_coefficients(m)?;
        Ok(Self { curve, position, attitude, rest })
    }

    pub fn from_spec(spec: &FormationSpec, m: usize, s_length: f64) -> Result<Self> {
        Self::new(TargetCurve::from_spec(spec, s_length)?, m, spec.attitude, spec.rest)
    }

    /// Number of equalities this edge contributes.
    pub fn len(&self) -> usize {
        let per_point = if self.rest { 12 } else { 6 };
        per_point * self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }
}

/// Initial (`t = 0`) and optional final (`t = t_f`) edge targets.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConditions {
    pub initial: EdgeTarget,
    pub terminal: Option<EdgeTarget>,
}

impl BoundaryConditions {
    pub fn from_scenario(sc: &Scenario) -> Result<Self> {
        let m = sc.order[0];
        let initial = EdgeTarget::from_spec(&sc.initial_formation, m, sc.s_length)?;
        let terminal = match &sc.final_formation {
            Some(f) if f.enforce => Some(EdgeTarget::from_spec(f, m, sc.s_length)?),
            _ => None,
        };
        Ok(Self { initial, terminal })
    }

    pub fn len(&self) -> usize {
        self.initial.len() + self.terminal.as_ref().map_or(0, EdgeTarget::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(target, j)` pairs: the initial edge at `j = 0`, the final at `j = n`.
    pub(crate) fn edges(&self, n: usize) -> Vec<(&EdgeTarget, usize)> {
        let mut out = vec![(&self.initial, 0)];
        if let Some(t) = &self.terminal {
            out.push((t, n));
        }
        out
    }
}

/// Edge control points minus their targets.
///
/// Per edge: positions (`3 (m+1)`), Euler angles (`3 (m+1)`), then, at
/// rest, velocities and angular velocities (`6 (m+1)`).
pub fn build_boundary_constraints(fields: &RodFields<f64>, bc: &BoundaryConditions) -> Result<Vec<f64>> {
    let (m, n) = fields.degrees();
    let mut out = Vec::with_capacity(bc.len());
    for (target, j) in bc.edges(n) {
        if target.position.len() != m + 1 {
            return shape_err(format!("edge target has {} points for degree {m}", target.position.len()));
        }
        for i in 0..=m {
            let p = fields.r.control(i, j);
            out.extend((0..3).map(|c| p[c] - target.position[i][c]));
        }
        for i in 0..=m {
            let a = [fields.phi.control(i, j)[0], fields.theta.control(i, j)[0], fields.psi.control(i, j)[0]];
            out.extend((0..3).map(|c| a[c] - target.attitude[c]));
        }
        if target.rest {
            for f in [&fields.v, &fields.omega] {
                for i in 0..=m {
                    out.extend_from_slice(f.control(i, j));
                }
            }
        }
    }
    Ok(out)
}

/// Settings of the per-obstacle clearance inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceConstraint {
    pub epsilon: f64,
    /// Subdivision depth of the leaf patches.
    pub depth: usize,
    /// Soft-minimum length scale (m).
    pub smoothing: f64,
    pub margin: f64,
}

/// `epsilon + margin - c` per obstacle, where `c` is the smoothed clearance
/// lower bound, itself never above the plain hull bound at the same depth.
pub fn build_obstacle_constraints(
    r: &BernsteinSurface<f64>,
    obstacles: &[Obstacle<f64>],
    settings: &ClearanceConstraint,
) -> Result<Vec<f64>> {
    obstacles
        .iter()
        .map(|o| {
            let c = smooth_clearance(r, o, settings.depth, settings.smoothing)?;
            Ok(settings.epsilon + settings.margin - c.value)
        })
        .collect()
}
