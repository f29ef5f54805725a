use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::constraints::{
    build_bound_constraints, build_boundary_constraints, build_dynamics_constraints, build_obstacle_constraints,
    BoundaryConditions, ClearanceConstraint, BOUND_BLOCKS,
};
use super::cost::{CostEvaluator, CostSpec, CostTerm, LeaderTargets, RunningWeights};
use super::derivatives::{add_clearance_gradient, BoundJacobian, DynamicsJacobian};
use super::formation::TargetCurve;
use super::layout::{pack, unpack, Layout, OMEGA, PHI, R, THETA, V};
use super::scenario::{Bounds, CostKind, ObstacleKind, ObstacleSpec, Scenario};
use crate::cosserat::{CollocationGrid, RodFields, RESIDUALS_PER_NODE};
use crate::error::{Error, Result};
use crate::geometry::{smooth_clearance, ConvexPolytope, Obstacle, SphereObstacle};
use crate::solver::{BlockKind, ConstraintBlock, Nlp};

impl ObstacleSpec {
    pub fn to_obstacle(&self) -> Result<Obstacle<f64>> {
        let missing = |k: &str| Error::Validation(vec![format!("obstacle is missing `{k}`")]);
        match self.kind {
            ObstacleKind::Sphere => Ok(Obstacle::Sphere(SphereObstacle::new(
                self.center.ok_or_else(|| missing("center"))?,
                self.radius.ok_or_else(|| missing("radius"))?,
            )?)),
            ObstacleKind::Polytope => Ok(Obstacle::Polytope(ConvexPolytope::new(
                self.vertices.clone().ok_or_else(|| missing("vertices"))?,
            )?)),
        }
    }
}

impl Scenario {
    /// Cost terms, with leader targets filled in from the final formation.
    pub fn cost_spec(&self) -> Result<CostSpec> {
        let c = &self.cost;
        let term = match c.kind {
            CostKind::Leader => {
                let fin = match &self.final_formation {
                    Some(f) => Some((TargetCurve::from_spec(f, self.s_length)?, f.attitude)),
                    None => None,
                };
                let pick = |explicit: Option<[f64; 3]>, derived: Option<[f64; 3]>| {
                    explicit.or(derived).ok_or_else(|| Error::Validation(vec!["leader target is undefined".into()]))
                };
                LeaderTargets {
                    start_position: pick(c.start_position, fin.as_ref().map(|(cv, _)| cv.point(0.0)))?,
                    start_attitude: pick(c.start_attitude, fin.as_ref().map(|(_, a)| *a))?,
                    end_position: pick(c.end_position, fin.as_ref().map(|(cv, _)| cv.point(self.s_length)))?,
                    end_attitude: pick(c.end_attitude, fin.as_ref().map(|(_, a)| *a))?,
                }
                .into()
            }
            CostKind::Running => CostTerm::Running(RunningWeights {
                velocity: c.velocity_weight,
                angular_velocity: c.angular_velocity_weight,
                bending: c.bending_weight,
            }),
        };
        Ok(CostSpec { term, time_weight: c.time_weight })
    }

    pub fn obstacle_list(&self) -> Result<Vec<Obstacle<f64>>> {
        self.obstacles.iter().map(ObstacleSpec::to_obstacle).collect()
    }
}

impl From<LeaderTargets> for CostTerm {
    fn from(t: LeaderTargets) -> Self {
        CostTerm::Leader(t)
    }
}

/// The transcribed planning problem over packed control nets.
#[derive(Debug, Clone)]
pub struct NlpProblem {
    layout: Layout,
    s_length: f64,
    grid_size: (usize, usize),
    bounds: Bounds,
    margin: f64,
    boundary: BoundaryConditions,
    boundary_index: Vec<usize>,
    cost_spec: CostSpec,
    cost: CostEvaluator,
    obstacles: Vec<Obstacle<f64>>,
    clearance: ClearanceConstraint,
    x0: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    dynamics: DynamicsJacobian,
    bound_jac: BoundJacobian,
}

/// Wires the cost and all constraint builders into one problem.
///
/// The initial point is a static point surface at the midpoint of the
/// initial formation, with zero angles, strains and velocities, plus the
/// optional seeded jitter.
pub fn assemble(sc: &Scenario) -> Result<NlpProblem> {
    sc.validate()?;
    let [m, n] = sc.order;
    let layout = Layout::new(m, n);
    let (t_lo, t_hi, t_init) = sc.time.resolve().expect("validated time spec");
    let boundary = BoundaryConditions::from_scenario(sc)?;
    let cost_spec = sc.cost_spec()?;
    let grid_size = sc.grid_size();

    let mut boundary_index = Vec::with_capacity(boundary.len());
    for (target, j) in boundary.edges(n) {
        let mut firsts = vec![R, PHI];
        if target.rest {
            firsts.extend([V, OMEGA]);
        }
        for first in firsts {
            for i in 0..=m {
                boundary_index.extend((0..3).map(|c| layout.index(first + c, i, j)));
            }
        }
    }

    let mid = TargetCurve::from_spec(&sc.initial_formation, sc.s_length)?.point(0.5 * sc.s_length);
    let mut x0 = vec![0.0; layout.len()];
    for c in 0..3 {
        layout.net_mut(&mut x0, R + c).fill(mid[c]);
    }
    x0[layout.t_final_index()] = t_init;

    let mut lower = vec![f64::NEG_INFINITY; layout.len()];
    let mut upper = vec![f64::INFINITY; layout.len()];
    layout.net_mut(&mut lower, THETA).fill(-sc.pitch_limit);
    layout.net_mut(&mut upper, THETA).fill(sc.pitch_limit);
    lower[layout.t_final_index()] = t_lo;
    upper[layout.t_final_index()] = t_hi;

    let mut problem = NlpProblem {
        layout,
        s_length: sc.s_length,
        grid_size,
        bounds: sc.bounds,
        margin: sc.inequality_margin,
        boundary,
        boundary_index,
        cost: CostEvaluator::new(cost_spec, layout, sc.s_length),
        cost_spec,
        obstacles: sc.obstacle_list()?,
        clearance: ClearanceConstraint {
            epsilon: sc.epsilon,
            depth: sc.clearance_depth,
            smoothing: sc.clearance_smoothing,
            margin: sc.inequality_margin,
        },
        x0,
        lower,
        upper,
        dynamics: DynamicsJacobian::new(layout, sc.s_length, grid_size.0, grid_size.1),
        bound_jac: BoundJacobian::new(layout),
    };
    if sc.initial_jitter > 0.0 {
        problem.perturb_initial_point(sc.seed, sc.initial_jitter);
    }
    Ok(problem)
}

impl NlpProblem {
    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn s_length(&self) -> f64 {
        self.s_length
    }

    pub fn cost_spec(&self) -> &CostSpec {
        &self.cost_spec
    }

    pub fn boundary(&self) -> &BoundaryConditions {
        &self.boundary
    }

    pub fn obstacles(&self) -> &[Obstacle<f64>] {
        &self.obstacles
    }

    pub fn epsilon(&self) -> f64 {
        self.clearance.epsilon
    }

    pub fn clearance_depth(&self) -> usize {
        self.clearance.depth
    }

    pub fn unpack(&self, x: &[f64]) -> Result<(RodFields<f64>, f64)> {
        unpack(x, self.layout, self.s_length)
    }

    pub fn pack(&self, fields: &RodFields<f64>, t_final: f64) -> Result<Vec<f64>> {
        pack(fields, t_final)
    }

    /// Collocation grid for a given final time.
    pub fn grid(&self, t_final: f64) -> Result<CollocationGrid<f64>> {
        CollocationGrid::uniform(self.grid_size.0, self.grid_size.1, self.s_length, t_final)
    }

    pub fn num_dynamics(&self) -> usize {
        RESIDUALS_PER_NODE * self.grid_size.0 * self.grid_size.1
    }

    /// Replaces the starting point (clamped into the variable box).
    pub fn set_initial_point(&mut self, x: Vec<f64>) -> Result<()> {
        if x.len() != self.layout.len() {
            return Err(Error::Shape(format!("initial point has {} entries, expected {}", x.len(), self.layout.len())));
        }
        self.x0 = x.iter().zip(self.lower.iter().zip(&self.upper)).map(|(v, (l, h))| v.max(*l).min(*h)).collect();
        Ok(())
    }

    /// Adds seeded uniform noise of half-width `scale` to every control point.
    pub fn perturb_initial_point(&mut self, seed: u64, scale: f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tf = self.layout.t_final_index();
        for (k, v) in self.x0.iter_mut().enumerate() {
            if k != tf {
                *v = (*v + rng.gen_range(-scale..=scale)).max(self.lower[k]).min(self.upper[k]);
            }
        }
    }

    fn fields(&self, x: &[f64]) -> Result<(RodFields<f64>, f64)> {
        let (fields, t_final) = self.unpack(x)?;
        if !(t_final > 0.0) {
            return Err(Error::Domain(format!("final time {t_final} must be positive")));
        }
        Ok((fields, t_final))
    }
}

impl Nlp for NlpProblem {
    fn dimension(&self) -> usize {
        self.layout.len()
    }

    fn num_equalities(&self) -> usize {
        self.num_dynamics() + self.boundary.len()
    }

    fn num_inequalities(&self) -> usize {
        BOUND_BLOCKS.len() * self.bound_jac.block_len() + self.obstacles.len()
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (self.lower.clone(), self.upper.clone())
    }

    fn initial_point(&self) -> Vec<f64> {
        self.x0.clone()
    }

    fn objective(&self, x: &[f64]) -> Result<f64> {
        Ok(self.cost.eval(x, None))
    }

    fn equalities(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let (fields, t_final) = self.fields(x)?;
        let dynamics = build_dynamics_constraints(&fields, &self.grid(t_final)?)?;
        let boundary = build_boundary_constraints(&fields, &self.boundary)?;
        out[..dynamics.len()].copy_from_slice(&dynamics);
        out[dynamics.len()..].copy_from_slice(&boundary);
        Ok(())
    }

    fn inequalities(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let (fields, _) = self.fields(x)?;
        let bound = build_bound_constraints(&fields, &self.bounds, self.margin)?;
        let obstacle = build_obstacle_constraints(&fields.r, &self.obstacles, &self.clearance)?;
        out[..bound.len()].copy_from_slice(&bound);
        out[bound.len()..].copy_from_slice(&obstacle);
        Ok(())
    }

    fn objective_gradient(&self, x: &[f64], grad: &mut [f64]) -> Result<bool> {
        self.cost.eval(x, Some(grad));
        Ok(true)
    }

    fn equality_jt_product(&self, x: &[f64], y: &[f64], out: &mut [f64]) -> Result<bool> {
        let nd = self.num_dynamics();
        if y[..nd].iter().any(|v| *v != 0.0) {
            self.dynamics.add_jt_product(x, &y[..nd], out)?;
        }
        for (&idx, &w) in self.boundary_index.iter().zip(&y[nd..]) {
            out[idx] += w;
        }
        Ok(true)
    }

    fn inequality_jt_product(&self, x: &[f64], y: &[f64], out: &mut [f64]) -> Result<bool> {
        let nb = BOUND_BLOCKS.len() * self.bound_jac.block_len();
        self.bound_jac.add_jt_product(x, &y[..nb], out);
        if y[nb..].iter().any(|v| *v != 0.0) {
            let (fields, _) = self.fields(x)?;
            for (obs, &w) in self.obstacles.iter().zip(&y[nb..]) {
                if w == 0.0 {
                    continue;
                }
                let c = smooth_clearance(&fields.r, obs, self.clearance.depth, self.clearance.smoothing)?;
                for leaf in &c.leaves {
                    add_clearance_gradient(self.layout, x, obs, &leaf.witness, -w * leaf.weight, out)?;
                }
            }
        }
        Ok(true)
    }

    fn equality_jacobian(&self, x: &[f64], out: &mut [f64]) -> Result<bool> {
        self.fields(x)?;
        let dim = self.layout.len();
        let nd = self.num_dynamics();
        let (dyn_rows, bc_rows) = out.split_at_mut(nd * dim);
        self.dynamics.dense(x, dyn_rows)?;
        bc_rows.fill(0.0);
        for (row, &idx) in bc_rows.chunks_mut(dim).zip(&self.boundary_index) {
            row[idx] = 1.0;
        }
        Ok(true)
    }

    fn inequality_jacobian(&self, x: &[f64], out: &mut [f64]) -> Result<bool> {
        let (fields, _) = self.fields(x)?;
        let dim = self.layout.len();
        let nb = BOUND_BLOCKS.len() * self.bound_jac.block_len();
        let (bound_rows, obstacle_rows) = out.split_at_mut(nb * dim);
        self.bound_jac.dense(x, bound_rows);
        for (row, obs) in obstacle_rows.chunks_mut(dim).zip(&self.obstacles) {
            row.fill(0.0);
            let c = smooth_clearance(&fields.r, obs, self.clearance.depth, self.clearance.smoothing)?;
            for leaf in &c.leaves {
                add_clearance_gradient(self.layout, x, obs, &leaf.witness, -leaf.weight, row)?;
            }
        }
        Ok(true)
    }

    fn constraint_blocks(&self) -> Vec<ConstraintBlock> {
        let mut blocks = vec![ConstraintBlock {
            name: "dynamics".into(),
            kind: BlockKind::Equality,
            start: 0,
            len: self.num_dynamics(),
        }];
        let mut start = self.num_dynamics();
        blocks.push(ConstraintBlock {
            name: "initial_formation".into(),
            kind: BlockKind::Equality,
            start,
            len: self.boundary.initial.len(),
        });
        start += self.boundary.initial.len();
        if let Some(t) = &self.boundary.terminal {
            blocks.push(ConstraintBlock { name: "final_formation".into(), kind: BlockKind::Equality, start, len: t.len() });
        }
        let len = self.bound_jac.block_len();
        for (k, name) in BOUND_BLOCKS.iter().enumerate() {
            blocks.push(ConstraintBlock { name: (*name).into(), kind: BlockKind::Inequality, start: k * len, len });
        }
        let base = BOUND_BLOCKS.len() * len;
        for k in 0..self.obstacles.len() {
            blocks.push(ConstraintBlock {
                name: format!("obstacle_{k}"),
                kind: BlockKind::Inequality,
                start: base + k,
                len: 1,
            });
        }
        blocks
    }
}
