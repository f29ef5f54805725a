use super::layout::{Layout, H, OMEGA, PHI, R, V};
use crate::bernstein::{binomial, BernsteinCurve, Edge};
use crate::cosserat::RodFields;
use crate::error::Result;
use crate::vec3::Vec3;

/// Poses the two end agents should reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeaderTargets {
    pub start_position: Vec3<f64>,
    pub start_attitude: Vec3<f64>,
    pub end_position: Vec3<f64>,
    pub end_attitude: Vec3<f64>,
}

/// Weights of the quadratic running cost `l = w_v |v|^2 + w_w |omega|^2 + w_h |h|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunningWeights {
    pub velocity: f64,
    pub angular_velocity: f64,
    pub bending: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostTerm {
    /// Time integral of squared pose errors of the agents at `s = 0` and `s = s_f`.
    Leader(LeaderTargets),
    /// Quadrature-weighted sum of the running cost over control points.
    Running(RunningWeights),
}

/// Objective: one cost term plus `time_weight * t_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostSpec {
    pub term: CostTerm,
    pub time_weight: f64,
}

fn edge_error(edge: &BernsteinCurve<f64>, target: &[f64]) -> Result<f64> {
    let offset = BernsteinCurve::constant(edge.degree(), edge.length(), target)?;
    Ok(edge.sub(&offset)?.norm_squared()?.integrate().iter().sum())
}

/// Evaluates the cost of `fields`, whose time domain is `[0, t_final]`.
pub fn build_cost(spec: &CostSpec, fields: &RodFields<f64>, t_final: f64) -> Result<f64> {
    let fields = fields.with_t_length(t_final)?;
    let value = match &spec.term {
        CostTerm::Leader(tg) => {
            let euler = fields.euler()?;
            edge_error(&fields.r.edge(Edge::SStart), &tg.start_position)?
                + edge_error(&euler.edge(Edge::SStart), &tg.start_attitude)?
                + edge_error(&fields.r.edge(Edge::SEnd), &tg.end_position)?
                + edge_error(&euler.edge(Edge::SEnd), &tg.end_attitude)?
        }
        CostTerm::Running(w) => {
            let (m, n) = fields.degrees();
            let weight = fields.s_length() / (m + 1) as f64 * t_final / (n + 1) as f64;
            let sum_sq = |net: &[f64]| net.iter().map(|v| v * v).sum::<f64>();
            weight
                * (w.velocity * sum_sq(fields.v.net())
                    + w.angular_velocity * sum_sq(fields.omega.net())
                    + w.bending * sum_sq(fields.h.net()))
        }
    };
    Ok(value + spec.time_weight * t_final)
}

/// Cost and gradient evaluated directly on decision vectors.
#[derive(Debug, Clone)]
pub(crate) struct CostEvaluator {
    spec: CostSpec,
    layout: Layout,
    s_length: f64,
    /// `G[q][p] = C(n,q) C(n,p) / (C(2n,q+p) (2n+1))`: `int_0^1 B_q B_p`.
    gram: Vec<f64>,
}

impl CostEvaluator {
    pub fn new(spec: CostSpec, layout: Layout, s_length: f64) -> Self {
        let n = layout.n;
        let mut gram = vec![0.0; (n + 1) * (n + 1)];
        for q in 0..=n {
            for p in 0..=n {
                gram[q * (n + 1) + p] = binomial::<f64>(n, q) * binomial::<f64>(n, p)
                    / (binomial::<f64>(2 * n, q + p) * (2 * n + 1) as f64);
            }
        }
        Self { spec, layout, s_length, gram }
    }

    fn leader_edges(&self, tg: &LeaderTargets) -> [(usize, usize, Vec3<f64>); 4] {
        let m = self.layout.m;
        [(R, 0, tg.start_position), (PHI, 0, tg.start_attitude), (R, m, tg.end_position), (PHI, m, tg.end_attitude)]
    }

    /// Returns the cost; adds its gradient into `grad` when given.
    pub fn eval(&self, x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let lay = self.layout;
        let t_final = x[lay.t_final_index()];
        let n = lay.n;
        let mut value = 0.0;
        let mut grad = grad;
        match &self.spec.term {
            CostTerm::Leader(tg) => {
                let mut quad_sum = 0.0;
                for (first, i, target) in self.leader_edges(tg) {
                    for c in 0..3 {
                        let d: Vec<f64> = (0..=n).map(|j| x[lay.index(first + c, i, j)] - target[c]).collect();
                        let gd: Vec<f64> =
                            (0..=n).map(|q| (0..=n).map(|p| self.gram[q * (n + 1) + p] * d[p]).sum()).collect();
                        quad_sum += d.iter().zip(&gd).map(|(a, b)| a * b).sum::<f64>();
                        if let Some(g) = grad.as_deref_mut() {
                            for j in 0..=n {
                                g[lay.index(first + c, i, j)] += 2.0 * t_final * gd[j];
                            }
                        }
                    }
                }
                value += t_final * quad_sum;
                if let Some(g) = grad.as_deref_mut() {
                    g[lay.t_final_index()] += quad_sum;
                }
            }
            CostTerm::Running(w) => {
                let base = self.s_length / (lay.m + 1) as f64 / (n + 1) as f64;
                let mut sum = 0.0;
                for (first, weight) in [(V, w.velocity), (OMEGA, w.angular_velocity), (H, w.bending)] {
                    if weight == 0.0 {
                        continue;
                    }
                    for c in 0..3 {
                        let net = lay.net(x, first + c);
                        sum += weight * net.iter().map(|v| v * v).sum::<f64>();
                        if let Some(g) = grad.as_deref_mut() {
                            let gn = lay.net_mut(g, first + c);
                            for (gv, v) in gn.iter_mut().zip(net) {
                                *gv += 2.0 * base * t_final * weight * v;
                            }
                        }
                    }
                }
                value += base * t_final * sum;
                if let Some(g) = grad.as_deref_mut() {
                    g[lay.t_final_index()] += base * sum;
                }
            }
        }
        if let Some(g) = grad {
            g[lay.t_final_index()] += self.spec.time_weight;
        }
        value + self.spec.time_weight * t_final
    }
}
