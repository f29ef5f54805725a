use crate::bernstein::{basis_row, BernsteinSurface};
use crate::cosserat::RodFields;
use crate::error::{domain_err, Result};
use crate::vec3::Vec3;

/// Arclength positions `s_i = i s_f / n_v`, `i = 1..=n_v`, of the agents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSampler {
    pub count: usize,
    pub s_length: f64,
}

impl AgentSampler {
    pub fn new(count: usize, s_length: f64) -> Result<Self> {
        if count == 0 {
            return domain_err("agent count must be at least 1");
        }
        if !(s_length > 0.0) {
            return domain_err(format!("rod length {s_length} must be positive"));
        }
        Ok(Self { count, s_length })
    }

    pub fn positions(&self) -> Vec<f64> {
        (1..=self.count).map(|i| i as f64 * self.s_length / self.count as f64).collect()
    }
}

/// State of one agent at one instant. Velocities are in the body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSample {
    pub t: f64,
    pub position: Vec3<f64>,
    /// Roll, pitch, yaw.
    pub euler: Vec3<f64>,
    pub velocity: Vec3<f64>,
    pub angular_velocity: Vec3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentTrajectory {
    /// 1-based agent index.
    pub index: usize,
    pub s: f64,
    pub samples: Vec<AgentSample>,
}

/// Restricts a surface to `s = const`: degree-`n` coefficients in `t`.
fn column(f: &BernsteinSurface<f64>, b: &[f64]) -> Vec<f64> {
    let (m, n) = f.degrees();
    let dim = f.dim();
    let mut out = vec![0.0; (n + 1) * dim];
    for (i, &bi) in b.iter().enumerate().take(m + 1) {
        for j in 0..=n {
            for (k, &c) in f.control(i, j).iter().enumerate() {
                out[j * dim + k] += bi * c;
            }
        }
    }
    out
}

fn eval_column(coeffs: &[f64], dim: usize, w: f64, scratch: &mut Vec<f64>) -> Vec3<f64> {
    let count = coeffs.len() / dim;
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate().take(dim) {
        scratch.clear();
        scratch.extend(coeffs.iter().skip(k).step_by(dim));
        for level in 1..count {
            for i in 0..count - level {
                scratch[i] = (1.0 - w) * scratch[i] + w * scratch[i + 1];
            }
        }
        *o = scratch[0];
    }
    out
}

/// Uniform time samples over `[0, t_final]`.
pub fn uniform_times(count: usize, t_final: f64) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    (0..count).map(|k| t_final * k as f64 / (count - 1) as f64).collect()
}

/// Samples every agent's pose and velocities at the given times.
///
/// Each agent's fields are first collapsed to curves in `t`, so the work is
/// proportional to `n_v * |t_samples|` and independent of how the surfaces
/// were obtained.
pub fn extract_agents(fields: &RodFields<f64>, count: usize, t_samples: &[f64]) -> Result<Vec<AgentTrajectory>> {
    fields.validate()?;
    let (m, _) = fields.degrees();
    let (s_len, t_len) = (fields.s_length(), fields.t_length());
    if let Some(&t) = t_samples.iter().find(|&&t| !(t >= 0.0 && t <= t_len * (1.0 + 1e-12))) {
        return domain_err(format!("sample time {t} outside [0, {t_len}]"));
    }
    let sampler = AgentSampler::new(count, s_len)?;
    let euler = fields.euler()?;
    let mut scratch = Vec::new();
    Ok(sampler
        .positions()
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            let b = basis_row::<f64>(m, (s / s_len).min(1.0));
            let cols = [column(&fields.r, &b), column(&euler, &b), column(&fields.v, &b), column(&fields.omega, &b)];
            let samples = t_samples
                .iter()
                .map(|&t| {
                    let w = (t / t_len).min(1.0);
                    let mut e = |c: &[f64]| eval_column(c, 3, w, &mut scratch);
                    AgentSample {
                        t,
                        position: e(&cols[0]),
                        euler: e(&cols[1]),
                        velocity: e(&cols[2]),
                        angular_velocity: e(&cols[3]),
                    }
                })
                .collect();
            AgentTrajectory { index: k + 1, s, samples }
        })
        .collect())
}
