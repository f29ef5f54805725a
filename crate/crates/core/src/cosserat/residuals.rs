use super::fields::{CollocationGrid, RodFields};
use super::rotation::{euler_rate_map, rotation_from_euler};
use crate::error::Result;
use crate::vec3::{self, Vec3};
use crate::Scalar;

/// Residual rows per collocation node: `r_s - R l`, `r_t - R v`,
/// `E angles_s - h`, `E angles_t - omega`.
pub const RESIDUALS_PER_NODE: usize = 12;

/// Kinematic residuals at every node, node-major (`s` outer, `t` inner).
///
/// Partial derivatives are taken on the control nets and then evaluated.
pub fn kinematic_residuals<T: Scalar>(fields: &RodFields<T>, grid: &CollocationGrid<T>) -> Result<Vec<T>> {
    fields.validate()?;
    let (m, n) = fields.degrees();
    grid.check_degrees(m, n)?;
    let (s_len, t_len) = (fields.s_length(), fields.t_length());
    let us: Vec<T> = grid.s_nodes.iter().map(|&s| s / s_len).collect();
    let ws: Vec<T> = grid.t_nodes.iter().map(|&t| t / t_len).collect();

    let euler = fields.euler()?;
    let sample = |f: &crate::bernstein::BernsteinSurface<T>| f.eval_grid_unit(&us, &ws);
    let r_s = sample(&fields.r.diff_s()?);
    let r_t = sample(&fields.r.diff_t()?);
    let ang = sample(&euler);
    let ang_s = sample(&euler.diff_s()?);
    let ang_t = sample(&euler.diff_t()?);
    let l = sample(&fields.l);
    let h = sample(&fields.h);
    let v = sample(&fields.v);
    let w = sample(&fields.omega);

    let at = |buf: &[T], idx: usize| -> Vec3<T> { [buf[3 * idx], buf[3 * idx + 1], buf[3 * idx + 2]] };
    let mut out = Vec::with_capacity(grid.len() * RESIDUALS_PER_NODE);
    for a in 0..us.len() {
        for b in 0..ws.len() {
            let idx = a * ws.len() + b;
            let angles = at(&ang, idx);
            let rot = rotation_from_euler(angles[0], angles[1], angles[2]);
            let rate = euler_rate_map(
                angles[0],
                angles[1],
                (grid.s_nodes[a].to_f64_lossy(), grid.t_nodes[b].to_f64_lossy()),
            )?;
            let e1 = vec3::sub(at(&r_s, idx), vec3::mat_vec(&rot, at(&l, idx)));
            let e2 = vec3::sub(at(&r_t, idx), vec3::mat_vec(&rot, at(&v, idx)));
            let e3 = vec3::sub(vec3::mat_vec(&rate, at(&ang_s, idx)), at(&h, idx));
            let e4 = vec3::sub(vec3::mat_vec(&rate, at(&ang_t, idx)), at(&w, idx));
            for e in [e1, e2, e3, e4] {
                out.extend_from_slice(&e);
            }
        }
    }
    Ok(out)
}
