//! Analytic Jacobian-transpose products for the transcribed constraints.

use rayon::prelude::*;

use super::layout::{Layout, H, L, OMEGA, PHI, R, V};
use crate::bernstein::{basis_row, binomial, restriction_matrix};
use crate::cosserat::{euler_rate_map, euler_rate_map_partials, rotation_from_euler, rotation_partials, RESIDUALS_PER_NODE};
use crate::error::Result;
use crate::geometry::{Obstacle, Witness};
use crate::vec3::{self, Vec3};

fn basis_derivative_row(k: usize, u: f64) -> Vec<f64> {
    if k == 0 {
        return vec![0.0];
    }
    let lower = basis_row::<f64>(k - 1, u);
    (0..=k)
        .map(|i| {
            let left = if i >= 1 { lower[i - 1] } else { 0.0 };
            let right = if i < k { lower[i] } else { 0.0 };
            k as f64 * (left - right)
        })
        .collect()
}

/// Basis values and unit-parameter derivatives at collocation nodes.
#[derive(Debug, Clone)]
struct NodeBasis {
    count: usize,
    degree: usize,
    /// `values[a * (degree+1) + i] = B_i(u_a)`.
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl NodeBasis {
    fn new(degree: usize, count: usize) -> Self {
        let mut values = Vec::with_capacity(count * (degree + 1));
        let mut derivs = Vec::with_capacity(count * (degree + 1));
        for a in 0..count {
            let u = a as f64 / (count - 1) as f64;
            values.extend(basis_row::<f64>(degree, u));
            derivs.extend(basis_derivative_row(degree, u));
        }
        Self { count, degree, values, derivs }
    }
}

#[derive(Clone, Copy)]
enum Part {
    Value,
    Derivative,
}

/// Kinematic-residual Jacobian products on a uniform collocation grid.
#[derive(Debug, Clone)]
pub(crate) struct DynamicsJacobian {
    layout: Layout,
    s_length: f64,
    su: NodeBasis,
    tw: NodeBasis,
}

impl DynamicsJacobian {
    pub fn new(layout: Layout, s_length: f64, ns: usize, nt: usize) -> Self {
        Self { layout, s_length, su: NodeBasis::new(layout.m, ns), tw: NodeBasis::new(layout.n, nt) }
    }

    fn tables(&self, s_part: Part, t_part: Part) -> (&[f64], &[f64]) {
        let bs = match s_part {
            Part::Value => &self.su.values,
            Part::Derivative => &self.su.derivs,
        };
        let bt = match t_part {
            Part::Value => &self.tw.values,
            Part::Derivative => &self.tw.derivs,
        };
        (bs, bt)
    }

    /// Node values of one scalar net (or its unit-parameter derivative).
    fn forward(&self, net: &[f64], s_part: Part, t_part: Part) -> Vec<f64> {
        let (bs, bt) = self.tables(s_part, t_part);
        let (m1, n1) = (self.su.degree + 1, self.tw.degree + 1);
        let (na, nb) = (self.su.count, self.tw.count);
        let mut tmp = vec![0.0; na * n1];
        for a in 0..na {
            for i in 0..m1 {
                let w = bs[a * m1 + i];
                if w == 0.0 {
                    continue;
                }
                for j in 0..n1 {
                    tmp[a * n1 + j] += w * net[i * n1 + j];
                }
            }
        }
        let mut out = vec![0.0; na * nb];
        for a in 0..na {
            for b in 0..nb {
                out[a * nb + b] = (0..n1).map(|j| tmp[a * n1 + j] * bt[b * n1 + j]).sum();
            }
        }
        out
    }

    /// Adds `scale * B_s^T G B_t` into a scalar net gradient.
    fn backward(&self, g: &[f64], s_part: Part, t_part: Part, scale: f64, out: &mut [f64]) {
        let (bs, bt) = self.tables(s_part, t_part);
        let (m1, n1) = (self.su.degree + 1, self.tw.degree + 1);
        let (na, nb) = (self.su.count, self.tw.count);
        let mut tmp = vec![0.0; na * n1];
        for a in 0..na {
            for b in 0..nb {
                let v = g[a * nb + b];
                if v == 0.0 {
                    continue;
                }
                for j in 0..n1 {
                    tmp[a * n1 + j] += v * bt[b * n1 + j];
                }
            }
        }
        for i in 0..m1 {
            for j in 0..n1 {
                let acc: f64 = (0..na).map(|a| bs[a * m1 + i] * tmp[a * n1 + j]).sum();
                out[i * n1 + j] += scale * acc;
            }
        }
    }

    /// Adds `J^T y` of the kinematic residuals into `out`.
    pub fn add_jt_product(&self, x: &[f64], y: &[f64], out: &mut [f64]) -> Result<()> {
        use Part::{Derivative as D, Value as Vl};
        let lay = self.layout;
        let t_final = x[lay.t_final_index()];
        let (sf, tf) = (self.s_length, t_final);
        let (na, nb) = (self.su.count, self.tw.count);
        let nodes = na * nb;
        let fwd = |net: usize, sp: Part, tp: Part| self.forward(lay.net(x, net), sp, tp);
        let vec_fwd = |first: usize, sp: Part, tp: Part| [fwd(first, sp, tp), fwd(first + 1, sp, tp), fwd(first + 2, sp, tp)];

        let r_t = vec_fwd(R, Vl, D);
        let ang = vec_fwd(PHI, Vl, Vl);
        let ang_s = vec_fwd(PHI, D, Vl);
        let ang_t = vec_fwd(PHI, Vl, D);
        let l = vec_fwd(L, Vl, Vl);
        let v = vec_fwd(V, Vl, Vl);

        let zeros = || [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]];
        let (mut g_rs, mut g_rt, mut g_l, mut g_v) = (zeros(), zeros(), zeros(), zeros());
        let (mut g_h, mut g_w, mut g_ang, mut g_angs, mut g_angt) = (zeros(), zeros(), zeros(), zeros(), zeros());
        let mut g_tf = 0.0;
        let at = |f: &[Vec<f64>; 3], k: usize| -> Vec3<f64> { [f[0][k], f[1][k], f[2][k]] };

        for a in 0..na {
            for b in 0..nb {
                let k = a * nb + b;
                let base = k * RESIDUALS_PER_NODE;
                let yv = |o: usize| -> Vec3<f64> { [y[base + o], y[base + o + 1], y[base + o + 2]] };
                let (y1, y2, y3, y4) = (yv(0), yv(3), yv(6), yv(9));
                let an = at(&ang, k);
                let rot = rotation_from_euler(an[0], an[1], an[2]);
                let d_rot = rotation_partials(an[0], an[1], an[2]);
                let s_coord = sf * a as f64 / (na - 1) as f64;
                let t_coord = tf * b as f64 / (nb - 1) as f64;
                let rate = euler_rate_map(an[0], an[1], (s_coord, t_coord))?;
                let d_rate = euler_rate_map_partials(an[0], an[1]);
                let (lk, vk) = (at(&l, k), at(&v, k));
                let angs_k = vec3::scale(at(&ang_s, k), 1.0 / sf);
                let angt_k = vec3::scale(at(&ang_t, k), 1.0 / tf);
                let rt_k = vec3::scale(at(&r_t, k), 1.0 / tf);

                let gl = vec3::scale(vec3::mat_t_vec(&rot, y1), -1.0);
                let gv = vec3::scale(vec3::mat_t_vec(&rot, y2), -1.0);
                let gas = vec3::mat_t_vec(&rate, y3);
                let gat = vec3::mat_t_vec(&rate, y4);
                let mut gang = [0.0; 3];
                for (p, dr) in d_rot.iter().enumerate() {
                    gang[p] = -vec3::dot(y1, vec3::mat_vec(dr, lk)) - vec3::dot(y2, vec3::mat_vec(dr, vk));
                }
                for (p, de) in d_rate.iter().enumerate() {
                    gang[p] += vec3::dot(y3, vec3::mat_vec(de, angs_k)) + vec3::dot(y4, vec3::mat_vec(de, angt_k));
                }
                g_tf -= (vec3::dot(y2, rt_k) + vec3::dot(y4, vec3::mat_vec(&rate, angt_k))) / tf;
                for c in 0..3 {
                    g_rs[c][k] = y1[c];
                    g_rt[c][k] = y2[c];
                    g_l[c][k] = gl[c];
                    g_v[c][k] = gv[c];
                    g_h[c][k] = -y3[c];
                    g_w[c][k] = -y4[c];
                    g_ang[c][k] = gang[c];
                    g_angs[c][k] = gas[c];
                    g_angt[c][k] = gat[c];
                }
            }
        }

        for c in 0..3 {
            self.backward(&g_rs[c], D, Vl, 1.0 / sf, lay.net_mut(out, R + c));
            self.backward(&g_rt[c], Vl, D, 1.0 / tf, lay.net_mut(out, R + c));
            self.backward(&g_ang[c], Vl, Vl, 1.0, lay.net_mut(out, PHI + c));
            self.backward(&g_angs[c], D, Vl, 1.0 / sf, lay.net_mut(out, PHI + c));
            self.backward(&g_angt[c], Vl, D, 1.0 / tf, lay.net_mut(out, PHI + c));
            self.backward(&g_l[c], Vl, Vl, 1.0, lay.net_mut(out, L + c));
            self.backward(&g_h[c], Vl, Vl, 1.0, lay.net_mut(out, H + c));
            self.backward(&g_v[c], Vl, Vl, 1.0, lay.net_mut(out, V + c));
            self.backward(&g_w[c], Vl, Vl, 1.0, lay.net_mut(out, OMEGA + c));
        }
        out[lay.t_final_index()] += g_tf;
        Ok(())
    }

    /// Writes the dense residual Jacobian into `out`, one row of length
    /// `layout.len()` per residual. Rows are overwritten.
    pub fn dense(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        use Part::{Derivative as D, Value as Vl};
        let lay = self.layout;
        let dim = lay.len();
        let tfi = lay.t_final_index();
        let (sf, tf) = (self.s_length, x[tfi]);
        let (na, nb) = (self.su.count, self.tw.count);
        let (m1, n1) = (lay.m + 1, lay.n + 1);
        let fwd = |net: usize, sp: Part, tp: Part| self.forward(lay.net(x, net), sp, tp);
        let vec_fwd = |first: usize, sp: Part, tp: Part| [fwd(first, sp, tp), fwd(first + 1, sp, tp), fwd(first + 2, sp, tp)];
        let r_t = vec_fwd(R, Vl, D);
        let ang = vec_fwd(PHI, Vl, Vl);
        let ang_s = vec_fwd(PHI, D, Vl);
        let ang_t = vec_fwd(PHI, Vl, D);
        let l = vec_fwd(L, Vl, Vl);
        let v = vec_fwd(V, Vl, Vl);
        let at = |f: &[Vec<f64>; 3], k: usize| -> Vec3<f64> { [f[0][k], f[1][k], f[2][k]] };

        out.par_chunks_mut(RESIDUALS_PER_NODE * dim).enumerate().try_for_each(|(k, rows)| -> Result<()> {
            rows.fill(0.0);
            let (a, b) = (k / nb, k % nb);
            let an = at(&ang, k);
            let rot = rotation_from_euler(an[0], an[1], an[2]);
            let d_rot = rotation_partials(an[0], an[1], an[2]);
            let s_coord = sf * a as f64 / (na - 1) as f64;
            let t_coord = tf * b as f64 / (nb - 1) as f64;
            let rate = euler_rate_map(an[0], an[1], (s_coord, t_coord))?;
            let d_rate = euler_rate_map_partials(an[0], an[1]);
            let (lk, vk) = (at(&l, k), at(&v, k));
            let angs_k = vec3::scale(at(&ang_s, k), 1.0 / sf);
            let angt_k = vec3::scale(at(&ang_t, k), 1.0 / tf);
            let rt_k = vec3::scale(at(&r_t, k), 1.0 / tf);

            let bu = &self.su.values[a * m1..(a + 1) * m1];
            let du = &self.su.derivs[a * m1..(a + 1) * m1];
            let bw = &self.tw.values[b * n1..(b + 1) * n1];
            let dw = &self.tw.derivs[b * n1..(b + 1) * n1];
            let mut wv = vec![0.0; m1 * n1];
            let mut ws = vec![0.0; m1 * n1];
            let mut wt = vec![0.0; m1 * n1];
            for i in 0..m1 {
                for j in 0..n1 {
                    wv[i * n1 + j] = bu[i] * bw[j];
                    ws[i * n1 + j] = du[i] * bw[j] / sf;
                    wt[i * n1 + j] = bu[i] * dw[j] / tf;
                }
            }
            let add = |row: &mut [f64], net: usize, w: &[f64], coef: f64| {
                if coef == 0.0 {
                    return;
                }
                let start = net * m1 * n1;
                for (o, wi) in row[start..start + m1 * n1].iter_mut().zip(w) {
                    *o += coef * wi;
                }
            };
            let drl: Vec<Vec3<f64>> = d_rot.iter().map(|dr| vec3::mat_vec(dr, lk)).collect();
            let drv: Vec<Vec3<f64>> = d_rot.iter().map(|dr| vec3::mat_vec(dr, vk)).collect();
            let des: Vec<Vec3<f64>> = d_rate.iter().map(|de| vec3::mat_vec(de, angs_k)).collect();
            let det: Vec<Vec3<f64>> = d_rate.iter().map(|de| vec3::mat_vec(de, angt_k)).collect();
            let e_angt = vec3::mat_vec(&rate, angt_k);
            for c in 0..3 {
                let row = &mut rows[c * dim..(c + 1) * dim];
                add(row, R + c, &ws, 1.0);
                for d in 0..3 {
                    add(row, L + d, &wv, -rot[c][d]);
                    add(row, PHI + d, &wv, -drl[d][c]);
                }
                let row = &mut rows[(3 + c) * dim..(4 + c) * dim];
                add(row, R + c, &wt, 1.0);
                for d in 0..3 {
                    add(row, V + d, &wv, -rot[c][d]);
                    add(row, PHI + d, &wv, -drv[d][c]);
                }
                row[tfi] -= rt_k[c] / tf;
                let row = &mut rows[(6 + c) * dim..(7 + c) * dim];
                add(row, H + c, &wv, -1.0);
                for d in 0..3 {
                    add(row, PHI + d, &ws, rate[c][d]);
                }
                for (d, e) in des.iter().enumerate() {
                    add(row, PHI + d, &wv, e[c]);
                }
                let row = &mut rows[(9 + c) * dim..(10 + c) * dim];
                add(row, OMEGA + c, &wv, -1.0);
                for d in 0..3 {
                    add(row, PHI + d, &wt, rate[c][d]);
                }
                for (d, e) in det.iter().enumerate() {
                    add(row, PHI + d, &wv, e[c]);
                }
                row[tfi] -= e_angt[c] / tf;
            }
            Ok(())
        })
    }
}

/// Weights of the squared-norm coefficient map: `W[i][i'] = C(k,i) C(k,i') / C(2k, i+i')`.
fn product_weights(k: usize) -> Vec<f64> {
    let mut w = vec![0.0; (k + 1) * (k + 1)];
    for i in 0..=k {
        for i2 in 0..=k {
            w[i * (k + 1) + i2] = binomial::<f64>(k, i) * binomial::<f64>(k, i2) / binomial::<f64>(2 * k, i + i2);
        }
    }
    w
}

/// Jacobian-transpose products of the coefficient-bound inequalities.
#[derive(Debug, Clone)]
pub(crate) struct BoundJacobian {
    layout: Layout,
    ws: Vec<f64>,
    wt: Vec<f64>,
}

impl BoundJacobian {
    pub fn new(layout: Layout) -> Self {
        Self { layout, ws: product_weights(layout.m), wt: product_weights(layout.n) }
    }

    pub fn block_len(&self) -> usize {
        (2 * self.layout.m + 1) * (2 * self.layout.n + 1)
    }

    /// Adds `sum_pq y_pq d|F|^2_pq / dF` into the gradient of field `first`.
    fn add_field(&self, x: &[f64], first: usize, y: &[f64], sign: f64, out: &mut [f64]) {
        let (m, n) = (self.layout.m, self.layout.n);
        let cols = 2 * n + 1;
        for c in 0..3 {
            let f = self.layout.net(x, first + c).to_vec();
            let g = self.layout.net_mut(out, first + c);
            for i in 0..=m {
                for j in 0..=n {
                    let mut acc = 0.0;
                    for i2 in 0..=m {
                        let wi = self.ws[i * (m + 1) + i2];
                        let row = (i + i2) * cols;
                        for j2 in 0..=n {
                            acc += wi * self.wt[j * (n + 1) + j2] * y[row + j + j2] * f[i2 * (n + 1) + j2];
                        }
                    }
                    g[i * (n + 1) + j] += sign * 2.0 * acc;
                }
            }
        }
    }

    /// Writes the dense Jacobian of the five bound blocks, rows of length
    /// `layout.len()`. Rows are overwritten.
    pub fn dense(&self, x: &[f64], out: &mut [f64]) {
        let (m, n) = (self.layout.m, self.layout.n);
        let dim = self.layout.len();
        let (m1, n1) = (m + 1, n + 1);
        let cols = 2 * n + 1;
        let len = self.block_len();
        out.fill(0.0);
        let fields = [(L, -1.0), (L, 1.0), (H, 1.0), (V, 1.0), (OMEGA, 1.0)];
        out.par_chunks_mut(dim).enumerate().for_each(|(row_index, row)| {
            let (blk, pq) = (row_index / len, row_index % len);
            let (p, q) = (pq / cols, pq % cols);
            let (first, sign) = fields[blk];
            for c in 0..3 {
                let f = self.layout.net(x, first + c);
                let start = (first + c) * m1 * n1;
                for i in p.saturating_sub(m)..=p.min(m) {
                    let i2 = p - i;
                    let wi = self.ws[i * m1 + i2];
                    for j in q.saturating_sub(n)..=q.min(n) {
                        let j2 = q - j;
                        row[start + i * n1 + j] += sign * 2.0 * wi * self.wt[j * n1 + j2] * f[i2 * n1 + j2];
                    }
                }
            }
        });
    }

    /// `y` holds the five bound blocks in constraint order.
    pub fn add_jt_product(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let len = self.block_len();
        let block = |k: usize| &y[k * len..(k + 1) * len];
        let strain: Vec<f64> = block(1).iter().zip(block(0)).map(|(u, lo)| u - lo).collect();
        for (first, ys) in [(L, strain.as_slice()), (H, block(2)), (V, block(3)), (OMEGA, block(4))] {
            if ys.iter().any(|v| *v != 0.0) {
                self.add_field(x, first, ys, 1.0, out);
            }
        }
    }
}

/// Adds `scale * d(d_patch)/d(r)` for one patch hull distance into `out`.
///
/// The distance is between the hull of the patch's control net and the
/// obstacle; its gradient moves the witness point along the separating
/// direction. When the hull touches the obstacle core the
/// direction is undefined and the patch centroid is pushed away from the
/// obstacle centroid instead.
pub(crate) fn add_clearance_gradient(
    layout: Layout,
    x: &[f64],
    obstacle: &Obstacle<f64>,
    witness: &Witness<f64>,
    scale: f64,
    out: &mut [f64],
) -> Result<()> {
    let (m, n) = (layout.m, layout.n);
    let [u0, u1, w0, w1] = witness.rect;
    let ru = restriction_matrix::<f64>(m, u0, u1)?;
    let rw = restriction_matrix::<f64>(n, w0, w1)?;
    let mut weights = witness.weights.clone();
    let mut direction = witness.direction;
    if vec3::norm(direction) == 0.0 {
        let count = ((m + 1) * (n + 1)) as f64;
        let mut centroid = [0.0; 3];
        for c in 0..3 {
            let net = layout.net(x, R + c);
            for a in 0..=m {
                for b in 0..=n {
                    let mut p = 0.0;
                    for i in 0..=m {
                        for j in 0..=n {
                            p += ru[a * (m + 1) + i] * rw[b * (n + 1) + j] * net[i * (n + 1) + j];
                        }
                    }
                    centroid[c] += p / count;
                }
            }
        }
        let core = match obstacle {
            Obstacle::Sphere(s) => s.center,
            Obstacle::Polytope(p) => {
                let k = p.vertices().len() as f64;
                p.vertices().iter().fold([0.0; 3], |acc, v| vec3::add(acc, vec3::scale(*v, 1.0 / k)))
            }
        };
        let away = vec3::sub(centroid, core);
        let len = vec3::norm(away);
        if len == 0.0 {
            return Ok(());
        }
        direction = vec3::scale(away, 1.0 / len);
        weights = (0..=m).flat_map(|a| (0..=n).map(move |b| (a, b, 1.0 / count))).collect();
    }
    for c in 0..3 {
        if direction[c] == 0.0 {
            continue;
        }
        let g = layout.net_mut(out, R + c);
        for &(a, b, w) in &weights {
            let coef = scale * w * direction[c];
            for i in 0..=m {
                let ri = ru[a * (m + 1) + i];
                if ri == 0.0 {
                    continue;
                }
                for j in 0..=n {
                    g[i * (n + 1) + j] += coef * ri * rw[b * (n + 1) + j];
                }
            }
        }
    }
    Ok(())
}
