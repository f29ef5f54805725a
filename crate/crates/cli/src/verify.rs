//! Independent feasibility check of a stored solution.
//!
//! Works from the control nets and the scenario alone. Kinematics are
//! re-derived pointwise: rotations are rebuilt here, and body rates come
//! from `vee(R^T dR)` with `dR` differenced in the Euler angles, so the
//! solver's rate map is never used.

use anyhow::Result;
use rodplan::bernstein::BernsteinSurface;
use rodplan::cosserat::RodFields;
use rodplan::geometry::{surface_min_distance, ClearanceQuery};
use rodplan::transcription::{FormationSpec, Scenario, TargetCurve};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Refinement factor of the collocation grid spacing.
    pub refine: usize,
    pub dynamics_tol: f64,
    /// Allowed excess of a squared-norm coefficient over its bound.
    pub bound_tol: f64,
    /// Samples per axis of the pointwise norm check.
    pub samples: usize,
    pub clearance_depth: usize,
    pub boundary_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { refine: 4, dynamics_tol: 1e-5, bound_tol: 1e-6, samples: 200, clearance_depth: 10, boundary_tol: 1e-3 }
    }
}

/// Worst value of one checked quantity against its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Worst excess measure; the check passes when `worst <= limit`.
    pub worst: f64,
    pub limit: f64,
    /// Where the worst value occurs.
    pub location: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub checks: Vec<Check>,
    /// Certified lower bound on obstacle distance, per obstacle.
    pub clearance_lower: Vec<f64>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn min_clearance(&self) -> Option<f64> {
        self.clearance_lower.iter().copied().reduce(f64::min)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Running maximum with its location.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self { value: f64::NEG_INFINITY, at: String::from("-") }
    }

    fn update(&mut self, v: f64, at: impl FnOnce() -> String) {
        // NaN must fail, so it always wins
        if v > self.value || v.is_nan() && !self.value.is_nan() {
            self.value = v;
            self.at = at();
        }
    }

    fn check(self, name: &str, limit: f64) -> Check {
        let worst = if self.value == f64::NEG_INFINITY { 0.0 } else { self.value };
        Check { name: name.into(), worst, limit, location: self.at, passed: worst <= limit }
    }
}

type M3 = [[f64; 3]; 3];

fn mat_mul(a: &M3, b: &M3) -> M3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// `Rz(yaw) Ry(pitch) Rx(roll)`.
fn rotation(a: [f64; 3]) -> M3 {
    let (sx, cx) = a[0].sin_cos();
    let (sy, cy) = a[1].sin_cos();
    let (sz, cz) = a[2].sin_cos();
    let rx = [[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]];
    let ry = [[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]];
    let rz = [[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]];
    mat_mul(&rz, &mat_mul(&ry, &rx))
}

fn mat_vec(a: &M3, v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2])
}

/// Body rate `vee(R^T dR)` for angle rates `da`, with `dR` by central differences in the angles.
fn body_rate(a: [f64; 3], da: [f64; 3]) -> [f64; 3] {
    const H: f64 = 1e-6;
    let mut dr = [[0.0; 3]; 3];
    for k in 0..3 {
        let (mut p, mut q) = (a, a);
        p[k] += H;
        q[k] -= H;
        let (rp, rq) = (rotation(p), rotation(q));
        for i in 0..3 {
            for j in 0..3 {
                dr[i][j] += (rp[i][j] - rq[i][j]) / (2.0 * H) * da[k];
            }
        }
    }
    let r = rotation(a);
    let mut w = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            w[i][j] = (0..3).map(|k| r[k][i] * dr[k][j]).sum();
        }
    }
    // skew part only; the symmetric part is differencing noise
    [0.5 * (w[2][1] - w[1][2]), 0.5 * (w[0][2] - w[2][0]), 0.5 * (w[1][0] - w[0][1])]
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn norm(a: [f64; 3]) -> f64 {
    dist(a, [0.0; 3])
}

fn v3(x: &[f64]) -> [f64; 3] {
    [x[0], x[1], x[2]]
}

fn linspace(count: usize, end: f64) -> Vec<f64> {
    if count <= 1 {
        return vec![0.0];
    }
    (0..count).map(|k| end * k as f64 / (count - 1) as f64).collect()
}

struct Sampler<'a> {
    f: &'a RodFields<f64>,
    r_s: BernsteinSurface<f64>,
    r_t: BernsteinSurface<f64>,
    a_s: [BernsteinSurface<f64>; 3],
    a_t: [BernsteinSurface<f64>; 3],
}

impl<'a> Sampler<'a> {
    fn new(f: &'a RodFields<f64>) -> Result<Self> {
        let angles = [&f.phi, &f.theta, &f.psi];
        Ok(Self {
            f,
            r_s: f.r.diff_s()?,
            r_t: f.r.diff_t()?,
            a_s: [angles[0].diff_s()?, angles[1].diff_s()?, angles[2].diff_s()?],
            a_t: [angles[0].diff_t()?, angles[1].diff_t()?, angles[2].diff_t()?],
        })
    }

    fn angles(&self, s: f64, t: f64) -> Result<[f64; 3]> {
        Ok([self.f.phi.eval_scalar(s, t)?, self.f.theta.eval_scalar(s, t)?, self.f.psi.eval_scalar(s, t)?])
    }

    /// `[r_s - R l, r_t - R v, vee(R^T R_s) - h, vee(R^T R_t) - omega]`.
    fn residuals(&self, s: f64, t: f64) -> Result<[[f64; 3]; 4]> {
        let a = self.angles(s, t)?;
        let rot = rotation(a);
        let at = |d: &[BernsteinSurface<f64>; 3]| -> Result<[f64; 3]> {
            Ok([d[0].eval_scalar(s, t)?, d[1].eval_scalar(s, t)?, d[2].eval_scalar(s, t)?])
        };
        let (a_s, a_t) = (at(&self.a_s)?, at(&self.a_t)?);
        let sub = |x: [f64; 3], y: [f64; 3]| [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        Ok([
            sub(v3(&self.r_s.eval(s, t)?), mat_vec(&rot, v3(&self.f.l.eval(s, t)?))),
            sub(v3(&self.r_t.eval(s, t)?), mat_vec(&rot, v3(&self.f.v.eval(s, t)?))),
            sub(body_rate(a, a_s), v3(&self.f.h.eval(s, t)?)),
            sub(body_rate(a, a_t), v3(&self.f.omega.eval(s, t)?)),
        ])
    }
}

fn edge_checks(
    f: &RodFields<f64>,
    spec: &FormationSpec,
    sc: &Scenario,
    t: f64,
    label: &str,
    s_nodes: &[f64],
    tol: f64,
) -> Result<Vec<Check>> {
    let curve = TargetCurve::from_spec(spec, sc.s_length)?;
    let mut pos = Worst::new();
    let mut att = Worst::new();
    let mut rest = Worst::new();
    for &s in s_nodes {
        let p = v3(&f.r.eval(s, t)?);
        pos.update(dist(p, curve.point(s)), || format!("s = {s:.6}"));
        let a = [f.phi.eval_scalar(s, t)?, f.theta.eval_scalar(s, t)?, f.psi.eval_scalar(s, t)?];
        att.update(dist(a, spec.attitude), || format!("s = {s:.6}"));
        if spec.rest {
            let v = norm(v3(&f.v.eval(s, t)?));
            let w = norm(v3(&f.omega.eval(s, t)?));
            rest.update(v.max(w), || format!("s = {s:.6}"));
        }
    }
    let mut out = vec![pos.check(&format!("{label} position"), tol), att.check(&format!("{label} attitude"), tol)];
    if spec.rest {
        out.push(rest.check(&format!("{label} rest"), tol));
    }
    Ok(out)
}

/// Runs every check on `f` against `sc`.
pub fn verify(f: &RodFields<f64>, sc: &Scenario, opts: &VerifyOptions) -> Result<Verification> {
    f.validate()?;
    let (m, n) = f.degrees();
    if [m, n] != sc.order {
        anyhow::bail!("solution has degrees [{m}, {n}] but the scenario asks for {:?}", sc.order);
    }
    if (f.s_length() - sc.s_length).abs() > 1e-12 * sc.s_length {
        anyhow::bail!("solution rod length {} differs from scenario {}", f.s_length(), sc.s_length);
    }
    let t_final = f.t_length();
    let b = &sc.bounds;
    let mut checks = Vec::new();
    let (lo, hi, _) = sc.time.resolve().expect("validated time spec");
    let time_excess = (lo - t_final).max(t_final - hi);
    checks.push(Check {
        name: "final time".into(),
        worst: time_excess,
        limit: 1e-12 * hi,
        location: format!("t_f = {t_final}"),
        passed: time_excess <= 1e-12 * hi,
    });

    // kinematics on the refined grid
    let (ns, nt) = sc.grid_size();
    let s_nodes = linspace((ns - 1) * opts.refine + 1, sc.s_length);
    let t_nodes = linspace((nt - 1) * opts.refine + 1, t_final);
    let sampler = Sampler::new(f)?;
    let names = ["dynamics r_s = R l", "dynamics r_t = R v", "dynamics bending", "dynamics angular velocity"];
    let mut worst: Vec<Worst> = names.iter().map(|_| Worst::new()).collect();
    for &s in &s_nodes {
        for &t in &t_nodes {
            let res = sampler.residuals(s, t)?;
            for (w, e) in worst.iter_mut().zip(res) {
                w.update(e.iter().fold(0.0f64, |a, v| a.max(v.abs())), || format!("(s, t) = ({s:.6}, {t:.6})"));
            }
        }
    }
    checks.extend(worst.into_iter().zip(names).map(|(w, name)| w.check(name, opts.dynamics_tol)));

    // coefficient bounds: hull property makes these sufficient for the whole domain
    let squared = [
        ("strain", &f.l, Some(b.nu_min), b.nu_max),
        ("bending", &f.h, None, b.mu_max),
        ("speed", &f.v, None, b.v_max),
        ("angular speed", &f.omega, None, b.omega_max),
    ];
    for (name, field, lower, upper) in squared {
        let sq = field.norm_squared()?;
        let (mm, nn) = sq.degrees();
        let mut hi_w = Worst::new();
        let mut lo_w = Worst::new();
        for i in 0..=mm {
            for j in 0..=nn {
                let c = sq.control(i, j)[0];
                hi_w.update(c - upper * upper, || format!("coefficient ({i}, {j})"));
                if let Some(l) = lower {
                    lo_w.update(l * l - c, || format!("coefficient ({i}, {j})"));
                }
            }
        }
        checks.push(hi_w.check(&format!("{name} coefficients upper"), opts.bound_tol));
        if lower.is_some() {
            checks.push(lo_w.check(&format!("{name} coefficients lower"), opts.bound_tol));
        }
    }

    // pointwise norms on a dense grid
    let ss = linspace(opts.samples, sc.s_length);
    let ts = linspace(opts.samples, t_final);
    let mut pw: Vec<Worst> = (0..5).map(|_| Worst::new()).collect();
    let pw_names = ["sampled strain lower", "sampled strain upper", "sampled bending", "sampled speed", "sampled angular speed"];
    let limits = [b.nu_min, b.nu_max, b.mu_max, b.v_max, b.omega_max];
    for &s in &ss {
        for &t in &ts {
            let l = norm(v3(&f.l.eval(s, t)?));
            let vals = [
                limits[0] - l,
                l - limits[1],
                norm(v3(&f.h.eval(s, t)?)) - limits[2],
                norm(v3(&f.v.eval(s, t)?)) - limits[3],
                norm(v3(&f.omega.eval(s, t)?)) - limits[4],
            ];
            for (w, v) in pw.iter_mut().zip(vals) {
                w.update(v, || format!("(s, t) = ({s:.6}, {t:.6})"));
            }
        }
    }
    checks.extend(pw.into_iter().zip(pw_names).map(|(w, name)| w.check(name, 0.0)));

    // obstacle clearance, certified at the requested depth
    let mut clearance_lower = Vec::new();
    let q = ClearanceQuery { epsilon: sc.epsilon, max_depth: opts.clearance_depth };
    for (k, o) in sc.obstacle_list()?.iter().enumerate() {
        let d = surface_min_distance(&f.r, o, &q)?;
        clearance_lower.push(d.lower);
        checks.push(Check {
            name: format!("obstacle {k} clearance"),
            worst: sc.epsilon - d.lower,
            limit: 0.0,
            location: format!("lower bound {:.6e}, upper {:.6e}, epsilon {}", d.lower, d.upper, sc.epsilon),
            passed: d.lower >= sc.epsilon,
        });
    }

    // formations on the time edges
    checks.extend(edge_checks(f, &sc.initial_formation, sc, 0.0, "initial", &s_nodes, opts.boundary_tol)?);
    if let Some(fin) = sc.final_formation.as_ref().filter(|s| s.enforce) {
        checks.extend(edge_checks(f, fin, sc, t_final, "final", &s_nodes, opts.boundary_tol)?);
    }
    Ok(Verification { checks, clearance_lower })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn body_rate_of_pure_yaw_and_roll() {
        let w = body_rate([0.0; 3], [0.0, 0.0, 1.5]);
        assert!((w[2] - 1.5).abs() < 1e-9 && w[0].abs() < 1e-9 && w[1].abs() < 1e-9);
        let w = body_rate([0.0, 0.3, 0.0], [2.0, 0.0, 0.0]);
        assert!((w[0] - 2.0).abs() < 1e-9, "{w:?}");
    }

    #[test]
    fn rotation_is_orthonormal() {
        let r = rotation([0.3, -0.4, 1.1]);
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }
}
