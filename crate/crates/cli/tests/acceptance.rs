//! Acceptance battery: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines print in order. The process
//! fails only on unexpected failures; criteria listed in `KNOWN_FAILURES`
//! still run in full and print FAIL with their reason.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rodplan::bernstein::{basis, Axis, BernsteinSurface};
use rodplan::cosserat::{euler_rate_map, kinematic_residuals, vee, CollocationGrid, RodFields};
use rodplan::geometry::{
    gjk_distance, surface_min_distance, ClearanceQuery, ConvexPolytope, Obstacle, SphereObstacle,
};
use rodplan::transcription::Scenario;
use rodplan_cli::config::{bundled, parse_scenario, Overrides};
use rodplan_cli::verify::VerifyOptions;
use rodplan_cli::SolveOutcome;

/// Case 2 has no feasible point at m = n = 6 with the bundled helix (see README).
const KNOWN_FAILURES: [usize; 1] = [5];

const SOLVE_BUDGET_S: f64 = 900.0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

type Mat3 = [[f64; 3]; 3];

// ---------------------------------------------------------------- oracles

fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Power-form Bernstein basis, independent of the library's evaluation.
fn power_basis(k: usize, i: usize, u: f64) -> f64 {
    choose(k, i) * u.powi(i as i32) * (1.0 - u).powi((k - i) as i32)
}

fn oracle_eval(f: &BernsteinSurface<f64>, s: f64, t: f64) -> Vec<f64> {
    let (m, n) = f.degrees();
    let (u, w) = (s / f.s_length(), t / f.t_length());
    let mut out = vec![0.0; f.dim()];
    for i in 0..=m {
        for j in 0..=n {
            let b = power_basis(m, i, u) * power_basis(n, j, w);
            for (o, c) in out.iter_mut().zip(f.control(i, j)) {
                *o += b * c;
            }
        }
    }
    out
}

fn random_surface(rng: &mut ChaCha8Rng, dim: usize) -> BernsteinSurface<f64> {
    let (m, n) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
    let (sl, tl) = (rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0));
    BernsteinSurface::from_fn(m, n, sl, tl, dim, |_, _| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn transpose(a: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// `Rz(psi) Ry(theta) Rx(phi)` written out from the elementary rotations.
fn oracle_rotation(phi: f64, theta: f64, psi: f64) -> Mat3 {
    let rx = [[1.0, 0.0, 0.0], [0.0, phi.cos(), -phi.sin()], [0.0, phi.sin(), phi.cos()]];
    let ry = [[theta.cos(), 0.0, theta.sin()], [0.0, 1.0, 0.0], [-theta.sin(), 0.0, theta.cos()]];
    let rz = [[psi.cos(), -psi.sin(), 0.0], [psi.sin(), psi.cos(), 0.0], [0.0, 0.0, 1.0]];
    mat_mul(&rz, &mat_mul(&ry, &rx))
}

fn apply(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| (0..3).map(|k| m[i][k] * v[k]).sum())
}

fn random_rigid(rng: &mut ChaCha8Rng) -> (Mat3, [f64; 3]) {
    let r = oracle_rotation(rng.gen_range(-3.0..3.0), rng.gen_range(-1.5..1.5), rng.gen_range(-3.0..3.0));
    (r, [0; 3].map(|_| rng.gen_range(-5.0..5.0)))
}

fn place(pts: &[[f64; 3]], (r, d): &(Mat3, [f64; 3])) -> ConvexPolytope<f64> {
    let moved = pts.iter().map(|&p| {
        let q = apply(r, p);
        [q[0] + d[0], q[1] + d[1], q[2] + d[2]]
    });
    ConvexPolytope::new(moved.collect()).unwrap()
}

fn aabb_gap(lo_a: [f64; 3], hi_a: [f64; 3], lo_b: [f64; 3], hi_b: [f64; 3]) -> f64 {
    (0..3)
        .map(|k| (lo_b[k] - hi_a[k]).max(lo_a[k] - hi_b[k]).max(0.0))
        .map(|g| g * g)
        .sum::<f64>()
        .sqrt()
}

fn point_to_box(p: [f64; 3], lo: [f64; 3], hi: [f64; 3]) -> f64 {
    aabb_gap(p, p, lo, hi)
}

// --------------------------------------------------------------- criteria

fn bernstein_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 4];
    let mut endpoint_exact = true;
    let mut hull_violations = 0usize;

    for k in 0..=20 {
        for a in 0..=200 {
            let u = a as f64 / 200.0;
            let sum: f64 = (0..=k).map(|i| basis(i, k, u, 1.0).unwrap()).sum();
            worst[0] = worst[0].max((sum - 1.0).abs());
        }
    }

    for _ in 0..100 {
        let f = random_surface(&mut rng, 3);
        let (m, n) = f.degrees();
        let (sl, tl) = (f.s_length(), f.t_length());
        let scale = max_abs(f.net()).max(1.0);

        for (s, t, i, j) in [(0.0, 0.0, 0, 0), (sl, 0.0, m, 0), (0.0, tl, 0, n), (sl, tl, m, n)] {
            endpoint_exact &= f.eval(s, t).unwrap() == f.control(i, j);
        }

        let elevated = f.degree_elevate(m + rng.gen_range(1..4), n + rng.gen_range(1..4)).unwrap();
        let lambda = rng.gen_range(0.05..0.95);
        let (left, right) = f.split(Axis::S, lambda).unwrap();
        let (below, above) = f.split(Axis::T, lambda).unwrap();
        let g = random_surface(&mut rng, 1).with_lengths(sl, tl).unwrap();
        let product = g.multiply(&f).unwrap();
        let ds = f.diff_s().unwrap();
        let dt = f.diff_t().unwrap();

        for _ in 0..50 {
            let (s, t) = (rng.gen_range(0.0..sl), rng.gen_range(0.0..tl));
            let base = f.eval(s, t).unwrap();
            worst[1] = worst[1].max(max_diff(&base, &oracle_eval(&f, s, t)) / scale);
            worst[1] = worst[1].max(max_diff(&elevated.eval(s, t).unwrap(), &base) / scale);
            let split_s = if s <= lambda * sl { left.eval(s, t) } else { right.eval(s - lambda * sl, t) };
            worst[1] = worst[1].max(max_diff(&split_s.unwrap(), &base) / scale);
            let split_t = if t <= lambda * tl { below.eval(s, t) } else { above.eval(s, t - lambda * tl) };
            worst[1] = worst[1].max(max_diff(&split_t.unwrap(), &base) / scale);

            let gv = g.eval_scalar(s, t).unwrap();
            let expect: Vec<f64> = base.iter().map(|x| gv * x).collect();
            worst[2] = worst[2].max(max_diff(&product.eval(s, t).unwrap(), &expect));

            // central differences, kept away from the domain edges
            let h = 1e-5;
            let (s, t) = (s.clamp(h, sl - h), t.clamp(h, tl - h));
            let fd_s: Vec<f64> = oracle_eval(&f, s + h, t)
                .iter()
                .zip(oracle_eval(&f, s - h, t))
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            let fd_t: Vec<f64> = oracle_eval(&f, s, t + h)
                .iter()
                .zip(oracle_eval(&f, s, t - h))
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect();
            let ds_v = ds.eval(s, t).unwrap();
            let dt_v = dt.eval(s, t).unwrap();
            worst[3] = worst[3].max(max_diff(&ds_v, &fd_s) / max_abs(&ds_v).max(1.0));
            worst[3] = worst[3].max(max_diff(&dt_v, &fd_t) / max_abs(&dt_v).max(1.0));
        }

        // support-function test against the hull of the net
        let dirs: Vec<[f64; 3]> = (0..16)
            .map(|_| [0; 3].map(|_| rng.gen_range(-1.0..1.0)))
            .chain([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
            .collect();
        let support: Vec<f64> = dirs
            .iter()
            .map(|d| f.net().chunks(3).map(|c| d[0] * c[0] + d[1] * c[1] + d[2] * c[2]).fold(f64::MIN, f64::max))
            .collect();
        for a in 0..100 {
            for b in 0..100 {
                let p = f.eval(sl * a as f64 / 99.0, tl * b as f64 / 99.0).unwrap();
                let outside =
                    dirs.iter().zip(&support).any(|(d, h)| d[0] * p[0] + d[1] * p[1] + d[2] * p[2] > h + 1e-12);
                hull_violations += outside as usize;
            }
        }
    }

    let passed = worst[0] <= 1e-12
        && endpoint_exact
        && worst[1] <= 1e-12
        && worst[2] <= 1e-11
        && worst[3] <= 1e-6
        && hull_violations == 0;
    outcome(
        passed,
        format!(
            "unity {:.1e}, endpoints {}, elevation/split {:.1e}, product {:.1e}, derivative {:.1e}, hull violations {}",
            worst[0],
            if endpoint_exact { "exact" } else { "INEXACT" },
            worst[1],
            worst[2],
            worst[3],
            hull_violations
        ),
    )
}

fn geometry_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut gjk_err = 0.0f64;

    for _ in 0..200 {
        // boxes: the gap is separable per axis
        let corner = |rng: &mut ChaCha8Rng| {
            let lo = [0; 3].map(|_| rng.gen_range(-3.0..3.0));
            let hi = [0, 1, 2].map(|k| lo[k] + rng.gen_range(0.01..2.0));
            (lo, hi)
        };
        let (la, ha) = corner(&mut rng);
        let (lb, hb) = corner(&mut rng);
        let d = gjk_distance(&ConvexPolytope::aabb(la, ha), &ConvexPolytope::aabb(lb, hb)).unwrap();
        gjk_err = gjk_err.max((d - aabb_gap(la, ha, lb, hb)).abs());

        // tetrahedra separated by a slab of width `gap`, touching its faces
        // only at one vertex each (or at one edge each), then moved rigidly
        let gap = rng.gen_range(0.0..2.0);
        let below = |rng: &mut ChaCha8Rng| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), -rng.gen_range(0.1..2.0)];
        let above =
            |rng: &mut ChaCha8Rng| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), gap + rng.gen_range(0.1..2.0)];
        let motion = random_rigid(&mut rng);
        let a = [[0.0, 0.0, 0.0], below(&mut rng), below(&mut rng), below(&mut rng)];
        let b = [[0.0, 0.0, gap], above(&mut rng), above(&mut rng), above(&mut rng)];
        let d = gjk_distance(&place(&a, &motion), &place(&b, &motion)).unwrap();
        gjk_err = gjk_err.max((d - gap).abs());

        let (x0, x1) = (rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0));
        let a = [[-x0, 0.0, 0.0], [x1, 0.0, 0.0], below(&mut rng), below(&mut rng)];
        let b = [[0.0, -x1, gap], [0.0, x0, gap], above(&mut rng), above(&mut rng)];
        let d = gjk_distance(&place(&a, &motion), &place(&b, &motion)).unwrap();
        gjk_err = gjk_err.max((d - gap).abs());
    }

    let mut unsound = 0usize;
    let mut non_monotone = 0usize;
    // how far the depth-8 bound sits below the sampled minimum on pairs that do not touch
    let mut slack = (0usize, 0.0f64);
    for pair in 0..50 {
        let f = random_surface(&mut rng, 3);
        let (obs, oracle): (Obstacle<f64>, Box<dyn Fn([f64; 3]) -> f64>) = if pair % 2 == 0 {
            let c = [0; 3].map(|_| rng.gen_range(-2.0..2.0));
            let r = rng.gen_range(0.1..0.8);
            let dist = move |p: [f64; 3]| {
                ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt() - r
            };
            (Obstacle::Sphere(SphereObstacle::new(c, r).unwrap()), Box::new(dist))
        } else {
            let lo = [0; 3].map(|_| rng.gen_range(-2.0..1.5));
            let hi = [0, 1, 2].map(|k| lo[k] + rng.gen_range(0.1..0.8));
            (Obstacle::Polytope(ConvexPolytope::aabb(lo, hi)), Box::new(move |p| point_to_box(p, lo, hi)))
        };

        let mut sampled = f64::INFINITY;
        for a in 0..200 {
            for b in 0..200 {
                let p = f.eval(f.s_length() * a as f64 / 199.0, f.t_length() * b as f64 / 199.0).unwrap();
                sampled = sampled.min(oracle([p[0], p[1], p[2]]));
            }
        }
        let sampled = sampled.max(0.0);

        let mut prev = (f64::NEG_INFINITY, f64::INFINITY);
        for depth in 0..=8 {
            let q = ClearanceQuery { epsilon: 0.0, max_depth: depth };
            let bound = surface_min_distance(&f, &obs, &q).unwrap();
            if bound.lower > sampled + 1e-12 {
                unsound += 1;
            }
            if bound.lower < prev.0 - 1e-12 || bound.upper > prev.1 + 1e-12 || bound.lower > bound.upper + 1e-12 {
                non_monotone += 1;
            }
            prev = (bound.lower, bound.upper);
        }
        if sampled > 0.0 {
            slack = (slack.0 + 1, slack.1.max(sampled - prev.0));
        }
    }

    outcome(
        gjk_err <= 1e-9 && unsound == 0 && non_monotone == 0,
        format!(
            "GJK error {gjk_err:.1e}, unsound bounds {unsound}, non-monotone steps {non_monotone}, depth-8 slack up to {:.1e} on {} clear pairs",
            slack.1, slack.0
        ),
    )
}

fn surfaces_from(m: usize, n: usize, sl: f64, tl: f64, f: impl Fn(usize, usize) -> [f64; 18]) -> RodFields<f64> {
    let part = |lo: usize, dim: usize| {
        BernsteinSurface::from_fn(m, n, sl, tl, dim, |i, j| f(i, j)[lo..lo + dim].to_vec()).unwrap()
    };
    RodFields::new(part(0, 3), part(3, 1), part(4, 1), part(5, 1), part(6, 3), part(9, 3), part(12, 3), part(15, 3))
        .unwrap()
}

fn cosserat_suite() -> Outcome {
    let (sl, tl) = (0.24, 2.0);
    let (m, n) = (4, 3);
    let lin = |i: usize, k: usize, len: f64| len * i as f64 / k as f64;
    let v0 = [0.1, -0.05, 0.02];
    let (kappa, spin) = (3.0, 0.7);

    // fields are linear in s and t, so control points are the values at the
    // Greville abscissae
    let straight = surfaces_from(m, n, sl, tl, |i, _| {
        let mut x = [0.0; 18];
        x[2] = lin(i, m, sl);
        x[8] = 1.0;
        x
    });
    let translation = surfaces_from(m, n, sl, tl, |i, j| {
        let mut x = [0.0; 18];
        let t = lin(j, n, tl);
        x[..3].copy_from_slice(&[v0[0] * t, v0[1] * t, lin(i, m, sl) + v0[2] * t]);
        x[8] = 1.0;
        x[12..15].copy_from_slice(&v0);
        x
    });
    // yaw grows linearly along the rod and in time: a straight centerline
    // whose cross sections trace helices
    let twist = surfaces_from(m, n, sl, tl, |i, j| {
        let mut x = [0.0; 18];
        x[2] = lin(i, m, sl);
        x[5] = kappa * lin(i, m, sl) + spin * lin(j, n, tl);
        x[8] = 1.0;
        x[11] = kappa;
        x[17] = spin;
        x
    });
    let grid = CollocationGrid::uniform(25, 25, sl, tl).unwrap();
    let mut residual = 0.0f64;
    for f in [&straight, &translation, &twist] {
        residual = residual.max(max_abs(&kinematic_residuals(f, &grid).unwrap()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut rate_err = 0.0f64;
    let h = 1e-6;
    for _ in 0..10_000 {
        let a = [rng.gen_range(-3.0..3.0), rng.gen_range(-1.4..1.4), rng.gen_range(-3.0..3.0)];
        let rate = [0; 3].map(|_| rng.gen_range(-2.0..2.0));
        let at = |k: f64| oracle_rotation(a[0] + k * rate[0], a[1] + k * rate[1], a[2] + k * rate[2]);
        let (plus, minus) = (at(h), at(-h));
        let mut d_r = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                d_r[i][j] = (plus[i][j] - minus[i][j]) / (2.0 * h);
            }
        }
        let fd = vee(&mat_mul(&transpose(&at(0.0)), &d_r));
        let e = euler_rate_map(a[0], a[1], (0.0, 0.0)).unwrap();
        let mapped = apply(&e, rate);
        rate_err = rate_err.max(max_diff(&mapped, &fd));
    }

    outcome(
        residual <= 1e-12 && rate_err <= 1e-6,
        format!("analytic-field residual {residual:.1e}, rate map vs vee(R^T dR) {rate_err:.1e}"),
    )
}

fn solve_bundled(text: &str, overrides: Overrides, dir: &std::path::Path) -> anyhow::Result<(Scenario, SolveOutcome)> {
    let mut sc = overrides.apply(parse_scenario(text)?)?;
    sc.solver.max_wall_time_s = Some(SOLVE_BUDGET_S);
    let out = rodplan_cli::solve(&sc, dir, &VerifyOptions::default())?;
    Ok((sc, out))
}

fn describe(out: &SolveOutcome) -> String {
    let s = &out.summary;
    let mut d = format!(
        "{:?}, violation {:.1e}/{:.1e}, t_f {:.3} s, solve {:.0} s",
        s.termination, s.max_equality_violation, s.max_inequality_violation, s.t_final, s.solve_time_s
    );
    if let Some(c) = s.min_clearance {
        d += &format!(", clearance {:.2} mm (epsilon {:.1} mm)", c * 1e3, s.epsilon * 1e3);
    }
    for f in s.verification.failures() {
        d += &format!("; {} worst {:.2e} > {:.1e}", f.name, f.worst, f.limit);
    }
    d
}

/// Every agent moves toward its final position without backing off by more
/// than `slack` metres.
fn monotone_transition(out: &SolveOutcome, count: usize, slack: f64) -> anyhow::Result<(bool, f64)> {
    let f = out.solution.fields()?;
    let (agents, _) = rodplan_cli::sample_agents(&f, count, 200)?;
    let mut worst_backoff = 0.0f64;
    for a in &agents {
        let goal = a.samples.last().unwrap().position;
        let dist: Vec<f64> = a
            .samples
            .iter()
            .map(|p| (0..3).map(|k| (p.position[k] - goal[k]).powi(2)).sum::<f64>().sqrt())
            .collect();
        let mut closest = f64::INFINITY;
        for d in dist {
            closest = closest.min(d);
            worst_backoff = worst_backoff.max(d - closest);
        }
    }
    Ok((worst_backoff <= slack, worst_backoff))
}

fn case_reproduction(text: &str, dir: &std::path::Path) -> (Outcome, Option<SolveOutcome>) {
    let start = Instant::now();
    match solve_bundled(text, Overrides::default(), dir) {
        Ok((sc, out)) => {
            let elapsed = start.elapsed().as_secs_f64();
            let (monotone, backoff) = monotone_transition(&out, sc.agents, 1e-4).unwrap_or((false, f64::NAN));
            let passed = out.verified && elapsed <= SOLVE_BUDGET_S && monotone;
            let detail = format!("{}, monotone back-off {:.1e} m, total {:.0} s", describe(&out), backoff, elapsed);
            (outcome(passed, detail), Some(out))
        }
        Err(e) => (outcome(false, format!("error: {e:#}")), None),
    }
}

fn scalability(case1: Option<&SolveOutcome>) -> Outcome {
    let Some(out) = case1 else {
        return outcome(false, "no Case 1 solution to sample");
    };
    let f = match out.solution.fields() {
        Ok(f) => f,
        Err(e) => return outcome(false, format!("error: {e:#}")),
    };
    let b = &out.solution.scenario.bounds;
    let samples = out.solution.scenario.samples;
    let mut times = Vec::new();
    let mut bound_excess = f64::NEG_INFINITY;
    for count in [5, 50, 500] {
        // best of several runs keeps scheduler noise out of the ratio
        let mut best = f64::INFINITY;
        for _ in 0..7 {
            let (agents, secs) = rodplan_cli::sample_agents(&f, count, samples).unwrap();
            best = best.min(secs);
            for p in agents.iter().flat_map(|a| &a.samples) {
                let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                bound_excess = bound_excess.max(norm(p.velocity) - b.v_max).max(norm(p.angular_velocity) - b.omega_max);
            }
        }
        times.push(best);
    }
    // per-agent cost at 50 and 500 agents within a factor 2 of each other
    let per_agent = [times[1] / 50.0, times[2] / 500.0];
    let linear = per_agent[1] <= 2.0 * per_agent[0] && per_agent[0] <= 2.0 * per_agent[1] && times[0] < times[2];
    let share = times[2] / out.summary.solve_time_s;
    outcome(
        linear && share < 0.01 && bound_excess <= 0.0,
        format!(
            "extract {:.2e}/{:.2e}/{:.2e} s for 5/50/500 agents, {:.1e} of solve time, worst bound excess {:.1e}",
            times[0], times[1], times[2], share, bound_excess
        ),
    )
}

fn order_robustness(root: &std::path::Path) -> Outcome {
    let mut details = Vec::new();
    let mut passed = true;
    for m in [4, 5, 6] {
        let overrides = Overrides { order: Some([m, m]), ..Default::default() };
        match solve_bundled(bundled::LINE_TO_LINE, overrides, &root.join(format!("order{m}"))) {
            Ok((_, out)) => {
                passed &= out.verified;
                details.push(format!("m={m} {} ({:.1} s)", if out.verified { "verified" } else { "FAILED" }, out.summary.solve_time_s));
            }
            Err(e) => {
                passed = false;
                details.push(format!("m={m} error: {e:#}"));
            }
        }
    }
    outcome(passed, details.join(", "))
}

fn main() {
    // listing tests must not run the battery
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        return;
    }
    // numeric arguments select criteria: `cargo test --test acceptance -- 1 2 3`
    let selected: Vec<usize> = args.iter().skip(1).filter_map(|a| a.parse().ok()).collect();
    let run = |id: usize| selected.is_empty() || selected.contains(&id);
    let root = tempfile::tempdir().expect("temporary directory");
    let mut failed_unexpectedly = Vec::new();
    let mut report = |id: usize, name: &str, took: Duration, o: Outcome| {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        let note = if !o.passed && KNOWN_FAILURES.contains(&id) { " (known failure)" } else { "" };
        println!("criterion {id} {verdict}{note}: {name} [{:.1} s] {}", took.as_secs_f64(), o.detail);
        if !o.passed && !KNOWN_FAILURES.contains(&id) {
            failed_unexpectedly.push(id);
        }
    };

    if run(1) {
        let t = Instant::now();
        let o = bernstein_suite();
        let took = t.elapsed();
        let o = if took.as_secs_f64() < 30.0 { o } else { outcome(false, format!("over 30 s; {}", o.detail)) };
        report(1, "Bernstein properties", took, o);
    }

    if run(2) {
        let t = Instant::now();
        let o = geometry_suite();
        let took = t.elapsed();
        let o = if took.as_secs_f64() < 60.0 { o } else { outcome(false, format!("over 60 s; {}", o.detail)) };
        report(2, "GJK and certified clearance", took, o);
    }

    if run(3) {
        let t = Instant::now();
        let o = cosserat_suite();
        let took = t.elapsed();
        let o = if took.as_secs_f64() < 10.0 { o } else { outcome(false, format!("over 10 s; {}", o.detail)) };
        report(3, "Cosserat kinematics", took, o);
    }

    // criterion 6 samples the Case 1 solution
    let mut case1 = None;
    if run(4) || run(6) {
        let t = Instant::now();
        let (o, out) = case_reproduction(bundled::CASE1, &root.path().join("case1"));
        if run(4) {
            report(4, "Case 1 (line to ellipse around a sphere)", t.elapsed(), o);
        }
        case1 = out;
    }

    if run(5) {
        let t = Instant::now();
        let (o, _) = case_reproduction(bundled::CASE2, &root.path().join("case2"));
        report(5, "Case 2 (line to helix)", t.elapsed(), o);
    }

    if run(6) {
        let t = Instant::now();
        let o = scalability(case1.as_ref());
        report(6, "extraction scales with agent count", t.elapsed(), o);
    }

    if run(7) {
        let t = Instant::now();
        let o = order_robustness(root.path());
        report(7, "line to line at m = n = 4, 5, 6", t.elapsed(), o);
    }

    if !failed_unexpectedly.is_empty() {
        eprintln!("unexpected failures: {failed_unexpectedly:?}");
        std::process::exit(1);
    }
}
