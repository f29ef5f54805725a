use std::time::Instant;

use super::fd::{gradient, FdScheme};
use super::lbfgs::minimize_box;
use super::gauss_newton::{InnerResult, Subproblem};
use super::options::{InnerSolver, SolverOptions};
use super::problem::{BlockKind, ConstraintBlock, Nlp};
use super::report::{BlockSummary, OuterRecord, SolveReport, Termination};
use crate::error::{Error, Result};

/// Consecutive rejected outer iterates before the run is declared stalled.
const MAX_REJECTIONS: usize = 4;
/// Required reduction factor of the violation before the penalty is kept.
const SUFFICIENT_REDUCTION: f64 = 0.25;
const MULTIPLIER_CAP: f64 = 1e10;

pub(super) fn at_point<T>(x: &[f64], r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Evaluation { .. } => e,
        other => Error::Evaluation { x: x.to_vec(), source: Box::new(other) },
    })
}

pub(super) struct Evaluated {
    pub f: f64,
    pub c: Vec<f64>,
    pub g: Vec<f64>,
}

impl Evaluated {
    fn violation(&self) -> (f64, f64) {
        let eq = self.c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let ineq = self.g.iter().fold(0.0f64, |a, v| a.max(*v));
        (eq, ineq)
    }
}

pub(super) fn evaluate<P: Nlp + ?Sized>(p: &P, x: &[f64]) -> Result<Evaluated> {
    let f = at_point(x, p.objective(x))?;
    if !f.is_finite() {
        return Err(Error::Evaluation {
            x: x.to_vec(),
            source: Box::new(Error::NonFinite { what: "objective".into(), index: 0 }),
        });
    }
    let mut c = vec![0.0; p.num_equalities()];
    at_point(x, p.equalities(x, &mut c))?;
    let mut g = vec![0.0; p.num_inequalities()];
    at_point(x, p.inequalities(x, &mut g))?;
    for (what, vals) in [("equality constraint", &c), ("inequality constraint", &g)] {
        if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
            return Err(Error::Evaluation {
                x: x.to_vec(),
                source: Box::new(Error::NonFinite { what: what.into(), index: i }),
            });
        }
    }
    Ok(Evaluated { f, c, g })
}

/// Gradient of the objective, analytic when the problem provides it.
pub(super) fn objective_gradient<P: Nlp + ?Sized>(p: &P, x: &[f64], step: f64, scheme: FdScheme, out: &mut [f64]) -> Result<()> {
    out.iter_mut().for_each(|v| *v = 0.0);
    if p.objective_gradient(x, out)? {
        return Ok(());
    }
    let g = gradient(|z| p.objective(z), x, step, scheme)?;
    out.copy_from_slice(&g);
    Ok(())
}

/// Adds `J^T y` for one constraint family, falling back to differencing `y . c(x)`.
pub(super) fn add_jt_product<P: Nlp + ?Sized>(
    p: &P,
    kind: BlockKind,
    x: &[f64],
    y: &[f64],
    step: f64,
    scheme: FdScheme,
    out: &mut [f64],
) -> Result<()> {
    if y.iter().all(|v| *v == 0.0) {
        return Ok(());
    }
    let provided = match kind {
        BlockKind::Equality => p.equality_jt_product(x, y, out)?,
        BlockKind::Inequality => p.inequality_jt_product(x, y, out)?,
    };
    if provided {
        return Ok(());
    }
    let weighted = |z: &[f64]| -> Result<f64> {
        let mut vals = vec![0.0; y.len()];
        match kind {
            BlockKind::Equality => p.equalities(z, &mut vals)?,
            BlockKind::Inequality => p.inequalities(z, &mut vals)?,
        }
        Ok(vals.iter().zip(y).map(|(a, b)| a * b).sum())
    };
    let g = gradient(weighted, x, step, scheme)?;
    for (o, v) in out.iter_mut().zip(g) {
        *o += v;
    }
    Ok(())
}

fn summarize(blocks: &[ConstraintBlock], ev: &Evaluated) -> Vec<BlockSummary> {
    blocks
        .iter()
        .map(|b| {
            let max_violation = match b.kind {
                BlockKind::Equality => ev.c[b.start..b.start + b.len].iter().fold(0.0f64, |a, v| a.max(v.abs())),
                BlockKind::Inequality => ev.g[b.start..b.start + b.len].iter().fold(0.0f64, |a, v| a.max(*v)),
            };
            BlockSummary { name: b.name.clone(), kind: b.kind, count: b.len, max_violation }
        })
        .collect()
}

fn default_blocks<P: Nlp + ?Sized>(p: &P) -> Result<Vec<ConstraintBlock>> {
    let blocks = p.constraint_blocks();
    if blocks.is_empty() {
        return Ok(vec![
            ConstraintBlock { name: "equalities".into(), kind: BlockKind::Equality, start: 0, len: p.num_equalities() },
            ConstraintBlock { name: "inequalities".into(), kind: BlockKind::Inequality, start: 0, len: p.num_inequalities() },
        ]);
    }
    for b in &blocks {
        let total = match b.kind {
            BlockKind::Equality => p.num_equalities(),
            BlockKind::Inequality => p.num_inequalities(),
        };
        if b.start + b.len > total {
            return Err(Error::Shape(format!("constraint block {} exceeds {} rows", b.name, total)));
        }
    }
    Ok(blocks)
}

/// Minimizes `problem` with the augmented Lagrangian method.
///
/// On success the returned point satisfies both violation tolerances. On
/// failure the least-violating accepted iterate is returned together with a
/// report describing why the run stopped.
pub fn minimize<P: Nlp + ?Sized>(problem: &P, opts: &SolverOptions) -> Result<(Vec<f64>, SolveReport)> {
    opts.validate()?;
    let start = Instant::now();
    let n = problem.dimension();
    let (lo, hi) = problem.bounds();
    let x0 = problem.initial_point();
    if lo.len() != n || hi.len() != n || x0.len() != n {
        return Err(Error::Shape(format!(
            "problem dimension {n} but bounds {}/{} and initial point {}",
            lo.len(),
            hi.len(),
            x0.len()
        )));
    }
    if let Some(i) = (0..n).find(|&i| !(lo[i] <= hi[i])) {
        return Err(Error::Domain(format!("empty box for variable {i}: [{}, {}]", lo[i], hi[i])));
    }
    let blocks = default_blocks(problem)?;
    let scheme = if opts.central_differences { FdScheme::Central } else { FdScheme::Forward };
    let step = opts.fd_step;
    let (m_eq, m_in) = (problem.num_equalities(), problem.num_inequalities());

    let mut x: Vec<f64> = x0.iter().zip(lo.iter().zip(&hi)).map(|(v, (l, h))| v.max(*l).min(*h)).collect();
    let mut current = evaluate(problem, &x)?;
    let mut lambda = vec![0.0; m_eq];
    let mut mu = vec![0.0; m_in];
    let mut rho = opts.initial_penalty;
    let scaled = |ev: &Evaluated| {
        let (e, i) = ev.violation();
        (e / opts.equality_tolerance).max(i / opts.inequality_tolerance)
    };
    let raw = |ev: &Evaluated| {
        let (e, i) = ev.violation();
        e.max(i)
    };
    let mut inner_total = 0;

    // an infeasible start is first pulled onto the constraints with the
    // objective switched off; penalty-weighted subproblems started far from
    // feasibility tend to settle in poor basins
    if opts.restoration_iterations > 0 && scaled(&current) > 1.0 {
        let zero_eq = vec![0.0; m_eq];
        let zero_in = vec![0.0; m_in];
        let sub = Subproblem {
            problem,
            lambda: &zero_eq,
            mu: &zero_in,
            rho: 1.0,
            objective_weight: 0.0,
            target: Some((0.1 * opts.equality_tolerance, 0.1 * opts.inequality_tolerance)),
            step,
            scheme,
        };
        let res = sub.solve(&x, &lo, &hi, opts.restoration_iterations, 0.0)?;
        inner_total += res.iterations;
        let trial = evaluate(problem, &res.x)?;
        log::debug!(
            "restoration: violation {:.3e} -> {:.3e} in {} iterations",
            raw(&current),
            raw(&trial),
            res.iterations
        );
        if raw(&trial) < raw(&current) {
            x = res.x;
            current = trial;
        }
    }
    let mut best = (x.clone(), scaled(&current), current.f);
    let mut history = Vec::new();
    let mut penalty_raised = false;
    let mut rejections = 0;
    let mut termination = Termination::MaxIterations;
    let mut outer = 0;

    while outer < opts.max_outer_iterations {
        if opts.max_wall_time_s.is_some_and(|limit| start.elapsed().as_secs_f64() >= limit) {
            termination = Termination::TimeLimit;
            break;
        }
        outer += 1;
        let (lam, mu_k, r) = (lambda.clone(), mu.clone(), rho);
        // loose subproblems early, tightening toward the final tolerance
        let inner_tol = opts.optimality_tolerance.max(0.1f64.powi(outer as i32));
        let inner = match opts.inner_solver {
            InnerSolver::GaussNewton => {
                let sub = Subproblem {
                    problem,
                    lambda: &lam,
                    mu: &mu_k,
                    rho: r,
                    objective_weight: 1.0,
                    target: None,
                    step,
                    scheme,
                };
                sub.solve(&x, &lo, &hi, opts.max_inner_iterations, inner_tol)?
            }
            InnerSolver::Lbfgs => {
                let merit = |z: &[f64], grad: &mut [f64]| -> Result<f64> {
                    let ev = evaluate(problem, z)?;
                    let mut value = ev.f;
                    let mut y_eq = vec![0.0; m_eq];
                    for i in 0..m_eq {
                        value += lam[i] * ev.c[i] + 0.5 * r * ev.c[i] * ev.c[i];
                        y_eq[i] = lam[i] + r * ev.c[i];
                    }
                    let mut y_in = vec![0.0; m_in];
                    for j in 0..m_in {
                        let s = (mu_k[j] + r * ev.g[j]).max(0.0);
                        value += (s * s - mu_k[j] * mu_k[j]) / (2.0 * r);
                        y_in[j] = s;
                    }
                    at_point(z, objective_gradient(problem, z, step, scheme, grad))?;
                    at_point(z, add_jt_product(problem, BlockKind::Equality, z, &y_eq, step, scheme, grad))?;
                    at_point(z, add_jt_product(problem, BlockKind::Inequality, z, &y_in, step, scheme, grad))?;
                    Ok(value)
                };
                let res = minimize_box(
                    merit,
                    &x,
                    &lo,
                    &hi,
                    opts.max_inner_iterations,
                    inner_tol,
                    opts.lbfgs_memory,
                )?;
                InnerResult { x: res.x, iterations: res.iterations, converged: res.converged }
            }
        };
        inner_total += inner.iterations;
        let trial = evaluate(problem, &inner.x)?;
        let v_old = raw(&current);
        let v_new = raw(&trial);
        let accepted = !penalty_raised || v_new <= v_old;
        history.push(OuterRecord {
            penalty: rho,
            violation: if accepted { v_new } else { v_old },
            objective: if accepted { trial.f } else { current.f },
            inner_iterations: inner.iterations,
            accepted,
        });
        log::debug!(
            "outer {outer}: penalty {rho:.1e} violation {v_new:.3e} cost {:.6e} inner {} {}",
            trial.f,
            inner.iterations,
            if accepted { "accepted" } else { "rejected" }
        );

        if !accepted {
            rejections += 1;
            rho *= opts.penalty_growth;
            if rejections >= MAX_REJECTIONS || rho > opts.max_penalty {
                termination = Termination::Stalled;
                break;
            }
            continue;
        }
        rejections = 0;
        let f_prev = current.f;
        x = inner.x;
        current = trial;
        let s = scaled(&current);
        if s < best.1 || (s == best.1 && current.f < best.2) || s <= 1.0 {
            best = (x.clone(), s, current.f);
        }
        for i in 0..m_eq {
            lambda[i] = (lambda[i] + rho * current.c[i]).clamp(-MULTIPLIER_CAP, MULTIPLIER_CAP);
        }
        for j in 0..m_in {
            mu[j] = (mu[j] + rho * current.g[j]).clamp(0.0, MULTIPLIER_CAP);
        }

        let feasible = s <= 1.0;
        // an inactive row still carrying a multiplier means the subproblem
        // was solved for the wrong active set
        let complementary = (0..m_in).all(|j| (-current.g[j]).min(mu[j] / rho) <= opts.inequality_tolerance);
        let objective_stalled = (current.f - f_prev).abs() <= opts.stall_tolerance * current.f.abs().max(1.0);
        // loose early subproblems say little about optimality
        let final_tolerance = inner_tol <= opts.optimality_tolerance;
        if feasible && complementary && final_tolerance && (inner.converged || objective_stalled) {
            termination = Termination::Converged;
            break;
        }
        if v_new > SUFFICIENT_REDUCTION * v_old && !feasible {
            rho *= opts.penalty_growth;
            penalty_raised = true;
            if rho > opts.max_penalty {
                termination = Termination::Stalled;
                break;
            }
        }
    }

    let x_star = if termination == Termination::Converged { x } else { best.0 };
    let final_eval = evaluate(problem, &x_star)?;
    let (eq_v, in_v) = final_eval.violation();
    let report = SolveReport {
        cost: final_eval.f,
        max_equality_violation: eq_v,
        max_inequality_violation: in_v,
        outer_iterations: outer,
        inner_iterations: inner_total,
        termination,
        wall_time_s: start.elapsed().as_secs_f64(),
        final_penalty: rho,
        blocks: summarize(&blocks, &final_eval),
        min_clearance: None,
        history,
    };
    Ok((x_star, report))
}
