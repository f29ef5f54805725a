//! Levenberg-Marquardt iteration on the augmented Lagrangian subproblem.
//!
//! The Hessian model is `w H_f + rho (J_c^T J_c + J_A^T J_A)` where `J_A`
//! holds the inequality rows whose hinge is active and `H_f` is a
//! finite-difference Hessian of the objective. Constraint curvature is left
//! out; it is cheaper and was no better in practice. Variables held at a
//! bound by an outward gradient are frozen for the step.
//!
//! With `w = 0`, zero multipliers and no target the same loop is a
//! feasibility restoration: least squares on `c` and the positive part of `g`.

use nalgebra::{DMatrix, DVector};

use super::auglag::{at_point, evaluate, objective_gradient, Evaluated};
use super::fd::{jacobian, FdScheme};
use super::lbfgs::{project, projected_gradient_norm};
use super::problem::Nlp;
use crate::error::Result;

/// Multipliers and penalty that define one subproblem.
pub(super) struct Subproblem<'a, P: Nlp + ?Sized> {
    pub problem: &'a P,
    pub lambda: &'a [f64],
    pub mu: &'a [f64],
    pub rho: f64,
    /// Weight `w` of the objective; 0 during restoration.
    pub objective_weight: f64,
    /// Stop as soon as both violations drop below these (restoration only).
    pub target: Option<(f64, f64)>,
    pub step: f64,
    pub scheme: FdScheme,
}

pub(super) struct InnerResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

const MAX_DAMPING: f64 = 1e14;
const ACCEPT_RATIO: f64 = 1e-4;
const HESSIAN_STEP: f64 = 1e-7;
const LINE_SEARCH_STEPS: usize = 6;

impl<P: Nlp + ?Sized> Subproblem<'_, P> {
    fn merit(&self, ev: &Evaluated) -> f64 {
        let mut value = self.objective_weight * ev.f;
        for (c, l) in ev.c.iter().zip(self.lambda) {
            value += l * c + 0.5 * self.rho * c * c;
        }
        for (g, m) in ev.g.iter().zip(self.mu) {
            let s = (m + self.rho * g).max(0.0);
            value += (s * s - m * m) / (2.0 * self.rho);
        }
        value
    }

    fn equality_jacobian(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.problem;
        let mut out = vec![0.0; p.num_equalities() * p.dimension()];
        if p.equality_jacobian(x, &mut out)? {
            return Ok(out);
        }
        jacobian(|z, o| p.equalities(z, o), x, p.num_equalities(), self.step, self.scheme)
    }

    fn inequality_jacobian(&self, x: &[f64]) -> Result<Vec<f64>> {
        let p = self.problem;
        let mut out = vec![0.0; p.num_inequalities() * p.dimension()];
        if p.inequality_jacobian(x, &mut out)? {
            return Ok(out);
        }
        jacobian(|z, o| p.inequalities(z, o), x, p.num_inequalities(), self.step, self.scheme)
    }

    /// `w` times the finite-difference Hessian of the objective.
    fn objective_hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = x.len();
        if self.objective_weight == 0.0 {
            return Ok(DMatrix::zeros(n, n));
        }
        let p = self.problem;
        let grad = |z: &[f64], o: &mut [f64]| objective_gradient(p, z, self.step, FdScheme::Forward, o);
        let h = jacobian(grad, x, n, HESSIAN_STEP, FdScheme::Forward)?;
        let h = DMatrix::from_row_slice(n, n, &h);
        Ok((&h + h.transpose()) * (0.5 * self.objective_weight))
    }

    fn reached_target(&self, ev: &Evaluated) -> bool {
        self.target.is_some_and(|(eq, ineq)| {
            ev.c.iter().all(|v| v.abs() <= eq) && ev.g.iter().all(|v| *v <= ineq)
        })
    }

    /// Minimizes the subproblem merit over `[lo, hi]` from `x0`.
    pub fn solve(&self, x0: &[f64], lo: &[f64], hi: &[f64], max_iter: usize, tol: f64) -> Result<InnerResult> {
        let n = x0.len();
        let mut x = x0.to_vec();
        project(&mut x, lo, hi);
        let mut ev = evaluate(self.problem, &x)?;
        let mut value = self.merit(&ev);
        let mut damping = 1e-6;
        let mut iterations = 0;
        let mut converged = false;
        while iterations < max_iter {
            if self.reached_target(&ev) {
                converged = true;
                break;
            }
            iterations += 1;
            let m_eq = ev.c.len();
            let m_in = ev.g.len();
            let jc = at_point(&x, self.equality_jacobian(&x))?;
            let jg = at_point(&x, self.inequality_jacobian(&x))?;
            let mut grad = vec![0.0; n];
            if self.objective_weight != 0.0 {
                at_point(&x, objective_gradient(self.problem, &x, self.step, self.scheme, &mut grad))?;
                grad.iter_mut().for_each(|v| *v *= self.objective_weight);
            }
            let jc = DMatrix::from_row_slice(m_eq, n, &jc);
            let y_eq = DVector::from_iterator(m_eq, (0..m_eq).map(|i| self.lambda[i] + self.rho * ev.c[i]));
            let active: Vec<usize> = (0..m_in).filter(|&j| self.mu[j] + self.rho * ev.g[j] > 0.0).collect();
            let ja = DMatrix::from_fn(active.len(), n, |r, c| jg[active[r] * n + c]);
            let y_in = DVector::from_iterator(active.len(), active.iter().map(|&j| self.mu[j] + self.rho * ev.g[j]));
            let g = DVector::from_vec(grad) + jc.tr_mul(&y_eq) + ja.tr_mul(&y_in);

            if projected_gradient_norm(&x, g.as_slice(), lo, hi) <= tol {
                converged = true;
                break;
            }
            let gram = jc.transpose() * &jc + ja.transpose() * &ja;
            let h = at_point(&x, self.objective_hessian(&x))? + gram * self.rho;
            let free: Vec<usize> = (0..n)
                .filter(|&i| !((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)))
                .collect();
            let hff = DMatrix::from_fn(free.len(), free.len(), |r, c| h[(free[r], free[c])]);
            let gf = DVector::from_iterator(free.len(), free.iter().map(|&i| g[i]));
            let scale = hff.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);

            let mut improved = false;
            while damping <= MAX_DAMPING {
                let mut damped = hff.clone();
                for k in 0..free.len() {
                    damped[(k, k)] += damping * (hff[(k, k)].abs() + 1e-12 * scale);
                }
                let Some(chol) = damped.cholesky() else {
                    damping *= 10.0;
                    continue;
                };
                let d = chol.solve(&(-&gf));
                // full model step first, then a projected backtracking search
                // along it, since hinge rows switching make the model local
                let mut alpha = 1.0;
                let mut accepted = None;
                for _ in 0..LINE_SEARCH_STEPS {
                    let mut trial = x.clone();
                    for (k, &i) in free.iter().enumerate() {
                        trial[i] += alpha * d[k];
                    }
                    project(&mut trial, lo, hi);
                    let st = DVector::from_iterator(n, trial.iter().zip(&x).map(|(a, b)| a - b));
                    let slope = g.dot(&st);
                    let predicted = -(slope + 0.5 * st.dot(&(&h * &st)));
                    if let Ok(trial_ev) = evaluate(self.problem, &trial) {
                        let trial_value = self.merit(&trial_ev);
                        let actual = value - trial_value;
                        let ok = if alpha == 1.0 {
                            predicted > 0.0 && actual >= ACCEPT_RATIO * predicted
                        } else {
                            slope < 0.0 && actual >= -ACCEPT_RATIO * slope
                        };
                        if ok {
                            accepted = Some((trial, trial_ev, trial_value, actual / predicted));
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if let Some((trial, trial_ev, trial_value, ratio)) = accepted {
                    let small = value - trial_value <= 1e-15 * value.abs().max(1.0);
                    x = trial;
                    ev = trial_ev;
                    value = trial_value;
                    damping = if alpha == 1.0 {
                        let r = ratio.min(1.0);
                        (damping * (1.0f64 / 3.0).max(1.0 - (2.0 * r - 1.0).powi(3))).max(1e-12)
                    } else {
                        damping * 2.0
                    };
                    improved = !small;
                    if small {
                        converged = projected_gradient_norm(&x, g.as_slice(), lo, hi) <= tol.sqrt();
                    }
                    break;
                }
                damping *= 10.0;
            }
            log::trace!("inner {iterations}: merit {value:.6e} damping {damping:.1e} active {}", active.len());
            if !improved {
                break;
            }
        }
        Ok(InnerResult { x, iterations, converged })
    }
}
