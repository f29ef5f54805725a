//! Projected limited-memory BFGS for smooth objectives over a box.

use std::collections::VecDeque;

use crate::error::Result;

/// Outcome of a box-constrained minimization.
#[derive(Debug, Clone)]
pub struct BoxResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    /// Infinity norm of `P(x - g) - x`.
    pub projected_gradient: f64,
    pub converged: bool,
}

pub(super) fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((v, &l), &h) in x.iter_mut().zip(lo).zip(hi) {
        *v = v.max(l).min(h);
    }
}

pub(super) fn projected_gradient_norm(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    x.iter()
        .zip(g)
        .zip(lo.iter().zip(hi))
        .map(|((&xi, &gi), (&l, &h))| ((xi - gi).max(l).min(h) - xi).abs())
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `fun` over `[lo, hi]` starting from `x0`.
///
/// `fun(x, grad)` returns the value and writes the gradient.
pub fn minimize_box<F>(
    mut fun: F,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    max_iter: usize,
    tol: f64,
    memory: usize,
) -> Result<BoxResult>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<f64>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let mut g = vec![0.0; n];
    let mut f = fun(&x, &mut g)?;
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(memory);
    let mut iterations = 0;
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];

    loop {
        let pg = projected_gradient_norm(&x, &g, lo, hi);
        if pg <= tol {
            return Ok(BoxResult { x, value: f, gradient: g, iterations, projected_gradient: pg, converged: true });
        }
        if iterations >= max_iter {
            return Ok(BoxResult { x, value: f, gradient: g, iterations, projected_gradient: pg, converged: false });
        }
        iterations += 1;

        // variables pinned at a bound with the gradient pushing outward stay fixed
        let pinned: Vec<bool> = (0..n)
            .map(|i| (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0))
            .collect();
        let mut q: Vec<f64> = g.iter().zip(&pinned).map(|(&gi, &p)| if p { 0.0 } else { gi }).collect();

        // two-loop recursion
        let mut alphas = Vec::with_capacity(pairs.len());
        for (s, y, rho) in pairs.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = pairs.back().map(|(s, y, _)| dot(s, y) / dot(y, y)).unwrap_or(1.0);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
        for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        let mut d: Vec<f64> = q.iter().zip(&pinned).map(|(&qi, &p)| if p { 0.0 } else { -qi }).collect();
        let gnorm = dot(&g, &g).sqrt();
        if dot(&g, &d) >= -1e-12 * gnorm * dot(&d, &d).sqrt() || pairs.is_empty() {
            if !pairs.is_empty() {
                pairs.clear();
            }
            let ginf = g.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
            let scale = (1.0 / ginf).min(1.0);
            d = g.iter().zip(&pinned).map(|(&gi, &p)| if p { 0.0 } else { -gi * scale }).collect();
        }

        // backtracking Armijo search along the projected path
        let mut step = 1.0;
        let mut accepted = false;
        let mut f_new = f;
        for _ in 0..50 {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            project(&mut x_new, lo, hi);
            let decrease: f64 = (0..n).map(|i| g[i] * (x_new[i] - x[i])).sum();
            if decrease >= 0.0 {
                step *= 0.5;
                continue;
            }
            f_new = fun(&x_new, &mut g_new)?;
            if f_new.is_finite() && f_new <= f + 1e-4 * decrease {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            if !pairs.is_empty() {
                pairs.clear();
                continue;
            }
            let pg = projected_gradient_norm(&x, &g, lo, hi);
            return Ok(BoxResult { x, value: f, gradient: g, iterations, projected_gradient: pg, converged: false });
        }

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if pairs.len() == memory {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
    }
}
