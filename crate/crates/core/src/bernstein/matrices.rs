use super::{binomial, de_casteljau};
use crate::error::{domain_err, shape_err, Result};
use crate::Scalar;

/// Square derivative operator for degree-`k` Bernstein coefficients over an
/// interval of given length.
///
/// `entries[i][a]` is the weight of input coefficient `i` in output
/// coefficient `a`, so the s-derivative of a net `P` is `D^T P` and the
/// t-derivative is `P D`. The output stays at degree `k`: the exact
/// degree-`(k-1)` derivative is elevated back to degree `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentiationMatrix<T> {
    order: usize,
    entries: Vec<T>,
}

impl<T: Scalar> DifferentiationMatrix<T> {
    pub fn new(order: usize, length: T) -> Result<Self> {
        if !(length > T::zero()) {
            return domain_err(format!("differentiation interval length {length} must be positive"));
        }
        let k = order;
        let size = k + 1;
        let mut entries = vec![T::zero(); size * size];
        if k == 0 {
            return Ok(Self { order, entries });
        }
        let kf = T::of_usize(k);
        let scale = kf / length;
        // lowered[i][c] : weight of input i in the degree-(k-1) derivative coefficient c
        // elevation back: out_a = (a/k) lowered_{a-1} + (1 - a/k) lowered_a
        for a in 0..=k {
            let alpha = T::of_usize(a) / kf;
            if a >= 1 {
                // lowered_{a-1} = scale * (P_a - P_{a-1})
                entries[a * size + a] = entries[a * size + a] + alpha * scale;
                entries[(a - 1) * size + a] = entries[(a - 1) * size + a] - alpha * scale;
            }
            if a < k {
                let beta = T::one() - alpha;
                entries[(a + 1) * size + a] = entries[(a + 1) * size + a] + beta * scale;
                entries[a * size + a] = entries[a * size + a] - beta * scale;
            }
        }
        Ok(Self { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Weight of input coefficient `i` in output coefficient `a`.
    #[inline]
    pub fn get(&self, i: usize, a: usize) -> T {
        self.entries[i * (self.order + 1) + a]
    }

    /// Differentiates a coefficient vector (`D^T c`).
    pub fn apply(&self, coeffs: &[T]) -> Vec<T> {
        let size = self.order + 1;
        (0..size)
            .map(|a| (0..size).map(|i| self.get(i, a) * coeffs[i]).sum())
            .collect()
    }
}

/// Degree elevation from `from` to `to`: `out[r] = sum_i E[r][i] c[i]`,
/// returned row-major `(to+1) x (from+1)`. Rows are convex weights.
pub fn elevation_matrix<T: Scalar>(from: usize, to: usize) -> Result<Vec<T>> {
    if to < from {
        return shape_err(format!("cannot elevate degree {from} down to {to}"));
    }
    let cols = from + 1;
    let mut e = vec![T::zero(); (to + 1) * cols];
    let extra = to - from;
    for r in 0..=to {
        let denom = binomial::<T>(to, r);
        let lo = r.saturating_sub(extra);
        for i in lo..=r.min(from) {
            e[r * cols + i] = binomial::<T>(from, i) * binomial::<T>(extra, r - i) / denom;
        }
    }
    Ok(e)
}

/// Control-point map for the restriction of a degree-`k` curve on the unit
/// interval to `[a, b]`, returned row-major `(k+1) x (k+1)`.
pub fn restriction_matrix<T: Scalar>(k: usize, a: T, b: T) -> Result<Vec<T>> {
    if !(a >= T::zero() && b <= T::one() && a < b) {
        return domain_err(format!("restriction interval [{a}, {b}] not inside [0, 1]"));
    }
    let size = k + 1;
    let mut out = vec![T::zero(); size * size];
    for col in 0..size {
        let mut unit = vec![T::zero(); size];
        unit[col] = T::one();
        let piece = restrict_coeffs(&unit, a, b);
        for (row, v) in piece.into_iter().enumerate() {
            out[row * size + col] = v;
        }
    }
    Ok(out)
}

/// de Casteljau split of one coefficient row at `u`: (left, right).
pub(crate) fn split_coeffs<T: Scalar>(coeffs: &[T], u: T) -> (Vec<T>, Vec<T>) {
    let k = coeffs.len();
    let mut work = coeffs.to_vec();
    let mut left = Vec::with_capacity(k);
    let mut right = vec![T::zero(); k];
    let w = T::one() - u;
    left.push(work[0]);
    right[k - 1] = work[k - 1];
    for level in 1..k {
        for i in 0..k - level {
            work[i] = w * work[i] + u * work[i + 1];
        }
        left.push(work[0]);
        right[k - 1 - level] = work[k - 1 - level];
    }
    (left, right)
}

pub(crate) fn restrict_coeffs<T: Scalar>(coeffs: &[T], a: T, b: T) -> Vec<T> {
    let upper = if b < T::one() { split_coeffs(coeffs, b).0 } else { coeffs.to_vec() };
    if a > T::zero() {
        split_coeffs(&upper, a / b).1
    } else {
        upper
    }
}

#[allow(dead_code)]
pub(crate) fn eval_coeffs<T: Scalar>(coeffs: &[T], u: T) -> T {
    let mut scratch = coeffs.to_vec();
    de_casteljau(&mut scratch, u)
}
