//! Tensor-product Bernstein (Bézier) surface algebra.
//!
//! Every field of the rod is a [`BernsteinSurface`] over `[0, s_len] x [0, t_len]`.
//! Control nets are stored at their native degrees; mixed-degree addition
//! elevates both operands to the larger degree first.

mod curve;
mod matrices;
mod quadrature;
mod surface;

pub use curve::BernsteinCurve;
pub use matrices::{elevation_matrix, restriction_matrix, DifferentiationMatrix};
pub use quadrature::QuadratureWeights;
pub use surface::{norm_sq, Axis, BernsteinSurface, Edge};

use crate::error::{domain_err, Result};
use crate::Scalar;

/// Largest degree for which binomial coefficients are formed with exact
/// integer arithmetic.
pub const EXACT_BINOMIAL_MAX: usize = 20;

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    if n <= EXACT_BINOMIAL_MAX {
        let k = k.min(n - k);
        let mut c: u64 = 1;
        for i in 0..k {
            c = c * (n - i) as u64 / (i as u64 + 1);
        }
        return T::from_u64(c).expect("binomial fits");
    }
    use statrs::function::gamma::ln_gamma;
    let ln = ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
    T::of(ln.exp().round())
}

/// Maps `s` in `[0, length]` to the unit parameter, tolerating a few ulps of
/// overshoot at the ends.
pub(crate) fn unit_param<T: Scalar>(s: T, length: T, what: &str) -> Result<T> {
    if !(length > T::zero()) || !length.is_finite() {
        return domain_err(format!("{what}: interval length {length} must be positive"));
    }
    let tol = T::epsilon() * T::of(16.0) * length;
    if !(s >= -tol && s <= length + tol) {
        return domain_err(format!("{what}: parameter {s} outside [0, {length}]"));
    }
    Ok((s / length).max(T::zero()).min(T::one()))
}

/// Bernstein basis polynomial `B_i^k(s)` over `[0, length]`:
/// `C(k,i) s^i (length - s)^(k-i) / length^k`.
pub fn basis<T: Scalar>(i: usize, k: usize, s: T, length: T) -> Result<T> {
    if i > k {
        return domain_err(format!("basis index {i} exceeds degree {k}"));
    }
    let u = unit_param(s, length, "basis")?;
    Ok(basis_unit(i, k, u))
}

/// Basis value on the unit interval; no range checks.
#[inline]
pub(crate) fn basis_unit<T: Scalar>(i: usize, k: usize, u: T) -> T {
    binomial::<T>(k, i) * u.powi(i as i32) * (T::one() - u).powi((k - i) as i32)
}

/// All `k + 1` basis values at the unit parameter `u`, via the triangular
/// recurrence (stable for any degree).
pub fn basis_row<T: Scalar>(k: usize, u: T) -> Vec<T> {
    let mut b = vec![T::zero(); k + 1];
    b[0] = T::one();
    let w = T::one() - u;
    for d in 1..=k {
        let mut prev = T::zero();
        for i in 0..d {
            let cur = b[i];
            b[i] = w * cur + prev;
            prev = u * cur;
        }
        b[d] = prev;
    }
    b
}

/// One-dimensional de Casteljau evaluation of `coeffs` (in place scratch).
pub(crate) fn de_casteljau<T: Scalar>(scratch: &mut [T], u: T) -> T {
    let k = scratch.len();
    if k == 0 {
        return T::zero();
    }
    let w = T::one() - u;
    for level in 1..k {
        for i in 0..k - level {
            scratch[i] = w * scratch[i] + u * scratch[i + 1];
        }
    }
    scratch[0]
}
