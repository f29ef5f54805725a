use crate::error::{Error, Result};
use crate::vec3::{self, Mat3, Vec3};
use crate::Scalar;

/// `|cos(pitch)|` below which the Euler-rate map is rejected.
pub const GIMBAL_LOCK_THRESHOLD: f64 = 1e-6;

/// Skew-symmetric matrix with `skew(w) x = w x x`.
pub fn skew<T: Scalar>(w: Vec3<T>) -> Mat3<T> {
    let z = T::zero();
    [[z, -w[2], w[1]], [w[2], z, -w[0]], [-w[1], w[0], z]]
}

/// Inverse of [`skew`] on the antisymmetric part.
pub fn vee<T: Scalar>(m: &Mat3<T>) -> Vec3<T> {
    let half = T::of(0.5);
    [(m[2][1] - m[1][2]) * half, (m[0][2] - m[2][0]) * half, (m[1][0] - m[0][1]) * half]
}

fn rx<T: Scalar>(a: T) -> (Mat3<T>, Mat3<T>) {
    let (s, c) = a.sin_cos();
    let (o, z) = (T::one(), T::zero());
    ([[o, z, z], [z, c, -s], [z, s, c]], [[z, z, z], [z, -s, -c], [z, c, -s]])
}

fn ry<T: Scalar>(a: T) -> (Mat3<T>, Mat3<T>) {
    let (s, c) = a.sin_cos();
    let (o, z) = (T::one(), T::zero());
    ([[c, z, s], [z, o, z], [-s, z, c]], [[-s, z, c], [z, z, z], [-c, z, -s]])
}

fn rz<T: Scalar>(a: T) -> (Mat3<T>, Mat3<T>) {
    let (s, c) = a.sin_cos();
    let (o, z) = (T::one(), T::zero());
    ([[c, -s, z], [s, c, z], [z, z, o]], [[-s, -c, z], [c, -s, z], [z, z, z]])
}

/// `R = Rz(psi) Ry(theta) Rx(phi)`: roll `phi`, pitch `theta`, yaw `psi`.
pub fn rotation_from_euler<T: Scalar>(phi: T, theta: T, psi: T) -> Mat3<T> {
    let (x, _) = rx(phi);
    let (y, _) = ry(theta);
    let (z, _) = rz(psi);
    vec3::mat_mul(&z, &vec3::mat_mul(&y, &x))
}

/// `[dR/dphi, dR/dtheta, dR/dpsi]`.
pub fn rotation_partials<T: Scalar>(phi: T, theta: T, psi: T) -> [Mat3<T>; 3] {
    let (x, dx) = rx(phi);
    let (y, dy) = ry(theta);
    let (z, dz) = rz(psi);
    [
        vec3::mat_mul(&z, &vec3::mat_mul(&y, &dx)),
        vec3::mat_mul(&z, &vec3::mat_mul(&dy, &x)),
        vec3::mat_mul(&dz, &vec3::mat_mul(&y, &x)),
    ]
}

fn rate_map_unchecked<T: Scalar>(phi: T, theta: T) -> Mat3<T> {
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (o, z) = (T::one(), T::zero());
    [[o, z, -st], [z, cp, sp * ct], [z, -sp, cp * ct]]
}

/// `E` with body angular rate `= E (dphi, dtheta, dpsi)^T`, matching
/// `vee(R^T dR)` for the Z-Y-X convention.
///
/// `(s, t)` only labels the error when pitch is within the gimbal-lock band.
pub fn euler_rate_map<T: Scalar>(phi: T, theta: T, at: (f64, f64)) -> Result<Mat3<T>> {
    let c = theta.cos().abs();
    if !(c > T::of(GIMBAL_LOCK_THRESHOLD)) {
        return Err(Error::Singularity { s: at.0, t: at.1, cos_pitch: c.to_f64_lossy() });
    }
    Ok(rate_map_unchecked(phi, theta))
}

/// `[dE/dphi, dE/dtheta]` (`E` does not depend on yaw).
pub fn euler_rate_map_partials<T: Scalar>(phi: T, theta: T) -> [Mat3<T>; 2] {
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let z = T::zero();
    [
        [[z, z, z], [z, -sp, cp * ct], [z, -cp, -sp * ct]],
        [[z, z, -ct], [z, z, -sp * st], [z, z, -cp * st]],
    ]
}
