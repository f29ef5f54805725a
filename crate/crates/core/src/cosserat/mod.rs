//! Cosserat rod kinematics on Bernstein-surface fields.
//!
//! The rod is described by its centerline `r(s, t)`, the cross-section
//! attitude `R(s, t)` (intrinsic Z-Y-X Euler angles), translational strain
//! `l`, bending strain `h`, velocity `v` and angular velocity `omega`, the
//! last four expressed in the body frame.

mod fields;
mod residuals;
mod rotation;

pub use fields::{CollocationGrid, RodFields};
pub use residuals::{kinematic_residuals, RESIDUALS_PER_NODE};
pub use rotation::{
    euler_rate_map, euler_rate_map_partials, rotation_from_euler, rotation_partials, skew, vee,
    GIMBAL_LOCK_THRESHOLD,
};
