//! Motion planning for large vehicle formations modelled as a Cosserat rod.
//!
//! All rod fields (position, Euler angles, strains, velocities) are
//! Bernstein surfaces over arclength `s` and time `t`; the planning problem
//! is transcribed into a nonlinear program over their control nets. The
//! number of vehicles only enters when trajectories are sampled from the
//! solved surfaces.

pub mod bernstein;
pub mod cosserat;
pub mod error;
pub mod geometry;
mod scalar;
pub mod solver;
pub mod transcription;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision surface, the working type of the planner.
pub type Surface = bernstein::BernsteinSurface<f64>;
/// Single-precision surface.
pub type Surface32 = bernstein::BernsteinSurface<f32>;
pub type Curve = bernstein::BernsteinCurve<f64>;





