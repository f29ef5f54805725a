use serde::{Deserialize, Serialize};

use super::gjk::gjk_distance;
use crate::error::{shape_err, Result};
use crate::vec3::{self, Vec3};
use crate::Scalar;

/// Convex hull of a finite, nonempty point set.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolytope<T> {
    vertices: Vec<Vec3<T>>,
}

impl<T: Scalar> ConvexPolytope<T> {
    pub fn new(vertices: Vec<Vec3<T>>) -> Result<Self> {
        if vertices.is_empty() {
            return shape_err("polytope needs at least one vertex");
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return shape_err("polytope vertices must be finite");
        }
        Ok(Self { vertices })
    }

    pub fn point(p: Vec3<T>) -> Self {
        Self { vertices: vec![p] }
    }

    /// Axis-aligned box from its two extreme corners.
    pub fn aabb(lo: Vec3<T>, hi: Vec3<T>) -> Self {
        let mut vertices = Vec::with_capacity(8);
        for mask in 0..8 {
            vertices.push([
                if mask & 1 == 0 { lo[0] } else { hi[0] },
                if mask & 2 == 0 { lo[1] } else { hi[1] },
                if mask & 4 == 0 { lo[2] } else { hi[2] },
            ]);
        }
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Vec3<T>] {
        &self.vertices
    }
}

/// Solid ball obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereObstacle<T> {
    pub center: Vec3<T>,
    pub radius: T,
}

impl<T: Scalar> SphereObstacle<T> {
    pub fn new(center: Vec3<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || center.iter().any(|c| !c.is_finite()) {
            return shape_err(format!("sphere radius {radius} must be positive and center finite"));
        }
        Ok(Self { center, radius })
    }
}

/// Convex obstacle the rod must keep clear of.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle<T> {
    Sphere(SphereObstacle<T>),
    Polytope(ConvexPolytope<T>),
}

impl<T: Scalar> Obstacle<T> {
    /// Distance from a point; negative inside a sphere (down to `-radius`),
    /// zero inside a polytope.
    pub fn signed_point_distance(&self, p: Vec3<T>) -> T {
        match self {
            Obstacle::Sphere(s) => vec3::norm(vec3::sub(p, s.center)) - s.radius,
            Obstacle::Polytope(poly) => gjk_distance(&ConvexPolytope::point(p), poly).unwrap_or(T::zero()),
        }
    }
}

/// `max(0, dist(hull, center) - radius)`.
pub fn distance_to_sphere<T: Scalar>(a: &ConvexPolytope<T>, s: &SphereObstacle<T>) -> T {
    let d = gjk_distance(a, &ConvexPolytope::point(s.center)).expect("nonempty polytopes");
    (d - s.radius).max(T::zero())
}
