//! Minimum-distance machinery between Bernstein surfaces and convex obstacles.

mod clearance;
mod gjk;
mod obstacle;

pub use clearance::{
    smooth_clearance, surface_clearance, surface_min_distance, ClearanceBounds, ClearanceDetail, ClearanceQuery, LeafPatch,
    SmoothClearance, Witness,
    MAX_SUBDIVISION_DEPTH,
};
pub use gjk::{gjk_closest, gjk_distance, GjkResult, GJK_MAX_ITERATIONS, GJK_TOLERANCE};
pub use obstacle::{distance_to_sphere, ConvexPolytope, Obstacle, SphereObstacle};
