//! Certified bounds on the distance between a position surface and an obstacle.
//!
//! Lower bounds come from the hulls of control nets of subdivided patches
//! (every patch lies inside the hull of its net). Upper bounds come from the
//! patch corners, which are points of the surface. Patches are refined
//! best-first: the patch whose hull is closest to the obstacle is bisected
//! in both directions until it reaches the depth limit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::gjk::gjk_closest;
use super::obstacle::{ConvexPolytope, Obstacle};
use crate::bernstein::{Axis, BernsteinSurface};
use crate::error::{domain_err, shape_err, Result};
use crate::vec3::{self, Vec3};
use crate::Scalar;

pub const MAX_SUBDIVISION_DEPTH: usize = 12;
const NODE_BUDGET: usize = 400_000;

/// Safety margin and subdivision depth for a clearance query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceQuery<T> {
    pub epsilon: T,
    pub max_depth: usize,
}

impl<T: Scalar> Default for ClearanceQuery<T> {
    fn default() -> Self {
        Self { epsilon: T::of(0.005), max_depth: 6 }
    }
}

/// `lower <= min_{s,t} d(r(s,t), obstacle) <= upper`, distances clipped at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceBounds<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> ClearanceBounds<T> {
    /// Whether the certified lower bound meets the margin.
    pub fn is_clear(&self, epsilon: T) -> bool {
        self.lower >= epsilon
    }
}

/// Patch and closest-point data behind a lower bound.
#[derive(Debug, Clone)]
pub struct Witness<T> {
    /// Unit parameter rectangle `[u0, u1] x [w0, w1]` of the active patch.
    pub rect: [T; 4],
    /// `(i, j, weight)` over the active patch's control net.
    pub weights: Vec<(usize, usize, T)>,
    /// Unit vector from obstacle witness to surface-hull witness; zero when
    /// the hull touches the obstacle core.
    pub direction: Vec3<T>,
}

/// Unclipped bounds: for spheres these go negative (to `-radius`) when the
/// hull reaches inside.
#[derive(Debug, Clone)]
pub struct ClearanceDetail<T> {
    pub lower: T,
    pub upper: T,
    pub depth_reached: usize,
    pub patches_visited: usize,
    pub witness: Witness<T>,
}

struct Patch<T> {
    net: BernsteinSurface<T>,
    rect: [T; 4],
    depth: usize,
    lower: T,
    seq: usize,
    witness: (Vec<(usize, usize, T)>, Vec3<T>),
}

impl<T: Scalar> PartialEq for Patch<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Patch<T> {}
impl<T: Scalar> PartialOrd for Patch<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Patch<T> {
    // min-heap on lower bound, FIFO on ties
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .partial_cmp(&self.lower)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn net_points<T: Scalar>(f: &BernsteinSurface<T>) -> Vec<Vec3<T>> {
    f.net().chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
}

/// Signed hull distance plus witness weights over `(i, j)` net indices.
fn hull_distance<T: Scalar>(f: &BernsteinSurface<T>, obs: &Obstacle<T>) -> (T, Vec<(usize, usize, T)>, Vec3<T>) {
    let hull = ConvexPolytope::new(net_points(f)).expect("finite net");
    let (_, n) = f.degrees();
    let to_ij = |flat: usize| (flat / (n + 1), flat % (n + 1));
    let (dist, res) = match obs {
        Obstacle::Sphere(s) => {
            let r = gjk_closest(&hull, &ConvexPolytope::point(s.center)).expect("nonempty");
            (r.distance - s.radius, r)
        }
        Obstacle::Polytope(p) => {
            let r = gjk_closest(&hull, p).expect("nonempty");
            (r.distance, r)
        }
    };
    let weights = res.weights.iter().map(|&(ia, _, w)| (to_ij(ia).0, to_ij(ia).1, w)).collect();
    let diff = vec3::sub(res.point_a, res.point_b);
    let len = vec3::norm(diff);
    let direction = if res.distance > T::zero() && len > T::zero() { vec3::scale(diff, T::one() / len) } else { [T::zero(); 3] };
    (dist, weights, direction)
}

fn corner_upper<T: Scalar>(f: &BernsteinSurface<T>, obs: &Obstacle<T>) -> T {
    let (m, n) = f.degrees();
    [(0, 0), (0, n), (m, 0), (m, n)]
        .iter()
        .map(|&(i, j)| {
            let c = f.control(i, j);
            obs.signed_point_distance([c[0], c[1], c[2]])
        })
        .fold(T::infinity(), T::min)
}

/// Best-first refinement returning unclipped bounds and the active patch.
pub fn surface_clearance<T: Scalar>(
    f: &BernsteinSurface<T>,
    obs: &Obstacle<T>,
    max_depth: usize,
) -> Result<ClearanceDetail<T>> {
    if f.dim() != 3 {
        return shape_err(format!("clearance needs a 3-vector surface, got dim {}", f.dim()));
    }
    if max_depth > MAX_SUBDIVISION_DEPTH {
        return domain_err(format!("subdivision depth {max_depth} exceeds {MAX_SUBDIVISION_DEPTH}"));
    }
    let (zero, one, half) = (T::zero(), T::one(), T::of(0.5));
    let gap_tol = T::epsilon() * T::of(64.0);

    let mut upper = corner_upper(f, obs);
    let (lower, w, d) = hull_distance(f, obs);
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Patch { net: f.clone(), rect: [zero, one, zero, one], depth: 0, lower, seq, witness: (w, d) });

    let mut visited = 1usize;
    loop {
        let patch = heap.pop().expect("heap never drains: every pop pushes children or returns");
        let done = patch.depth >= max_depth
            || patch.lower >= upper - gap_tol * (one + upper.abs())
            || visited >= NODE_BUDGET;
        if done {
            return Ok(ClearanceDetail {
                lower: patch.lower.min(upper),
                upper,
                depth_reached: patch.depth,
                patches_visited: visited,
                witness: Witness { rect: patch.rect, weights: patch.witness.0, direction: patch.witness.1 },
            });
        }
        let [u0, u1, w0, w1] = patch.rect;
        let (um, wm) = ((u0 + u1) * half, (w0 + w1) * half);
        let (left, right) = patch.net.split(Axis::S, half)?;
        let pieces = [(left, u0, um), (right, um, u1)];
        for (piece, a0, a1) in pieces {
            let (lo, hi) = piece.split(Axis::T, half)?;
            for (child, b0, b1) in [(lo, w0, wm), (hi, wm, w1)] {
                upper = upper.min(corner_upper(&child, obs));
                let (dist, weights, dir) = hull_distance(&child, obs);
                seq += 1;
                visited += 1;
                heap.push(Patch {
                    lower: dist.max(patch.lower),
                    net: child,
                    rect: [a0, a1, b0, b1],
                    depth: patch.depth + 1,
                    seq,
                    witness: (weights, dir),
                });
            }
        }
    }
}

/// A depth-limit patch with its signed hull distance and soft-min weight.
#[derive(Debug, Clone)]
pub struct LeafPatch<T> {
    pub distance: T,
    pub weight: T,
    pub witness: Witness<T>,
}

/// Log-sum-exp aggregate of leaf hull distances.
#[derive(Debug, Clone)]
pub struct SmoothClearance<T> {
    /// `-k ln sum exp(-d_i / k)`; never above the smallest leaf distance.
    pub value: T,
    /// Smallest leaf distance, the plain lower bound at this depth.
    pub min_leaf: T,
    /// Leaves within `LEAF_CUTOFF * k` of the smallest, weights summing to one.
    pub leaves: Vec<LeafPatch<T>>,
}

/// Leaves farther than this many smoothing lengths above the closest are dropped.
const LEAF_CUTOFF: f64 = 30.0;

/// Smoothed lower bound on the signed clearance, differentiable in the net.
///
/// Every patch at `depth` whose hull distance is within `LEAF_CUTOFF`
/// smoothing lengths `k` of the closest is kept; the value is their soft
/// minimum with length scale `k`. Dropping far leaves and the log-sum-exp
/// both only lower the value relative to the plain hull bound, so it stays
/// a certified lower bound.
pub fn smooth_clearance<T: Scalar>(
    f: &BernsteinSurface<T>,
    obs: &Obstacle<T>,
    depth: usize,
    smoothing: T,
) -> Result<SmoothClearance<T>> {
    if f.dim() != 3 {
        return shape_err(format!("clearance needs a 3-vector surface, got dim {}", f.dim()));
    }
    if depth > MAX_SUBDIVISION_DEPTH {
        return domain_err(format!("subdivision depth {depth} exceeds {MAX_SUBDIVISION_DEPTH}"));
    }
    if !(smoothing > T::zero()) {
        return domain_err(format!("smoothing length {smoothing} must be positive"));
    }
    let (zero, one, half) = (T::zero(), T::one(), T::of(0.5));
    let cutoff = smoothing * T::of(LEAF_CUTOFF);
    let mut upper = corner_upper(f, obs);
    let (lower, w, d) = hull_distance(f, obs);
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Patch { net: f.clone(), rect: [zero, one, zero, one], depth: 0, lower, seq, witness: (w, d) });
    let mut raw: Vec<(T, Witness<T>)> = Vec::new();
    let mut visited = 1usize;
    while let Some(patch) = heap.pop() {
        if patch.lower > upper + cutoff {
            break;
        }
        if patch.depth >= depth {
            raw.push((patch.lower, Witness { rect: patch.rect, weights: patch.witness.0, direction: patch.witness.1 }));
            continue;
        }
        if visited >= NODE_BUDGET {
            return domain_err(format!("smoothed clearance exceeded {NODE_BUDGET} patches"));
        }
        let [u0, u1, w0, w1] = patch.rect;
        let (um, wm) = ((u0 + u1) * half, (w0 + w1) * half);
        let (left, right) = patch.net.split(Axis::S, half)?;
        for (piece, a0, a1) in [(left, u0, um), (right, um, u1)] {
            let (lo, hi) = piece.split(Axis::T, half)?;
            for (child, b0, b1) in [(lo, w0, wm), (hi, wm, w1)] {
                upper = upper.min(corner_upper(&child, obs));
                let (dist, weights, dir) = hull_distance(&child, obs);
                seq += 1;
                visited += 1;
                heap.push(Patch {
                    lower: dist,
                    net: child,
                    rect: [a0, a1, b0, b1],
                    depth: patch.depth + 1,
                    seq,
                    witness: (weights, dir),
                });
            }
        }
    }
    let min_leaf = raw.iter().map(|(d, _)| *d).fold(T::infinity(), T::min);
    let exps: Vec<T> = raw.iter().map(|(d, _)| (-(*d - min_leaf) / smoothing).exp()).collect();
    let total: T = exps.iter().copied().sum();
    let value = min_leaf - smoothing * total.ln();
    let leaves = raw
        .into_iter()
        .zip(exps)
        .map(|((distance, witness), e)| LeafPatch { distance, weight: e / total, witness })
        .collect();
    Ok(SmoothClearance { value, min_leaf, leaves })
}

/// Certified bounds on `min_{s,t} d(r(s,t), obstacle)`, clipped at zero.
pub fn surface_min_distance<T: Scalar>(
    f: &BernsteinSurface<T>,
    obs: &Obstacle<T>,
    q: &ClearanceQuery<T>,
) -> Result<ClearanceBounds<T>> {
    let d = surface_clearance(f, obs, q.max_depth)?;
    Ok(ClearanceBounds { lower: d.lower.max(T::zero()), upper: d.upper.max(T::zero()) })
}
