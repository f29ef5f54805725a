//! Gilbert-Johnson-Keerthi distance between convex hulls of point sets.
//!
//! The closest point of the Minkowski difference to the origin is tracked
//! as a convex combination of support pairs, so callers get the witness
//! points and their barycentric weights on both input sets.

use super::obstacle::ConvexPolytope;
use crate::error::Result;
use crate::vec3::{self, Vec3};
use crate::Scalar;

/// Relative tolerance on the support-function improvement.
pub const GJK_TOLERANCE: f64 = 1e-10;
pub const GJK_MAX_ITERATIONS: usize = 128;

#[derive(Debug, Clone, Copy)]
struct Vertex<T> {
    w: Vec3<T>,
    ia: usize,
    ib: usize,
}

/// Distance between two hulls plus the witness points.
#[derive(Debug, Clone)]
pub struct GjkResult<T> {
    pub distance: T,
    pub point_a: Vec3<T>,
    pub point_b: Vec3<T>,
    /// `(index into a, index into b, weight)`; weights are nonnegative and sum to one.
    pub weights: Vec<(usize, usize, T)>,
    pub iterations: usize,
}

pub fn gjk_distance<T: Scalar>(a: &ConvexPolytope<T>, b: &ConvexPolytope<T>) -> Result<T> {
    Ok(gjk_closest(a, b)?.distance)
}

fn support<T: Scalar>(points: &[Vec3<T>], dir: Vec3<T>) -> usize {
    let mut best = 0;
    let mut best_val = vec3::dot(points[0], dir);
    for (i, &p) in points.iter().enumerate().skip(1) {
        let v = vec3::dot(p, dir);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    best
}

pub fn gjk_closest<T: Scalar>(a: &ConvexPolytope<T>, b: &ConvexPolytope<T>) -> Result<GjkResult<T>> {
    let (pa, pb) = (a.vertices(), b.vertices());
    let make = |ia: usize, ib: usize| Vertex { w: vec3::sub(pa[ia], pb[ib]), ia, ib };

    let mut simplex: Vec<(Vertex<T>, T)> = vec![(make(0, 0), T::one())];
    let mut v = simplex[0].0.w;
    let tol = T::of(GJK_TOLERANCE);
    let tiny = T::min_positive_value().sqrt();
    let mut iterations = 0;
    let mut intersect = false;

    while iterations < GJK_MAX_ITERATIONS {
        iterations += 1;
        let vv = vec3::norm_sq(v);
        if vv <= tiny {
            intersect = true;
            break;
        }
        let neg = vec3::scale(v, -T::one());
        let w = make(support(pa, neg), support(pb, v));
        if vv - vec3::dot(v, w.w) <= tol * vv {
            break;
        }
        if simplex.iter().any(|(s, _)| s.ia == w.ia && s.ib == w.ib) {
            break;
        }
        let mut verts: Vec<Vertex<T>> = simplex.iter().map(|(s, _)| *s).collect();
        verts.push(w);
        match closest_on_simplex(&verts) {
            None => {
                intersect = true;
                break;
            }
            Some((next, point)) => {
                if vec3::norm_sq(point) >= vv {
                    // no progress; keep the previous simplex
                    break;
                }
                simplex = next;
                v = point;
            }
        }
    }

    let mut point_a = [T::zero(); 3];
    let mut point_b = [T::zero(); 3];
    let weights: Vec<(usize, usize, T)> = simplex.iter().map(|(s, l)| (s.ia, s.ib, *l)).collect();
    for &(ia, ib, l) in &weights {
        point_a = vec3::add(point_a, vec3::scale(pa[ia], l));
        point_b = vec3::add(point_b, vec3::scale(pb[ib], l));
    }
    let distance = if intersect { T::zero() } else { vec3::norm(v) };
    Ok(GjkResult { distance, point_a, point_b, weights, iterations })
}

type Reduced<T> = (Vec<(Vertex<T>, T)>, Vec3<T>);

/// Closest point of the simplex to the origin, with the supporting
/// sub-simplex and weights. `None` when the origin is enclosed.
fn closest_on_simplex<T: Scalar>(verts: &[Vertex<T>]) -> Option<Reduced<T>> {
    match verts.len() {
        1 => Some((vec![(verts[0], T::one())], verts[0].w)),
        2 => Some(closest_segment(verts[0], verts[1])),
        3 => Some(closest_triangle(verts[0], verts[1], verts[2])),
        _ => closest_tetrahedron(verts),
    }
}

fn combine<T: Scalar>(parts: Vec<(Vertex<T>, T)>) -> Reduced<T> {
    let mut p = [T::zero(); 3];
    for (v, l) in &parts {
        p = vec3::add(p, vec3::scale(v.w, *l));
    }
    let kept = parts.into_iter().filter(|(_, l)| *l > T::zero()).collect();
    (kept, p)
}

fn closest_segment<T: Scalar>(a: Vertex<T>, b: Vertex<T>) -> Reduced<T> {
    let ab = vec3::sub(b.w, a.w);
    let denom = vec3::norm_sq(ab);
    if denom <= T::zero() {
        return (vec![(a, T::one())], a.w);
    }
    let t = -vec3::dot(a.w, ab) / denom;
    if t <= T::zero() {
        (vec![(a, T::one())], a.w)
    } else if t >= T::one() {
        (vec![(b, T::one())], b.w)
    } else {
        combine(vec![(a, T::one() - t), (b, t)])
    }
}

fn closest_triangle<T: Scalar>(a: Vertex<T>, b: Vertex<T>, c: Vertex<T>) -> Reduced<T> {
    let zero = T::zero();
    let ab = vec3::sub(b.w, a.w);
    let ac = vec3::sub(c.w, a.w);
    let ap = vec3::scale(a.w, -T::one());
    let d1 = vec3::dot(ab, ap);
    let d2 = vec3::dot(ac, ap);
    if d1 <= zero && d2 <= zero {
        return (vec![(a, T::one())], a.w);
    }
    let bp = vec3::scale(b.w, -T::one());
    let d3 = vec3::dot(ab, bp);
    let d4 = vec3::dot(ac, bp);
    if d3 >= zero && d4 <= d3 {
        return (vec![(b, T::one())], b.w);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= zero && d1 >= zero && d3 <= zero {
        let v = d1 / (d1 - d3);
        return combine(vec![(a, T::one() - v), (b, v)]);
    }
    let cp = vec3::scale(c.w, -T::one());
    let d5 = vec3::dot(ab, cp);
    let d6 = vec3::dot(ac, cp);
    if d6 >= zero && d5 <= d6 {
        return (vec![(c, T::one())], c.w);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= zero && d2 >= zero && d6 <= zero {
        let w = d2 / (d2 - d6);
        return combine(vec![(a, T::one() - w), (c, w)]);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= zero && (d4 - d3) >= zero && (d5 - d6) >= zero {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return combine(vec![(b, T::one() - w), (c, w)]);
    }
    let total = va + vb + vc;
    if total <= zero {
        // degenerate (collinear) triangle: best of its edges
        return [closest_segment(a, b), closest_segment(a, c), closest_segment(b, c)]
            .into_iter()
            .min_by(|x, y| vec3::norm_sq(x.1).partial_cmp(&vec3::norm_sq(y.1)).expect("finite"))
            .expect("three candidates");
    }
    let v = vb / total;
    let w = vc / total;
    combine(vec![(a, T::one() - v - w), (b, v), (c, w)])
}

fn closest_tetrahedron<T: Scalar>(verts: &[Vertex<T>]) -> Option<Reduced<T>> {
    let [a, b, c, d] = [verts[0], verts[1], verts[2], verts[3]];
    let faces = [(a, b, c, d), (a, c, d, b), (a, d, b, c), (b, d, c, a)];
    let vol = vec3::dot(vec3::sub(b.w, a.w), vec3::cross(vec3::sub(c.w, a.w), vec3::sub(d.w, a.w)));
    let scale = [b.w, c.w, d.w]
        .iter()
        .map(|p| vec3::norm(vec3::sub(*p, a.w)))
        .fold(T::zero(), T::max);
    let degenerate = vol.abs() <= T::epsilon() * T::of(64.0) * scale * scale * scale;

    let mut best: Option<Reduced<T>> = None;
    let mut any_outside = false;
    for (p, q, r, opposite) in faces {
        let n = vec3::cross(vec3::sub(q.w, p.w), vec3::sub(r.w, p.w));
        let side_origin = -vec3::dot(p.w, n);
        let side_opp = vec3::dot(vec3::sub(opposite.w, p.w), n);
        if degenerate || side_origin * side_opp < T::zero() {
            any_outside = true;
            let cand = closest_triangle(p, q, r);
            let better = match &best {
                None => true,
                Some(bst) => vec3::norm_sq(cand.1) < vec3::norm_sq(bst.1),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    if !any_outside {
        return None;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_to_unit_cube() {
        let cube = ConvexPolytope::aabb([-0.5, -0.5, -0.5], [0.5, 0.5, 0.5]);
        let p = ConvexPolytope::<f64>::point([2.0, 0.0, 0.0]);
        assert!((gjk_distance(&p, &cube).unwrap() - 1.5).abs() < 1e-12);
        assert!((gjk_distance(&cube, &p).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn identical_polytopes_intersect() {
        let t = ConvexPolytope::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(gjk_distance(&t, &t).unwrap(), 0.0);
    }

    #[test]
    fn witness_weights_reconstruct_points() {
        let a = ConvexPolytope::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let b = ConvexPolytope::<f64>::point([0.25, 0.25, 2.0]);
        let r = gjk_closest(&a, &b).unwrap();
        assert!((r.distance - 2.0).abs() < 1e-12);
        let total: f64 = r.weights.iter().map(|w| w.2).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((r.point_a[0] - 0.25).abs() < 1e-12 && (r.point_a[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn boxes_axis_gap() {
        let a = ConvexPolytope::aabb([0.0, 0.0, 0.0], [1.0, 1.0, 1.0]);
        let b = ConvexPolytope::aabb([2.0, 3.0, 0.5], [3.0, 4.0, 2.0]);
        let expect = (1.0f64 + 4.0).sqrt();
        assert!((gjk_distance(&a, &b).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn works_in_f32() {
        let cube = ConvexPolytope::aabb([-0.5f32; 3], [0.5f32; 3]);
        let p = ConvexPolytope::point([0.0f32, 3.0, 0.0]);
        assert!((gjk_distance(&p, &cube).unwrap() - 2.5).abs() < 1e-5);
    }
}
