use proptest::prelude::*;
use rodplan::bernstein::BernsteinSurface;
use rodplan::geometry::{
    distance_to_sphere, gjk_closest, gjk_distance, smooth_clearance, surface_clearance, surface_min_distance,
    ClearanceQuery, ConvexPolytope, Obstacle, SphereObstacle,
};

fn gap(lo_a: [f64; 3], hi_a: [f64; 3], lo_b: [f64; 3], hi_b: [f64; 3]) -> f64 {
    (0..3).map(|k| (lo_b[k] - hi_a[k]).max(lo_a[k] - hi_b[k]).max(0.0).powi(2)).sum::<f64>().sqrt()
}

fn point3() -> impl Strategy<Value = [f64; 3]> {
    [-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0]
}

fn box3() -> impl Strategy<Value = ([f64; 3], [f64; 3])> {
    (point3(), [0.01f64..1.5, 0.01f64..1.5, 0.01f64..1.5])
        .prop_map(|(lo, size)| (lo, [lo[0] + size[0], lo[1] + size[1], lo[2] + size[2]]))
}

prop_compose! {
    fn position_surface()(m in 1usize..5, n in 1usize..5)
        (net in prop::collection::vec(-1.0f64..1.0, (m + 1) * (n + 1) * 3), m in Just(m), n in Just(n))
        -> BernsteinSurface<f64> {
        BernsteinSurface::new(m, n, 1.0, 2.0, 3, net).unwrap()
    }
}

fn sampled_min(f: &BernsteinSurface<f64>, dist: impl Fn([f64; 3]) -> f64) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..=60 {
        for b in 0..=60 {
            let p = f.eval(f.s_length() * a as f64 / 60.0, f.t_length() * b as f64 / 60.0).unwrap();
            best = best.min(dist([p[0], p[1], p[2]]));
        }
    }
    best
}

#[test]
fn unit_cubes_and_points() {
    let a = ConvexPolytope::<f64>::aabb([0.0; 3], [1.0; 3]);
    let b = ConvexPolytope::aabb([2.0, 0.0, 0.0], [3.0, 1.0, 1.0]);
    assert!((gjk_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    // edge to edge across a diagonal gap
    let c = ConvexPolytope::aabb([2.0, 2.0, 0.0], [3.0, 3.0, 1.0]);
    assert!((gjk_distance(&a, &c).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    let inside = ConvexPolytope::point([0.5, 0.5, 0.5]);
    assert_eq!(gjk_distance(&a, &inside).unwrap(), 0.0);

    let r = gjk_closest(&a, &ConvexPolytope::point([0.5, 0.5, 3.0])).unwrap();
    assert!((r.distance - 2.0).abs() < 1e-12);
}

#[test]
fn sphere_clearance_of_a_flat_sheet() {
    // the plane z = 0 over [0, 1]^2 against a sphere above its centre
    let f = BernsteinSurface::from_fn(2, 3, 1.0, 1.0, 3, |i, j| vec![i as f64 / 2.0, j as f64 / 3.0, 0.0]).unwrap();
    let obs = Obstacle::Sphere(SphereObstacle::new([0.5, 0.5, 0.3], 0.1).unwrap());
    let b = surface_min_distance(&f, &obs, &ClearanceQuery { epsilon: 0.05, max_depth: 6 }).unwrap();
    assert!((b.lower - 0.2).abs() < 1e-12 && (b.upper - 0.2).abs() < 1e-12);
    assert!(b.is_clear(0.05) && !b.is_clear(0.25));
}

#[test]
fn negative_clearance_inside_a_sphere() {
    let f = BernsteinSurface::<f64>::constant(2, 2, 1.0, 1.0, &[0.0, 0.0, 0.0]).unwrap();
    let obs = Obstacle::Sphere(SphereObstacle::new([0.0, 0.0, 0.01], 0.03).unwrap());
    let d = surface_clearance(&f, &obs, 4).unwrap();
    assert!((d.lower + 0.02).abs() < 1e-12);
    assert_eq!(surface_min_distance(&f, &obs, &ClearanceQuery::default()).unwrap().lower, 0.0);
}

#[test]
fn depth_limit_is_enforced() {
    let f = BernsteinSurface::<f64>::zeros(1, 1, 1.0, 1.0, 3).unwrap();
    let obs = Obstacle::Sphere(SphereObstacle::new([1.0; 3], 0.1).unwrap());
    assert!(surface_clearance(&f, &obs, 99).is_err());
    assert!(smooth_clearance(&f, &obs, 2, 0.0).is_err());
}

proptest! {
    #[test]
    fn gjk_matches_box_gap((la, ha) in box3(), (lb, hb) in box3()) {
        let d = gjk_distance(&ConvexPolytope::aabb(la, ha), &ConvexPolytope::aabb(lb, hb)).unwrap();
        prop_assert!((d - gap(la, ha, lb, hb)).abs() <= 1e-9);
    }

    #[test]
    fn gjk_is_symmetric(pa in prop::collection::vec(point3(), 1..8), pb in prop::collection::vec(point3(), 1..8)) {
        let a = ConvexPolytope::new(pa).unwrap();
        let b = ConvexPolytope::new(pb).unwrap();
        let (ab, ba) = (gjk_distance(&a, &b).unwrap(), gjk_distance(&b, &a).unwrap());
        prop_assert!((ab - ba).abs() <= 1e-9);
        // never above the closest vertex pair
        let pairs = a.vertices().iter().flat_map(|p| b.vertices().iter().map(move |q| {
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
        }));
        prop_assert!(ab <= pairs.fold(f64::INFINITY, f64::min) + 1e-12);
    }

    #[test]
    fn sphere_distance_of_a_point(p in point3(), c in point3(), r in 0.01f64..1.0) {
        let d = distance_to_sphere(&ConvexPolytope::point(p), &SphereObstacle::new(c, r).unwrap());
        let exact = ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt() - r;
        prop_assert!((d - exact.max(0.0)).abs() <= 1e-12);
    }

    #[test]
    fn lower_bound_is_sound_and_tightens(f in position_surface(), c in point3(), r in 0.05f64..0.8) {
        let obs = Obstacle::Sphere(SphereObstacle::new(c, r).unwrap());
        let truth = sampled_min(&f, |p| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt() - r);
        let mut prev = f64::NEG_INFINITY;
        for depth in 0..=6 {
            let d = surface_clearance(&f, &obs, depth).unwrap();
            prop_assert!(d.lower <= truth + 1e-12);
            prop_assert!(d.lower <= d.upper + 1e-12);
            prop_assert!(d.lower >= prev - 1e-12);
            prev = d.lower;
        }
    }

    #[test]
    fn box_obstacles_are_bounded_too(f in position_surface(), (lo, hi) in box3()) {
        let obs = Obstacle::Polytope(ConvexPolytope::aabb(lo, hi));
        let truth = sampled_min(&f, |p| gap(p, p, lo, hi));
        let b = surface_min_distance(&f, &obs, &ClearanceQuery { epsilon: 0.0, max_depth: 5 }).unwrap();
        prop_assert!(b.lower <= truth + 1e-12);
    }

    #[test]
    fn smoothed_clearance_never_exceeds_the_hull_bound(f in position_surface(), c in point3(), r in 0.05f64..0.8, k in 1e-4f64..1e-1) {
        let obs = Obstacle::Sphere(SphereObstacle::new(c, r).unwrap());
        let depth = 3;
        let smooth = smooth_clearance(&f, &obs, depth, k).unwrap();
        let hard = surface_clearance(&f, &obs, depth).unwrap();
        prop_assert!(smooth.value <= smooth.min_leaf + 1e-15);
        prop_assert!(smooth.value <= hard.lower + 1e-12);
        let total: f64 = smooth.leaves.iter().map(|l| l.weight).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }
}
