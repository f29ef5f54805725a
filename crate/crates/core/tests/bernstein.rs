use proptest::prelude::*;
use rodplan::bernstein::{basis, binomial, Axis, BernsteinCurve, BernsteinSurface, Edge};

fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn power_basis(k: usize, i: usize, u: f64) -> f64 {
    choose(k, i) * u.powi(i as i32) * (1.0 - u).powi((k - i) as i32)
}

/// Direct double sum in power form.
fn oracle(f: &BernsteinSurface<f64>, s: f64, t: f64) -> Vec<f64> {
    let (m, n) = f.degrees();
    let (u, w) = (s / f.s_length(), t / f.t_length());
    let mut out = vec![0.0; f.dim()];
    for i in 0..=m {
        for j in 0..=n {
            let b = power_basis(m, i, u) * power_basis(n, j, w);
            for (o, c) in out.iter_mut().zip(f.control(i, j)) {
                *o += b * c;
            }
        }
    }
    out
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

prop_compose! {
    fn surface(dim: usize)(m in 0usize..7, n in 0usize..7, sl in 0.1f64..3.0, tl in 0.1f64..3.0)
        (net in prop::collection::vec(-1.0f64..1.0, (m + 1) * (n + 1) * dim), m in Just(m), n in Just(n), sl in Just(sl), tl in Just(tl))
        -> BernsteinSurface<f64> {
        BernsteinSurface::new(m, n, sl, tl, dim, net).unwrap()
    }
}

#[test]
fn small_examples() {
    assert_eq!(binomial::<f64>(6, 3), 20.0);
    assert_eq!(basis(1, 2, 0.5, 1.0).unwrap(), 0.5);
    assert_eq!(basis(0, 3, 0.0, 2.0).unwrap(), 1.0);
    assert!((basis(2, 3, 1.0f64, 2.0).unwrap() - 0.375).abs() < 1e-15);
    assert!(basis(0, 3, 2.5, 2.0).is_err());

    // bilinear patch: value at the centre is the mean of the corners
    let f = BernsteinSurface::from_rows(&[vec![0.0, 1.0], vec![2.0, 5.0]], 2.0, 4.0).unwrap();
    assert_eq!(f.eval_scalar(1.0, 2.0).unwrap(), 2.0);
    assert_eq!(f.integrate().unwrap(), 2.0 * 8.0);
}

#[test]
fn out_of_domain_queries_are_rejected() {
    let f = BernsteinSurface::<f64>::zeros(2, 2, 1.0, 1.0, 1).unwrap();
    assert!(f.eval(1.5, 0.0).is_err());
    assert!(f.eval(0.0, -0.1).is_err());
    assert!(f.split(Axis::S, 0.0).is_err());
    assert!(f.degree_elevate(1, 2).is_err());
}

#[test]
fn curve_integral_and_derivative() {
    // 3 s^2 on [0, 2]: Bernstein coefficients of s^2 at degree 2 are 0, 0, 4
    let c = BernsteinCurve::<f64>::new(2, 2.0, 1, vec![0.0, 0.0, 12.0]).unwrap();
    let total = c.integrate();
    assert!((total[0] - 8.0).abs() < 1e-14);
    let d = c.derivative().unwrap();
    assert!((d.eval(1.5).unwrap()[0] - 9.0).abs() < 1e-13);
}

proptest! {
    #[test]
    fn basis_sums_to_one(k in 0usize..25, u in 0.0f64..=1.0) {
        let sum: f64 = (0..=k).map(|i| basis(i, k, u, 1.0).unwrap()).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn evaluation_matches_power_form(f in surface(3), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (s, t) = (a * f.s_length(), b * f.t_length());
        prop_assert!(close(&f.eval(s, t).unwrap(), &oracle(&f, s, t), 1e-12));
        prop_assert!(close(&f.eval_by_basis(s, t).unwrap(), &oracle(&f, s, t), 1e-12));
    }

    #[test]
    fn corners_interpolate_exactly(f in surface(2)) {
        let (m, n) = f.degrees();
        let (sl, tl) = (f.s_length(), f.t_length());
        prop_assert_eq!(f.eval(0.0, 0.0).unwrap(), f.control(0, 0).to_vec());
        prop_assert_eq!(f.eval(sl, 0.0).unwrap(), f.control(m, 0).to_vec());
        prop_assert_eq!(f.eval(0.0, tl).unwrap(), f.control(0, n).to_vec());
        prop_assert_eq!(f.eval(sl, tl).unwrap(), f.control(m, n).to_vec());
    }

    #[test]
    fn elevation_and_split_preserve_values(
        f in surface(3), dm in 0usize..4, dn in 0usize..4, lambda in 0.05f64..0.95, a in 0.0f64..=1.0, b in 0.0f64..=1.0
    ) {
        let (m, n) = f.degrees();
        let (s, t) = (a * f.s_length(), b * f.t_length());
        let base = f.eval(s, t).unwrap();
        let up = f.degree_elevate(m + dm, n + dn).unwrap();
        prop_assert!(close(&up.eval(s, t).unwrap(), &base, 1e-12));

        let (left, right) = f.split(Axis::S, lambda).unwrap();
        let cut = lambda * f.s_length();
        let piece = if s <= cut { left.eval(s, t) } else { right.eval((s - cut).min(right.s_length()), t) };
        prop_assert!(close(&piece.unwrap(), &base, 1e-12));

        let (lo, hi) = f.split(Axis::T, lambda).unwrap();
        let cut = lambda * f.t_length();
        let piece = if t <= cut { lo.eval(s, t) } else { hi.eval(s, (t - cut).min(hi.t_length())) };
        prop_assert!(close(&piece.unwrap(), &base, 1e-12));
    }

    #[test]
    fn sub_patch_restricts(f in surface(1), u0 in 0.0f64..0.5, du in 0.1f64..0.5, w0 in 0.0f64..0.5, dw in 0.1f64..0.5, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let p = f.sub_patch(u0, u0 + du, w0, w0 + dw).unwrap();
        let inner = p.eval_scalar(a * p.s_length(), b * p.t_length()).unwrap();
        let outer = f.eval_scalar((u0 + a * du) * f.s_length(), (w0 + b * dw) * f.t_length()).unwrap();
        prop_assert!((inner - outer).abs() <= 1e-12);
    }

    #[test]
    fn product_is_pointwise(g in surface(1), f in surface(3), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let f = f.with_lengths(g.s_length(), g.t_length()).unwrap();
        let (s, t) = (a * g.s_length(), b * g.t_length());
        let gv = g.eval_scalar(s, t).unwrap();
        let expect: Vec<f64> = f.eval(s, t).unwrap().iter().map(|x| gv * x).collect();
        prop_assert!(close(&g.multiply(&f).unwrap().eval(s, t).unwrap(), &expect, 1e-11));
        let sq = f.norm_squared().unwrap().eval_scalar(s, t).unwrap();
        let direct: f64 = f.eval(s, t).unwrap().iter().map(|x| x * x).sum();
        prop_assert!((sq - direct).abs() <= 1e-11);
    }

    #[test]
    fn partial_derivatives_match_central_differences(f in surface(2), a in 0.05f64..0.95, b in 0.05f64..0.95) {
        let (s, t) = (a * f.s_length(), b * f.t_length());
        let h = 1e-6;
        let fd = |ds: f64, dt: f64| -> Vec<f64> {
            let p = oracle(&f, s + ds, t + dt);
            let q = oracle(&f, s - ds, t - dt);
            p.iter().zip(q).map(|(x, y)| (x - y) / (2.0 * h)).collect()
        };
        let ds = f.diff_s().unwrap().eval(s, t).unwrap();
        let dt = f.diff_t().unwrap().eval(s, t).unwrap();
        let scale = |v: &[f64]| v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!(close(&ds, &fd(h, 0.0), 1e-6 * scale(&ds)));
        prop_assert!(close(&dt, &fd(0.0, h), 1e-6 * scale(&dt)));
    }

    #[test]
    fn coefficient_range_bounds_the_surface(f in surface(1)) {
        let (lo, hi) = f.coeff_bounds().unwrap();
        for a in 0..=20 {
            for b in 0..=20 {
                let v = f.eval_scalar(f.s_length() * a as f64 / 20.0, f.t_length() * b as f64 / 20.0).unwrap();
                prop_assert!(v >= lo - 1e-14 && v <= hi + 1e-14);
            }
        }
    }

    #[test]
    fn integral_matches_gauss_legendre(f in surface(1)) {
        // 4-point Gauss-Legendre is exact up to degree 7, beyond the generated degrees
        let nodes = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
        let weights = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
        let (sl, tl) = (f.s_length(), f.t_length());
        let mut total = 0.0;
        for (xa, wa) in nodes.iter().zip(weights) {
            for (xb, wb) in nodes.iter().zip(weights) {
                total += wa * wb * oracle(&f, 0.5 * sl * (1.0 + xa), 0.5 * tl * (1.0 + xb))[0];
            }
        }
        total *= 0.25 * sl * tl;
        prop_assert!((f.integrate().unwrap() - total).abs() <= 1e-12 * (sl * tl).max(1.0));
    }

    #[test]
    fn edges_are_boundary_curves(f in surface(3), a in 0.0f64..=1.0) {
        let (sl, tl) = (f.s_length(), f.t_length());
        let e = f.edge(Edge::SEnd);
        prop_assert!(close(&e.eval(a * tl).unwrap(), &f.eval(sl, a * tl).unwrap(), 1e-12));
        let e = f.edge(Edge::TStart);
        prop_assert!(close(&e.eval(a * sl).unwrap(), &f.eval(a * sl, 0.0).unwrap(), 1e-12));
    }
}
