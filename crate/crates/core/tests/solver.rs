use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rodplan::solver::{minimize, BlockKind, ConstraintBlock, Nlp, SolverOptions, Termination};
use rodplan::{Error, Result};

/// min 1/2 x'Qx + c'x  s.t.  Ax = b,  Gx <= h.
struct Qp {
    q: DMatrix<f64>,
    c: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    g: DMatrix<f64>,
    h: DVector<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x0: Vec<f64>,
    analytic: bool,
}

impl Nlp for Qp {
    fn dimension(&self) -> usize {
        self.c.len()
    }
    fn num_equalities(&self) -> usize {
        self.b.len()
    }
    fn num_inequalities(&self) -> usize {
        self.h.len()
    }
    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        (self.lo.clone(), self.hi.clone())
    }
    fn initial_point(&self) -> Vec<f64> {
        self.x0.clone()
    }
    fn objective(&self, x: &[f64]) -> Result<f64> {
        let x = DVector::from_column_slice(x);
        Ok(0.5 * x.dot(&(&self.q * &x)) + self.c.dot(&x))
    }
    fn equalities(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let r = &self.a * DVector::from_column_slice(x) - &self.b;
        out.copy_from_slice(r.as_slice());
        Ok(())
    }
    fn inequalities(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let r = &self.g * DVector::from_column_slice(x) - &self.h;
        out.copy_from_slice(r.as_slice());
        Ok(())
    }
    fn objective_gradient(&self, x: &[f64], grad: &mut [f64]) -> Result<bool> {
        if !self.analytic {
            return Ok(false);
        }
        let r = &self.q * DVector::from_column_slice(x) + &self.c;
        grad.copy_from_slice(r.as_slice());
        Ok(true)
    }
    fn equality_jt_product(&self, _x: &[f64], y: &[f64], out: &mut [f64]) -> Result<bool> {
        if !self.analytic {
            return Ok(false);
        }
        let r = self.a.transpose() * DVector::from_column_slice(y);
        out.iter_mut().zip(r.iter()).for_each(|(o, v)| *o += v);
        Ok(true)
    }
    fn inequality_jt_product(&self, _x: &[f64], y: &[f64], out: &mut [f64]) -> Result<bool> {
        if !self.analytic {
            return Ok(false);
        }
        let r = self.g.transpose() * DVector::from_column_slice(y);
        out.iter_mut().zip(r.iter()).for_each(|(o, v)| *o += v);
        Ok(true)
    }
}

fn scalar_qp(q: f64, c: f64, g: Option<(f64, f64)>, a: Option<(Vec<f64>, f64)>, n: usize) -> Qp {
    let (gm, hv) = match g {
        Some((gi, hi)) => (DMatrix::from_element(1, n, gi), DVector::from_element(1, hi)),
        None => (DMatrix::zeros(0, n), DVector::zeros(0)),
    };
    let (am, bv) = match a {
        Some((row, b)) => (DMatrix::from_row_slice(1, n, &row), DVector::from_element(1, b)),
        None => (DMatrix::zeros(0, n), DVector::zeros(0)),
    };
    Qp {
        q: DMatrix::identity(n, n) * q,
        c: DVector::from_element(n, c),
        a: am,
        b: bv,
        g: gm,
        h: hv,
        lo: vec![f64::NEG_INFINITY; n],
        hi: vec![f64::INFINITY; n],
        x0: vec![0.0; n],
        analytic: false,
    }
}

#[test]
fn active_inequality() {
    // (x - 1)^2 = 1/2 (2) x^2 - 2x + 1, subject to x <= 0.5
    let p = scalar_qp(2.0, -2.0, Some((1.0, 0.5)), None, 1);
    let (x, rep) = minimize(&p, &SolverOptions::default()).unwrap();
    assert_eq!(rep.termination, Termination::Converged);
    assert!((x[0] - 0.5).abs() < 1e-5, "{x:?}");
    assert!(rep.max_inequality_violation <= 1e-6);
}

#[test]
fn symmetric_equality() {
    let p = scalar_qp(2.0, 0.0, None, Some((vec![1.0, 1.0], 1.0)), 2);
    let (x, rep) = minimize(&p, &SolverOptions::default()).unwrap();
    assert_eq!(rep.termination, Termination::Converged);
    assert!((x[0] - 0.5).abs() < 1e-5 && (x[1] - 0.5).abs() < 1e-5, "{x:?}");
    assert!(rep.max_equality_violation <= 1e-6);
}

#[test]
fn box_bound_is_respected() {
    let mut p = scalar_qp(2.0, -2.0, None, None, 3);
    p.hi = vec![0.25, 2.0, 2.0];
    let (x, _) = minimize(&p, &SolverOptions::default()).unwrap();
    assert_eq!(x[0], 0.25);
    // forward differences at the default step bias the stationary point by O(step)
    assert!((x[1] - 1.0).abs() < 1e-5, "{x:?}");
}

/// Solves the QP by enumerating active inequality sets and checking KKT.
fn active_set_oracle(p: &Qp) -> DVector<f64> {
    let n = p.c.len();
    let me = p.b.len();
    let mi = p.h.len();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 0u32..(1 << mi) {
        let active: Vec<usize> = (0..mi).filter(|j| mask & (1 << j) != 0).collect();
        let k = me + active.len();
        if k > n {
            continue;
        }
        let mut kkt = DMatrix::zeros(n + k, n + k);
        let mut rhs = DVector::zeros(n + k);
        kkt.view_mut((0, 0), (n, n)).copy_from(&p.q);
        for i in 0..n {
            rhs[i] = -p.c[i];
        }
        for (r, row) in (0..me).map(|i| (p.a.row(i).clone_owned(), p.b[i])).chain(active.iter().map(|&j| (p.g.row(j).clone_owned(), p.h[j]))).enumerate() {
            for col in 0..n {
                kkt[(n + r, col)] = row.0[col];
                kkt[(col, n + r)] = row.0[col];
            }
            rhs[n + r] = row.1;
        }
        let Some(sol) = kkt.lu().solve(&rhs) else { continue };
        let x = sol.rows(0, n).clone_owned();
        let primal_ok = (0..mi).all(|j| (p.g.row(j) * &x)[0] - p.h[j] <= 1e-9);
        let dual_ok = (0..active.len()).all(|r| sol[n + me + r] >= -1e-9);
        if primal_ok && dual_ok {
            let f = 0.5 * x.dot(&(&p.q * &x)) + p.c.dot(&x);
            if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
                best = Some((f, x));
            }
        }
    }
    best.expect("feasible QP").1
}

fn random_qp(rng: &mut ChaCha8Rng, analytic: bool) -> Qp {
    let n = rng.gen_range(5..=20);
    let me = rng.gen_range(0..=2);
    let mi = rng.gen_range(1..=6);
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let q = &m * m.transpose() + DMatrix::identity(n, n) * 0.5;
    let c = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    let a = DMatrix::from_fn(me, n, |_, _| rng.gen_range(-1.0..1.0));
    let g = DMatrix::from_fn(mi, n, |_, _| rng.gen_range(-1.0..1.0));
    // a known interior-ish point keeps the feasible set nonempty
    let xf = DVector::from_fn(n, |_, _| rng.gen_range(-0.5..0.5));
    let b = &a * &xf;
    let h = &g * &xf + DVector::from_fn(mi, |_, _| rng.gen_range(0.0..0.3));
    Qp {
        q,
        c,
        a,
        b,
        g,
        h,
        lo: vec![f64::NEG_INFINITY; n],
        hi: vec![f64::INFINITY; n],
        x0: vec![0.0; n],
        analytic,
    }
}

#[test]
fn random_convex_qps_match_active_set_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..24 {
        let p = random_qp(&mut rng, trial % 2 == 0);
        let expected = active_set_oracle(&p);
        let (x, rep) = minimize(&p, &SolverOptions::default()).unwrap();
        let err = x.iter().zip(expected.iter()).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
        assert!(err <= 1e-5, "trial {trial}: error {err:e}, report {rep:?}");
        assert!(rep.is_feasible(1e-6, 1e-6));
    }
}

#[test]
fn violation_is_monotone_after_first_penalty_increase() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let mut p = random_qp(&mut rng, true);
        p.x0 = vec![3.0; p.c.len()];
        let (_, rep) = minimize(&p, &SolverOptions::default()).unwrap();
        let first_raise = rep.history.windows(2).position(|w| w[1].penalty > w[0].penalty);
        if let Some(k) = first_raise {
            let accepted: Vec<f64> =
                rep.history[k + 1..].iter().filter(|r| r.accepted).map(|r| r.violation).collect();
            for w in accepted.windows(2) {
                assert!(w[1] <= w[0], "{:?}", rep.history);
            }
        }
    }
}

#[test]
fn identical_inputs_give_identical_iterates() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_qp(&mut rng, false);
    let (x1, r1) = minimize(&p, &SolverOptions::default()).unwrap();
    let (x2, r2) = minimize(&p, &SolverOptions::default()).unwrap();
    assert_eq!(x1, x2);
    assert_eq!(r1.history, r2.history);
}

#[test]
fn reported_violations_are_recomputed_per_block() {
    struct Blocks(Qp);
    impl Nlp for Blocks {
        fn dimension(&self) -> usize { self.0.dimension() }
        fn num_equalities(&self) -> usize { self.0.num_equalities() }
        fn num_inequalities(&self) -> usize { self.0.num_inequalities() }
        fn bounds(&self) -> (Vec<f64>, Vec<f64>) { self.0.bounds() }
        fn initial_point(&self) -> Vec<f64> { self.0.initial_point() }
        fn objective(&self, x: &[f64]) -> Result<f64> { self.0.objective(x) }
        fn equalities(&self, x: &[f64], o: &mut [f64]) -> Result<()> { self.0.equalities(x, o) }
        fn inequalities(&self, x: &[f64], o: &mut [f64]) -> Result<()> { self.0.inequalities(x, o) }
        fn constraint_blocks(&self) -> Vec<ConstraintBlock> {
            vec![ConstraintBlock { name: "sum".into(), kind: BlockKind::Equality, start: 0, len: 1 }]
        }
    }
    let mut opts = SolverOptions::default();
    opts.max_outer_iterations = 1;
    opts.max_inner_iterations = 1;
    let p = Blocks(scalar_qp(2.0, 0.0, None, Some((vec![1.0, 1.0], 1.0)), 2));
    let (x, rep) = minimize(&p, &opts).unwrap();
    let direct = (x[0] + x[1] - 1.0).abs();
    assert_eq!(rep.blocks.len(), 1);
    assert_eq!(rep.blocks[0].max_violation, direct);
    assert_eq!(rep.max_equality_violation, direct);
}

#[test]
fn non_finite_objective_is_reported_with_point() {
    struct Bad;
    impl Nlp for Bad {
        fn dimension(&self) -> usize { 2 }
        fn num_equalities(&self) -> usize { 0 }
        fn num_inequalities(&self) -> usize { 0 }
        fn bounds(&self) -> (Vec<f64>, Vec<f64>) { (vec![-1.0; 2], vec![1.0; 2]) }
        fn initial_point(&self) -> Vec<f64> { vec![0.5, -0.5] }
        fn objective(&self, _x: &[f64]) -> Result<f64> { Ok(f64::NAN) }
        fn equalities(&self, _x: &[f64], _o: &mut [f64]) -> Result<()> { Ok(()) }
        fn inequalities(&self, _x: &[f64], _o: &mut [f64]) -> Result<()> { Ok(()) }
    }
    match minimize(&Bad, &SolverOptions::default()) {
        Err(Error::Evaluation { x, source }) => {
            assert_eq!(x, vec![0.5, -0.5]);
            assert!(matches!(*source, Error::NonFinite { .. }));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn invalid_options_are_rejected() {
    let mut opts = SolverOptions::default();
    opts.penalty_growth = 1.0;
    let p = scalar_qp(2.0, 0.0, None, None, 1);
    assert!(matches!(minimize(&p, &opts), Err(Error::Validation(_))));
}

#[test]
fn exhausted_time_budget_stops_before_the_first_subproblem() {
    let p = scalar_qp(2.0, -2.0, Some((1.0, 0.5)), None, 1);
    let opts = SolverOptions { max_wall_time_s: Some(1e-12), ..Default::default() };
    let (_, rep) = minimize(&p, &opts).unwrap();
    assert_eq!(rep.termination, Termination::TimeLimit);
    assert_eq!(rep.outer_iterations, 0);
}
