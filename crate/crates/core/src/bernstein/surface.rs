use super::curve::same_length;
use super::matrices::{elevation_matrix, restriction_matrix, split_coeffs};
use super::{basis_row, binomial, de_casteljau, unit_param, BernsteinCurve, DifferentiationMatrix};
use crate::error::{domain_err, shape_err, Result};
use crate::Scalar;

/// Parameter direction of a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    S,
    T,
}

/// One of the four boundary edges of the parameter rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// `s = 0`, a curve in `t`.
    SStart,
    /// `s = s_len`, a curve in `t`.
    SEnd,
    /// `t = 0`, a curve in `s`.
    TStart,
    /// `t = t_len`, a curve in `s`.
    TEnd,
}

/// Tensor-product Bernstein surface of degrees `(m, n)` over
/// `[0, s_len] x [0, t_len]` with `dim`-vector control points.
///
/// The net is stored row-major as `net[((i * (n + 1)) + j) * dim + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinSurface<T> {
    m: usize,
    n: usize,
    s_len: T,
    t_len: T,
    dim: usize,
    net: Vec<T>,
}

impl<T: Scalar> BernsteinSurface<T> {
    pub fn new(m: usize, n: usize, s_len: T, t_len: T, dim: usize, net: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return shape_err("surface dimension must be positive");
        }
        let expected = (m + 1) * (n + 1) * dim;
        if net.len() != expected {
            return shape_err(format!(
                "degree ({m}, {n}) surface of dim {dim} needs {expected} net entries, got {}",
                net.len()
            ));
        }
        if !(s_len > T::zero() && s_len.is_finite() && t_len > T::zero() && t_len.is_finite()) {
            return shape_err(format!("domain lengths must be positive, got ({s_len}, {t_len})"));
        }
        if net.iter().any(|v| !v.is_finite()) {
            return shape_err("net entries must be finite");
        }
        Ok(Self { m, n, s_len, t_len, dim, net })
    }

    /// Builds a net from a callback returning the control point at `(i, j)`.
    pub fn from_fn<F>(m: usize, n: usize, s_len: T, t_len: T, dim: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Vec<T>,
    {
        let mut net = Vec::with_capacity((m + 1) * (n + 1) * dim);
        for i in 0..=m {
            for j in 0..=n {
                let p = f(i, j);
                if p.len() != dim {
                    return shape_err(format!("control point ({i}, {j}) has {} entries, expected {dim}", p.len()));
                }
                net.extend(p);
            }
        }
        Self::new(m, n, s_len, t_len, dim, net)
    }

    pub fn constant(m: usize, n: usize, s_len: T, t_len: T, value: &[T]) -> Result<Self> {
        Self::from_fn(m, n, s_len, t_len, value.len(), |_, _| value.to_vec())
    }

    pub fn zeros(m: usize, n: usize, s_len: T, t_len: T, dim: usize) -> Result<Self> {
        Self::new(m, n, s_len, t_len, dim, vec![T::zero(); (m + 1) * (n + 1) * dim])
    }

    /// Scalar surface from a `(m+1) x (n+1)` grid of rows.
    pub fn from_rows(rows: &[Vec<T>], s_len: T, t_len: T) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return shape_err("empty control grid");
        }
        let (m, n) = (rows.len() - 1, rows[0].len() - 1);
        if rows.iter().any(|r| r.len() != n + 1) {
            return shape_err("ragged control grid");
        }
        Self::new(m, n, s_len, t_len, 1, rows.concat())
    }

    /// Stacks scalar surfaces of identical shape into one vector surface.
    pub fn from_components(parts: &[&Self]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| crate::Error::Shape("no components".into()))?;
        for p in parts {
            if p.dim != 1 {
                return shape_err("components must be scalar surfaces");
            }
            first.check_same_shape(p)?;
        }
        let d = parts.len();
        let mut net = vec![T::zero(); first.net.len() * d];
        for (k, p) in parts.iter().enumerate() {
            for (idx, &v) in p.net.iter().enumerate() {
                net[idx * d + k] = v;
            }
        }
        Self::new(first.m, first.n, first.s_len, first.t_len, d, net)
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn s_length(&self) -> T {
        self.s_len
    }

    pub fn t_length(&self) -> T {
        self.t_len
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn net(&self) -> &[T] {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut [T] {
        &mut self.net
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (i * (self.n + 1) + j) * self.dim
    }

    /// Control point `(i, j)` as a `dim`-slice.
    pub fn control(&self, i: usize, j: usize) -> &[T] {
        let at = self.idx(i, j);
        &self.net[at..at + self.dim]
    }

    pub fn control_mut(&mut self, i: usize, j: usize) -> &mut [T] {
        let at = self.idx(i, j);
        &mut self.net[at..at + self.dim]
    }

    /// Scalar surface holding component `k`.
    pub fn component(&self, k: usize) -> Self {
        let net = self.net.iter().skip(k).step_by(self.dim).copied().collect();
        Self { m: self.m, n: self.n, s_len: self.s_len, t_len: self.t_len, dim: 1, net }
    }

    /// Same degrees, domain and net, with a new `t` length.
    pub fn with_t_length(&self, t_len: T) -> Result<Self> {
        Self::new(self.m, self.n, self.s_len, t_len, self.dim, self.net.clone())
    }

    pub fn with_lengths(&self, s_len: T, t_len: T) -> Result<Self> {
        Self::new(self.m, self.n, s_len, t_len, self.dim, self.net.clone())
    }

    fn check_same_domain(&self, other: &Self) -> Result<()> {
        if !same_length(self.s_len, other.s_len) || !same_length(self.t_len, other.t_len) {
            return shape_err(format!(
                "domains differ: [{}, {}] vs [{}, {}]",
                self.s_len, self.t_len, other.s_len, other.t_len
            ));
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        self.check_same_domain(other)?;
        if (self.m, self.n) != (other.m, other.n) {
            return shape_err(format!(
                "degrees differ: ({}, {}) vs ({}, {})",
                self.m, self.n, other.m, other.n
            ));
        }
        Ok(())
    }

    /// Evaluates by tensor-product de Casteljau (first along `t`, then `s`).
    pub fn eval(&self, s: T, t: T) -> Result<Vec<T>> {
        let u = unit_param(s, self.s_len, "surface evaluation (s)")?;
        let w = unit_param(t, self.t_len, "surface evaluation (t)")?;
        let mut out = vec![T::zero(); self.dim];
        self.eval_unit_into(u, w, &mut out);
        Ok(out)
    }

    /// Scalar convenience; errors on vector surfaces.
    pub fn eval_scalar(&self, s: T, t: T) -> Result<T> {
        if self.dim != 1 {
            return shape_err("eval_scalar on a vector surface");
        }
        Ok(self.eval(s, t)?[0])
    }

    /// de Casteljau evaluation at unit parameters; no checks.
    pub fn eval_unit_into(&self, u: T, w: T, out: &mut [T]) {
        let mut row = vec![T::zero(); self.n + 1];
        let mut col = vec![T::zero(); self.m + 1];
        for (k, slot) in out.iter_mut().enumerate().take(self.dim) {
            for (i, c) in col.iter_mut().enumerate() {
                for (j, r) in row.iter_mut().enumerate() {
                    *r = self.net[self.idx(i, j) + k];
                }
                *c = de_casteljau(&mut row, w);
            }
            *slot = de_casteljau(&mut col, u);
        }
    }

    /// Evaluates by explicit basis summation; kept as an independent route.
    pub fn eval_by_basis(&self, s: T, t: T) -> Result<Vec<T>> {
        let u = unit_param(s, self.s_len, "surface evaluation (s)")?;
        let w = unit_param(t, self.t_len, "surface evaluation (t)")?;
        let bs: Vec<T> = (0..=self.m).map(|i| super::basis_unit(i, self.m, u)).collect();
        let bt: Vec<T> = (0..=self.n).map(|j| super::basis_unit(j, self.n, w)).collect();
        let mut out = vec![T::zero(); self.dim];
        for i in 0..=self.m {
            for j in 0..=self.n {
                let b = bs[i] * bt[j];
                for (k, o) in out.iter_mut().enumerate() {
                    *o = *o + b * self.net[self.idx(i, j) + k];
                }
            }
        }
        Ok(out)
    }

    /// Evaluates on a whole `(s, t)` grid of unit parameters at once.
    /// Result is `[a][b][k]` flattened.
    pub fn eval_grid_unit(&self, us: &[T], ws: &[T]) -> Vec<T> {
        let bs: Vec<Vec<T>> = us.iter().map(|&u| basis_row(self.m, u)).collect();
        let bt: Vec<Vec<T>> = ws.iter().map(|&w| basis_row(self.n, w)).collect();
        let d = self.dim;
        // partial[a][j][k] = sum_i bs[a][i] net[i][j][k]
        let mut partial = vec![T::zero(); us.len() * (self.n + 1) * d];
        for (a, brow) in bs.iter().enumerate() {
            for (i, &b) in brow.iter().enumerate() {
                for j in 0..=self.n {
                    let src = self.idx(i, j);
                    let dst = (a * (self.n + 1) + j) * d;
                    for k in 0..d {
                        partial[dst + k] = partial[dst + k] + b * self.net[src + k];
                    }
                }
            }
        }
        let mut out = vec![T::zero(); us.len() * ws.len() * d];
        for a in 0..us.len() {
            for (bidx, trow) in bt.iter().enumerate() {
                let dst = (a * ws.len() + bidx) * d;
                for (j, &b) in trow.iter().enumerate() {
                    let src = (a * (self.n + 1) + j) * d;
                    for k in 0..d {
                        out[dst + k] = out[dst + k] + b * partial[src + k];
                    }
                }
            }
        }
        out
    }

    fn zip_with(&self, other: &Self, op: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_same_domain(other)?;
        if self.dim != other.dim {
            return shape_err(format!("dims differ: {} vs {}", self.dim, other.dim));
        }
        let (m, n) = (self.m.max(other.m), self.n.max(other.n));
        let a = self.degree_elevate(m, n)?;
        let b = other.degree_elevate(m, n)?;
        let net = a.net.iter().zip(&b.net).map(|(&x, &y)| op(x, y)).collect();
        Self::new(m, n, self.s_len, self.t_len, self.dim, net)
    }

    /// Entrywise sum; mismatched degrees are elevated to the larger one.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale(&self, k: T) -> Self {
        let net = self.net.iter().map(|&v| v * k).collect();
        Self { net, ..self.clone() }
    }

    /// Product of a scalar surface `self` (degrees `(m, n)`) and `other`
    /// (degrees `(a, b)`, any dim); the result has degrees `(m + a, n + b)`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.dim != 1 {
            return shape_err("left factor of a surface product must be scalar");
        }
        self.check_same_domain(other)?;
        let (m, n, a, b, d) = (self.m, self.n, other.m, other.n, other.dim);
        let (pm, pn) = (m + a, n + b);
        let bm: Vec<T> = (0..=m).map(|q| binomial(m, q)).collect();
        let bn: Vec<T> = (0..=n).map(|r| binomial(n, r)).collect();
        let ba: Vec<T> = (0..=a).map(|q| binomial(a, q)).collect();
        let bb: Vec<T> = (0..=b).map(|r| binomial(b, r)).collect();
        let mut net = vec![T::zero(); (pm + 1) * (pn + 1) * d];
        for q in 0..=m {
            for r in 0..=n {
                let g = self.net[q * (n + 1) + r] * bm[q] * bn[r];
                if g == T::zero() {
                    continue;
                }
                for p in 0..=a {
                    for w in 0..=b {
                        let coef = g * ba[p] * bb[w];
                        let src = other.idx(p, w);
                        let dst = ((q + p) * (pn + 1) + (r + w)) * d;
                        for k in 0..d {
                            net[dst + k] = net[dst + k] + coef * other.net[src + k];
                        }
                    }
                }
            }
        }
        for e in 0..=pm {
            let be = binomial::<T>(pm, e);
            for f in 0..=pn {
                let denom = be * binomial::<T>(pn, f);
                let dst = (e * (pn + 1) + f) * d;
                for k in 0..d {
                    net[dst + k] = net[dst + k] / denom;
                }
            }
        }
        Self::new(pm, pn, self.s_len, self.t_len, d, net)
    }

    /// Squared Euclidean norm of a vector surface, at degrees `(2m, 2n)`.
    pub fn norm_squared(&self) -> Result<Self> {
        let mut acc: Option<Self> = None;
        for k in 0..self.dim {
            let c = self.component(k);
            let sq = c.multiply(&c)?;
            acc = Some(match acc {
                None => sq,
                Some(a) => a.add(&sq)?,
            });
        }
        Ok(acc.expect("dim >= 1"))
    }

    /// Partial derivative in `s`, `D_m^T P`, kept at degree `(m, n)`.
    pub fn diff_s(&self) -> Result<Self> {
        let d = DifferentiationMatrix::new(self.m, self.s_len)?;
        let mut net = vec![T::zero(); self.net.len()];
        for a in 0..=self.m {
            for i in 0..=self.m {
                let w = d.get(i, a);
                if w == T::zero() {
                    continue;
                }
                for j in 0..=self.n {
                    let (src, dst) = (self.idx(i, j), self.idx(a, j));
                    for k in 0..self.dim {
                        net[dst + k] = net[dst + k] + w * self.net[src + k];
                    }
                }
            }
        }
        Self::new(self.m, self.n, self.s_len, self.t_len, self.dim, net)
    }

    /// Partial derivative in `t`, `P D_n`, kept at degree `(m, n)`.
    pub fn diff_t(&self) -> Result<Self> {
        let d = DifferentiationMatrix::new(self.n, self.t_len)?;
        let mut net = vec![T::zero(); self.net.len()];
        for i in 0..=self.m {
            for b in 0..=self.n {
                for j in 0..=self.n {
                    let w = d.get(j, b);
                    if w == T::zero() {
                        continue;
                    }
                    let (src, dst) = (self.idx(i, j), self.idx(i, b));
                    for k in 0..self.dim {
                        net[dst + k] = net[dst + k] + w * self.net[src + k];
                    }
                }
            }
        }
        Self::new(self.m, self.n, self.s_len, self.t_len, self.dim, net)
    }

    /// Exact re-expression at degrees `(m2, n2)`.
    pub fn degree_elevate(&self, m2: usize, n2: usize) -> Result<Self> {
        if m2 < self.m || n2 < self.n {
            return shape_err(format!(
                "cannot elevate ({}, {}) to lower degrees ({m2}, {n2})",
                self.m, self.n
            ));
        }
        if (m2, n2) == (self.m, self.n) {
            return Ok(self.clone());
        }
        let es = elevation_matrix::<T>(self.m, m2)?;
        let et = elevation_matrix::<T>(self.n, n2)?;
        Ok(self.transform(&es, m2, &et, n2))
    }

    /// Applies `P' = A P B^T` with row-major `A: (m2+1) x (m+1)` and
    /// `B: (n2+1) x (n+1)`.
    fn transform(&self, a: &[T], m2: usize, b: &[T], n2: usize) -> Self {
        let d = self.dim;
        let (mc, nc) = (self.m + 1, self.n + 1);
        // tmp[r][j] = sum_i a[r][i] P[i][j]
        let mut tmp = vec![T::zero(); (m2 + 1) * nc * d];
        for r in 0..=m2 {
            for i in 0..mc {
                let w = a[r * mc + i];
                if w == T::zero() {
                    continue;
                }
                for j in 0..nc {
                    let (src, dst) = (self.idx(i, j), (r * nc + j) * d);
                    for k in 0..d {
                        tmp[dst + k] = tmp[dst + k] + w * self.net[src + k];
                    }
                }
            }
        }
        let mut net = vec![T::zero(); (m2 + 1) * (n2 + 1) * d];
        for r in 0..=m2 {
            for c in 0..=n2 {
                let dst = (r * (n2 + 1) + c) * d;
                for j in 0..nc {
                    let w = b[c * nc + j];
                    if w == T::zero() {
                        continue;
                    }
                    let src = (r * nc + j) * d;
                    for k in 0..d {
                        net[dst + k] = net[dst + k] + w * tmp[src + k];
                    }
                }
            }
        }
        Self { m: m2, n: n2, s_len: self.s_len, t_len: self.t_len, dim: d, net }
    }

    /// de Casteljau split at the fraction `lambda` of the chosen axis.
    ///
    /// Both pieces are re-based at zero: the second piece evaluated at `s'`
    /// equals the original at `lambda * s_len + s'`.
    pub fn split(&self, axis: Axis, lambda: T) -> Result<(Self, Self)> {
        if !(lambda > T::zero() && lambda < T::one()) {
            return domain_err(format!("split fraction {lambda} must lie in (0, 1)"));
        }
        let d = self.dim;
        let mut left = self.clone();
        let mut right = self.clone();
        match axis {
            Axis::S => {
                let mut line = vec![T::zero(); self.m + 1];
                for j in 0..=self.n {
                    for k in 0..d {
                        for (i, v) in line.iter_mut().enumerate() {
                            *v = self.net[self.idx(i, j) + k];
                        }
                        let (l, r) = split_coeffs(&line, lambda);
                        for i in 0..=self.m {
                            let at = self.idx(i, j) + k;
                            left.net[at] = l[i];
                            right.net[at] = r[i];
                        }
                    }
                }
                left.s_len = self.s_len * lambda;
                right.s_len = self.s_len * (T::one() - lambda);
            }
            Axis::T => {
                let mut line = vec![T::zero(); self.n + 1];
                for i in 0..=self.m {
                    for k in 0..d {
                        for (j, v) in line.iter_mut().enumerate() {
                            *v = self.net[self.idx(i, j) + k];
                        }
                        let (l, r) = split_coeffs(&line, lambda);
                        for j in 0..=self.n {
                            let at = self.idx(i, j) + k;
                            left.net[at] = l[j];
                            right.net[at] = r[j];
                        }
                    }
                }
                left.t_len = self.t_len * lambda;
                right.t_len = self.t_len * (T::one() - lambda);
            }
        }
        Ok((left, right))
    }

    /// Piece over the unit sub-rectangle `[u0, u1] x [w0, w1]`, re-based at zero.
    pub fn sub_patch(&self, u0: T, u1: T, w0: T, w1: T) -> Result<Self> {
        let rs = restriction_matrix(self.m, u0, u1)?;
        let rt = restriction_matrix(self.n, w0, w1)?;
        let mut out = self.transform(&rs, self.m, &rt, self.n);
        out.s_len = self.s_len * (u1 - u0);
        out.t_len = self.t_len * (w1 - w0);
        Ok(out)
    }

    /// Smallest and largest net entry of a scalar surface; they bound the
    /// surface on its whole domain.
    pub fn coeff_bounds(&self) -> Result<(T, T)> {
        if self.dim != 1 {
            return shape_err("coefficient bounds need a scalar surface");
        }
        let lo = self.net.iter().copied().fold(T::infinity(), T::min);
        let hi = self.net.iter().copied().fold(T::neg_infinity(), T::max);
        Ok((lo, hi))
    }

    /// Boundary row or column as a univariate curve.
    pub fn edge(&self, which: Edge) -> BernsteinCurve<T> {
        let d = self.dim;
        let (degree, length, coeffs): (usize, T, Vec<T>) = match which {
            Edge::SStart | Edge::SEnd => {
                let i = if which == Edge::SStart { 0 } else { self.m };
                let c = (0..=self.n).flat_map(|j| self.control(i, j).to_vec()).collect();
                (self.n, self.t_len, c)
            }
            Edge::TStart | Edge::TEnd => {
                let j = if which == Edge::TStart { 0 } else { self.n };
                let c = (0..=self.m).flat_map(|i| self.control(i, j).to_vec()).collect();
                (self.m, self.s_len, c)
            }
        };
        BernsteinCurve::new(degree, length, d, coeffs).expect("edge of a valid surface")
    }

    /// Quadrature with weights `s_len/(m+1)` and `t_len/(n+1)`; exact for the
    /// surface's own polynomial.
    pub fn integrate(&self) -> Result<T> {
        if self.dim != 1 {
            return shape_err("integrate needs a scalar surface");
        }
        let w = super::QuadratureWeights::new(self.m, self.n, self.s_len, self.t_len);
        Ok(w.apply(&self.net))
    }
}

/// Squared norm of the vector field `(fx, fy, fz)`, degrees `(2m, 2n)`.
pub fn norm_sq<T: Scalar>(
    fx: &BernsteinSurface<T>,
    fy: &BernsteinSurface<T>,
    fz: &BernsteinSurface<T>,
) -> Result<BernsteinSurface<T>> {
    for f in [fx, fy, fz] {
        if f.dim() != 1 {
            return shape_err("norm_sq components must be scalar surfaces");
        }
    }
    fx.check_same_shape(fy)?;
    fx.check_same_shape(fz)?;
    fx.multiply(fx)?.add(&fy.multiply(fy)?)?.add(&fz.multiply(fz)?)
}
