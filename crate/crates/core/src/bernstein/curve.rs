use super::matrices::elevation_matrix;
use super::{binomial, de_casteljau, unit_param, DifferentiationMatrix};
use crate::error::{shape_err, Result};
use crate::Scalar;

/// Univariate Bernstein polynomial over `[0, length]` with `dim`-vector
/// coefficients, typically an edge of a surface.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinCurve<T> {
    degree: usize,
    length: T,
    dim: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> BernsteinCurve<T> {
    pub fn new(degree: usize, length: T, dim: usize, coeffs: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return shape_err("curve dimension must be positive");
        }
        if coeffs.len() != (degree + 1) * dim {
            return shape_err(format!(
                "curve of degree {degree} and dim {dim} needs {} coefficients, got {}",
                (degree + 1) * dim,
                coeffs.len()
            ));
        }
        if !(length > T::zero()) {
            return shape_err(format!("curve length {length} must be positive"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return shape_err("curve coefficients must be finite");
        }
        Ok(Self { degree, length, dim, coeffs })
    }

    /// Curve with every coefficient equal to `value`.
    pub fn constant(degree: usize, length: T, value: &[T]) -> Result<Self> {
        let coeffs = (0..=degree).flat_map(|_| value.iter().copied()).collect();
        Self::new(degree, length, value.len(), coeffs)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Control point `i` as a `dim`-slice.
    pub fn control(&self, i: usize) -> &[T] {
        &self.coeffs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn eval(&self, s: T) -> Result<Vec<T>> {
        let u = unit_param(s, self.length, "curve evaluation")?;
        let mut scratch = vec![T::zero(); self.degree + 1];
        Ok((0..self.dim)
            .map(|k| {
                for (i, slot) in scratch.iter_mut().enumerate() {
                    *slot = self.coeffs[i * self.dim + k];
                }
                de_casteljau(&mut scratch, u)
            })
            .collect())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return shape_err(format!("curve dims differ: {} vs {}", self.dim, other.dim));
        }
        if !same_length(self.length, other.length) {
            return shape_err(format!("curve lengths differ: {} vs {}", self.length, other.length));
        }
        Ok(())
    }

    pub fn elevate(&self, degree: usize) -> Result<Self> {
        let e = elevation_matrix::<T>(self.degree, degree)?;
        let cols = self.degree + 1;
        let mut coeffs = vec![T::zero(); (degree + 1) * self.dim];
        for r in 0..=degree {
            for i in 0..cols {
                let w = e[r * cols + i];
                if w != T::zero() {
                    for k in 0..self.dim {
                        coeffs[r * self.dim + k] = coeffs[r * self.dim + k] + w * self.coeffs[i * self.dim + k];
                    }
                }
            }
        }
        Self::new(degree, self.length, self.dim, coeffs)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(T, T) -> T) -> Result<Self> {
        self.check_compatible(other)?;
        let degree = self.degree.max(other.degree);
        let a = self.elevate(degree)?;
        let b = other.elevate(degree)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| op(x, y)).collect();
        Self::new(degree, self.length, self.dim, coeffs)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |x, y| x - y)
    }

    pub fn scale(&self, k: T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * k).collect(), ..self.clone() }
    }

    /// Product of a scalar curve `self` with `other` (any dim); degrees add.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.dim != 1 {
            return shape_err("left factor of a curve product must be scalar");
        }
        if !same_length(self.length, other.length) {
            return shape_err("curve lengths differ");
        }
        let (p, q, d) = (self.degree, other.degree, other.dim);
        let mut coeffs = vec![T::zero(); (p + q + 1) * d];
        for i in 0..=p {
            let bi = binomial::<T>(p, i) * self.coeffs[i];
            for j in 0..=q {
                let w = bi * binomial::<T>(q, j);
                for k in 0..d {
                    coeffs[(i + j) * d + k] = coeffs[(i + j) * d + k] + w * other.coeffs[j * d + k];
                }
            }
        }
        for e in 0..=p + q {
            let denom = binomial::<T>(p + q, e);
            for k in 0..d {
                coeffs[e * d + k] = coeffs[e * d + k] / denom;
            }
        }
        Self::new(p + q, self.length, d, coeffs)
    }

    /// Scalar curve of the squared Euclidean norm, at twice the degree.
    pub fn norm_squared(&self) -> Result<Self> {
        let mut acc: Option<Self> = None;
        for k in 0..self.dim {
            let comp = self.component(k);
            let sq = comp.multiply(&comp)?;
            acc = Some(match acc {
                None => sq,
                Some(a) => a.add(&sq)?,
            });
        }
        Ok(acc.expect("dim >= 1"))
    }

    pub fn component(&self, k: usize) -> Self {
        let coeffs = (0..=self.degree).map(|i| self.coeffs[i * self.dim + k]).collect();
        Self { degree: self.degree, length: self.length, dim: 1, coeffs }
    }

    /// Derivative, kept at the same degree.
    pub fn derivative(&self) -> Result<Self> {
        let d = DifferentiationMatrix::new(self.degree, self.length)?;
        let mut coeffs = vec![T::zero(); self.coeffs.len()];
        for k in 0..self.dim {
            let comp: Vec<T> = (0..=self.degree).map(|i| self.coeffs[i * self.dim + k]).collect();
            for (a, v) in d.apply(&comp).into_iter().enumerate() {
                coeffs[a * self.dim + k] = v;
            }
        }
        Self::new(self.degree, self.length, self.dim, coeffs)
    }

    /// Exact integral of each component: `length / (degree + 1) * sum(coeffs)`.
    pub fn integrate(&self) -> Vec<T> {
        let w = self.length / T::of_usize(self.degree + 1);
        (0..self.dim)
            .map(|k| (0..=self.degree).map(|i| self.coeffs[i * self.dim + k]).sum::<T>() * w)
            .collect()
    }
}

pub(crate) fn same_length<T: Scalar>(a: T, b: T) -> bool {
    (a - b).abs() <= T::epsilon() * T::of(64.0) * a.abs().max(b.abs())
}
