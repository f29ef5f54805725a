use crate::Scalar;

/// Per-axis quadrature weights: each basis function integrates to
/// `length / (degree + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureWeights<T> {
    pub ws: Vec<T>,
    pub wt: Vec<T>,
}

impl<T: Scalar> QuadratureWeights<T> {
    pub fn new(m: usize, n: usize, s_len: T, t_len: T) -> Self {
        Self {
            ws: vec![s_len / T::of_usize(m + 1); m + 1],
            wt: vec![t_len / T::of_usize(n + 1); n + 1],
        }
    }

    /// `sum_i sum_j ws[i] wt[j] values[i (n+1) + j]`.
    pub fn apply(&self, values: &[T]) -> T {
        let nc = self.wt.len();
        self.ws
            .iter()
            .enumerate()
            .map(|(i, &wi)| wi * self.wt.iter().enumerate().map(|(j, &wj)| wj * values[i * nc + j]).sum::<T>())
            .sum()
    }
}
