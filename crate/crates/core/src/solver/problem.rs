use crate::error::Result;

/// Whether a constraint block holds equalities or `<= 0` inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Equality,
    Inequality,
}

/// Named contiguous range of constraint rows, for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintBlock {
    pub name: String,
    pub kind: BlockKind,
    pub start: usize,
    pub len: usize,
}

/// Nonlinear program `min f(x)` s.t. `c(x) = 0`, `g(x) <= 0`, `lo <= x <= hi`.
///
/// Evaluators must be re-entrant: the solver may call them concurrently on
/// distinct points. Derivative hooks return `Ok(false)` when not provided,
/// in which case finite differences are used.
pub trait Nlp: Sync {
    fn dimension(&self) -> usize;
    fn num_equalities(&self) -> usize;
    fn num_inequalities(&self) -> usize;
    /// Variable bounds; use infinities for free variables.
    fn bounds(&self) -> (Vec<f64>, Vec<f64>);
    fn initial_point(&self) -> Vec<f64>;

    fn objective(&self, x: &[f64]) -> Result<f64>;
    fn equalities(&self, x: &[f64], out: &mut [f64]) -> Result<()>;
    fn inequalities(&self, x: &[f64], out: &mut [f64]) -> Result<()>;

    /// Writes the objective gradient into `grad`.
    fn objective_gradient(&self, _x: &[f64], _grad: &mut [f64]) -> Result<bool> {
        Ok(false)
    }

    /// Adds `J_eq(x)^T y` into `out`.
    fn equality_jt_product(&self, _x: &[f64], _y: &[f64], _out: &mut [f64]) -> Result<bool> {
        Ok(false)
    }

    /// Adds `J_ineq(x)^T y` into `out`.
    fn inequality_jt_product(&self, _x: &[f64], _y: &[f64], _out: &mut [f64]) -> Result<bool> {
        Ok(false)
    }

    /// Writes the dense equality Jacobian, row-major `num_equalities x dimension`.
    fn equality_jacobian(&self, _x: &[f64], _out: &mut [f64]) -> Result<bool> {
        Ok(false)
    }

    /// Writes the dense inequality Jacobian, row-major `num_inequalities x dimension`.
    fn inequality_jacobian(&self, _x: &[f64], _out: &mut [f64]) -> Result<bool> {
        Ok(false)
    }

    fn constraint_blocks(&self) -> Vec<ConstraintBlock> {
        Vec::new()
    }
}
