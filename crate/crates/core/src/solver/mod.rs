//! Constrained NLP backend.
//!
//! The default algorithm is an augmented Lagrangian method: equalities carry
//! multipliers and a quadratic penalty, inequalities (`g(x) <= 0`) a
//! squared-hinge penalty with multipliers. Each subproblem is minimized over
//! the variable box, by default with a damped Gauss-Newton iteration on the
//! penalty terms, optionally with projected limited-memory BFGS.
//! Derivatives come from the problem when it supplies them and from finite
//! differences otherwise.

mod auglag;
mod fd;
mod gauss_newton;
mod lbfgs;
mod options;
mod problem;
mod report;

pub use auglag::minimize;
pub use fd::{gradient, jacobian, FdScheme};
pub use lbfgs::{minimize_box, BoxResult};
pub use options::{InnerSolver, SolverOptions};
pub use problem::{BlockKind, ConstraintBlock, Nlp};
pub use report::{BlockSummary, OuterRecord, SolveReport, Termination};
