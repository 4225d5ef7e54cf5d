//! Anisotropic total-variation regularization through an augmented
//! Lagrangian outer loop whose subproblems are solved by the Newton solver.

mod alm;
mod difference;
mod inner;
mod regularity;

pub use alm::{solve_tv, solve_tv_from, OuterRow, TvConfig, TvReport, TvSummary};
pub use difference::{tv_value, DifferenceOperator};
pub use inner::{build_inner_problem, TvInnerPenalty, TvInnerProblem, TvInnerSmooth};
pub use regularity::check_tv_regularity;
