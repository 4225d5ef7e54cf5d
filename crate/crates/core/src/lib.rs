//! Globalized SCD semismooth* Newton method for composite problems
//! `min f(x) + g(x)` with a smooth least-squares term and a nonsmooth
//! ℓp (`0 ≤ p ≤ 1`) or total-variation penalty, plus the tomography
//! operators and phantoms used to exercise it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod envelope;
pub mod error;
pub mod fista;
pub mod instances;
pub mod linalg;
pub mod linops;
pub mod penalties;
pub mod smooth;
pub mod solver;
pub mod tomo;
pub mod tv;
pub mod vecops;

pub use envelope::{fb_envelope, t_lambda, CompositeProblem, GraphPoint};
pub use error::{Error, Result};
pub use fista::{solve_fista, FistaConfig};
pub use linops::{CsrMatrix, LinearOperator};
pub use penalties::{LpPenalty, Penalty, ScdBasis};
pub use smooth::{LeastSquares, SmoothFunction};
pub use solver::{solve, solve_pgm, SolveReport, SolverConfig, Termination};
pub use tomo::{ImageGrid, Sinogram};
pub use tv::{solve_tv, TvConfig, TvReport};
