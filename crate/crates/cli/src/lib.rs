//! Library side of the `sscd` command: configuration, problem assembly and
//! the verbs `solve`, `compare`, `phantom` and `radon`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod problem;

pub use commands::{cmd_compare, cmd_phantom, cmd_radon, cmd_solve, Outcome, Summary};
pub use config::RunConfig;
