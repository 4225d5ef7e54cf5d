//! The globalized SCD semismooth* Newton solver and its proximal-gradient
//! counterpart.

mod bas_gssn;
mod config;
mod newton;
mod report;

pub use bas_gssn::{descent_holds, envelope_decreased, solve, solve_pgm, MIN_STEP, ROUNDING_SLACK};
pub use config::SolverConfig;
pub use newton::{newton_direction, Direction};
pub use report::{write_log_csv, DirectionKind, LogRow, SolveReport, Termination, LOG_HEADER};
