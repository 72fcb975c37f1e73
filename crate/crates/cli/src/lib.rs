//! Command-line front end: single-point reports, sweeps, figure presets, oracle
//! comparisons and asymptotic audits, all emitting deterministic text.

// Input checks are written as `!(x > bound)` so that NaN is rejected along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod audit;
pub mod error;
pub mod figures;
pub mod oracle_check;
pub mod point;
pub mod settings;
pub mod sweep;

pub use app::run;
pub use error::{CliError, CliResult};
