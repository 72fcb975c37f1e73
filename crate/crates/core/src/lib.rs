//! Steady-state quantum moments of the nondegenerate optical parametric oscillator.
//!
//! The library evaluates the exact moment series of the adiabatically eliminated
//! two-mode model, the EPR-type squeezing variance built from them, the
//! semiclassical and near-threshold asymptotics, and a truncated-Fock
//! master-equation oracle used to cross-check all of the above.

// Input checks are written as `!(x > bound)` so that NaN is rejected along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entangle;
pub mod error;
pub mod nearthreshold;
pub mod oracle;
pub mod params;
pub mod semiclassical;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use oracle::{OracleConfig, OracleState, SolveMethod};
pub use params::{derive, DerivedParams, NopoParams, Regime, ThresholdSet};
pub use series::{evaluate, JStats, Method, MethodChoice, MomentSet, Route, SeriesOptions};
