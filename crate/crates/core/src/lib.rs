//! Diagonal-group dynamics on spaces of unimodular lattices, together with an
//! exact classifier for compact Cartan orbits in quotients of `SL₂(ℤ[√−d])`.
//!
//! The crate is organised around five modules:
//!
//! * [`lattice`]: unimodular lattices, LLL-style reduction, certified
//!   short-vector enumeration, systoles and the Mahler boundedness probe.
//! * [`flows`]: roots of `sl_n`, the diagonal and root-unipotent actions, the
//!   escape-of-mass procedure along `AU`-orbits and root-space renormalization.
//! * [`forms`]: products of linear forms, box infima of `|f|`, norm forms of
//!   totally real cubic orders and rational-multiple detection.
//! * [`bianchi`]: exact arithmetic in `ℤ[√−d]` and the three equivalent
//!   minimality criteria (Pell, discriminant square, real eigenvalue power).
//! * [`cli`]: the `diagflow` command line front-end and run records.

pub mod bianchi;
pub mod cli;
pub mod flows;
pub mod forms;
pub mod lattice;
mod numfmt;

pub use numfmt::round_sig;

use thiserror::Error;

/// Default cap on the number of integer cells scanned by any enumeration.
pub const DEFAULT_CELL_CAP: u64 = 100_000_000;

/// Environment variable overriding [`DEFAULT_CELL_CAP`].
pub const CELL_CAP_ENV: &str = "DIAGFLOW_CELL_CAP";

/// Reads the enumeration budget from `DIAGFLOW_CELL_CAP`, falling back to the default.
pub fn cell_cap_from_env() -> u64 {
    std::env::var(CELL_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_CELL_CAP)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate basis")]
    DegenerateBasis,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("enumeration budget exceeded ({cells} cells > cap {cap})")]
    BudgetExceeded { cells: f64, cap: u64 },
    #[error("flow budget exceeded (needed t = {needed}, t_max = {t_max})")]
    FlowBudgetExceeded { needed: f64, t_max: f64 },
    #[error("zero vector")]
    ZeroVector,
    #[error("no root component")]
    NoRootComponent,
    #[error("root component {root} vanishes at sequence index {index}")]
    VanishingRootComponent { root: String, index: usize },
    #[error("not totally real")]
    NotTotallyReal,
    #[error("reducible cubic (integer root {0})")]
    ReducibleCubic(i64),
    #[error("d not squarefree: {0}")]
    NotSquarefree(i64),
    #[error("mixed orders: d = {0} and d = {1}")]
    MixedOrders(i64, i64),
    #[error("determinant is not 1")]
    NotSpecialLinear,
    #[error("equivalence violation: {0}")]
    EquivalenceViolation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
