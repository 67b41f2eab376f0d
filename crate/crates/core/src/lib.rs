//! Exact and asymptotic counting of two-dimensional threshold functions on
//! rectangular grids `G(m,n) = {0,...,m-1} x {0,...,n-1}`.
//!
//! A labeling of the grid is a threshold function when some half-plane test
//! `a*x + b*y + c <= 0` reproduces it (boundary on the 0 side). The crate
//! provides three independent routes to the count `t(m,n)`:
//!
//! * [`counting::f_naive`] — the coprime-pair double sum, `O(mn)`;
//! * [`counting::f_moebius`] — the Möbius-accelerated closed form, `O(min(m,n))`;
//! * [`separability::count_by_enumeration`] — brute-force enumeration of all
//!   `2^(mn)` labelings with an exact rational feasibility test.
//!
//! On top of the exact counts, [`asymptotics`] measures the error terms of the
//! `6/pi^2 (mn)^2` main-term approximation.

pub mod asymptotics;
pub mod counting;
pub mod moebius;
pub mod separability;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("limit must be at least 1")]
    ZeroLimit,
    #[error("Moebius table covers 1..={limit}, but d up to {needed} is required")]
    TableTooShort { limit: usize, needed: usize },
    #[error("grid dimensions must satisfy m, n >= 2 (got {m}x{n})")]
    InvalidDims { m: u64, n: u64 },
    #[error("grid has {cells} cells, above the enumeration cap of {cap}")]
    CapExceeded { cells: u64, cap: u64 },
    #[error("labeling has {got} bits, expected {expected}")]
    BitCountMismatch { expected: usize, got: usize },
    #[error("invalid labeling text: {0}")]
    LabelingParse(String),
    #[error("sweep range is empty")]
    EmptySweep,
    #[error("exponent fit needs at least 3 records with nonzero residual")]
    TooFewRecords,
    #[error("exponent fit is degenerate: all abscissae equal")]
    DegenerateFit,
    #[error("oracle method requires a grid with at most {cap} cells")]
    OracleUnavailable { cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
