//! Exact Walsh-Hadamard analysis of Boolean functions.
//!
//! The crate answers one family of questions: when does the low-degree part
//! of a Boolean function's spectrum pin the function down among all Boolean
//! functions? It provides
//!
//! * exact integer transforms and degree truncations ([`transform`]),
//! * a sound uniqueness certificate plus probability bounds and the
//!   threshold formulas that locate the critical degree ([`determinacy`]),
//! * searches for spectral collisions: exhaustive at tiny dimension,
//!   birthday-style sampling censuses, and simulated annealing over flip
//!   sets ([`collision`]),
//! * an exact linear-programming competitor that decides uniqueness
//!   outright at small dimension ([`lp`]),
//! * seeded, thread-count-independent experiment sweeps with a fixed CSV
//!   schema ([`experiments`]).
//!
//! Dimensions are capped at [`MAX_DIMENSION`] so that tables, spectra and
//! residuals all fit comfortably in memory and in `i64`.

pub mod collision;
pub mod determinacy;
pub mod error;
pub mod experiments;
pub mod function;
pub mod lp;
pub mod transform;

/// Exact spectral arithmetic happens in this integer type.
pub type Coeff = i64;

/// Exact rational scalar for the linear-programming routes.
pub type Rational = num_rational::Ratio<num_bigint::BigInt>;

/// Hard cap on the cube dimension p; 2^24 points is the desk-scale limit.
pub const MAX_DIMENSION: u32 = 24;

pub use error::Error;
pub use function::BooleanFunction;
pub use transform::{spectrum, truncate, wht, Spectrum};
