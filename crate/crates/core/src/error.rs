//! Error type shared by every module of the crate.

use std::error;
use std::fmt;

/// Everything that can go wrong short of a bug.
///
/// Variants carry enough context to print a one-line diagnostic; the CLI
/// maps any of these to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A transform input whose length is not a power of two.
    LengthNotPowerOfTwo(usize),
    /// A transform input entry outside the exactness guard |v| <= 2^32.
    EntryTooLarge { index: usize },
    /// A dimension p outside 1..=24.
    DimensionOutOfRange(u32),
    /// A degree cutoff d exceeding the dimension p.
    DegreeOutOfRange { degree: u32, dimension: u32 },
    /// An operation invoked above its hard dimension cap.
    SizeCap {
        operation: &'static str,
        dimension: u32,
        max: u32,
    },
    /// A scalar parameter outside its documented domain.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// Fewer samples than the operation can do anything with.
    TooFewSamples { requested: u64, minimum: u64 },
    /// A census whose key table would exceed the configured budget.
    CensusBudget { cells: u128, budget: u128 },
    /// A floating-point solver result that failed exact re-verification.
    SolverVerification(String),
    /// Malformed textual input (WBF1, sweep config, CSV).
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthNotPowerOfTwo(n) => {
                write!(f, "input length {n} is not a power of two")
            }
            Error::EntryTooLarge { index } => {
                write!(f, "entry at index {index} exceeds the 2^32 exactness guard")
            }
            Error::DimensionOutOfRange(p) => {
                write!(f, "dimension p = {p} is outside 1..=24")
            }
            Error::DegreeOutOfRange { degree, dimension } => {
                write!(f, "degree d = {degree} exceeds dimension p = {dimension}")
            }
            Error::SizeCap {
                operation,
                dimension,
                max,
            } => {
                write!(f, "{operation} is capped at p <= {max}, got p = {dimension}")
            }
            Error::InvalidParameter { name, reason } => {
                write!(f, "parameter {name}: {reason}")
            }
            Error::TooFewSamples { requested, minimum } => {
                write!(f, "need at least {minimum} samples, got {requested}")
            }
            Error::CensusBudget { cells, budget } => {
                write!(
                    f,
                    "census would hold {cells} key cells, over the budget of {budget}"
                )
            }
            Error::SolverVerification(msg) => {
                write!(f, "exact verification of solver output failed: {msg}")
            }
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl error::Error for Error {}
