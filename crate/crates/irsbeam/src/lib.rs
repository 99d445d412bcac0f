//! Beamformer design and rate benchmarks for a single-antenna wireless link
//! assisted by an active intelligent reflecting surface (IRS).
//!
//! An active IRS amplifies what it reflects, which defeats the double-fading
//! of passive surfaces at the price of injecting amplification noise at each
//! element. The crate models the three-node link (base station, IRS, user),
//! implements several iterative designs for the IRS beamforming vector under
//! a reflect-power budget, and provides a Monte-Carlo harness that reproduces
//! rate, convergence, and complexity comparisons between them.
//!
//! Modules:
//! - [`channel`]: geometry, path loss, and seeded Rayleigh channel draws
//! - [`metrics`]: beam vectors, reflect power, SNR / rate / RSNR / SSNR
//! - [`spectral`]: Hermitian matrices, Cholesky solves, eigen routines
//! - [`qcqp`]: Dinkelbach fractional programming over a power ellipsoid
//! - [`beamformers`]: the beamformer family built on the pieces above
//! - [`harness`]: experiment configs, runners, FLOP model, CSV emission

// Numeric-code idioms kept on purpose: `!(x > 0.0)` rejects NaN alongside
// nonpositives, and index loops mirror the matrix algebra they implement.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod beamformers;
pub mod channel;
mod csvio;
mod cvec;
pub mod harness;
pub mod metrics;
pub mod qcqp;
pub mod spectral;

use std::fmt;

pub use num_complex::Complex64;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A vector or matrix had the wrong length for the operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    /// An argument was outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A matrix factorization failed (not positive definite / singular).
    #[error("singular or indefinite matrix: {0}")]
    Singular(String),
    /// An iterative routine failed to reach its tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A method tag was not recognized.
    #[error("unknown method: {0}")]
    UnknownMethod(String),
    /// A config document failed to parse; names the offending field.
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }
    pub(crate) fn precondition(msg: impl fmt::Display) -> Self {
        Error::Precondition(msg.to_string())
    }
    pub(crate) fn numeric(msg: impl fmt::Display) -> Self {
        Error::Numeric(msg.to_string())
    }
    pub(crate) fn config(field: &str, msg: impl fmt::Display) -> Self {
        Error::Config { field: field.to_string(), message: msg.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
