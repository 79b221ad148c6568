//! Numerical core for studying when massive MIMO inter-user interference
//! fails to vanish under semi-correlated Ricean fading.
//!
//! The crate is organized around the uplink model
//! `g_k = sqrt(K/(K+1)) h_bar + sqrt(1/(K+1)) R^{1/2} h_tilde`:
//! [`channel`] synthesizes steering vectors, one-ring covariances, and
//! channel draws; [`interference`]
//! evaluates the closed-form mean interference power and its scaling
//! diagnostics; [`scenarios`] constructs user pairs that provably break
//! channel orthogonality; [`performance`] computes capacity, MRC spectral
//! efficiency, and Gram-matrix concentration; [`scheduler`] prunes the users
//! responsible for correlated-fading interference; and [`experiment`] wraps
//! everything in seeded, reproducible Monte-Carlo runs that emit CSV.

pub mod channel;
pub mod error;
pub mod experiment;
pub mod interference;
pub mod linalg;
pub mod performance;
pub mod scenarios;
pub mod scheduler;

pub use error::Error;

/// Crate result alias.
pub type Result<T> = std::result::Result<T, Error>;
