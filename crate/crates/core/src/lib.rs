//! Parametric channel models and low-overhead channel-parameter estimation for
//! large intelligent surface-based transceivers (LISBTs).
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] - surface configuration, element and tile layout, distances.
//! * [`channel`] - exact, far-field and tiled near-field channel evaluation,
//!   phase profiles, NLoS/noise augmentation and pilot observations.
//! * [`estimator`] - the five-pilot closed-form estimator, its iterative noisy
//!   variant, the three-pilot initializer, the per-tile near-field procedure and
//!   two comparison baselines.
//! * [`experiments`] - Monte-Carlo harness and link metrics.

pub mod channel;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod geometry;

pub use error::{Error, Result};

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a power in watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
