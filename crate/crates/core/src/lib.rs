//! Maximum sustainable receiving rate of a handset under Landauer-bound
//! computation power and passive thermal dissipation, and its interaction
//! with link-adaptive downlink transmission.
//!
//! - [`units`]: constants, unit scalars and parameter records.
//! - [`compute`]: baseband load, chip power and the closed-form R_max.
//! - [`thermal`]: heat generation and the lumped surface-plate balance.
//! - [`link`]: downlink capacity, min-rule link adaptation, crossover SNRs.
//! - [`session`]: time-stepped session simulator with throttle policies.
//! - [`chipdb`]: chip power / package-size catalog.
//! - [`scenario`]: preset and config-driven sweeps.

pub mod chipdb;
pub mod cli;
pub mod compute;
pub mod dataset;
pub mod error;
pub mod link;
pub mod scenario;
pub mod session;
pub mod thermal;
pub mod units;

pub use error::{ModelError, Result};
