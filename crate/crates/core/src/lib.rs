//! Poisson point processes on [0, 1]: simulation, concentration bounds for
//! suprema of their empirical processes, and adaptive projection estimation of
//! the intensity with Monte-Carlo experiment drivers.

pub mod basis;
pub mod concentration;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod modelselect;
pub mod numeric;
pub mod pointprocess;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
