//! Synthetic scattering-parameter simulation and MUSIC-type localization of
//! small anomalies for circular arrays whose transmit and receive antennas
//! are disjoint sets, cross-validated against a Bessel-series structure
//! prediction of the imaging function.

pub mod error;
pub mod forward;
pub mod geometry;
pub mod imaging;
pub mod metrics;
pub mod special;
mod svd;
pub mod theory;

pub use error::{Error, Result};
pub use num_complex::Complex64;
