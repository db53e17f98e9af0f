//! Index modulation over diffusive molecular MIMO links.
//!
//! The crate covers the whole chain from Brownian-motion channel response
//! estimation through modulation, the statistical arrival model and
//! detection, to analytical error rates and reproducible parameter sweeps.

pub mod channel;
pub mod detection;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod modulation;
pub mod particle;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
