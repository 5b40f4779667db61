//! Wave propagation on metric cones over compact cross sections.

pub mod asymptotics;
pub mod bessel;
pub mod cli;
pub mod cross_section;
pub mod error;
pub mod kernel;
pub mod numerics;
pub mod radiation;
pub mod scattering;

pub use error::{Error, Result};
