//! Simulation and analysis toolkit for a period-magnifying two-grating
//! matter-wave interferometer with keV positrons.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod montecarlo;
pub mod physics;
pub mod propagation;
pub mod rng;

pub use error::{Result, TlError};

/// Binary entry point: dispatches `std::env::args` and returns the exit code.
pub fn cli_main() -> i32 {
    cli::run_from(std::env::args())
}
