//! Physical constants, positron kinematics and interferometer geometry.

pub mod constants;
pub mod geometry;
pub mod kinematics;
pub mod types;

pub use geometry::{
    emulsion_coordinate_mm, lattice_fringe_period_um, longitudinal_mapping_m, magnified_period,
    resonance_residual, resonance_residual_raw, resonant_plane_m, talbot_length_m,
};
pub use kinematics::{debroglie_wavelength_pm, momentum_kev_per_c, transit_time_s};
pub use types::{BeamSpec, GratingSpec, InterferometerGeometry};
