//! Wave-optics and ray-optics fringe formation.

mod engine;
pub mod field;
mod grating;
mod profile;
mod resolution;

pub use engine::{
    classical_intensity, propagate_coherent, propagate_coherent_shifted,
    quantum_convergence_shift, quantum_intensity, stratified_tilts,
};
pub use field::{fresnel_transfer, ComplexField};
pub use grating::{grating_transmission_profile, grid_positions_um};
pub use profile::{profile_visibility, IntensityProfile};
pub use resolution::SimulationResolution;
