//! Synthetic detector event generation.

mod detector;
mod events;
mod sampler;

pub use detector::DetectorSpec;
pub use events::{Event, EventList, GenerationTruth};
pub use sampler::{
    apply_detector_effects, build_plane_stack, generate_exposure, s_strata, sample_events,
    CosineFringeModel, IntensityModel, ModelTag, PlaneStackModel,
};
