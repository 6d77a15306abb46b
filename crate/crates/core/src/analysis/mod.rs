//! Fringe recovery from event lists.

mod curves;
mod fit;
mod rayleigh;

pub use curves::{
    contrast_vs_energy, contrast_vs_longitudinal, ContrastCurve, CurveLabel, EnergyScan,
    LongitudinalBin, LongitudinalScan, ScanFitConfig,
};
pub use fit::{fit_fringes, FringeFitResult};
pub use rayleigh::{corrected_contrast, rayleigh_power, rayleigh_sum};
