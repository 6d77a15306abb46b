//! Physical constants (CODATA 2018). Every kinematic quantity in the crate
//! is derived from these three values.

/// h·c in keV·nm.
pub const PLANCK_HC_KEV_NM: f64 = 1.23984193;

/// Electron (= positron) rest energy m·c² in keV.
pub const ELECTRON_REST_KEV: f64 = 510.99895;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 2.99792458e8;
