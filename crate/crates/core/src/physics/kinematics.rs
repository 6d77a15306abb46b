//! Relativistic positron kinematics.
//!
//! At 5-18 keV the relativistic correction to the wavelength is 0.2-0.9%,
//! larger than the beam's 0.1% energy resolution, so the exact relativistic
//! forms are used throughout.

use super::constants::{ELECTRON_REST_KEV, PLANCK_HC_KEV_NM, SPEED_OF_LIGHT_M_PER_S};
use crate::error::{Result, TlError};

/// Relativistic momentum p·c in keV for kinetic energy `e_kev`.
pub fn momentum_kev_per_c(e_kev: f64) -> Result<f64> {
    if !(e_kev > 0.0) {
        return Err(TlError::domain(format!(
            "kinetic energy must be > 0 keV, got {e_kev}"
        )));
    }
    Ok((e_kev * e_kev + 2.0 * e_kev * ELECTRON_REST_KEV).sqrt())
}

/// de Broglie wavelength h/p in pm.
pub fn debroglie_wavelength_pm(e_kev: f64) -> Result<f64> {
    let pc = momentum_kev_per_c(e_kev)?;
    // hc [keV nm] / pc [keV] = lambda [nm]; 1 nm = 1000 pm.
    Ok(PLANCK_HC_KEV_NM / pc * 1e3)
}

/// Time to traverse `path_length_m` at kinetic energy `e_kev`, in seconds.
pub fn transit_time_s(e_kev: f64, path_length_m: f64) -> Result<f64> {
    if !(path_length_m > 0.0) {
        return Err(TlError::domain(format!(
            "path length must be > 0 m, got {path_length_m}"
        )));
    }
    let pc = momentum_kev_per_c(e_kev)?;
    let beta = pc / (e_kev + ELECTRON_REST_KEV);
    Ok(path_length_m / (SPEED_OF_LIGHT_M_PER_S * beta))
}
