//! Beam, grating and interferometer geometry descriptions.
//!
//! Defaults reproduce the experimental setup: 2-mm collimated positron beam,
//! gratings with 1.2 um and 1.0 um periods at 50% open fraction, drifts
//! L1 = 0.118 m and L2 = 0.576 m, emulsion tilted by 45 degrees.

use crate::error::{Result, TlError};

/// Positron beam kinematics and coherence parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSpec {
    /// Kinetic energy in keV.
    pub kinetic_energy_kev: f64,
    /// Relative 1-sigma energy spread.
    pub energy_sigma_rel: f64,
    /// Half-angle of the (uniform) illumination tilt ensemble, mrad.
    pub divergence_half_angle_mrad: f64,
    /// Collimated spot width, mm.
    pub spot_width_mm: f64,
    /// Beam intensity, particles per second.
    pub flux_per_s: f64,
}

impl Default for BeamSpec {
    fn default() -> Self {
        BeamSpec {
            kinetic_energy_kev: 14.0,
            energy_sigma_rel: 0.001,
            divergence_half_angle_mrad: 1.5,
            spot_width_mm: 2.0,
            flux_per_s: 1.0e3,
        }
    }
}

impl BeamSpec {
    /// Checks hard invariants; returns advisory warnings for soft ones
    /// (energy outside the 5-18 keV operating range warns, does not fail).
    pub fn validate(&self, prefix: &str) -> Result<Vec<String>> {
        if !(self.kinetic_energy_kev > 0.0) {
            return Err(TlError::config(format!("{prefix}.energy_kev must be > 0")));
        }
        if !(0.0..=0.01).contains(&self.energy_sigma_rel) {
            return Err(TlError::config(format!(
                "{prefix}.energy_sigma_rel must lie in [0, 0.01]"
            )));
        }
        if !(self.divergence_half_angle_mrad > 0.0) {
            return Err(TlError::config(format!("{prefix}.divergence_mrad must be > 0")));
        }
        if !(self.spot_width_mm > 0.0) {
            return Err(TlError::config(format!("{prefix}.spot_mm must be > 0")));
        }
        if !(self.flux_per_s > 0.0) {
            return Err(TlError::config(format!("{prefix}.flux_per_s must be > 0")));
        }
        let mut warnings = Vec::new();
        if !(5.0..=18.0).contains(&self.kinetic_energy_kev) {
            warnings.push(format!(
                "{prefix}.energy_kev = {} is outside the 5-18 keV operating range",
                self.kinetic_energy_kev
            ));
        }
        Ok(warnings)
    }
}

/// A binary amplitude grating: periodic slits of width
/// `open_fraction * period` centered on `lateral_offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct GratingSpec {
    /// Grating period, um.
    pub period_um: f64,
    /// Slit width over period, in (0, 1).
    pub open_fraction: f64,
    /// Lateral shift of the slit centers, um.
    pub lateral_offset_um: f64,
    /// In-plane rotation about the beam axis, mrad. Carried through the
    /// configuration; the 1D fringe model folds grating/detector roll into
    /// the detector rotation misalignment.
    pub rotation_mrad: f64,
}

impl GratingSpec {
    pub fn new(period_um: f64, open_fraction: f64) -> Self {
        GratingSpec {
            period_um,
            open_fraction,
            lateral_offset_um: 0.0,
            rotation_mrad: 0.0,
        }
    }

    pub fn validate(&self, prefix: &str) -> Result<()> {
        if !(self.period_um > 0.0) {
            return Err(TlError::config(format!("{prefix}.period_um must be > 0")));
        }
        if !(self.open_fraction > 0.0 && self.open_fraction < 1.0) {
            return Err(TlError::config(format!(
                "{prefix}.open_fraction must lie strictly in (0, 1)"
            )));
        }
        Ok(())
    }

    /// Binary transmission at position `x_um`, exactly periodic in the period.
    pub fn transmission(&self, x_um: f64) -> f64 {
        let frac = ((x_um - self.lateral_offset_um) / self.period_um).rem_euclid(1.0);
        let half = self.open_fraction / 2.0;
        if frac < half || frac > 1.0 - half {
            1.0
        } else {
            0.0
        }
    }
}

/// Two-grating interferometer layout with a tilted emulsion detector.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferometerGeometry {
    /// G1 -> G2 drift, m.
    pub l1_m: f64,
    /// G2 -> nominal detector plane drift, m.
    pub l2_m: f64,
    /// Emulsion tilt from the transverse plane, degrees.
    pub detector_tilt_deg: f64,
    /// Collimator aperture, mm.
    pub collimator_width_mm: f64,
}

impl Default for InterferometerGeometry {
    fn default() -> Self {
        InterferometerGeometry {
            l1_m: 0.118,
            l2_m: 0.576,
            detector_tilt_deg: 45.0,
            collimator_width_mm: 2.0,
        }
    }
}

impl InterferometerGeometry {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if !(self.l1_m > 0.0) {
            return Err(TlError::config(format!("{prefix}.l1_m must be > 0")));
        }
        if !(self.l2_m > 0.0) {
            return Err(TlError::config(format!("{prefix}.l2_m must be > 0")));
        }
        if !(0.0..90.0).contains(&self.detector_tilt_deg) {
            return Err(TlError::config(format!(
                "{prefix}.tilt_deg must lie in [0, 90)"
            )));
        }
        if !(self.collimator_width_mm > 0.0) {
            return Err(TlError::config(format!("{prefix}.collimator_mm must be > 0")));
        }
        Ok(())
    }
}
