//! Emulsion detector response description.

use crate::error::{Result, TlError};

/// Nuclear emulsion response: micrometric position smearing, in-plane
/// rotation misalignment relative to the fringes, active area, and a
/// uniform background admixture.
///
/// Coordinates: `u` runs transverse to the fringes in the emulsion plane,
/// `s` along the tilt/scan direction.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSpec {
    /// Gaussian position resolution, um.
    pub position_sigma_um: f64,
    /// Fringe-detector rotation misalignment, mrad.
    pub rotation_misalignment_mrad: f64,
    /// Half extent of the active area along u, mm.
    pub half_extent_u_mm: f64,
    /// Half extent of the active area along s, mm.
    pub half_extent_s_mm: f64,
    /// Fraction of events replaced by uniform background, in [0, 1).
    pub background_fraction: f64,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        DetectorSpec {
            position_sigma_um: 1.0,
            rotation_misalignment_mrad: 0.0,
            half_extent_u_mm: 1.0,
            half_extent_s_mm: 10.0,
            background_fraction: 0.0,
        }
    }
}

impl DetectorSpec {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if !(self.position_sigma_um >= 0.0) {
            return Err(TlError::config(format!("{prefix}.sigma_um must be >= 0")));
        }
        if !(self.half_extent_u_mm > 0.0) {
            return Err(TlError::config(format!("{prefix}.half_u_mm must be > 0")));
        }
        if !(self.half_extent_s_mm > 0.0) {
            return Err(TlError::config(format!("{prefix}.half_s_mm must be > 0")));
        }
        if !(0.0..1.0).contains(&self.background_fraction) {
            return Err(TlError::config(format!(
                "{prefix}.background must lie in [0, 1)"
            )));
        }
        if !self.rotation_misalignment_mrad.is_finite() {
            return Err(TlError::config(format!(
                "{prefix}.rotation_mrad must be finite"
            )));
        }
        Ok(())
    }

    pub fn half_extent_u_um(&self) -> f64 {
        self.half_extent_u_mm * 1e3
    }

    pub fn half_extent_s_um(&self) -> f64 {
        self.half_extent_s_mm * 1e3
    }

    pub fn contains(&self, u_um: f64, s_um: f64) -> bool {
        u_um.abs() <= self.half_extent_u_um() && s_um.abs() <= self.half_extent_s_um()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        DetectorSpec::default().validate("detector").unwrap();
    }

    #[test]
    fn rejects_bad_fields() {
        let mut d = DetectorSpec::default();
        d.position_sigma_um = -1.0;
        assert!(d.validate("detector").is_err());
        let mut d = DetectorSpec::default();
        d.background_fraction = 1.0;
        assert!(d.validate("detector").is_err());
        let mut d = DetectorSpec::default();
        d.half_extent_s_mm = 0.0;
        assert!(d.validate("detector").is_err());
    }

    #[test]
    fn containment_uses_um() {
        let d = DetectorSpec::default();
        assert!(d.contains(999.0, -9999.0));
        assert!(!d.contains(1001.0, 0.0));
        assert!(!d.contains(0.0, 10001.0));
    }
}
