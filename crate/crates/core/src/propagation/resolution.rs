//! Sampling grid for the wave-optics engines.

use crate::error::{Result, TlError};
use crate::physics::GratingSpec;

/// Grid and averaging resolution of the propagation engines.
///
/// The window is periodic; it must be an integer multiple of both grating
/// periods so the wrap-around boundary is exact (1536 um = 1280 x 1.2 um
/// = 1536 x 1.0 um for the nominal gratings, a multiple of their 6 um
/// least common multiple).
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResolution {
    /// Number of grid points; must be a power of two.
    pub n_points: usize,
    /// Transverse window width, um.
    pub window_um: f64,
    /// Number of illumination tilts in the incoherent average.
    pub n_angles: usize,
    /// Number of stratified energy draws (1 = energy spread off).
    pub n_energy_samples: usize,
}

impl Default for SimulationResolution {
    fn default() -> Self {
        SimulationResolution {
            n_points: 131072,
            window_um: 1536.0,
            n_angles: 512,
            n_energy_samples: 1,
        }
    }
}

impl SimulationResolution {
    pub fn grid_spacing_um(&self) -> f64 {
        self.window_um / self.n_points as f64
    }

    /// Checks window commensurability with one grating.
    pub fn check_commensurate(&self, g: &GratingSpec, name: &str) -> Result<()> {
        let ratio = self.window_um / g.period_um;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(TlError::config(format!(
                "resolution.window_um = {} is not an integer multiple of {name}.period_um = {}",
                self.window_um, g.period_um
            )));
        }
        Ok(())
    }

    /// Full validation against the pair of gratings.
    pub fn validate(&self, g1: &GratingSpec, g2: &GratingSpec) -> Result<()> {
        if !self.n_points.is_power_of_two() || self.n_points < 2 {
            return Err(TlError::config(format!(
                "resolution.n_points = {} must be a power of two",
                self.n_points
            )));
        }
        if !(self.window_um > 0.0) {
            return Err(TlError::config("resolution.window_um must be > 0"));
        }
        if self.n_angles == 0 {
            return Err(TlError::config("resolution.n_angles must be >= 1"));
        }
        if self.n_energy_samples == 0 {
            return Err(TlError::config("resolution.n_energy_samples must be >= 1"));
        }
        self.check_commensurate(g1, "g1")?;
        self.check_commensurate(g2, "g2")?;
        let d_min = g1.period_um.min(g2.period_um);
        if self.grid_spacing_um() > d_min / 32.0 {
            return Err(TlError::config(format!(
                "grid spacing {} um does not resolve the finer grating (need <= {} um)",
                self.grid_spacing_um(),
                d_min / 32.0
            )));
        }
        Ok(())
    }
}
