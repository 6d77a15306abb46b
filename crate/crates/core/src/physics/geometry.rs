//! Closed-form geometry relations of the two-grating interferometer.

use super::types::{GratingSpec, InterferometerGeometry};
use crate::error::{Result, TlError};

/// Residual of the resonance condition l1/l2 = d1/d2 - 1.
///
/// Zero iff the condition holds exactly. With the nominal setup values
/// (0.118, 0.576, 1.2, 1.0) the residual is +0.00486, i.e. the quoted
/// geometry is within 2.5% of exact resonance.
pub fn resonance_residual(
    geom: &InterferometerGeometry,
    g1: &GratingSpec,
    g2: &GratingSpec,
) -> Result<f64> {
    resonance_residual_raw(geom.l1_m, geom.l2_m, g1.period_um, g2.period_um)
}

pub fn resonance_residual_raw(l1_m: f64, l2_m: f64, d1_um: f64, d2_um: f64) -> Result<f64> {
    if l2_m == 0.0 {
        return Err(TlError::domain("resonance residual undefined for l2 = 0"));
    }
    if d2_um == 0.0 {
        return Err(TlError::domain("resonance residual undefined for d2 = 0"));
    }
    Ok(l1_m / l2_m - (d1_um / d2_um - 1.0))
}

/// Geometrically magnified fringe period d3 = d2 (l1 + l2) / l1, in um.
pub fn magnified_period(g2_period_um: f64, l1_m: f64, l2_m: f64) -> Result<f64> {
    if l1_m == 0.0 {
        return Err(TlError::domain("magnified period undefined for l1 = 0"));
    }
    Ok(g2_period_um * (l1_m + l2_m) / l1_m)
}

/// Talbot length 2 d^2 / lambda in m, for a period in um and wavelength in pm.
pub fn talbot_length_m(period_um: f64, wavelength_pm: f64) -> Result<f64> {
    if !(period_um > 0.0) || !(wavelength_pm > 0.0) {
        return Err(TlError::domain(
            "Talbot length requires positive period and wavelength",
        ));
    }
    let wavelength_um = wavelength_pm * 1e-6;
    Ok(2.0 * period_um * period_um / wavelength_um * 1e-6)
}

/// Maps the coordinate `s` along the tilted emulsion (mm) to the effective
/// longitudinal G2-to-plane distance in m. s = 0 is the point where the
/// emulsion crosses the nominal detector plane at l2.
pub fn longitudinal_mapping_m(s_on_emulsion_mm: f64, geom: &InterferometerGeometry) -> f64 {
    let tilt_rad = geom.detector_tilt_deg.to_radians();
    geom.l2_m + s_on_emulsion_mm * 1e-3 * tilt_rad.cos()
}

/// Inverse of [`longitudinal_mapping_m`]: emulsion coordinate (mm) of a plane.
pub fn emulsion_coordinate_mm(l2_eff_m: f64, geom: &InterferometerGeometry) -> f64 {
    let tilt_rad = geom.detector_tilt_deg.to_radians();
    (l2_eff_m - geom.l2_m) / tilt_rad.cos() * 1e3
}

/// Longitudinal plane where the two-grating fringe pattern is stationary
/// under illumination tilt: l2* = l1 / (d1/d2 - 1). This is where incoherent
/// illumination revives the fringes; with the nominal setup it is 0.590 m,
/// 14 mm downstream of the nominal detector plane. Returns `None` for
/// d1 <= d2 (no magnifying resonance).
pub fn resonant_plane_m(
    geom: &InterferometerGeometry,
    g1: &GratingSpec,
    g2: &GratingSpec,
) -> Option<f64> {
    if g1.period_um <= g2.period_um {
        return None;
    }
    Some(geom.l1_m / (g1.period_um / g2.period_um - 1.0))
}

/// Fundamental fringe period representable by two commensurate gratings:
/// d1 d2 / (d1 - d2) (the moire beat), in um. Equals the magnified period
/// d3 evaluated exactly at the resonant plane.
pub fn lattice_fringe_period_um(g1: &GratingSpec, g2: &GratingSpec) -> f64 {
    let (d1, d2) = (g1.period_um, g2.period_um);
    if (d1 - d2).abs() < 1e-12 * d1 {
        d1
    } else {
        d1 * d2 / (d1 - d2).abs()
    }
}
