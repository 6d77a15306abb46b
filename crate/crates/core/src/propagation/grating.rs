//! Binary amplitude masks sampled on the simulation grid.

use crate::error::Result;
use crate::physics::GratingSpec;

use super::resolution::SimulationResolution;

/// Grid positions for a resolution, centered on the window.
pub fn grid_positions_um(res: &SimulationResolution) -> Vec<f64> {
    let n = res.n_points;
    let dx = res.grid_spacing_um();
    (0..n).map(|i| (i as f64 - (n / 2) as f64) * dx).collect()
}

/// Samples the binary transmission t(x) of a grating on the grid.
/// Fails if the window is not commensurate with the grating period.
pub fn grating_transmission_profile(
    g: &GratingSpec,
    res: &SimulationResolution,
) -> Result<Vec<f64>> {
    res.check_commensurate(g, "grating")?;
    let dx = res.grid_spacing_um();
    let n = res.n_points;
    Ok((0..n)
        .map(|i| g.transmission((i as f64 - (n / 2) as f64) * dx))
        .collect())
}
