//! Quantum near-field and classical ray-projection fringe engines.
//!
//! The quantum engine propagates a unit plane wave through both binary
//! masks with the paraxial transfer function, carrying the illumination
//! tilt as an exact linear phase in the spatial-frequency domain, and
//! averages intensities incoherently over a stratified tilt ensemble.
//! The classical engine traces straight rays through the same masks and
//! has no wavelength parameter at all.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, TlError};
use crate::physics::{
    debroglie_wavelength_pm, lattice_fringe_period_um, BeamSpec, GratingSpec,
    InterferometerGeometry,
};
use crate::rng::inverse_normal_cdf;

use super::field::{check_sampling, frequency_axis, FftPair};
use super::grating::{grating_transmission_profile, grid_positions_um};
use super::profile::{profile_visibility, IntensityProfile};
use super::resolution::SimulationResolution;

/// Angles are processed in fixed-size chunks; partial sums are reduced in
/// chunk order so the result is independent of the rayon worker count.
const ANGLE_CHUNK: usize = 32;

const UM_PER_M: f64 = 1e6;

struct EngineGrid {
    x_um: Vec<f64>,
    freq: Vec<f64>,
    t2: Vec<f64>,
    t1_spectrum: Vec<Complex64>,
    fft: FftPair,
    dx_um: f64,
}

impl EngineGrid {
    fn build(
        g1: &GratingSpec,
        g2: &GratingSpec,
        res: &SimulationResolution,
    ) -> Result<EngineGrid> {
        res.validate(g1, g2)?;
        let t1 = grating_transmission_profile(g1, res)?;
        let t2 = grating_transmission_profile(g2, res)?;
        let fft = FftPair::new(res.n_points);
        let mut t1_spectrum: Vec<Complex64> =
            t1.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward_in_place(&mut t1_spectrum);
        Ok(EngineGrid {
            x_um: grid_positions_um(res),
            freq: frequency_axis(res.n_points, res.grid_spacing_um()),
            t2,
            t1_spectrum,
            fft,
            dx_um: res.grid_spacing_um(),
        })
    }

    /// Detector-plane intensity for one plane wave at tilt `alpha_rad`.
    /// The tilt enters the transfer function as the exact cross term
    /// exp(-2 pi i alpha z f) of H(f + alpha/lambda).
    fn coherent_intensity(
        &self,
        lambda_um: f64,
        l1_um: f64,
        l2_um: f64,
        alpha_rad: f64,
        out: &mut [f64],
        buf: &mut Vec<Complex64>,
    ) {
        use std::f64::consts::PI;
        buf.clear();
        buf.extend_from_slice(&self.t1_spectrum);
        for (c, &f) in buf.iter_mut().zip(self.freq.iter()) {
            let phase = -(PI * lambda_um * l1_um * f * f + 2.0 * PI * alpha_rad * l1_um * f);
            *c *= Complex64::from_polar(1.0, phase);
        }
        self.fft.inverse_in_place(buf);
        for (c, &t) in buf.iter_mut().zip(self.t2.iter()) {
            *c *= t;
        }
        self.fft.forward_in_place(buf);
        for (c, &f) in buf.iter_mut().zip(self.freq.iter()) {
            let phase = -(PI * lambda_um * l2_um * f * f + 2.0 * PI * alpha_rad * l2_um * f);
            *c *= Complex64::from_polar(1.0, phase);
        }
        self.fft.inverse_in_place(buf);
        for (o, c) in out.iter_mut().zip(buf.iter()) {
            *o += c.norm_sqr();
        }
    }
}

/// Midpoint-stratified illumination tilts over [-alpha_max, +alpha_max].
pub fn stratified_tilts(half_angle_rad: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| half_angle_rad * (2.0 * (j as f64 + 0.5) / n as f64 - 1.0))
        .collect()
}

/// Stratified energy draws for a relative Gaussian spread (deterministic,
/// via normal quantiles at stratified probabilities).
fn stratified_energies(beam: &BeamSpec, n: usize) -> Vec<f64> {
    let e = beam.kinetic_energy_kev;
    if n <= 1 || beam.energy_sigma_rel == 0.0 {
        return vec![e];
    }
    (0..n)
        .map(|i| {
            let p = (i as f64 + 0.5) / n as f64;
            e * (1.0 + beam.energy_sigma_rel * inverse_normal_cdf(p))
        })
        .collect()
}

/// Single-plane-wave propagation through both gratings.
///
/// G1 mask, Fresnel drift l1, G2 mask, Fresnel drift `l2_eff_m`, intensity
/// normalized to mean 1. `tilt_angle_rad` is the plane-wave incidence tilt.
pub fn propagate_coherent(
    g1: &GratingSpec,
    g2: &GratingSpec,
    geom: &InterferometerGeometry,
    res: &SimulationResolution,
    wavelength_pm: f64,
    l2_eff_m: f64,
    tilt_angle_rad: f64,
) -> Result<IntensityProfile> {
    if tilt_angle_rad.abs() > 5e-3 {
        return Err(TlError::domain(format!(
            "illumination tilt {tilt_angle_rad} rad exceeds the 5 mrad paraxial budget"
        )));
    }
    if !(wavelength_pm > 0.0) || l2_eff_m < 0.0 {
        return Err(TlError::domain(
            "propagate_coherent requires wavelength > 0 and l2_eff >= 0",
        ));
    }
    let grid = EngineGrid::build(g1, g2, res)?;
    let lambda_um = wavelength_pm * 1e-6;
    let l1_um = geom.l1_m * UM_PER_M;
    let l2_um = l2_eff_m * UM_PER_M;
    check_sampling(lambda_um, l1_um, res.n_points, grid.dx_um)?;
    check_sampling(lambda_um, l2_um.max(1.0), res.n_points, grid.dx_um)?;

    let mut raw = vec![0.0; res.n_points];
    let mut buf = Vec::with_capacity(res.n_points);
    grid.coherent_intensity(lambda_um, l1_um, l2_um, tilt_angle_rad, &mut raw, &mut buf);
    IntensityProfile::from_raw(
        grid.x_um,
        raw,
        l2_eff_m,
        lattice_fringe_period_um(g1, g2),
    )
}

/// Equivalent route for a tilted plane wave: on-axis propagation with G2
/// laterally shifted by -alpha*l1 and the output pattern shifted by
/// +alpha*(l1+l2). Kept as an independently coded path for validating the
/// paraxial shift theorem against [`propagate_coherent`]; exact when the
/// shifts land on whole grid cells.
pub fn propagate_coherent_shifted(
    g1: &GratingSpec,
    g2: &GratingSpec,
    geom: &InterferometerGeometry,
    res: &SimulationResolution,
    wavelength_pm: f64,
    l2_eff_m: f64,
    tilt_angle_rad: f64,
) -> Result<IntensityProfile> {
    let l1_um = geom.l1_m * UM_PER_M;
    let l2_um = l2_eff_m * UM_PER_M;
    let mut g2_shifted = g2.clone();
    g2_shifted.lateral_offset_um -= tilt_angle_rad * l1_um;
    let on_axis = propagate_coherent(g1, &g2_shifted, geom, res, wavelength_pm, l2_eff_m, 0.0)?;

    let shift_um = tilt_angle_rad * (l1_um + l2_um);
    let dx = res.grid_spacing_um();
    let cells = shift_um / dx;
    let n = res.n_points;
    if (cells - cells.round()).abs() > 1e-6 {
        return Err(TlError::resolution(format!(
            "output shift of {cells} cells is not grid-aligned; the shifted route \
             is only exact for grid-commensurate tilts"
        )));
    }
    let k = (cells.round() as i64).rem_euclid(n as i64) as usize;
    // intensity(x) = on_axis(x - shift): rotate the array right by k cells.
    let mut rotated = vec![0.0; n];
    for i in 0..n {
        rotated[(i + k) % n] = on_axis.intensity[i];
    }
    IntensityProfile::from_raw(
        on_axis.x_um,
        rotated,
        l2_eff_m,
        lattice_fringe_period_um(g1, g2),
    )
}

fn incoherent_average(
    grid: &EngineGrid,
    res: &SimulationResolution,
    lambdas_um: &[f64],
    l1_um: f64,
    l2_um: f64,
    tilts: &[f64],
) -> Vec<f64> {
    let n = res.n_points;
    // Fixed (energy, chunk) ordering of the partial sums keeps the result
    // byte-identical for any worker count.
    let mut total = vec![0.0; n];
    for &lambda_um in lambdas_um {
        let partials: Vec<Vec<f64>> = tilts
            .par_chunks(ANGLE_CHUNK)
            .map(|chunk| {
                let mut acc = vec![0.0; n];
                let mut buf = Vec::with_capacity(n);
                for &alpha in chunk {
                    grid.coherent_intensity(lambda_um, l1_um, l2_um, alpha, &mut acc, &mut buf);
                }
                acc
            })
            .collect();
        for partial in partials {
            for (t, p) in total.iter_mut().zip(partial.iter()) {
                *t += p;
            }
        }
    }
    total
}

/// Incoherent quantum fringe intensity at `l2_eff_m`: intensity average of
/// [`propagate_coherent`] over the stratified tilt ensemble and (optionally)
/// stratified energy draws.
pub fn quantum_intensity(
    g1: &GratingSpec,
    g2: &GratingSpec,
    geom: &InterferometerGeometry,
    beam: &BeamSpec,
    res: &SimulationResolution,
    energy_kev: f64,
    l2_eff_m: f64,
) -> Result<IntensityProfile> {
    let grid = EngineGrid::build(g1, g2, res)?;
    let l1_um = geom.l1_m * UM_PER_M;
    let l2_um = l2_eff_m * UM_PER_M;
    let energies = stratified_energies(
        &BeamSpec {
            kinetic_energy_kev: energy_kev,
            ..beam.clone()
        },
        res.n_energy_samples,
    );
    let lambdas: Vec<f64> = energies
        .iter()
        .map(|&e| debroglie_wavelength_pm(e).map(|pm| pm * 1e-6))
        .collect::<Result<_>>()?;
    for &lambda_um in &lambdas {
        check_sampling(lambda_um, l1_um, res.n_points, grid.dx_um)?;
        check_sampling(lambda_um, l2_um.max(1.0), res.n_points, grid.dx_um)?;
    }
    let alpha_max = beam.divergence_half_angle_mrad * 1e-3;
    let tilts = stratified_tilts(alpha_max, res.n_angles);
    let raw = incoherent_average(&grid, res, &lambdas, l1_um, l2_um, &tilts);
    IntensityProfile::from_raw(
        grid.x_um,
        raw,
        l2_eff_m,
        lattice_fringe_period_um(g1, g2),
    )
}

/// Classical straight-ray (moire) fringe intensity at `l2_eff_m`.
///
/// A ray entering at transverse position x1 with tilt alpha reaches the
/// detector at x = x1 + alpha (l1 + l2); it survives if both masks pass it.
/// Summed over the same stratified tilt ensemble as the quantum engine.
/// There is deliberately no wavelength or energy parameter.
pub fn classical_intensity(
    g1: &GratingSpec,
    g2: &GratingSpec,
    geom: &InterferometerGeometry,
    beam: &BeamSpec,
    res: &SimulationResolution,
    l2_eff_m: f64,
) -> Result<IntensityProfile> {
    res.validate(g1, g2)?;
    let x_um = grid_positions_um(res);
    let l1_um = geom.l1_m * UM_PER_M;
    let l2_um = l2_eff_m * UM_PER_M;
    let alpha_max = beam.divergence_half_angle_mrad * 1e-3;
    let tilts = stratified_tilts(alpha_max, res.n_angles);

    let partials: Vec<Vec<f64>> = tilts
        .par_chunks(ANGLE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; x_um.len()];
            for &alpha in chunk {
                let shift1 = alpha * (l1_um + l2_um);
                let shift2 = alpha * l2_um;
                for (a, &x) in acc.iter_mut().zip(x_um.iter()) {
                    *a += g1.transmission(x - shift1) * g2.transmission(x - shift2);
                }
            }
            acc
        })
        .collect();
    let mut raw = vec![0.0; x_um.len()];
    for partial in partials {
        for (r, p) in raw.iter_mut().zip(partial.iter()) {
            *r += p;
        }
    }
    IntensityProfile::from_raw(x_um, raw, l2_eff_m, lattice_fringe_period_um(g1, g2))
}

/// Self-convergence probe: relative visibility shift at the nominal fringe
/// period when the tilt ensemble is doubled. Values above 0.01 indicate an
/// unconverged incoherent average.
pub fn quantum_convergence_shift(
    g1: &GratingSpec,
    g2: &GratingSpec,
    geom: &InterferometerGeometry,
    beam: &BeamSpec,
    res: &SimulationResolution,
    energy_kev: f64,
    l2_eff_m: f64,
) -> Result<f64> {
    let coarse = quantum_intensity(g1, g2, geom, beam, res, energy_kev, l2_eff_m)?;
    let mut fine_res = res.clone();
    fine_res.n_angles *= 2;
    let fine = quantum_intensity(g1, g2, geom, beam, &fine_res, energy_kev, l2_eff_m)?;
    let period = coarse.nominal_period_um;
    let v0 = profile_visibility(&coarse, period)?;
    let v1 = profile_visibility(&fine, period)?;
    Ok((v1 - v0).abs() / v0.max(1e-9))
}
