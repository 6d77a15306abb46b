//! Complex field sampling and the paraxial Fresnel propagator.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, TlError};

/// A 1D complex amplitude sampled on a uniform periodic window.
#[derive(Debug, Clone)]
pub struct ComplexField {
    pub samples: Vec<Complex64>,
    pub grid_spacing_um: f64,
    pub window_um: f64,
}

impl ComplexField {
    pub fn new(samples: Vec<Complex64>, grid_spacing_um: f64) -> Result<Self> {
        let n = samples.len();
        if !n.is_power_of_two() || n < 2 {
            return Err(TlError::config(format!(
                "field sample count {n} must be a power of two"
            )));
        }
        Ok(ComplexField {
            window_um: n as f64 * grid_spacing_um,
            samples,
            grid_spacing_um,
        })
    }

    pub fn from_real(samples: &[f64], grid_spacing_um: f64) -> Result<Self> {
        Self::new(
            samples.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            grid_spacing_um,
        )
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_intensity(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// FFT frequency (cycles/um) of bin `k` for an `n`-point grid.
pub fn fft_frequency(k: usize, n: usize, grid_spacing_um: f64) -> f64 {
    let k = k as isize;
    let n = n as isize;
    let signed = if k < n / 2 { k } else { k - n };
    signed as f64 / (n as f64 * grid_spacing_um)
}

pub(crate) fn frequency_axis(n: usize, grid_spacing_um: f64) -> Vec<f64> {
    (0..n).map(|k| fft_frequency(k, n, grid_spacing_um)).collect()
}

/// Guard against undersampling the quadratic propagator phase: the phase
/// step between adjacent frequency bins at f_max must stay below pi,
/// i.e. lambda * z * f_max^2 <= n/4.
pub(crate) fn check_sampling(lambda_um: f64, z_um: f64, n: usize, dx_um: f64) -> Result<()> {
    let f_max = 0.5 / dx_um;
    if lambda_um * z_um * f_max * f_max > n as f64 / 4.0 {
        return Err(TlError::resolution(format!(
            "propagation over {z_um} um at lambda {lambda_um} um aliases the transfer \
             function on an {n}-point grid; increase n_points or shrink the window"
        )));
    }
    Ok(())
}

/// Shared forward/inverse FFT plans for one grid size.
pub(crate) struct FftPair {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
    pub n: usize,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPair {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            n,
        }
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Unitary inverse: undoes `forward_in_place` exactly up to rounding.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let scale = 1.0 / self.n as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
    }
}

/// Applies the paraxial transfer function H(f) = exp(-i pi lambda z f^2)
/// in the spatial-frequency domain. Wavelength in pm, distance in m.
/// Total intensity is conserved to better than 1e-9 relative.
pub fn fresnel_transfer(
    field: &ComplexField,
    wavelength_pm: f64,
    distance_m: f64,
) -> Result<ComplexField> {
    if !(wavelength_pm > 0.0) {
        return Err(TlError::domain(format!(
            "wavelength must be > 0 pm, got {wavelength_pm}"
        )));
    }
    if distance_m < 0.0 {
        return Err(TlError::domain(format!(
            "propagation distance must be >= 0 m, got {distance_m}"
        )));
    }
    if distance_m == 0.0 {
        // H = 1: bit-for-bit identity.
        return Ok(field.clone());
    }
    let lambda_um = wavelength_pm * 1e-6;
    let z_um = distance_m * 1e6;
    let n = field.len();
    let dx = field.grid_spacing_um;
    check_sampling(lambda_um, z_um, n, dx)?;

    let pair = FftPair::new(n);
    let mut buf = field.samples.clone();
    pair.forward_in_place(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let f = fft_frequency(k, n, dx);
        let phase = -std::f64::consts::PI * lambda_um * z_um * f * f;
        *c *= Complex64::from_polar(1.0, phase);
    }
    pair.inverse_in_place(&mut buf);
    ComplexField::new(buf, dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_field(n: usize, seed: u64) -> ComplexField {
        let mut rng = crate::rng::substream(seed, "field-test", 0);
        let samples = (0..n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        ComplexField::new(samples, 0.05).unwrap()
    }

    #[test]
    fn zero_distance_is_identity() {
        let field = random_field(1024, 1);
        let out = fresnel_transfer(&field, 10.295, 0.0).unwrap();
        for (a, b) in field.samples.iter().zip(out.samples.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn plane_wave_stays_uniform() {
        let n = 4096;
        let field = ComplexField::from_real(&vec![1.0; n], 0.05).unwrap();
        let out = fresnel_transfer(&field, 10.295, 0.05).unwrap();
        let intensity = out.intensity();
        let mean: f64 = intensity.iter().sum::<f64>() / n as f64;
        let var: f64 =
            intensity.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        assert!((var.sqrt() / mean) < 1e-9);
    }

    #[test]
    fn conserves_energy_for_random_fields() {
        for seed in 0..100 {
            let field = random_field(2048, seed);
            let before = field.total_intensity();
            let out = fresnel_transfer(&field, 12.0, 0.02).unwrap();
            let after = out.total_intensity();
            assert!(
                ((after - before) / before).abs() < 1e-9,
                "seed {seed}: {before} -> {after}"
            );
        }
    }

    #[test]
    fn aliasing_guard_triggers() {
        let field = random_field(1024, 7);
        // Huge distance on a small grid exceeds the phase sampling bound.
        let err = fresnel_transfer(&field, 10.295, 1e4);
        assert!(matches!(err, Err(TlError::Resolution(_))));
    }

    #[test]
    fn rejects_bad_inputs() {
        let field = random_field(256, 9);
        assert!(fresnel_transfer(&field, -1.0, 0.1).is_err());
        assert!(fresnel_transfer(&field, 10.0, -0.1).is_err());
    }
}
