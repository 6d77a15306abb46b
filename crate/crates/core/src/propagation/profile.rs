//! Fringe intensity profiles and first-harmonic visibility.

use crate::error::{Result, TlError};

/// 1D fringe intensity on a uniform transverse grid, normalized to mean 1.
#[derive(Debug, Clone)]
pub struct IntensityProfile {
    /// Grid positions, um (uniform, centered on the window).
    pub x_um: Vec<f64>,
    /// Non-negative intensity, mean 1.
    pub intensity: Vec<f64>,
    /// Longitudinal distance of the sampled plane from G2, m.
    pub plane_distance_m: f64,
    /// Expected fringe period at this plane, um.
    pub nominal_period_um: f64,
}

impl IntensityProfile {
    /// Builds a mean-normalized profile from raw intensities.
    pub fn from_raw(
        x_um: Vec<f64>,
        raw: Vec<f64>,
        plane_distance_m: f64,
        nominal_period_um: f64,
    ) -> Result<Self> {
        if x_um.len() != raw.len() || raw.is_empty() {
            return Err(TlError::model("profile grid/intensity length mismatch"));
        }
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        if !(mean > 0.0) {
            return Err(TlError::model("profile intensity is identically zero"));
        }
        let intensity: Vec<f64> = raw.iter().map(|v| (v / mean).max(0.0)).collect();
        Ok(IntensityProfile {
            x_um,
            intensity,
            plane_distance_m,
            nominal_period_um,
        })
    }

    pub fn grid_spacing_um(&self) -> f64 {
        self.x_um[1] - self.x_um[0]
    }

    pub fn window_um(&self) -> f64 {
        self.grid_spacing_um() * self.x_um.len() as f64
    }

    /// Intensity at arbitrary `u` by periodic wrap and linear interpolation.
    pub fn sample_periodic(&self, u_um: f64) -> f64 {
        let n = self.intensity.len();
        let dx = self.grid_spacing_um();
        let window = self.window_um();
        let pos = (u_um - self.x_um[0]).rem_euclid(window) / dx;
        let i0 = pos.floor() as usize % n;
        let i1 = (i0 + 1) % n;
        let t = pos - pos.floor();
        self.intensity[i0] * (1.0 - t) + self.intensity[i1] * t
    }

    /// First-harmonic complex amplitude c1 = mean(I * exp(-2 pi i x / period)).
    pub fn first_harmonic(&self, period_um: f64) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (x, i) in self.x_um.iter().zip(self.intensity.iter()) {
            let phase = -2.0 * std::f64::consts::PI * x / period_um;
            acc += i * num_complex::Complex64::from_polar(1.0, phase);
        }
        acc / self.x_um.len() as f64
    }
}

/// First-harmonic visibility V = 2 |c1| / c0 of a profile at a trial period.
///
/// A pure sinusoid I = 1 + m cos(2 pi x / d) returns its modulation depth m;
/// an ideal 50%-duty binary square wave returns 4/pi (its first-harmonic
/// modulation exceeds 1; engine profiles stay below 1 + eps after the
/// incoherent divergence average).
pub fn profile_visibility(profile: &IntensityProfile, period_um: f64) -> Result<f64> {
    let dx = profile.grid_spacing_um();
    if period_um <= 2.0 * dx {
        return Err(TlError::resolution(format!(
            "trial period {period_um} um at or below the grid Nyquist limit {} um",
            2.0 * dx
        )));
    }
    if profile.window_um() < 8.0 * period_um {
        return Err(TlError::resolution(format!(
            "profile spans fewer than 8 periods of {period_um} um"
        )));
    }
    let c0 = profile.intensity.iter().sum::<f64>() / profile.intensity.len() as f64;
    let c1 = profile.first_harmonic(period_um);
    Ok(2.0 * c1.norm() / c0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, window: f64) -> Vec<f64> {
        let dx = window / n as f64;
        (0..n).map(|i| (i as f64 - n as f64 / 2.0) * dx).collect()
    }

    fn sinusoid(modulation: f64, period: f64) -> IntensityProfile {
        let x = grid(8192, 192.0);
        let raw: Vec<f64> = x
            .iter()
            .map(|&x| 1.0 + modulation * (2.0 * std::f64::consts::PI * x / period).cos())
            .collect();
        IntensityProfile::from_raw(x, raw, 0.576, period).unwrap()
    }

    #[test]
    fn sinusoid_returns_modulation_depth() {
        let p = sinusoid(0.4, 6.0);
        let v = profile_visibility(&p, 6.0).unwrap();
        assert!((v - 0.4).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn square_wave_returns_four_over_pi() {
        let x = grid(8192, 192.0);
        let raw: Vec<f64> = x
            .iter()
            .map(|&x| {
                let frac = (x / 6.0).rem_euclid(1.0);
                if frac < 0.25 || frac > 0.75 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let p = IntensityProfile::from_raw(x, raw, 0.576, 6.0).unwrap();
        let v = profile_visibility(&p, 6.0).unwrap();
        // 0/1 square, duty 1/2: c0 = 1/2, |c1| = 1/pi, so V = 2|c1|/c0 = 4/pi.
        // Tolerance covers the half-cell duty bias of the sampled edges.
        assert!((v - 4.0 / std::f64::consts::PI).abs() < 2e-2, "got {v}");
    }

    #[test]
    fn uniform_profile_has_zero_visibility() {
        let x = grid(4096, 192.0);
        let raw = vec![1.0; 4096];
        let p = IntensityProfile::from_raw(x, raw, 0.576, 6.0).unwrap();
        assert!(profile_visibility(&p, 6.0).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_unresolvable_period() {
        let p = sinusoid(0.2, 6.0);
        let dx = p.grid_spacing_um();
        assert!(profile_visibility(&p, 1.5 * dx).is_err());
        assert!(profile_visibility(&p, 100.0).is_err()); // < 8 periods in window
    }

    #[test]
    fn normalization_and_nonnegativity() {
        let p = sinusoid(0.9, 6.0);
        let mean: f64 = p.intensity.iter().sum::<f64>() / p.intensity.len() as f64;
        assert!((mean - 1.0).abs() < 1e-9);
        assert!(p.intensity.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn periodic_sampling_wraps() {
        let p = sinusoid(0.5, 6.0);
        let w = p.window_um();
        for u in [-40.0, 3.3, 95.0] {
            let a = p.sample_periodic(u);
            let b = p.sample_periodic(u + w);
            assert!((a - b).abs() < 1e-9);
        }
    }
}
