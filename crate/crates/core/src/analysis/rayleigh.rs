//! Rayleigh periodogram statistic and noise-bias-corrected contrast.

use num_complex::Complex64;

use crate::error::{Result, TlError};
use crate::montecarlo::EventList;

/// Complex Rayleigh phasor sum of events folded at a trial period after
/// projecting onto the fringe normal at `rotation_mrad`:
/// p_j = u_j cos(theta) + s_j sin(theta).
pub fn rayleigh_sum(ev: &EventList, period_um: f64, rotation_mrad: f64) -> Result<Complex64> {
    if !(period_um > 0.0) {
        return Err(TlError::domain(format!(
            "trial period must be > 0 um, got {period_um}"
        )));
    }
    if ev.len() < 2 {
        return Err(TlError::domain("rayleigh statistic requires n >= 2 events"));
    }
    let theta = rotation_mrad * 1e-3;
    let (cos_t, sin_t) = (theta.cos(), theta.sin());
    let k = 2.0 * std::f64::consts::PI / period_um;
    let mut acc = Complex64::new(0.0, 0.0);
    for e in &ev.events {
        let p = e.u_um * cos_t + e.s_um * sin_t;
        acc += Complex64::from_polar(1.0, k * p);
    }
    Ok(acc)
}

/// Normalized Rayleigh power R = (2/n) |sum_j exp(2 pi i p_j / period)|.
///
/// R = 2 for a perfectly phase-locked sample; E[R] = sqrt(pi/n) under the
/// uniform null; R is a consistent estimator of the modulation depth C for
/// events drawn from I = 1 + C cos.
pub fn rayleigh_power(ev: &EventList, period_um: f64, rotation_mrad: f64) -> Result<f64> {
    let sum = rayleigh_sum(ev, period_um, rotation_mrad)?;
    Ok(2.0 * sum.norm() / ev.len() as f64)
}

/// Removes the additive noise floor from a raw Rayleigh amplitude:
/// C = sqrt(max((R^2 - 4/n) / (1 - 1/n), 0)), with the small-signal
/// uncertainty sigma = sqrt(2/n) (approximate for C > 0.5).
pub fn corrected_contrast(r: f64, n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(TlError::domain("bias correction requires n >= 2"));
    }
    let nf = n as f64;
    let c2 = (r * r - 4.0 / nf) / (1.0 - 1.0 / nf);
    Ok((c2.max(0.0).sqrt(), (2.0 / nf).sqrt()))
}
