//! Contrast observables: C(s) along the tilted emulsion and C(E) across
//! beam energies, with the classical model as the energy-blind null.

use crate::config::SimulationConfig;
use crate::error::{Result, TlError};
use crate::montecarlo::{
    apply_detector_effects, sample_events, EventList, ModelTag, PlaneStackModel,
};
use crate::physics::{
    longitudinal_mapping_m, magnified_period, resonant_plane_m, GratingSpec,
    InterferometerGeometry,
};
use crate::propagation::{classical_intensity, profile_visibility, quantum_intensity};

use super::fit::{fit_fringes, FringeFitResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveLabel {
    EnergyScan,
    LongitudinalScan,
}

impl CurveLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveLabel::EnergyScan => "energy-scan",
            CurveLabel::LongitudinalScan => "longitudinal-scan",
        }
    }
}

/// Fitted contrast against energy (keV) or emulsion coordinate (mm).
#[derive(Debug, Clone)]
pub struct ContrastCurve {
    pub abscissa: Vec<f64>,
    pub contrast: Vec<f64>,
    pub sigma: Vec<f64>,
    pub label: CurveLabel,
}

impl ContrastCurve {
    fn push(&mut self, x: f64, c: f64, s: f64) {
        self.abscissa.push(x);
        self.contrast.push(c);
        self.sigma.push(s);
    }
}

/// Per-bin detail of a longitudinal scan.
#[derive(Debug, Clone)]
pub struct LongitudinalBin {
    pub s_center_mm: f64,
    /// Magnified-period prediction d3(l2_eff) seeding the search, um.
    pub period_seed_um: f64,
    pub fit: FringeFitResult,
}

/// Longitudinal scan output: the contrast curve plus per-bin diagnostics.
#[derive(Debug, Clone)]
pub struct LongitudinalScan {
    pub curve: ContrastCurve,
    pub bins: Vec<LongitudinalBin>,
}

/// Search configuration for per-bin and per-energy fits.
#[derive(Debug, Clone)]
pub struct ScanFitConfig {
    /// Rotation search range, mrad.
    pub rotation_range_mrad: (f64, f64),
    /// Half-width of the period search window relative to the seed.
    pub period_window_rel: f64,
    /// Bins with fewer events are merged into their neighbor.
    pub min_events_per_bin: usize,
}

impl Default for ScanFitConfig {
    fn default() -> Self {
        ScanFitConfig {
            rotation_range_mrad: (-2.0, 2.0),
            period_window_rel: 0.03,
            min_events_per_bin: 1000,
        }
    }
}

/// Bins events along s and fits fringes per bin, seeding each period
/// search with the geometric magnified-period prediction at that plane.
pub fn contrast_vs_longitudinal(
    ev: &EventList,
    n_bins: usize,
    geom: &InterferometerGeometry,
    g2: &GratingSpec,
    fit_cfg: &ScanFitConfig,
) -> Result<LongitudinalScan> {
    if n_bins < 3 {
        return Err(TlError::domain("longitudinal scan requires >= 3 bins"));
    }
    if ev.is_empty() {
        return Err(TlError::domain("longitudinal scan requires events"));
    }
    let s_min = ev.events.iter().map(|e| e.s_um).fold(f64::INFINITY, f64::min);
    let s_max = ev
        .events
        .iter()
        .map(|e| e.s_um)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(s_max > s_min) {
        return Err(TlError::domain("events have no s extent to bin"));
    }
    let width = (s_max - s_min) / n_bins as f64;
    let mut groups: Vec<(f64, f64, Vec<crate::montecarlo::Event>)> = (0..n_bins)
        .map(|b| {
            let lo = s_min + b as f64 * width;
            (lo, lo + width, Vec::new())
        })
        .collect();
    for e in &ev.events {
        let b = (((e.s_um - s_min) / width) as usize).min(n_bins - 1);
        groups[b].2.push(*e);
    }
    // Merge underpopulated bins into the following one (the last merges
    // backwards), keeping edges contiguous.
    let mut merged: Vec<(f64, f64, Vec<crate::montecarlo::Event>)> = Vec::new();
    for g in groups {
        match merged.last_mut() {
            Some(prev) if prev.2.len() < fit_cfg.min_events_per_bin => {
                prev.1 = g.1;
                prev.2.extend(g.2);
            }
            _ => merged.push(g),
        }
    }
    if let Some(last) = merged.last() {
        if last.2.len() < fit_cfg.min_events_per_bin && merged.len() >= 2 {
            let (_, hi, evs) = merged.pop().unwrap();
            let prev = merged.last_mut().unwrap();
            prev.1 = hi;
            prev.2.extend(evs);
        }
    }

    let mut curve = ContrastCurve {
        abscissa: Vec::new(),
        contrast: Vec::new(),
        sigma: Vec::new(),
        label: CurveLabel::LongitudinalScan,
    };
    let mut bins = Vec::new();
    for (lo, hi, events) in merged {
        let s_center_mm = 0.5 * (lo + hi) * 1e-3;
        let l2_eff = longitudinal_mapping_m(s_center_mm, geom);
        let seed = magnified_period(g2.period_um, geom.l1_m, l2_eff)?;
        let sub = EventList {
            events,
            seed: ev.seed,
            truth: ev.truth.clone(),
        };
        let fit = fit_fringes(
            &sub,
            (
                seed * (1.0 - fit_cfg.period_window_rel),
                seed * (1.0 + fit_cfg.period_window_rel),
            ),
            fit_cfg.rotation_range_mrad,
        )?;
        curve.push(s_center_mm, fit.contrast_hat, fit.contrast_sigma);
        bins.push(LongitudinalBin {
            s_center_mm,
            period_seed_um: seed,
            fit,
        });
    }
    Ok(LongitudinalScan { curve, bins })
}

/// Energy scan output: fitted contrast from synthetic exposures plus the
/// noise-free engine visibility at the same plane.
#[derive(Debug, Clone)]
pub struct EnergyScan {
    pub fitted: ContrastCurve,
    pub noise_free: ContrastCurve,
    pub fits: Vec<FringeFitResult>,
}

/// Contrast against beam energy at the stationary-fringe plane.
///
/// Exposures are evaluated on the emulsion slice where the tilt-averaged
/// fringes are stationary (l2* = l1 / (d1/d2 - 1)), the region a real
/// scan would select for peak contrast; each energy gets an exposure of
/// `n_per_energy` events and a fringe fit, alongside the noise-free
/// first-harmonic visibility of the engine profile.
pub fn contrast_vs_energy(
    cfg: &SimulationConfig,
    energies_kev: &[f64],
    model: ModelTag,
    n_per_energy: usize,
    seed: u64,
) -> Result<EnergyScan> {
    if energies_kev.is_empty() {
        return Err(TlError::domain("energy scan requires at least one energy"));
    }
    cfg.validate()?;
    let l2_eval = resonant_plane_m(&cfg.geometry, &cfg.g1, &cfg.g2).unwrap_or(cfg.geometry.l2_m);
    // Narrow slice along s so every event sees the evaluation plane.
    let mut det = cfg.detector.clone();
    det.half_extent_s_mm = 1.0;

    let mut fitted = ContrastCurve {
        abscissa: Vec::new(),
        contrast: Vec::new(),
        sigma: Vec::new(),
        label: CurveLabel::EnergyScan,
    };
    let mut noise_free = fitted.clone();
    let mut fits = Vec::new();

    for &energy in energies_kev {
        let profile = match model {
            ModelTag::Quantum => quantum_intensity(
                &cfg.g1,
                &cfg.g2,
                &cfg.geometry,
                &cfg.beam,
                &cfg.resolution,
                energy,
                l2_eval,
            )?,
            ModelTag::Classical => classical_intensity(
                &cfg.g1,
                &cfg.g2,
                &cfg.geometry,
                &cfg.beam,
                &cfg.resolution,
                l2_eval,
            )?,
        };
        let period = profile.nominal_period_um;
        let v = profile_visibility(&profile, period)?;
        noise_free.push(energy, v, f64::MIN_POSITIVE);

        let stack = PlaneStackModel {
            planes: vec![(0.0, profile)],
        };
        let raw = sample_events(&stack, n_per_energy, seed, &det)?;
        let ev = apply_detector_effects(&raw, &det, seed);
        let rot = det.rotation_misalignment_mrad;
        let fit = fit_fringes(
            &ev,
            (period * 0.97, period * 1.03),
            (rot - 2.0, rot + 2.0),
        )?;
        fitted.push(energy, fit.contrast_hat, fit.contrast_sigma);
        fits.push(fit);
    }
    Ok(EnergyScan {
        fitted,
        noise_free,
        fits,
    })
}
