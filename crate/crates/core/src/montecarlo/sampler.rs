//! Synthetic event generation: stratified inverse-CDF sampling from an
//! intensity model plus detector response effects.

use rand::Rng;

use crate::config::SimulationConfig;
use crate::error::{Result, TlError};
use crate::physics::{longitudinal_mapping_m, magnified_period};
use crate::propagation::{
    classical_intensity, profile_visibility, quantum_intensity, IntensityProfile,
};
use crate::rng::substream;

use super::detector::DetectorSpec;
use super::events::{Event, EventList, GenerationTruth};

/// Fringe intensity density over the emulsion plane, up to normalization.
pub trait IntensityModel {
    /// Non-negative density at emulsion coordinates (u, s), um.
    fn density(&self, u_um: f64, s_um: f64) -> f64;
}

/// Analytic test fringe: I = 1 + contrast * cos(2 pi u / period + phase),
/// independent of s.
#[derive(Debug, Clone)]
pub struct CosineFringeModel {
    pub period_um: f64,
    pub contrast: f64,
    pub phase_rad: f64,
}

impl CosineFringeModel {
    pub fn new(period_um: f64, contrast: f64) -> Self {
        CosineFringeModel {
            period_um,
            contrast,
            phase_rad: 0.0,
        }
    }
}

impl IntensityModel for CosineFringeModel {
    fn density(&self, u_um: f64, _s_um: f64) -> f64 {
        1.0 + self.contrast
            * (2.0 * std::f64::consts::PI * u_um / self.period_um + self.phase_rad).cos()
    }
}

/// Engine output evaluated on a stack of longitudinal planes; density at
/// (u, s) reads the plane nearest in s with periodic wrap in u.
pub struct PlaneStackModel {
    /// (s midpoint in um, fringe profile at that plane), ascending in s.
    pub planes: Vec<(f64, IntensityProfile)>,
}

impl IntensityModel for PlaneStackModel {
    fn density(&self, u_um: f64, s_um: f64) -> f64 {
        let nearest = self
            .planes
            .iter()
            .min_by(|a, b| {
                let da = (a.0 - s_um).abs();
                let db = (b.0 - s_um).abs();
                da.partial_cmp(&db).unwrap()
            })
            .expect("plane stack is never empty");
        nearest.1.sample_periodic(u_um)
    }
}

/// Width of one longitudinal sampling stratum, um.
const STRATUM_WIDTH_UM: f64 = 1000.0;
/// Inverse-CDF table cells across the u extent.
const CDF_CELLS: usize = 16384;

/// Longitudinal strata covering the emulsion: at most 1 mm wide, equal width.
pub fn s_strata(det: &DetectorSpec) -> Vec<(f64, f64)> {
    let hs = det.half_extent_s_um();
    let k = ((2.0 * hs) / STRATUM_WIDTH_UM).ceil().max(1.0) as usize;
    let width = 2.0 * hs / k as f64;
    (0..k).map(|i| (-hs + i as f64 * width, -hs + (i + 1) as f64 * width)).collect()
}

struct StratumCdf {
    cum: Vec<f64>,
    lo_u: f64,
    cell: f64,
}

impl StratumCdf {
    fn build(model: &dyn IntensityModel, s_mid: f64, det: &DetectorSpec) -> Result<StratumCdf> {
        let hu = det.half_extent_u_um();
        let cell = 2.0 * hu / CDF_CELLS as f64;
        let mut cum = Vec::with_capacity(CDF_CELLS + 1);
        cum.push(0.0);
        let mut total = 0.0;
        for j in 0..CDF_CELLS {
            let u_mid = -hu + (j as f64 + 0.5) * cell;
            let d = model.density(u_mid, s_mid);
            if !(d >= 0.0) {
                return Err(TlError::model(format!(
                    "intensity model returned {d} at (u = {u_mid} um, s = {s_mid} um)"
                )));
            }
            total += d;
            cum.push(total);
        }
        if !(total > 0.0) {
            return Err(TlError::model(format!(
                "intensity model is identically zero in the stratum at s = {s_mid} um"
            )));
        }
        Ok(StratumCdf {
            cum,
            lo_u: -hu,
            cell,
        })
    }

    fn invert(&self, r: f64) -> f64 {
        let total = *self.cum.last().unwrap();
        let target = r * total;
        // First cell whose cumulative upper edge exceeds the target.
        let j = self.cum.partition_point(|&c| c <= target).min(self.cum.len() - 1) - 1;
        let mass = self.cum[j + 1] - self.cum[j];
        let frac = if mass > 0.0 {
            (target - self.cum[j]) / mass
        } else {
            0.5
        };
        self.lo_u + (j as f64 + frac) * self.cell
    }
}

/// Draws exactly `n` events from the model: uniform in s within equal-count
/// longitudinal strata, inverse-CDF in u at each stratum midpoint.
/// Deterministic per (model, n, seed, detector).
pub fn sample_events(
    model: &dyn IntensityModel,
    n: usize,
    seed: u64,
    det: &DetectorSpec,
) -> Result<EventList> {
    if n < 1 {
        return Err(TlError::domain("sample_events requires n >= 1"));
    }
    det.validate("detector")?;
    let strata = s_strata(det);
    let k = strata.len();
    let mut events = Vec::with_capacity(n);
    for (idx, &(lo, hi)) in strata.iter().enumerate() {
        let count = n / k + usize::from(idx < n % k);
        if count == 0 {
            continue;
        }
        let s_mid = 0.5 * (lo + hi);
        let cdf = StratumCdf::build(model, s_mid, det)?;
        let mut rng = substream(seed, "events", idx as u64);
        for _ in 0..count {
            let s = lo + (hi - lo) * rng.gen::<f64>();
            let u = cdf.invert(rng.gen::<f64>());
            events.push(Event { u_um: u, s_um: s });
        }
    }
    Ok(EventList {
        events,
        seed,
        truth: None,
    })
}

/// Events are smeared in fixed-size chunks, each with its own substream,
/// so the result does not depend on any parallel execution layout.
const SMEAR_CHUNK: usize = 4096;

/// Applies detector response: rotation misalignment, Gaussian position
/// smearing (out-of-extent draws are retried, keeping n exact), and a
/// uniform background admixture. With all three effects zero the input is
/// returned bit-for-bit.
pub fn apply_detector_effects(ev: &EventList, det: &DetectorSpec, seed: u64) -> EventList {
    let sigma = det.position_sigma_um;
    let rho = det.rotation_misalignment_mrad * 1e-3;
    let bg = det.background_fraction;
    if sigma == 0.0 && rho == 0.0 && bg == 0.0 {
        return ev.clone();
    }
    let (hu, hs) = (det.half_extent_u_um(), det.half_extent_s_um());
    let (cos_r, sin_r) = (rho.cos(), rho.sin());
    let mut out = Vec::with_capacity(ev.events.len());
    for (chunk_idx, chunk) in ev.events.chunks(SMEAR_CHUNK).enumerate() {
        let mut rng = substream(seed, "smear", chunk_idx as u64);
        for e in chunk {
            let ru = e.u_um * cos_r - e.s_um * sin_r;
            let rs = e.u_um * sin_r + e.s_um * cos_r;
            let mut u = ru.clamp(-hu, hu);
            let mut s = rs.clamp(-hs, hs);
            if sigma > 0.0 {
                for _ in 0..1000 {
                    let cu = ru + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
                    let cs = rs + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal);
                    if det.contains(cu, cs) {
                        u = cu;
                        s = cs;
                        break;
                    }
                }
            }
            if bg > 0.0 && rng.gen::<f64>() < bg {
                u = hu * (2.0 * rng.gen::<f64>() - 1.0);
                s = hs * (2.0 * rng.gen::<f64>() - 1.0);
            }
            out.push(Event { u_um: u, s_um: s });
        }
    }
    EventList {
        events: out,
        seed: ev.seed,
        truth: ev.truth.clone(),
    }
}

/// Which fringe engine backs an exposure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    Quantum,
    Classical,
}

impl ModelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Quantum => "quantum",
            ModelTag::Classical => "classical",
        }
    }
}

impl std::str::FromStr for ModelTag {
    type Err = TlError;
    fn from_str(s: &str) -> Result<ModelTag> {
        match s {
            "quantum" => Ok(ModelTag::Quantum),
            "classical" => Ok(ModelTag::Classical),
            other => Err(TlError::config(format!(
                "unknown model {other:?}; expected quantum or classical"
            ))),
        }
    }
}

/// Builds the per-stratum engine profile stack for one exposure.
pub fn build_plane_stack(
    cfg: &SimulationConfig,
    energy_kev: f64,
    model: ModelTag,
) -> Result<PlaneStackModel> {
    let strata = s_strata(&cfg.detector);
    let mut planes = Vec::with_capacity(strata.len());
    for &(lo, hi) in &strata {
        let s_mid_um = 0.5 * (lo + hi);
        let l2_eff = longitudinal_mapping_m(s_mid_um * 1e-3, &cfg.geometry);
        let profile = match model {
            ModelTag::Quantum => quantum_intensity(
                &cfg.g1,
                &cfg.g2,
                &cfg.geometry,
                &cfg.beam,
                &cfg.resolution,
                energy_kev,
                l2_eff,
            )?,
            ModelTag::Classical => classical_intensity(
                &cfg.g1,
                &cfg.g2,
                &cfg.geometry,
                &cfg.beam,
                &cfg.resolution,
                l2_eff,
            )?,
        };
        planes.push((s_mid_um, profile));
    }
    Ok(PlaneStackModel { planes })
}

/// End-to-end exposure: engine intensity on the tilted s-grid, stratified
/// event sampling, detector effects, truth record.
pub fn generate_exposure(
    cfg: &SimulationConfig,
    energy_kev: f64,
    model: ModelTag,
    n: usize,
    seed: u64,
) -> Result<EventList> {
    cfg.validate()?;
    let stack = build_plane_stack(cfg, energy_kev, model)?;
    let mut list = sample_events(&stack, n, seed, &cfg.detector)?;

    let central = stack
        .planes
        .iter()
        .min_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).unwrap())
        .unwrap();
    let contrast = profile_visibility(&central.1, central.1.nominal_period_um)?;
    list.truth = Some(GenerationTruth {
        model: model.as_str().to_string(),
        energy_kev: match model {
            ModelTag::Quantum => energy_kev,
            ModelTag::Classical => 0.0,
        },
        contrast,
        period_um: magnified_period(cfg.g2.period_um, cfg.geometry.l1_m, cfg.geometry.l2_m)?,
        rotation_mrad: cfg.detector.rotation_misalignment_mrad,
        sigma_um: cfg.detector.position_sigma_um,
    });
    Ok(apply_detector_effects(&list, &cfg.detector, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noiseless_detector() -> DetectorSpec {
        DetectorSpec {
            position_sigma_um: 0.0,
            ..DetectorSpec::default()
        }
    }

    #[test]
    fn uniform_model_passes_ks_test() {
        let model = CosineFringeModel::new(5.881, 0.0);
        let det = noiseless_detector();
        let n = 100_000;
        let list = sample_events(&model, n, 3, &det).unwrap();
        let hu = det.half_extent_u_um();
        let mut us: Vec<f64> = list.events.iter().map(|e| e.u_um).collect();
        us.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks: f64 = 0.0;
        for (i, &u) in us.iter().enumerate() {
            let cdf = (u + hu) / (2.0 * hu);
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            ks = ks.max((cdf - lo).abs()).max((cdf - hi).abs());
        }
        assert!(ks < 1.36 / (n as f64).sqrt(), "KS distance {ks}");
    }

    #[test]
    fn same_seed_reproduces_identical_events() {
        let model = CosineFringeModel::new(5.881, 0.3);
        let det = DetectorSpec::default();
        let a = sample_events(&model, 5000, 17, &det).unwrap();
        let b = sample_events(&model, 5000, 17, &det).unwrap();
        assert_eq!(a, b);
        let ea = apply_detector_effects(&a, &det, 17);
        let eb = apply_detector_effects(&b, &det, 17);
        assert_eq!(ea, eb);
        let c = sample_events(&model, 5000, 18, &det).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn exact_event_count_and_extent() {
        let model = CosineFringeModel::new(5.881, 0.6);
        let det = DetectorSpec {
            position_sigma_um: 500.0,
            background_fraction: 0.1,
            rotation_misalignment_mrad: 2.0,
            ..DetectorSpec::default()
        };
        let list = sample_events(&model, 12345, 9, &det).unwrap();
        assert_eq!(list.len(), 12345);
        let out = apply_detector_effects(&list, &det, 9);
        assert_eq!(out.len(), 12345);
        assert!(out.events.iter().all(|e| det.contains(e.u_um, e.s_um)));
    }

    #[test]
    fn strata_partition_the_scan_extent() {
        let det = DetectorSpec::default();
        let strata = s_strata(&det);
        assert_eq!(strata.len(), 20);
        assert_eq!(strata[0].0, -det.half_extent_s_um());
        assert_eq!(strata[19].1, det.half_extent_s_um());
        for w in strata.windows(2) {
            assert!((w[0].1 - w[1].0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_intensity_model_rejected() {
        struct Dark;
        impl IntensityModel for Dark {
            fn density(&self, _: f64, _: f64) -> f64 {
                0.0
            }
        }
        let err = sample_events(&Dark, 10, 1, &DetectorSpec::default()).unwrap_err();
        assert!(matches!(err, TlError::Model(_)));
    }

    #[test]
    fn negative_intensity_model_rejected() {
        struct Bad;
        impl IntensityModel for Bad {
            fn density(&self, u: f64, _: f64) -> f64 {
                u // negative for u < 0
            }
        }
        assert!(sample_events(&Bad, 10, 1, &DetectorSpec::default()).is_err());
    }

    #[test]
    fn zero_effects_are_bitwise_identity() {
        let model = CosineFringeModel::new(5.881, 0.3);
        let det = noiseless_detector();
        let list = sample_events(&model, 2000, 5, &det).unwrap();
        let out = apply_detector_effects(&list, &det, 5);
        assert_eq!(list, out);
    }

    #[test]
    fn pure_rotation_rotates_coordinates() {
        let det = DetectorSpec {
            position_sigma_um: 0.0,
            rotation_misalignment_mrad: 2.0,
            ..DetectorSpec::default()
        };
        let input = EventList {
            events: vec![Event { u_um: 100.0, s_um: 5000.0 }],
            seed: 0,
            truth: None,
        };
        let out = apply_detector_effects(&input, &det, 0);
        let rho: f64 = 2.0e-3;
        let eu = 100.0 * rho.cos() - 5000.0 * rho.sin();
        let es = 100.0 * rho.sin() + 5000.0 * rho.cos();
        assert!((out.events[0].u_um - eu).abs() < 1e-9);
        assert!((out.events[0].s_um - es).abs() < 1e-9);
    }

    #[test]
    fn cosine_marginal_matches_model_histogram() {
        // Chi-squared of the empirical u-histogram against the model
        // density, 64 bins; dof approximately 63.
        let c = 0.4;
        let d = 5.881;
        let model = CosineFringeModel::new(d, c);
        let det = noiseless_detector();
        let n = 1_000_000;
        let list = sample_events(&model, n, 21, &det).unwrap();
        let hu = det.half_extent_u_um();
        let bins = 64;
        let mut counts = vec![0.0f64; bins];
        for e in &list.events {
            let b = (((e.u_um + hu) / (2.0 * hu)) * bins as f64) as usize;
            counts[b.min(bins - 1)] += 1.0;
        }
        // Expected content by integrating the density over each bin.
        let norm: f64 = n as f64 / (2.0 * hu);
        let width = 2.0 * hu / bins as f64;
        let mut chi2 = 0.0;
        for (b, &obs) in counts.iter().enumerate() {
            let lo = -hu + b as f64 * width;
            let hi = lo + width;
            let ilo = lo + c * d / (2.0 * std::f64::consts::PI)
                * (2.0 * std::f64::consts::PI * lo / d).sin();
            let ihi = hi + c * d / (2.0 * std::f64::consts::PI)
                * (2.0 * std::f64::consts::PI * hi / d).sin();
            let expected = norm * (ihi - ilo);
            chi2 += (obs - expected) * (obs - expected) / expected;
        }
        let chi2_dof = chi2 / 63.0;
        assert!(
            (0.7..1.4).contains(&chi2_dof),
            "chi2/dof = {chi2_dof}"
        );
    }

    #[test]
    fn model_tag_parsing() {
        assert_eq!("quantum".parse::<ModelTag>().unwrap(), ModelTag::Quantum);
        assert_eq!("classical".parse::<ModelTag>().unwrap(), ModelTag::Classical);
        assert!("ray".parse::<ModelTag>().is_err());
    }
}
