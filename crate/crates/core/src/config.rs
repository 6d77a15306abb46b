//! Flat key=value run configuration.
//!
//! The format is dotted `section.key = value` lines, `#` comments, blank
//! lines ignored. Unknown keys are errors; missing keys take the nominal
//! experimental defaults.

use std::path::Path;

use crate::error::{Result, TlError};
use crate::montecarlo::DetectorSpec;
use crate::physics::{BeamSpec, GratingSpec, InterferometerGeometry};
use crate::propagation::SimulationResolution;

/// Complete, validated description of one simulated run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub beam: BeamSpec,
    pub g1: GratingSpec,
    pub g2: GratingSpec,
    pub geometry: InterferometerGeometry,
    pub detector: DetectorSpec,
    pub resolution: SimulationResolution,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            beam: BeamSpec::default(),
            g1: GratingSpec::new(1.2, 0.5),
            g2: GratingSpec::new(1.0, 0.5),
            geometry: InterferometerGeometry::default(),
            detector: DetectorSpec::default(),
            resolution: SimulationResolution::default(),
            seed: 1,
        }
    }
}

impl SimulationConfig {
    /// Checks every sub-invariant; returns advisory warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let warnings = self.beam.validate("beam")?;
        self.g1.validate("g1")?;
        self.g2.validate("g2")?;
        self.geometry.validate("geometry")?;
        self.detector.validate("detector")?;
        self.resolution.validate(&self.g1, &self.g2)?;
        Ok(warnings)
    }

    /// Canonical serialization: every field as a dotted key=value line,
    /// sorted by key. Also the basis of the manifest config hash.
    pub fn canonical_text(&self) -> String {
        let mut lines = vec![
            format!("beam.divergence_mrad = {}", self.beam.divergence_half_angle_mrad),
            format!("beam.energy_kev = {}", self.beam.kinetic_energy_kev),
            format!("beam.energy_sigma_rel = {}", self.beam.energy_sigma_rel),
            format!("beam.flux_per_s = {}", self.beam.flux_per_s),
            format!("beam.spot_mm = {}", self.beam.spot_width_mm),
            format!("detector.background = {}", self.detector.background_fraction),
            format!("detector.half_s_mm = {}", self.detector.half_extent_s_mm),
            format!("detector.half_u_mm = {}", self.detector.half_extent_u_mm),
            format!("detector.rotation_mrad = {}", self.detector.rotation_misalignment_mrad),
            format!("detector.sigma_um = {}", self.detector.position_sigma_um),
            format!("g1.offset_um = {}", self.g1.lateral_offset_um),
            format!("g1.open_fraction = {}", self.g1.open_fraction),
            format!("g1.period_um = {}", self.g1.period_um),
            format!("g1.rotation_mrad = {}", self.g1.rotation_mrad),
            format!("g2.offset_um = {}", self.g2.lateral_offset_um),
            format!("g2.open_fraction = {}", self.g2.open_fraction),
            format!("g2.period_um = {}", self.g2.period_um),
            format!("g2.rotation_mrad = {}", self.g2.rotation_mrad),
            format!("geometry.collimator_mm = {}", self.geometry.collimator_width_mm),
            format!("geometry.l1_m = {}", self.geometry.l1_m),
            format!("geometry.l2_m = {}", self.geometry.l2_m),
            format!("geometry.tilt_deg = {}", self.geometry.detector_tilt_deg),
            format!("resolution.n_angles = {}", self.resolution.n_angles),
            format!("resolution.n_energy_samples = {}", self.resolution.n_energy_samples),
            format!("resolution.n_points = {}", self.resolution.n_points),
            format!("resolution.window_um = {}", self.resolution.window_um),
            format!("run.seed = {}", self.seed),
        ];
        lines.sort();
        lines.join("\n") + "\n"
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    value.parse().map_err(|_| TlError::Parse {
        line,
        message: format!("{key}: expected a number, got {value:?}"),
    })
}

fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize> {
    value.parse().map_err(|_| TlError::Parse {
        line,
        message: format!("{key}: expected an unsigned integer, got {value:?}"),
    })
}

fn parse_u64(key: &str, value: &str, line: usize) -> Result<u64> {
    value.parse().map_err(|_| TlError::Parse {
        line,
        message: format!("{key}: expected an unsigned integer, got {value:?}"),
    })
}

/// Parses config text. Unknown keys and duplicate keys are errors; the
/// result is validated before being returned.
pub fn parse_config(text: &str) -> Result<(SimulationConfig, Vec<String>)> {
    let mut cfg = SimulationConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| TlError::Parse {
            line: line_no,
            message: format!("expected `key = value`, got {line:?}"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(TlError::Parse {
                line: line_no,
                message: format!("duplicate key {key}"),
            });
        }
        seen.push(key.to_string());
        match key {
            "beam.energy_kev" => cfg.beam.kinetic_energy_kev = parse_f64(key, value, line_no)?,
            "beam.energy_sigma_rel" => cfg.beam.energy_sigma_rel = parse_f64(key, value, line_no)?,
            "beam.divergence_mrad" => {
                cfg.beam.divergence_half_angle_mrad = parse_f64(key, value, line_no)?
            }
            "beam.spot_mm" => cfg.beam.spot_width_mm = parse_f64(key, value, line_no)?,
            "beam.flux_per_s" => cfg.beam.flux_per_s = parse_f64(key, value, line_no)?,
            "g1.period_um" => cfg.g1.period_um = parse_f64(key, value, line_no)?,
            "g1.open_fraction" => cfg.g1.open_fraction = parse_f64(key, value, line_no)?,
            "g1.offset_um" => cfg.g1.lateral_offset_um = parse_f64(key, value, line_no)?,
            "g1.rotation_mrad" => cfg.g1.rotation_mrad = parse_f64(key, value, line_no)?,
            "g2.period_um" => cfg.g2.period_um = parse_f64(key, value, line_no)?,
            "g2.open_fraction" => cfg.g2.open_fraction = parse_f64(key, value, line_no)?,
            "g2.offset_um" => cfg.g2.lateral_offset_um = parse_f64(key, value, line_no)?,
            "g2.rotation_mrad" => cfg.g2.rotation_mrad = parse_f64(key, value, line_no)?,
            "geometry.l1_m" => cfg.geometry.l1_m = parse_f64(key, value, line_no)?,
            "geometry.l2_m" => cfg.geometry.l2_m = parse_f64(key, value, line_no)?,
            "geometry.tilt_deg" => {
                cfg.geometry.detector_tilt_deg = parse_f64(key, value, line_no)?
            }
            "geometry.collimator_mm" => {
                cfg.geometry.collimator_width_mm = parse_f64(key, value, line_no)?
            }
            "detector.sigma_um" => {
                cfg.detector.position_sigma_um = parse_f64(key, value, line_no)?
            }
            "detector.rotation_mrad" => {
                cfg.detector.rotation_misalignment_mrad = parse_f64(key, value, line_no)?
            }
            "detector.half_u_mm" => {
                cfg.detector.half_extent_u_mm = parse_f64(key, value, line_no)?
            }
            "detector.half_s_mm" => {
                cfg.detector.half_extent_s_mm = parse_f64(key, value, line_no)?
            }
            "detector.background" => {
                cfg.detector.background_fraction = parse_f64(key, value, line_no)?
            }
            "resolution.n_points" => cfg.resolution.n_points = parse_usize(key, value, line_no)?,
            "resolution.window_um" => cfg.resolution.window_um = parse_f64(key, value, line_no)?,
            "resolution.n_angles" => cfg.resolution.n_angles = parse_usize(key, value, line_no)?,
            "resolution.n_energy_samples" => {
                cfg.resolution.n_energy_samples = parse_usize(key, value, line_no)?
            }
            "run.seed" => cfg.seed = parse_u64(key, value, line_no)?,
            _ => {
                return Err(TlError::Parse {
                    line: line_no,
                    message: format!("unknown key {key}"),
                })
            }
        }
    }
    let warnings = cfg.validate()?;
    Ok((cfg, warnings))
}

/// Loads and validates a config file; an empty file yields the defaults.
pub fn load_config(path: &Path) -> Result<(SimulationConfig, Vec<String>)> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}
