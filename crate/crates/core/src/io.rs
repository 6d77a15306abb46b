//! Bit-exact file formats: manifested CSV outputs, event round-trips,
//! key=value fit reports.
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! write-then-read is lossless. Wall-clock time never enters an output
//! file: the manifest timestamp comes from SOURCE_DATE_EPOCH when set and
//! is 0 otherwise, keeping reruns byte-identical.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::analysis::{ContrastCurve, EnergyScan, FringeFitResult};
use crate::config::SimulationConfig;
use crate::error::{Result, TlError};
use crate::montecarlo::{Event, EventList, GenerationTruth};
use crate::propagation::IntensityProfile;

/// Provenance header emitted as `#` comment lines atop every output file.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub command_line: String,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(cfg: &SimulationConfig, seed: u64, command_line: String) -> RunManifest {
        let mut hasher = Sha256::new();
        hasher.update(cfg.canonical_text().as_bytes());
        let config_hash = hasher
            .finalize()
            .iter()
            .fold(String::new(), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            });
        let timestamp_unix = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0);
        RunManifest {
            config_hash,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command_line,
            timestamp_unix,
        }
    }

    fn header(&self) -> String {
        format!(
            "# config_sha256 = {}\n# seed = {}\n# tool_version = {}\n# command = {}\n# timestamp_unix = {}\n",
            self.config_hash, self.seed, self.tool_version, self.command_line, self.timestamp_unix
        )
    }
}

pub fn write_profile_csv(
    path: &Path,
    profile: &IntensityProfile,
    manifest: &RunManifest,
) -> Result<()> {
    let mut out = manifest.header();
    let _ = writeln!(out, "# plane_distance_m = {}", profile.plane_distance_m);
    let _ = writeln!(out, "# nominal_period_um = {}", profile.nominal_period_um);
    out.push_str("x_um,intensity\n");
    for (x, i) in profile.x_um.iter().zip(profile.intensity.iter()) {
        let _ = writeln!(out, "{x},{i}");
    }
    Ok(std::fs::write(path, out)?)
}

pub fn write_events_csv(path: &Path, ev: &EventList, manifest: &RunManifest) -> Result<()> {
    let mut out = manifest.header();
    out.push_str("u_um,s_um\n");
    for e in &ev.events {
        let _ = writeln!(out, "{},{}", e.u_um, e.s_um);
    }
    std::fs::write(path, out)?;
    if let Some(truth) = &ev.truth {
        std::fs::write(truth_sidecar_path(path), truth_text(truth))?;
    }
    Ok(())
}

pub fn truth_sidecar_path(events_path: &Path) -> std::path::PathBuf {
    let mut os = events_path.as_os_str().to_os_string();
    os.push(".truth");
    std::path::PathBuf::from(os)
}

fn truth_text(t: &GenerationTruth) -> String {
    format!(
        "model = {}\nenergy_kev = {}\ncontrast = {}\nperiod_um = {}\nrotation_mrad = {}\nsigma_um = {}\n",
        t.model, t.energy_kev, t.contrast, t.period_um, t.rotation_mrad, t.sigma_um
    )
}

/// Reads an events CSV: manifest comments are skipped, the `u_um,s_um`
/// header is mandatory, malformed rows report their line number. The seed
/// is recovered from the manifest when present.
pub fn read_events(path: &Path) -> Result<EventList> {
    let text = std::fs::read_to_string(path)?;
    let mut events = Vec::new();
    let mut seed = 0u64;
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("seed =") {
                seed = v.trim().parse().unwrap_or(0);
            }
            continue;
        }
        if !header_seen {
            if line != "u_um,s_um" {
                return Err(TlError::Parse {
                    line: line_no,
                    message: format!("expected header u_um,s_um, got {line:?}"),
                });
            }
            header_seen = true;
            continue;
        }
        let mut fields = line.split(',');
        let (u, s) = match (fields.next(), fields.next(), fields.next()) {
            (Some(u), Some(s), None) => (u, s),
            _ => {
                return Err(TlError::Parse {
                    line: line_no,
                    message: format!("expected 2 columns, got {line:?}"),
                })
            }
        };
        let parse = |v: &str, name: &str| -> Result<f64> {
            v.trim().parse().map_err(|_| TlError::Parse {
                line: line_no,
                message: format!("{name}: not a number: {v:?}"),
            })
        };
        events.push(Event {
            u_um: parse(u, "u_um")?,
            s_um: parse(s, "s_um")?,
        });
    }
    if !header_seen {
        return Err(TlError::Parse {
            line: text.lines().count().max(1),
            message: "missing u_um,s_um header".into(),
        });
    }
    Ok(EventList {
        events,
        seed,
        truth: None,
    })
}

pub fn write_curve_csv(path: &Path, curve: &ContrastCurve, manifest: &RunManifest) -> Result<()> {
    let mut out = manifest.header();
    let _ = writeln!(out, "# label = {}", curve.label.as_str());
    out.push_str("abscissa,contrast,sigma\n");
    for i in 0..curve.abscissa.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            curve.abscissa[i], curve.contrast[i], curve.sigma[i]
        );
    }
    Ok(std::fs::write(path, out)?)
}

/// Fit report as key=value text.
pub fn fit_report_text(fit: &FringeFitResult) -> String {
    format!(
        "period_um = {}\nrotation_mrad = {}\nphase_rad = {}\ncontrast = {}\ncontrast_sigma = {}\nn_events = {}\nrayleigh_power = {}\nflags = {}\n",
        fit.period_hat_um,
        fit.rotation_hat_mrad,
        fit.phase_hat_rad,
        fit.contrast_hat,
        fit.contrast_sigma,
        fit.n_events,
        fit.rayleigh_power_at_max,
        fit.flags().join(",")
    )
}

/// Two-curve comparison CSV with a machine-readable verdict line.
pub fn write_compare_csv(
    path: &Path,
    quantum: &EnergyScan,
    classical: &EnergyScan,
    verdict: &str,
    manifest: &RunManifest,
) -> Result<()> {
    let mut out = manifest.header();
    out.push_str(
        "energy_kev,quantum_contrast,quantum_sigma,classical_contrast,classical_sigma\n",
    );
    for i in 0..quantum.fitted.abscissa.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            quantum.fitted.abscissa[i],
            quantum.fitted.contrast[i],
            quantum.fitted.sigma[i],
            classical.fitted.contrast[i],
            classical.fitted.sigma[i]
        );
    }
    let _ = writeln!(out, "# verdict: {verdict}");
    Ok(std::fs::write(path, out)?)
}
