//! Command-line interface: simulate, events, fit, scan-energy,
//! scan-longitudinal, compare-models.
//!
//! Exit codes: 0 success, 1 usage or config error, 2 domain error,
//! 3 internal/model error.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analysis::{contrast_vs_energy, contrast_vs_longitudinal, fit_fringes, ScanFitConfig};
use crate::config::{load_config, SimulationConfig};
use crate::error::{Result, TlError};
use crate::io::{
    fit_report_text, read_events, write_compare_csv, write_curve_csv, write_events_csv,
    write_profile_csv, RunManifest,
};
use crate::montecarlo::{generate_exposure, ModelTag};
use crate::propagation::{classical_intensity, profile_visibility, quantum_intensity};

#[derive(Parser, Debug)]
#[command(
    name = "tlsim",
    version,
    about = "Two-grating matter-wave interferometer simulator and fringe analysis"
)]
struct Cli {
    /// Run configuration file (key = value); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Propagation model: quantum or classical.
    #[arg(long, default_value = "quantum")]
    model: String,
    /// Beam kinetic energy in keV (default: config value).
    #[arg(long)]
    energy: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a fringe intensity profile at one detection plane.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Effective grating-to-plane distance in mm (default: config l2).
        #[arg(long)]
        l2eff_mm: Option<f64>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic exposure of detector events.
    Events {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of events.
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        /// RNG seed (default: config run.seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit fringe period, rotation, phase, and contrast to an event list.
    Fit {
        /// Events CSV to analyse.
        #[arg(long)]
        events: PathBuf,
        /// Period search range in um, as lo,hi.
        #[arg(long, allow_hyphen_values = true)]
        period_range: String,
        /// Rotation search range in mrad, as lo,hi.
        #[arg(long, default_value = "-2,2", allow_hyphen_values = true)]
        rotation_range: String,
        /// Optional report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fitted contrast versus beam energy from synthetic exposures.
    ScanEnergy {
        /// Comma-separated energies in keV.
        #[arg(long, default_value = "8,9,11,14,16")]
        energies: String,
        /// Propagation model: quantum or classical.
        #[arg(long, default_value = "quantum")]
        model: String,
        /// Events per energy point.
        #[arg(long, default_value_t = 50_000)]
        n: usize,
        /// RNG seed (default: config run.seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fitted contrast versus emulsion coordinate from one exposure.
    ScanLongitudinal {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of bins along the emulsion.
        #[arg(long, default_value_t = 8)]
        bins: usize,
        /// Number of events in the exposure.
        #[arg(long, default_value_t = 200_000)]
        n: usize,
        /// RNG seed (default: config run.seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantum versus classical energy scans with a flatness verdict.
    CompareModels {
        /// Comma-separated energies in keV.
        #[arg(long, default_value = "8,9,11,14,16")]
        energies: String,
        /// Events per energy point per model.
        #[arg(long, default_value_t = 50_000)]
        n: usize,
        /// RNG seed (default: config run.seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_pair(label: &str, text: &str) -> Result<(f64, f64)> {
    let err = || TlError::config(format!("{label}: expected `lo,hi`, got {text:?}"));
    let (lo, hi) = text.split_once(',').ok_or_else(err)?;
    Ok((
        lo.trim().parse().map_err(|_| err())?,
        hi.trim().parse().map_err(|_| err())?,
    ))
}

fn parse_list(label: &str, text: &str) -> Result<Vec<f64>> {
    let values: std::result::Result<Vec<f64>, _> =
        text.split(',').map(|v| v.trim().parse()).collect();
    values.map_err(|_| TlError::config(format!("{label}: expected comma-separated numbers, got {text:?}")))
}

fn parse_model(text: &str) -> Result<ModelTag> {
    text.parse()
}

fn load(cli_config: &Option<PathBuf>) -> Result<SimulationConfig> {
    let (cfg, warnings) = match cli_config {
        // Unreadable or unparseable config files are usage errors (exit 1),
        // unlike data-file failures later in a run.
        Some(path) => load_config(path).map_err(|e| match e {
            TlError::Parse { line, message } => {
                TlError::config(format!("{}:{line}: {message}", path.display()))
            }
            TlError::Io(e) => TlError::config(format!("{}: {e}", path.display())),
            other => other,
        })?,
        None => (SimulationConfig::default(), Vec::new()),
    };
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn run(cli: Cli, command_line: String) -> Result<()> {
    let cfg = load(&cli.config)?;
    match cli.command {
        Command::Simulate { model, l2eff_mm, out } => {
            let tag = parse_model(&model.model)?;
            let energy = model.energy.unwrap_or(cfg.beam.kinetic_energy_kev);
            let l2_eff_m = l2eff_mm.map_or(cfg.geometry.l2_m, |mm| mm * 1e-3);
            let profile = match tag {
                ModelTag::Quantum => quantum_intensity(
                    &cfg.g1,
                    &cfg.g2,
                    &cfg.geometry,
                    &cfg.beam,
                    &cfg.resolution,
                    energy,
                    l2_eff_m,
                )?,
                ModelTag::Classical => classical_intensity(
                    &cfg.g1,
                    &cfg.g2,
                    &cfg.geometry,
                    &cfg.beam,
                    &cfg.resolution,
                    l2_eff_m,
                )?,
            };
            let manifest = RunManifest::new(&cfg, cfg.seed, command_line);
            write_profile_csv(&out, &profile, &manifest)?;
            let v = profile_visibility(&profile, profile.nominal_period_um)?;
            println!(
                "plane_m={} period_um={} visibility={v:.4}",
                profile.plane_distance_m, profile.nominal_period_um
            );
        }
        Command::Events { model, n, seed, out } => {
            let tag = parse_model(&model.model)?;
            let energy = model.energy.unwrap_or(cfg.beam.kinetic_energy_kev);
            let seed = seed.unwrap_or(cfg.seed);
            let ev = generate_exposure(&cfg, energy, tag, n, seed)?;
            let manifest = RunManifest::new(&cfg, seed, command_line);
            write_events_csv(&out, &ev, &manifest)?;
            println!("events={} seed={seed} out={}", ev.len(), out.display());
        }
        Command::Fit {
            events,
            period_range,
            rotation_range,
            out,
        } => {
            let period = parse_pair("--period-range", &period_range)?;
            let rotation = parse_pair("--rotation-range", &rotation_range)?;
            let ev = read_events(&events)?;
            let fit = fit_fringes(&ev, period, rotation)?;
            let report = fit_report_text(&fit);
            match out {
                Some(path) => std::fs::write(path, report)?,
                None => print!("{report}"),
            }
        }
        Command::ScanEnergy {
            energies,
            model,
            n,
            seed,
            out,
        } => {
            let tag = parse_model(&model)?;
            let energies = parse_list("--energies", &energies)?;
            let seed = seed.unwrap_or(cfg.seed);
            let scan = contrast_vs_energy(&cfg, &energies, tag, n, seed)?;
            let manifest = RunManifest::new(&cfg, seed, command_line);
            write_curve_csv(&out, &scan.fitted, &manifest)?;
            for i in 0..scan.fitted.abscissa.len() {
                println!(
                    "energy_kev={} contrast={:.4} sigma={:.4} noise_free={:.4}",
                    scan.fitted.abscissa[i],
                    scan.fitted.contrast[i],
                    scan.fitted.sigma[i],
                    scan.noise_free.contrast[i]
                );
            }
        }
        Command::ScanLongitudinal {
            model,
            bins,
            n,
            seed,
            out,
        } => {
            let tag = parse_model(&model.model)?;
            let energy = model.energy.unwrap_or(cfg.beam.kinetic_energy_kev);
            let seed = seed.unwrap_or(cfg.seed);
            let ev = generate_exposure(&cfg, energy, tag, n, seed)?;
            let scan = contrast_vs_longitudinal(
                &ev,
                bins,
                &cfg.geometry,
                &cfg.g2,
                &ScanFitConfig::default(),
            )?;
            let manifest = RunManifest::new(&cfg, seed, command_line);
            write_curve_csv(&out, &scan.curve, &manifest)?;
            for b in &scan.bins {
                println!(
                    "s_mm={:.3} period_seed_um={:.4} contrast={:.4} sigma={:.4}",
                    b.s_center_mm, b.period_seed_um, b.fit.contrast_hat, b.fit.contrast_sigma
                );
            }
        }
        Command::CompareModels {
            energies,
            n,
            seed,
            out,
        } => {
            let energies = parse_list("--energies", &energies)?;
            let seed = seed.unwrap_or(cfg.seed);
            let quantum = contrast_vs_energy(&cfg, &energies, ModelTag::Quantum, n, seed)?;
            let classical = contrast_vs_energy(&cfg, &energies, ModelTag::Classical, n, seed)?;
            let verdict = format!(
                "quantum_varies={} classical_flat={}",
                curve_varies(&quantum.fitted.contrast, &quantum.fitted.sigma),
                !curve_varies(&classical.fitted.contrast, &classical.fitted.sigma)
            );
            let manifest = RunManifest::new(&cfg, seed, command_line);
            write_compare_csv(&out, &quantum, &classical, &verdict, &manifest)?;
            println!("{verdict}");
        }
    }
    Ok(())
}

/// A curve "varies" when its spread exceeds 3x the largest per-point
/// statistical uncertainty.
fn curve_varies(contrast: &[f64], sigma: &[f64]) -> bool {
    let max = contrast.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min = contrast.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let worst = sigma.iter().fold(0.0f64, |a, &b| a.max(b));
    max - min > 3.0 * worst
}

/// Entry point shared by the binary and tests; returns the process exit
/// code instead of exiting.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let command_line = args.join(" ");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive as "errors" but are successes.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli, command_line) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            i32::from(e.exit_code())
        }
    }
}
