//! Acceptance gate: one test per criterion, each printing a PASS/FAIL
//! verdict line before asserting. Run with `--nocapture` to see verdicts
//! for passing criteria too.

use tlsim::analysis::{contrast_vs_longitudinal, corrected_contrast, fit_fringes, rayleigh_power, ScanFitConfig};
use tlsim::config::SimulationConfig;
use tlsim::montecarlo::{
    apply_detector_effects, generate_exposure, sample_events, CosineFringeModel, DetectorSpec,
    EventList, ModelTag,
};
use tlsim::physics::{
    debroglie_wavelength_pm, magnified_period, resonance_residual, resonant_plane_m,
    talbot_length_m, transit_time_s, GratingSpec, InterferometerGeometry,
};
use tlsim::propagation::{
    classical_intensity, grating_transmission_profile, profile_visibility, propagate_coherent,
    quantum_intensity, SimulationResolution,
};

fn verdict(name: &str, ok: bool, detail: &str) {
    println!("{name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name} failed: {detail}");
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va * vb).sqrt()
}

/// Coarser grid for the event-heavy criteria that do not pin a resolution.
fn fast_resolution() -> SimulationResolution {
    SimulationResolution {
        n_points: 32_768,
        window_um: 768.0,
        n_angles: 128,
        n_energy_samples: 1,
    }
}

#[test]
fn acceptance_1_geometry_fidelity() {
    let cfg = SimulationConfig::default();
    let residual = resonance_residual(&cfg.geometry, &cfg.g1, &cfg.g2).unwrap();
    let rel = residual / (cfg.g1.period_um / cfg.g2.period_um - 1.0);
    let d3 = magnified_period(cfg.g2.period_um, cfg.geometry.l1_m, cfg.geometry.l2_m).unwrap();
    let ok = (residual - 0.00486).abs() < 1e-5 && rel.abs() <= 0.025 && (d3 - 5.881).abs() < 1e-3;
    verdict(
        "AC1 geometry fidelity",
        ok,
        &format!("residual={residual:.5} rel={rel:.4} d3={d3:.4} um"),
    );
}

#[test]
fn acceptance_2_kinematics() {
    // Frozen against hc / sqrt(E^2 + 2 E mc^2) with CODATA constants
    // (hc = 1239.84193 keV pm, mc^2 = 510.99895 keV).
    let expect = [
        (8.0, 13.659),
        (9.0, 12.871),
        (11.0, 11.631),
        (14.0, 10.295),
        (16.0, 9.621),
    ];
    let mut worst = 0.0f64;
    for &(e, lambda) in &expect {
        let got = debroglie_wavelength_pm(e).unwrap();
        worst = worst.max((got - lambda).abs());
    }
    let t = transit_time_s(14.0, 0.694).unwrap();
    let ok = worst < 1e-3 && (t - 1.01e-8).abs() < 0.005e-8;
    verdict(
        "AC2 kinematics",
        ok,
        &format!("max wavelength error {worst:.2e} pm, transit {t:.3e} s"),
    );
}

#[test]
fn acceptance_3_talbot_self_imaging() {
    // Single 1 um grating: G2 effectively removed (fully open, edges
    // nudged off grid points), drift encoded as l1 with l2_eff = 0.
    let g = GratingSpec::new(1.0, 0.5);
    let open = GratingSpec {
        lateral_offset_um: 0.001,
        ..GratingSpec::new(1.0, 0.999_999)
    };
    let res = SimulationResolution {
        n_points: 32_768,
        window_um: 512.0,
        ..SimulationResolution::default()
    };
    let lambda_pm = debroglie_wavelength_pm(14.0).unwrap();
    let z_t = talbot_length_m(1.0, lambda_pm).unwrap();
    assert!((z_t - 0.1943).abs() < 5e-4, "Talbot length {z_t} m");

    let geom_at = |z: f64| InterferometerGeometry {
        l1_m: z,
        ..InterferometerGeometry::default()
    };
    let shadow = grating_transmission_profile(&g, &res).unwrap();
    let full = propagate_coherent(&g, &open, &geom_at(z_t), &res, lambda_pm, 0.0, 0.0).unwrap();
    let r_full = pearson(&full.intensity, &shadow);

    let half = propagate_coherent(&g, &open, &geom_at(0.5 * z_t), &res, lambda_pm, 0.0, 0.0).unwrap();
    let shifted: Vec<f64> = half
        .x_um
        .iter()
        .map(|&x| g.transmission(x - 0.5 * g.period_um))
        .collect();
    let r_half = pearson(&half.intensity, &shifted);

    let ok = r_full > 0.99 && r_half > 0.99;
    verdict(
        "AC3 Talbot self-imaging",
        ok,
        &format!("corr(z_T)={r_full:.4} corr(z_T/2, half-period shift)={r_half:.4}"),
    );
}

#[test]
fn acceptance_4_quantum_vs_classical_discriminator() {
    let cfg = SimulationConfig::default();
    let energies = [8.0, 9.0, 11.0, 14.0, 16.0];
    let l2_eval = resonant_plane_m(&cfg.geometry, &cfg.g1, &cfg.g2).unwrap();

    // (a) the classical engine has no energy input; profiles computed per
    // energy point are bit-identical.
    let classical: Vec<Vec<f64>> = energies
        .iter()
        .map(|_| {
            classical_intensity(&cfg.g1, &cfg.g2, &cfg.geometry, &cfg.beam, &cfg.resolution, l2_eval)
                .unwrap()
                .intensity
        })
        .collect();
    let a_ok = classical.windows(2).all(|w| {
        w[0].iter()
            .zip(w[1].iter())
            .all(|(x, y)| x.to_bits() == y.to_bits())
    });
    verdict("AC4a classical energy-blind", a_ok, "bitwise across 5 energies");

    let vis: Vec<f64> = energies
        .iter()
        .map(|&e| {
            let p = quantum_intensity(
                &cfg.g1,
                &cfg.g2,
                &cfg.geometry,
                &cfg.beam,
                &cfg.resolution,
                e,
                l2_eval,
            )
            .unwrap();
            profile_visibility(&p, p.nominal_period_um).unwrap()
        })
        .collect();
    let vmax = vis.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = vis.iter().cloned().fold(f64::INFINITY, f64::min);
    let b_ok = vmax / vmin > 2.0;
    verdict(
        "AC4b quantum visibility varies",
        b_ok,
        &format!("max/min = {:.2} (vis {vis:.3?})", vmax / vmin),
    );

    let argmax = energies[vis
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0];
    verdict(
        "AC4c argmax at 14 keV",
        argmax == 14.0,
        &format!("argmax = {argmax} keV"),
    );
}

#[test]
fn acceptance_5_round_trip_statistics() {
    let d = 5.881;
    let sigma = 1.0;
    let n = 200_000;
    let det = DetectorSpec {
        position_sigma_um: sigma,
        rotation_misalignment_mrad: 10.0,
        ..DetectorSpec::default()
    };
    let model = CosineFringeModel::new(d, 0.20);
    let raw = sample_events(&model, n, 11, &det).unwrap();
    let ev = apply_detector_effects(&raw, &det, 11);
    let fit = fit_fringes(&ev, (5.68, 6.08), (0.0, 20.0)).unwrap();

    let attenuated = 0.20
        * (-2.0 * std::f64::consts::PI.powi(2) * sigma * sigma / (d * d)).exp();
    let tol_c = 3.0 * (2.0 / n as f64).sqrt();
    let ok = (fit.period_hat_um - d).abs() < 0.05
        && (fit.rotation_hat_mrad - 10.0).abs() < 2.0
        && (fit.contrast_hat - attenuated).abs() < tol_c;
    verdict(
        "AC5 round-trip statistics",
        ok,
        &format!(
            "period={:.4} rotation={:.3} contrast={:.4} (expect {attenuated:.4} +- {tol_c:.4})",
            fit.period_hat_um, fit.rotation_hat_mrad, fit.contrast_hat
        ),
    );
}

#[test]
fn acceptance_6_null_suite() {
    // Maximizing Rayleigh power over a search box inflates the null
    // expectation, so the fit check uses a deliberately narrow box and a
    // pinned seed; the distributional check below is seed-averaged.
    let det = DetectorSpec {
        position_sigma_um: 0.0,
        ..DetectorSpec::default()
    };
    let uniform = CosineFringeModel::new(5.881, 0.0);
    let ev = sample_events(&uniform, 100_000, 77, &det).unwrap();
    let fit = fit_fringes(&ev, (5.8, 6.0), (-1.0, 1.0)).unwrap();
    let fit_ok = fit.contrast_hat <= 3.0 * fit.contrast_sigma && fit.low_significance;
    verdict(
        "AC6a null fit",
        fit_ok,
        &format!(
            "contrast={:.4} (3 sigma = {:.4}), low_significance={}",
            fit.contrast_hat,
            3.0 * fit.contrast_sigma,
            fit.low_significance
        ),
    );

    let n = 10_000;
    let mut mean = 0.0;
    for seed in 0..200 {
        let ev = sample_events(&uniform, n, 1000 + seed, &det).unwrap();
        mean += rayleigh_power(&ev, 5.881, 0.0).unwrap();
    }
    mean /= 200.0;
    let expect = (std::f64::consts::PI / n as f64).sqrt();
    let mean_ok = (mean - expect).abs() < 0.1 * expect;
    verdict(
        "AC6b null Rayleigh mean",
        mean_ok,
        &format!("mean={mean:.5} expect={expect:.5}"),
    );

    // Bias correction drives the null to zero on average.
    let (c, s) = corrected_contrast(mean, n).unwrap();
    assert!(c < 3.0 * s, "corrected null contrast {c} vs sigma {s}");
}

#[test]
fn acceptance_7_convergence() {
    let cfg = SimulationConfig::default();
    let l2_eval = resonant_plane_m(&cfg.geometry, &cfg.g1, &cfg.g2).unwrap();
    let vis_at = |res: &SimulationResolution| {
        let p = quantum_intensity(&cfg.g1, &cfg.g2, &cfg.geometry, &cfg.beam, res, 14.0, l2_eval)
            .unwrap();
        profile_visibility(&p, p.nominal_period_um).unwrap()
    };
    let coarse = vis_at(&cfg.resolution);
    let fine_res = SimulationResolution {
        n_points: cfg.resolution.n_points * 2,
        n_angles: cfg.resolution.n_angles * 2,
        ..cfg.resolution.clone()
    };
    let fine = vis_at(&fine_res);
    let shift = (fine - coarse).abs() / coarse;
    verdict(
        "AC7 convergence",
        shift < 0.01,
        &format!("visibility {coarse:.4} -> {fine:.4}, relative shift {shift:.5}"),
    );
}

#[test]
fn acceptance_8_determinism() {
    // Byte-identical event output across reruns and worker counts,
    // exercised through the public pipeline that the CLI dispatches to.
    let bin = env!("CARGO_BIN_EXE_tlsim");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    std::fs::write(
        &config,
        "resolution.n_points = 16384\nresolution.window_um = 384\nresolution.n_angles = 64\nrun.seed = 7\n",
    )
    .unwrap();

    // The manifest records the command line, so byte-identity requires
    // reruns to use the same output path; read bytes between runs.
    let out = dir.path().join("events.csv");
    let run = |threads: &str| {
        let status = std::process::Command::new(bin)
            .env("RAYON_NUM_THREADS", threads)
            .args([
                "--config",
                config.to_str().unwrap(),
                "events",
                "--n",
                "20000",
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(&out).unwrap()
    };
    let a = run("1");
    let b = run("1");
    let c = run("4");
    let ok = a == b && a == c;
    verdict(
        "AC8 determinism",
        ok,
        &format!("rerun identical: {}, 1 vs 4 workers identical: {}", a == b, a == c),
    );
}

#[test]
fn acceptance_9_longitudinal_scan() {
    let mut cfg = SimulationConfig::default();
    cfg.resolution = fast_resolution();
    let ev = generate_exposure(&cfg, 14.0, ModelTag::Quantum, 200_000, 21).unwrap();
    let scan = contrast_vs_longitudinal(
        &EventList {
            events: ev.events.clone(),
            seed: ev.seed,
            truth: ev.truth.clone(),
        },
        8,
        &cfg.geometry,
        &cfg.g2,
        &ScanFitConfig::default(),
    )
    .unwrap();

    let seeds_ok = scan.bins.iter().all(|b| {
        let l2_eff = tlsim::physics::longitudinal_mapping_m(b.s_center_mm, &cfg.geometry);
        let d3 = magnified_period(cfg.g2.period_um, cfg.geometry.l1_m, l2_eff).unwrap();
        ((b.period_seed_um - d3) / d3).abs() < 0.01
    });
    verdict("AC9a period seeds track d3(l2_eff)", seeds_ok, "1% rule");

    let (argmax, _) = scan
        .curve
        .contrast
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let s_at_max = scan.curve.abscissa[argmax];
    let bin_width = scan.curve.abscissa[1] - scan.curve.abscissa[0];
    // "Within one bin of s = 0": the maximum sits in the central bin or an
    // adjacent one.
    let ok = s_at_max.abs() <= 1.5 * bin_width;
    verdict(
        "AC9b contrast maximum near s = 0",
        ok,
        &format!(
            "max contrast {:.3} at s = {s_at_max:.2} mm (bin width {bin_width:.2} mm); curve {:?}",
            scan.curve.contrast[argmax],
            scan.curve
                .contrast
                .iter()
                .map(|c| (c * 1e3).round() / 1e3)
                .collect::<Vec<_>>()
        ),
    );
}
