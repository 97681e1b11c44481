use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpofdm"))
}

#[test]
fn design_writes_pulse_with_zero_head() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pulse.json");
    let status = bin()
        .args([
            "design", "--n", "128", "--m", "96", "--l", "4", "--q", "5", "--papr-d", "1.0",
            "--gf", "0.05", "--seed", "7", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let doc = cpofdm::io::PulseFile::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    let pulse = doc.to_pulse().unwrap();
    for v in &pulse.time_sequence()[..95] {
        assert_eq!(v.norm(), 0.0);
    }
}

#[test]
fn design_missing_m_is_usage_error() {
    let output = bin().args(["design", "--n", "128"]).output().unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("m"), "stderr was: {err}");
}

#[test]
fn montecarlo_zero_trials_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["montecarlo", "--trials", "0", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!output.status.success());
}

#[test]
fn sinr_sweep_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = bin()
        .args([
            "sinr-sweep", "--m", "96", "--nt", "33", "--n", "128", "--s-min-norm", "0.8",
            "--grid-start", "0", "--grid-stop", "0", "--grid-step", "1", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2); // column header + one data row
}

#[test]
fn timing_reports_paper_wide_swath_pulse() {
    let output = bin()
        .args([
            "timing", "--n", "10749", "--m", "10000", "--sample-rate", "150000000",
            "--swath-width", "10000",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    let data = text.lines().last().unwrap();
    let duration: f64 = data.split(',').next().unwrap().parse().unwrap();
    assert!((duration - 5e-6).abs() < 1e-12);
}

#[test]
fn every_output_starts_with_replayable_header() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["montecarlo", "--trials", "5", "--q", "3", "--seed", "1", "--out-dir"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    for name in ["papr_cdf.csv", "xi_cdf.csv", "thresholds.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("# "));
        let meta: serde_json::Value = serde_json::from_str(&first[2..]).unwrap();
        assert_eq!(meta["tool"], "cpofdm");
        assert!(meta["params"]["seed"].is_number());
    }
}

#[test]
fn config_file_replaces_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("timing.csv");
    let cfg = serde_json::json!({
        "n": 11, "m": 10, "sample_rate": 1e6, "swath_width": 100.0,
        "out": out
    });
    let cfg_path = dir.path().join("cfg.json");
    fs::write(&cfg_path, cfg.to_string()).unwrap();
    let status = bin().args(["timing", "--config"]).arg(&cfg_path).status().unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    let duration: f64 = text.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((duration - 2e-6).abs() < 1e-18);
}

fn read_estimates(path: &Path) -> Vec<(usize, f64, f64, f64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("cell"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
                f[4].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn rangeline_empty_scene_gives_zero_estimates() {
    let dir = tempfile::tempdir().unwrap();
    let pulse_path = dir.path().join("pulse.json");
    assert!(bin()
        .args(["design", "--n", "64", "--m", "16", "--q", "5", "--seed", "2", "--out"])
        .arg(&pulse_path)
        .status()
        .unwrap()
        .success());
    let scene_path = dir.path().join("scene.json");
    fs::write(&scene_path, r#"{"m": 16, "targets": []}"#).unwrap();
    let out_dir = dir.path().join("out");
    assert!(bin()
        .args(["rangeline", "--pulse"])
        .arg(&pulse_path)
        .args(["--scene"])
        .arg(&scene_path)
        .args(["--sigma-sq", "0", "--seed", "0", "--out-dir"])
        .arg(&out_dir)
        .status()
        .unwrap()
        .success());
    for name in ["ofdm_sigma_0.csv", "lfm_sigma_0.csv"] {
        for (_, re, im, _) in read_estimates(&out_dir.join(name)) {
            assert!(re.abs() < 1e-12 && im.abs() < 1e-12);
        }
    }
}

#[test]
fn rangeline_dimension_mismatch_fails() {
    let dir = tempfile::tempdir().unwrap();
    let pulse_path = dir.path().join("pulse.json");
    assert!(bin()
        .args(["design", "--n", "64", "--m", "16", "--q", "3", "--out"])
        .arg(&pulse_path)
        .status()
        .unwrap()
        .success());
    let scene_path = dir.path().join("scene.json");
    fs::write(&scene_path, r#"{"m": 20, "targets": []}"#).unwrap();
    let status = bin()
        .args(["rangeline", "--pulse"])
        .arg(&pulse_path)
        .args(["--scene"])
        .arg(&scene_path)
        .args(["--out-dir"])
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert!(!status.success());
}

#[test]
fn reconstruct_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cpofdm::DesignConfig {
        n: 64,
        m: 16,
        l: 4,
        q: 5,
        papr_d_db: 1.0,
        g_f: 0.05,
        seed: 11,
    };
    let pulse = cpofdm::design::design_pulse(&cfg).unwrap();
    let pulse_path = dir.path().join("pulse.json");
    fs::write(&pulse_path, cpofdm::io::PulseFile::from_pulse(&pulse, &cfg).to_json()).unwrap();

    let scene = cpofdm::scene::random_scene(16, 1.0, 1.0, 5).unwrap();
    let rx = cpofdm::scene::synthesize_received(&pulse, &scene, 0.0, 0).unwrap();
    let rx_path = dir.path().join("rx.json");
    fs::write(&rx_path, cpofdm::io::ReceivedFile::from_received(&rx).to_json()).unwrap();

    let out = dir.path().join("est.csv");
    assert!(bin()
        .args(["reconstruct", "--pulse"])
        .arg(&pulse_path)
        .args(["--received"])
        .arg(&rx_path)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap()
        .success());
    let rows = read_estimates(&out);
    assert_eq!(rows.len(), 16);
    for (cell, re, im, _) in rows {
        let d = scene.coefficients()[cell];
        assert!((d.re - re).abs() < 1e-9 && (d.im - im).abs() < 1e-9);
    }
}
