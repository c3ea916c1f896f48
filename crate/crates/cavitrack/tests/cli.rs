use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cavitrack_core::{arrival_from_initial, FallConfig, BOLTZMANN, CESIUM_MASS};
use tempfile::TempDir;

fn cavitrack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavitrack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = cavitrack(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

/// Numeric CSV body without the header.
fn rows(file: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(file)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn json(file: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(file).unwrap()).unwrap()
}

#[test]
fn transit_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    ok(&[
        "transit", "--y", "-16.3", "--v", "0.39", "--seed", "7", "--out", &a,
    ]);
    ok(&[
        "transit", "--y", "-16.3", "--v", "0.39", "--seed", "7", "--out", &b,
    ]);
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("t_s,expected_T,counts\n"));
    assert_eq!(text.lines().count(), 61);
}

#[test]
fn fit_of_a_simulated_transit_converges() {
    let dir = TempDir::new().unwrap();
    let (trace, fit) = (path(&dir, "t.csv"), path(&dir, "fit.json"));
    ok(&[
        "transit", "--y", "-16.3", "--v", "0.39", "--seed", "7", "--out", &trace,
    ]);
    ok(&["fit", &trace, "--out", &fit]);
    let v = json(&fit);
    assert_eq!(v["converged"], true);
    let keys = [
        "y_off_um",
        "v_mps",
        "t_c_s",
        "sigma_y_um",
        "sigma_v_mps",
        "sigma_tc_s",
        "log_lik",
        "mirror_log_lik",
        "converged",
        "n_evals",
    ];
    assert_eq!(v.as_object().unwrap().len(), keys.len());
    for k in keys {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    assert!((v["y_off_um"].as_f64().unwrap() + 16.3).abs() < 2.0);
    assert!((v["v_mps"].as_f64().unwrap() - 0.39).abs() < 0.02);
}

#[test]
fn fit_of_a_directory_writes_one_result_per_trace() {
    let dir = TempDir::new().unwrap();
    let traces = dir.path().join("traces");
    fs::create_dir(&traces).unwrap();
    for (name, y, seed) in [("b", "10", "2"), ("a", "-10", "1")] {
        let out = traces.join(format!("{name}.csv")).display().to_string();
        ok(&[
            "transit", "--y", y, "--v", "0.42", "--seed", seed, "--out", &out,
        ]);
    }
    let fits = path(&dir, "fits");
    ok(&[
        "fit",
        &traces.display().to_string(),
        "--out",
        &fits,
        "--estimate-flux",
    ]);
    let a = json(&format!("{fits}/a.json"));
    let b = json(&format!("{fits}/b.json"));
    assert!(a["y_off_um"].as_f64().unwrap() < 0.0);
    assert!(b["y_off_um"].as_f64().unwrap() > 0.0);
}

#[test]
fn frequency_scan_without_coupling_is_lorentzian() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "scan.csv");
    ok(&[
        "scan",
        "--axis",
        "freq",
        "--delta-ca",
        "0",
        "--g",
        "0",
        "--out",
        &out,
    ]);
    let header = fs::read_to_string(&out).unwrap();
    assert!(header.starts_with("delta_pa_mhz,T\n"));
    let kappa: f64 = 2.6;
    let data = rows(Path::new(&out));
    assert_eq!(data.len(), 1201);
    for r in data {
        let lorentz = kappa * kappa / (kappa * kappa + r[0] * r[0]);
        assert!((r[1] - lorentz).abs() <= 1e-12, "{r:?}");
    }
}

#[test]
fn position_scan_writes_csv_and_plot() {
    let dir = TempDir::new().unwrap();
    let (out, svg) = (path(&dir, "scan.csv"), path(&dir, "scan.svg"));
    ok(&[
        "scan",
        "--tilt",
        "0",
        "--delta-pa",
        "-10",
        "--samples",
        "241",
        "--out",
        &out,
        "--svg",
        &svg,
    ]);
    assert!(fs::read_to_string(&out).unwrap().starts_with("x_um,T\n"));
    let data = rows(Path::new(&out));
    assert_eq!(data.len(), 241);
    assert!(data.iter().all(|r| r[1] > 0.0 && r[1] <= 1.0));
    assert!(fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn tilted_nodal_line_is_diagonal() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "mode.csv");
    ok(&["mode-image", "--n", "120", "--out", &out]);
    assert!(fs::read_to_string(&out)
        .unwrap()
        .starts_with("x_um,y_um,amplitude,intensity\n"));
    assert!(dir.path().join("mode.svg").is_file());

    // zero crossing of the amplitude along x, for every grid row
    let data = rows(Path::new(&out));
    let mut locus = Vec::new();
    for row in data.chunks(120) {
        for w in row.windows(2) {
            let (a0, a1) = (w[0][2], w[1][2]);
            if a0 == 0.0 {
                locus.push((w[0][0], w[0][1]));
            } else if a0 * a1 < 0.0 {
                let x = w[0][0] + (w[1][0] - w[0][0]) * a0 / (a0 - a1);
                locus.push((x, w[0][1]));
            }
        }
    }
    assert!(locus.len() >= 100);
    // least-squares x = a·y + b
    let n = locus.len() as f64;
    let my = locus.iter().map(|p| p.1).sum::<f64>() / n;
    let mx = locus.iter().map(|p| p.0).sum::<f64>() / n;
    let sxy = locus.iter().map(|p| (p.1 - my) * (p.0 - mx)).sum::<f64>();
    let syy = locus.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>();
    let angle = (1.0f64).atan2(sxy / syy).to_degrees();
    let angle = if angle > 90.0 { angle - 180.0 } else { angle };
    assert!((angle.abs() - 45.0).abs() < 1.0, "nodal line at {angle}°");
}

#[test]
fn fundamental_mode_is_isotropic() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "tem00.csv");
    ok(&[
        "mode-image",
        "--mode",
        "0,0",
        "--n",
        "81",
        "--extent",
        "47.6",
        "--out",
        &out,
    ]);
    let w0: f64 = 23.8;
    let mut worst: f64 = 0.0;
    for r in rows(Path::new(&out)) {
        // radius at which the Gaussian reaches this intensity
        let r_iso = (-0.5 * w0 * w0 * r[3].ln()).max(0.0).sqrt();
        worst = worst.max((r_iso - r[0].hypot(r[1])).abs());
    }
    assert!(worst < 1e-9, "anisotropy {worst}");
}

#[test]
fn untilted_tem01_node_lies_along_x() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "tem01.csv");
    ok(&[
        "mode-image",
        "--mode",
        "0,1",
        "--tilt",
        "0",
        "--n",
        "61",
        "--out",
        &out,
    ]);
    let data = rows(Path::new(&out));
    let on_axis: Vec<_> = data.iter().filter(|r| r[1] == 0.0).collect();
    assert_eq!(on_axis.len(), 61);
    assert!(on_axis.iter().all(|r| r[2].abs() < 1e-15));
    assert!(data
        .iter()
        .filter(|r| r[1].abs() > 1.0 && r[0].abs() < 40.0)
        .all(|r| r[2] != 0.0 && r[2].signum() == r[1].signum()));
}

#[test]
fn dumped_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let (cfg, a, b) = (
        path(&dir, "run.cfg"),
        path(&dir, "a.csv"),
        path(&dir, "b.csv"),
    );
    ok(&[
        "transit",
        "--y",
        "12",
        "--v",
        "0.45",
        "--seed",
        "3",
        "--delta-pa",
        "-2.5",
        "--flux0",
        "8e6",
        "--set",
        "window_end_us=400",
        "--dump-config",
        &cfg,
        "--out",
        &a,
    ]);
    let text = fs::read_to_string(&cfg).unwrap();
    assert!(text.contains("seed = 3"));
    assert!(text.contains("delta_pa = -2.5"));
    assert!(text.contains("window_end_us = 400.0"));
    ok(&[
        "transit", "--y", "12", "--v", "0.45", "--config", &cfg, "--out", &b,
    ]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read_to_string(&a).unwrap().lines().count(), 71);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "bad.cfg");
    fs::write(&cfg, "g0 = 23.9\nkapa = 2.6\n").unwrap();
    let out = cavitrack(&["--config", &cfg, "ensemble", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("kapa"), "{err}");
}

#[test]
fn malformed_trace_reports_its_line() {
    let dir = TempDir::new().unwrap();
    let trace = path(&dir, "bad.csv");
    fs::write(&trace, "t_s,expected_T,counts\n0.0,1.0,50\n1e-5,oops,49\n").unwrap();
    let out = cavitrack(&["fit", &trace]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn missing_input_is_an_io_error() {
    let out = cavitrack(&["fit", "/nonexistent/trace.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_parameters_exit_with_code_two() {
    let out = cavitrack(&["--kappa", "-1", "scan"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cavitrack(&[
        "degeneracy",
        "--y",
        "0",
        "--v",
        "0.4",
        "--transforms",
        "x-mirror",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = cavitrack(&["scan", "--g", "1", "--y", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn weak_coupling_is_a_warning() {
    let out = ok(&["--g0", "1", "scan", "--samples", "3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn degeneracy_table() {
    let out = ok(&["degeneracy", "--y", "10", "--v", "0.42"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "transform,sup_diff,degenerate");
    assert!(lines[1].starts_with("y-mirror,") && lines[1].ends_with(",false"));
    assert!(lines[2].starts_with("z-antinode-shift,") && lines[2].ends_with(",true"));
}

#[test]
fn ensemble_thermometry_round_trip() {
    let dir = TempDir::new().unwrap();
    let (ens, est, curve) = (
        path(&dir, "e.csv"),
        path(&dir, "t.json"),
        path(&dir, "v.csv"),
    );
    ok(&["ensemble", "--n", "5000", "--seed", "4", "--out", &ens]);
    ok(&["thermometry", &ens, "--curve", &curve, "--out", &est]);
    let t = json(&est);
    let temp = t["temperature_k"].as_f64().unwrap();
    let sigma = t["sigma_t_k"].as_f64().unwrap();
    assert!((temp - 186e-6).abs() < 4.0 * sigma, "{temp}");
    assert_eq!(t["n_used"], 5000);
    assert!(rows(Path::new(&curve)).len() >= 20);
}

#[test]
fn thermometry_from_fit_results_and_arrivals() {
    let dir = TempDir::new().unwrap();
    let fits = dir.path().join("fits");
    fs::create_dir(&fits).unwrap();
    let fc = FallConfig::default();
    let v0s: Vec<f64> = (0..20).map(|i| -0.2 + 0.02 * i as f64).collect();
    let mut arrivals = String::from("file,t_arr_ms\n");
    for (i, &v0) in v0s.iter().enumerate() {
        let (t_arr, v_arr) = arrival_from_initial(&fc, v0);
        let name = format!("transit{i:02}.json");
        let record = serde_json::json!({
            "y_off_um": 1.0, "v_mps": v_arr, "t_c_s": 0.0,
            "sigma_y_um": null, "sigma_v_mps": null, "sigma_tc_s": null,
            "log_lik": -100.0, "mirror_log_lik": -120.0, "converged": true, "n_evals": 10,
        });
        fs::write(fits.join(&name), record.to_string()).unwrap();
        arrivals.push_str(&format!("{name},{t_arr:.17e}\n"));
    }
    fs::write(fits.join("arrivals.csv"), arrivals).unwrap();
    let out = ok(&["thermometry", &fits.display().to_string()]);
    let t: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    let mean = v0s.iter().sum::<f64>() / 20.0;
    let var = v0s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 19.0;
    let expected = CESIUM_MASS * var / BOLTZMANN;
    let got = t["temperature_k"].as_f64().unwrap();
    assert!(
        (got - expected).abs() < 1e-9 * expected,
        "{got} vs {expected}"
    );
}
