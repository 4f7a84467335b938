use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tdscatter"))
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

fn report(results: &Path, out: &Path) -> Output {
    bin().arg("report").arg(results).arg("--out").arg(out).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn gaussian(amplitude: f64, width: f64) -> Value {
    json!({ "kind": "gaussian", "amplitude": amplitude, "width": width })
}

fn modulated(eta_amplitude: f64) -> Value {
    json!({
        "scatterer": {
            "kind": "modulated",
            "chi": { "x": gaussian(1.0, 0.3), "y": gaussian(1.0, 0.3), "z": gaussian(1.0, 0.3) },
            "eta": gaussian(eta_amplitude, 0.2),
            "w": 0.1
        },
        "detector": { "distance": 1000.0, "direction": [0.0, 0.6, 0.8] },
        "sweep": { "variable": "omega", "grid": "values", "values": [0.25, 0.5, 0.75] },
        "source": {
            "type": "one_photon",
            "k": [0.0, 0.0, 1.0],
            "polarization": [[1.0, 0.0], [0.0, 0.0]],
            "envelope_norm": 1.0
        }
    })
}

fn rod_sweep(n: usize) -> Value {
    json!({
        "scatterer": { "kind": "moving_rod", "profile": gaussian(1.0, 1.0), "v": 0.6, "pointlike": true },
        "detector": { "omega": 0.001 },
        "sweep": { "variable": "rho", "grid": "log", "start": 1.0, "stop": 10.0, "n": n },
        "quadrature": { "rel_tol": 1e-6 }
    })
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(Result::unwrap).collect()
}

#[test]
fn zero_modulation_gives_zero_rows() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = modulated(0.0);
    cfg["source"] = json!({ "type": "vacuum" });
    let path = write_config(tmp.path(), "c.json", &cfg);
    let out = run(&path, &tmp.path().join("out"), &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = csv_rows(&tmp.path().join("out/results.csv"));
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r[6].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = rod_sweep(3);
    cfg["monte_carlo"] = json!({ "samples": 20000 });
    let path = write_config(tmp.path(), "c.json", &cfg);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(run(&path, &a, &["--seed", "11", "--threads", "1"]).status.success());
    assert!(run(&path, &b, &["--seed", "11", "--threads", "3"]).status.success());
    let csv_a = std::fs::read(a.join("results.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read(b.join("results.csv")).unwrap());

    let c = tmp.path().join("c");
    assert!(run(&path, &c, &["--seed", "12"]).status.success());
    assert_ne!(csv_a, std::fs::read(c.join("results.csv")).unwrap());
}

#[test]
fn manifest_traces_rows_to_the_config() {
    let tmp = TempDir::new().unwrap();
    let path = write_config(tmp.path(), "c.json", &rod_sweep(2));
    let out = tmp.path().join("out");
    assert!(run(&path, &out, &[]).status.success());
    let manifest: Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    let hash = manifest["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    for r in csv_rows(&out.join("results.csv")) {
        assert_eq!(&r[0], hash);
    }
    assert_eq!(manifest["points"].as_array().unwrap().len(), 2);
    assert!(manifest["evals_total"].as_u64().unwrap() > 0);

    let summary = tmp.path().join("s.json");
    let ok = bin()
        .args(["report"])
        .arg(out.join("results.csv"))
        .arg("--out")
        .arg(&summary)
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", stderr(&ok));

    let other = write_config(tmp.path(), "other.json", &rod_sweep(3));
    let bad = bin()
        .args(["report"])
        .arg(out.join("results.csv"))
        .arg("--out")
        .arg(&summary)
        .arg("--config")
        .arg(&other)
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn values_are_written_with_seventeen_digits() {
    let tmp = TempDir::new().unwrap();
    let path = write_config(tmp.path(), "c.json", &rod_sweep(2));
    let out = tmp.path().join("out");
    assert!(run(&path, &out, &[]).status.success());
    let rows = csv_rows(&out.join("results.csv"));
    let value = &rows[0][6];
    let mantissa = value.split('e').next().unwrap();
    assert_eq!(mantissa.replace(['.', '-'], "").len(), 17, "{value}");
}

#[test]
fn rod_sweep_report_fits_inverse_sixth_power() {
    let tmp = TempDir::new().unwrap();
    let path = write_config(tmp.path(), "c.json", &rod_sweep(8));
    let out = tmp.path().join("out");
    assert!(run(&path, &out, &[]).status.success());
    let summary_path = tmp.path().join("summary.json");
    let o = report(&out.join("results.csv"), &summary_path);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary: Value = serde_json::from_slice(&std::fs::read(summary_path).unwrap()).unwrap();
    let exponent = summary["scaling_fit"]["exponent"].as_f64().unwrap();
    assert!((exponent + 6.0).abs() < 0.3, "{exponent}");
    assert_eq!(summary["series"]["x_name"], "rho");
    assert_eq!(summary["series"]["x"].as_array().unwrap().len(), 8);
}

#[test]
fn rayleigh_report_contains_enhancement_five() {
    let tmp = TempDir::new().unwrap();
    let path = write_config(tmp.path(), "c.json", &modulated(1.0));
    let out = tmp.path().join("out");
    let o = run(&path, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary_path = tmp.path().join("summary.json");
    assert!(report(&out.join("results.csv"), &summary_path).status.success());
    let summary: Value = serde_json::from_slice(&std::fs::read(summary_path).unwrap()).unwrap();
    let at_half = summary["resolution"].as_array().unwrap().iter().find(|p| p["omega"].as_f64() == Some(0.5)).unwrap();
    assert_eq!(at_half["report"]["enhancement_factors"][0].as_f64(), Some(5.0));
    assert!(summary["scaling_fit"].is_null());
}

#[test]
fn invalid_configs_exit_one_and_name_the_field() {
    let tmp = TempDir::new().unwrap();
    let cases = [
        ("scatterer.v", {
            let mut c = rod_sweep(2);
            c["scatterer"]["v"] = json!(1.5);
            c
        }),
        ("sweep.values", {
            let mut c = modulated(1.0);
            c["sweep"]["values"] = json!([]);
            c
        }),
        ("sweep.variable", {
            let mut c = rod_sweep(2);
            c["sweep"]["variable"] = json!("r");
            c
        }),
        ("seed", {
            let mut c = rod_sweep(2);
            c["monte_carlo"] = json!({ "samples": 5000 });
            c
        }),
        ("detector.omega", {
            let mut c = rod_sweep(2);
            c["detector"] = json!({});
            c
        }),
        ("quadrature.rel_tol", {
            let mut c = rod_sweep(2);
            c["quadrature"]["rel_tol"] = json!(-1.0);
            c
        }),
        ("detecter", {
            let mut c = rod_sweep(2);
            c["detecter"] = json!({});
            c
        }),
    ];
    for (field, cfg) in cases {
        let path = write_config(tmp.path(), "bad.json", &cfg);
        let o = run(&path, &tmp.path().join("out"), &[]);
        assert_eq!(o.status.code(), Some(1), "{field}: {}", stderr(&o));
        assert!(stderr(&o).contains(&format!("`{field}`")), "{field}: {}", stderr(&o));
    }
}

#[test]
fn unmet_tolerance_exits_two_with_flagged_rows() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = rod_sweep(2);
    cfg["quadrature"] = json!({ "rel_tol": 1e-13, "max_evals": 1000 });
    let path = write_config(tmp.path(), "c.json", &cfg);
    let out = tmp.path().join("out");
    assert_eq!(run(&path, &out, &[]).status.code(), Some(2));
    for r in csv_rows(&out.join("results.csv")) {
        assert_eq!(&r[14], "true");
    }
}

#[test]
fn io_failures_exit_three() {
    let tmp = TempDir::new().unwrap();
    let o = run(&tmp.path().join("missing.json"), &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3));
    let o = report(&tmp.path().join("missing.csv"), &tmp.path().join("s.json"));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn report_rejects_empty_mixed_and_malformed_tables() {
    let tmp = TempDir::new().unwrap();
    let path = write_config(tmp.path(), "c.json", &rod_sweep(2));
    let other = write_config(tmp.path(), "d.json", &rod_sweep(3));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run(&path, &a, &[]).status.success());
    assert!(run(&other, &b, &[]).status.success());
    let text_a = std::fs::read_to_string(a.join("results.csv")).unwrap();
    let text_b = std::fs::read_to_string(b.join("results.csv")).unwrap();
    let header = text_a.lines().next().unwrap().to_string();
    let summary = tmp.path().join("s.json");

    let empty = tmp.path().join("empty.csv");
    std::fs::write(&empty, format!("{header}\n")).unwrap();
    let o = report(&empty, &summary);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no rows"));

    let mixed = tmp.path().join("mixed.csv");
    let body_b: Vec<&str> = text_b.lines().skip(1).collect();
    std::fs::write(&mixed, format!("{text_a}{}\n", body_b.join("\n"))).unwrap();
    let o = report(&mixed, &summary);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("different configs"));

    let garbled = tmp.path().join("garbled.csv");
    std::fs::write(&garbled, text_a.replacen("e-", "x-", 1)).unwrap();
    assert_eq!(report(&garbled, &summary).status.code(), Some(1));

    let wrong_header = tmp.path().join("header.csv");
    std::fs::write(&wrong_header, "a,b\n1,2\n").unwrap();
    assert_eq!(report(&wrong_header, &summary).status.code(), Some(1));
}
