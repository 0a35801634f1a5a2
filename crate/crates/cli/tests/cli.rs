use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grover-nmr")).args(args).env_remove("GROVER_NMR_OUT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn experiment<'a>(json: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    json["experiments"].as_array().unwrap().iter().find(|e| e["experiment"] == name).unwrap()
}

#[test]
fn gate_all_reports_every_label() {
    let o = run(&["gate", "--all"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    for (line, ket) in lines.iter().zip(["|00⟩", "|01⟩", "|10⟩", "|11⟩"]) {
        assert!(line.contains(&format!("result: {ket}, probability 1.000")), "{line}");
    }
}

#[test]
fn gate_single_label() {
    let o = run(&["gate", "f01"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("result: |01⟩, probability 1.000"));
    assert!(!stdout(&o).contains("-0.000"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["gate", "f2x"]).status.code(), Some(1));
    assert_eq!(run(&["gate"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["search", "--n", "3", "--k", "9"]).status.code(), Some(1));
    assert_eq!(run(&["search", "--n", "3", "--k", "0"]).status.code(), Some(1));
    assert_eq!(run(&["search", "--n", "21"]).status.code(), Some(1));
}

#[test]
fn pulse_defaults_write_five_spectra_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["pulse", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["ref", "f00", "f01", "f10", "f11"] {
        let csv = fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
        assert!(csv.starts_with("freq_hz,real,imag\n"));
        assert_eq!(csv.lines().count(), 8193);
    }
    let json = summary(dir.path());
    let names: Vec<&str> =
        json["experiments"].as_array().unwrap().iter().map(|e| e["experiment"].as_str().unwrap()).collect();
    assert_eq!(names, ["ref", "f00", "f01", "f10", "f11"]);
    assert_eq!(experiment(&json, "f10")["qubits"], serde_json::json!([1, 0]));
    assert_eq!(experiment(&json, "ref")["qubits"], serde_json::json!([0, 0]));
    let leftovers: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn pulse_epsilon_scales_heights() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["pulse", "--epsilon", "0.2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let json = summary(dir.path());
    for (name, qubits) in [("f00", [0, 0]), ("f01", [0, 1]), ("f10", [1, 0]), ("f11", [1, 1])] {
        let e = experiment(&json, name);
        assert_eq!(e["qubits"], serde_json::json!(qubits));
        for p in e["peaks"].as_array().unwrap() {
            assert!((p["height_rel"].as_f64().unwrap().abs() - 0.2).abs() < 1e-6);
        }
    }
}

#[test]
fn pulse_error_model_reports_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["pulse", "--error-tp", "5e-3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let json = summary(dir.path());
    let mut deviation: f64 = 0.0;
    for (name, qubits) in [("f00", [0, 0]), ("f01", [0, 1]), ("f10", [1, 0]), ("f11", [1, 1])] {
        let e = experiment(&json, name);
        assert_eq!(e["qubits"], serde_json::json!(qubits));
        let f = e["fidelity"].as_f64().unwrap();
        assert!(f > 0.0 && f < 1.0);
        for p in e["peaks"].as_array().unwrap() {
            deviation = deviation.max((p["height_rel"].as_f64().unwrap().abs() - 1.0).abs());
        }
    }
    assert!(deviation > 0.01);
}

#[test]
fn pulse_reads_config_and_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# narrower window\nspectral_width_hz = 300\nn_points = 4096\nepsilon = 0.5\n").unwrap();
    let out = dir.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_grover-nmr"))
        .args(["pulse", "--config", cfg.to_str().unwrap()])
        .env("GROVER_NMR_OUT", &out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("f01.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4097);
    let json = summary(&out);
    assert_eq!(json["epsilon"], 0.5);
}

#[test]
fn pulse_config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "j_hz = 7\nnu2_hz = 70\n").unwrap();
    assert_eq!(
        run(&["pulse", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["pulse", "--config", "/nonexistent/x.conf", "--out", out.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["pulse", "--epsilon", "1.5", "--out", out.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["pulse", "--error-tp", "-1", "--out", out.to_str().unwrap()]).status.code(), Some(1));
    let file = dir.path().join("a_file");
    fs::write(&file, "").unwrap();
    assert_eq!(run(&["pulse", "--out", file.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let oa = run(&["pulse", "--error-tp", "1e-3", "--out", a.path().to_str().unwrap()]);
    let ob = run(&["pulse", "--error-tp", "1e-3", "--out", b.path().to_str().unwrap()]);
    for name in ["ref.csv", "f00.csv", "f01.csv", "f10.csv", "f11.csv", "summary.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let strip = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with("wrote")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&oa), strip(&ob));
    let sa = run(&["search", "--scan", "--seed", "9"]);
    let sb = run(&["search", "--scan", "--seed", "9"]);
    assert_eq!(sa.stdout, sb.stdout);
}

fn row(text: &str, n: u64, k: u64) -> Vec<String> {
    text.lines()
        .map(|l| l.split_whitespace().map(str::to_string).collect::<Vec<_>>())
        .find(|c| c[0] == n.to_string() && c[1] == k.to_string())
        .unwrap_or_else(|| panic!("no row N={n} k={k} in\n{text}"))
}

#[test]
fn search_examples() {
    let o = run(&["search", "--n", "2", "--k", "1", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let r = row(&stdout(&o), 4, 1);
    assert_eq!((r[2].as_str(), r[3].as_str(), r[4].as_str()), ("1", "1.000000", "2.500"));
    let mc: f64 = r[6].parse().unwrap();
    assert!((mc - 2.5).abs() < 0.05);

    let scan = stdout(&run(&["search", "--scan"]));
    let r = row(&scan, 16, 4);
    assert_eq!((r[2].as_str(), r[3].as_str()), ("1", "1.000000"));

    let r = row(&stdout(&run(&["search", "--n", "10"])), 1024, 1);
    assert_eq!(r[2], "25");
    let p: f64 = r[3].parse().unwrap();
    assert!((p - 0.9995).abs() < 1e-4);

    let r = row(&stdout(&run(&["search", "--n", "3", "--k", "1", "--m", "2"])), 8, 1);
    assert_eq!(r[3], "0.945312");
}
