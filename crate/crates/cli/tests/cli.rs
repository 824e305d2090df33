use std::fs;
use std::process::{Command, Output};

use rlatt_core::schema::{BasisFile, OperatorFile, PolysFile, ReportFile, SpectrumFile, TrigFile};

fn rlatt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlatt")).args(args).env_remove("RLATT_SEED").output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn enumerate_counts() {
    let basis = BasisFile::from_json(&stdout(&rlatt(&["enumerate", "--n", "2", "--m", "1"]))).unwrap();
    assert_eq!(basis.rows.len(), 3);
    let basis = BasisFile::from_json(&stdout(&rlatt(&["enumerate", "--n", "2", "--m", "2"]))).unwrap();
    assert_eq!(basis.rows.len(), 6);
    assert_eq!(basis.rows[0].partition.to_string(), "()");
    assert!(basis.rows.iter().all(|r| r.delta > 0.0));
}

#[test]
fn enumerate_csv() {
    let text = stdout(&rlatt(&["enumerate", "--n", "2", "--m", "1", "--format", "csv"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,partition,delta"));
    assert_eq!(lines.count(), 3);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(rlatt(&["enumerate", "--n", "0", "--m", "1"]).status.code(), Some(2));
    assert_eq!(rlatt(&["operator", "--n", "1", "--m", "1", "--r", "0"]).status.code(), Some(2));
    assert_eq!(rlatt(&["enumerate", "--bogus"]).status.code(), Some(2));
    assert_eq!(rlatt(&["spectrum", "--n", "1", "--m", "1", "--p", "0.2", "--p-start", "0"]).status.code(), Some(2));
    assert_eq!(rlatt(&["verify", "--n", "1", "--m", "1", "--tol-pieri", "-1"]).status.code(), Some(2));
}

#[test]
fn smallest_operator() {
    let text = stdout(&rlatt(&["operator", "--n", "1", "--m", "1", "--g", "1", "--p", "0", "--r", "1"]));
    let file = OperatorFile::from_json(&text).unwrap();
    let d = file.real_matrix();
    let expected = [[0.0, 1.0], [1.0, 0.0]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((d[(i, j)] - expected[i][j]).abs() < 1e-13, "{d}");
        }
    }
}

#[test]
fn operator_json_roundtrip_is_exact() {
    let text = stdout(&rlatt(&["operator", "--n", "2", "--m", "2", "--g", "0.7", "--p", "0.45", "--r", "2"]));
    let file = OperatorFile::from_json(&text).unwrap();
    let direct = rlatt_core::operators::build(
        rlatt_core::operators::OperatorKind::Difference,
        2,
        &rlatt_core::coeffs::ModelParams::new(2, 2, 0.7, 0.45).unwrap(),
    )
    .unwrap();
    let m = file.real_matrix();
    assert_eq!(m.shape(), (6, 6));
    for i in 0..6 {
        for j in 0..6 {
            assert_eq!(m[(i, j)].to_bits(), direct.matrix.as_real().unwrap()[(i, j)].to_bits());
        }
    }
}

#[test]
fn sine_generator_carries_imaginary_part() {
    let text = stdout(&rlatt(&["operator", "--n", "2", "--m", "1", "--p", "0.3", "--r", "1", "--kind", "s"]));
    let file = OperatorFile::from_json(&text).unwrap();
    assert_eq!(file.kind, "S");
    assert!(!file.symmetrized);
    let text = stdout(&rlatt(&["operator", "--n", "2", "--m", "1", "--p", "0.3", "--r", "1", "--kind", "s", "--symmetrized"]));
    let file = OperatorFile::from_json(&text).unwrap();
    assert!(file.symmetrized);
    let im = file.entries_im.expect("sine generator is imaginary");
    assert!(im.iter().flatten().any(|v| v.abs() > 1e-3));
}

#[test]
fn sweep_of_smallest_model() {
    let text = stdout(&rlatt(&[
        "spectrum", "--n", "1", "--m", "1", "--g", "1", "--p-start", "0", "--p-stop", "0.9", "--p-step", "0.1",
    ]));
    let file = SpectrumFile::from_json(&text).unwrap();
    assert_eq!(file.points.len(), 10);
    for pt in &file.points {
        assert!(!pt.outside_proven_regime);
        for rec in &pt.records {
            let want = if rec.nu.is_empty() { 1.0 } else { -1.0 };
            assert!((rec.eigenvalues[0][0] - want).abs() < 1e-12, "{rec:?}");
            assert!(rec.eigenvalues[0][1].abs() < 1e-12);
        }
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["spectrum", "--n", "2", "--m", "2", "--g", "0.7", "--p", "0.4", "--seed", "11"];
    let a = stdout(&rlatt(&args));
    let b = stdout(&rlatt(&args));
    assert_eq!(a, b);
    let from_env = Command::new(env!("CARGO_BIN_EXE_rlatt"))
        .args(["spectrum", "--n", "2", "--m", "2", "--g", "0.7", "--p", "0.4", "--seed", "3"])
        .env("RLATT_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(stdout(&from_env), a);
}

#[test]
fn negative_nome_warns() {
    let out = rlatt(&["spectrum", "--n", "1", "--m", "1", "--p", "-0.4"]);
    let text = stdout(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(SpectrumFile::from_json(&text).unwrap().points[0].outside_proven_regime);
}

#[test]
fn verify_exit_codes() {
    let out = rlatt(&["verify", "--n", "2", "--m", "2", "--g", "1", "--p", "0.3"]);
    let report = ReportFile::from_json(&stdout(&out)).unwrap();
    assert!(report.passed);
    assert!(report.timings_ms.is_none());

    let broken = rlatt(&["verify", "--n", "2", "--m", "2", "--g", "1", "--p", "0.3", "--alpha", "1.3"]);
    assert_eq!(broken.status.code(), Some(1));
    let report = ReportFile::from_json(&String::from_utf8(broken.stdout).unwrap()).unwrap();
    assert!(!report.passed);
}

#[test]
fn verify_with_timings() {
    let out = rlatt(&["verify", "--n", "1", "--m", "1", "--p", "0.2", "--timings"]);
    let report = ReportFile::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.timings_ms.unwrap().len(), report.checks.len());
}

#[test]
fn smallest_polynomials() {
    let text = stdout(&rlatt(&["polys", "--n", "1", "--m", "1", "--g", "1", "--p", "0.5"]));
    let file = PolysFile::from_json(&text).unwrap();
    let got: Vec<(String, String, f64)> =
        file.triples.iter().map(|t| (t.mu.to_string(), t.nu.to_string(), t.u)).collect();
    let want = vec![("()".to_string(), "()".to_string(), 1.0), ("(1)".to_string(), "(1)".to_string(), 1.0)];
    assert_eq!(got.len(), 2);
    for (g, w) in got.iter().zip(&want) {
        assert_eq!((&g.0, &g.1), (&w.0, &w.1));
        assert!((g.2 - w.2).abs() < 1e-12);
    }
}

#[test]
fn trig_roots_of_unity() {
    let text = stdout(&rlatt(&["trig", "--n", "1", "--m", "2", "--g", "1"]));
    let file = TrigFile::from_json(&text).unwrap();
    assert_eq!(file.records.len(), 3);
    for rec in &file.records {
        let [re, im] = rec.eigenvalues[0];
        assert!((re.hypot(im) - 1.0).abs() < 1e-12 || im.abs() < 1e-12);
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "n = 2\nm = 1\ng = 0.8\np = 0.2\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let basis = BasisFile::from_json(&stdout(&rlatt(&["enumerate", "--config", cfg]))).unwrap();
    assert_eq!((basis.model.n, basis.model.m, basis.model.g), (2, 1, 0.8));
    let basis = BasisFile::from_json(&stdout(&rlatt(&["enumerate", "--config", cfg, "--m", "2"]))).unwrap();
    assert_eq!(basis.rows.len(), 6);

    let out = dir.path().join("basis.json");
    let status = rlatt(&["enumerate", "--config", cfg, "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    BasisFile::from_json(&fs::read_to_string(out).unwrap()).unwrap();

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "n = 2\nm = 1\nbogus = 3\n").unwrap();
    assert_eq!(rlatt(&["enumerate", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}
