//! Command-line integration: exit codes, JSON determinism and the CSV
//! moduli sweep.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trisym"))
}

#[test]
fn check_passes_on_sp1() {
    let out = bin().args(["check", "sp:1"]).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("=> PASS"));
}

#[test]
fn unknown_model_id_exits_2() {
    let out = bin().args(["check", "nope:7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_metric_flag_exits_3() {
    let out = bin()
        .args(["soliton", "sp:1", "--metric", "Q=1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn json_reports_are_byte_identical() {
    let dir = std::env::temp_dir();
    let p1 = dir.join("trisym_report_a.json");
    let p2 = dir.join("trisym_report_b.json");
    for p in [&p1, &p2] {
        let out = bin()
            .args([
                "soliton",
                "model:sp:1",
                "--metric",
                "S=0,t=1",
                "--json",
                p.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p2).unwrap();
    assert_eq!(a, b);
    let _ = std::fs::remove_file(p1);
    let _ = std::fs::remove_file(p2);
}

#[test]
fn isometry_reconciliation_on_su1n11() {
    let out = bin()
        .args(["isometry", "model:su1n:1:1", "--metric", "S=0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("dim g_b = 8"), "{text}");
    assert!(text.contains("holomorphic_isometries"), "{text}");
}

#[test]
fn moduli_scan_emits_csv() {
    let dir = std::env::temp_dir();
    let p = dir.join("trisym_scan.csv");
    let out = bin()
        .args([
            "moduli-scan",
            "su1n:1:1",
            "--grid",
            "3",
            "--csv",
            p.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&p).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines[0], "lambda;spectrum;soliton_residual");
    assert_eq!(lines.len(), 4); // header + 3 grid points for d = 1
    let _ = std::fs::remove_file(p);
}

#[test]
fn named_generator_metric_flag() {
    // su1n:1:1 has a single skew centralizer generator; the named syntax
    // deforms along it.
    let out = bin()
        .args(["soliton", "su1n:1:1", "--metric", "S=c0:0.4,t=1"])
        .output()
        .unwrap();
    // The deformed metric is not a soliton: residual check fails -> exit 1.
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("NotSoliton"), "{text}");
}

#[test]
fn lambda_metric_flag() {
    let out = bin()
        .args(["curvature", "su1n:1:1", "--metric", "lambda=0.3"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn config_file_overrides() {
    let dir = std::env::temp_dir();
    let p = dir.join("trisym_config.json");
    std::fs::write(
        &p,
        r#"{"ranks": {"sp_max_m": 1, "su_max_pq": 2, "su1n_max_n": 1, "so_star_max_m": 2, "so2n_max_n": 1}}"#,
    )
    .unwrap();
    let out = bin()
        .args(["--config", p.to_str().unwrap(), "catalog"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    // sp:1, su:1,1, su1n:1:1, so_star:2, so2n:1 and their duals.
    assert_eq!(text.lines().count(), 10, "{text}");
    let _ = std::fs::remove_file(p);
}
