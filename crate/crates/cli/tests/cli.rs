use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn weyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weyl"))
        .args(args)
        .output()
        .expect("weyl binary runs")
}

fn summary_field<'a>(csv: &'a str, key: &str) -> &'a str {
    let line = csv.lines().find(|l| l.starts_with("# summary")).expect("summary line");
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .expect("summary key")
}

#[test]
fn verify_group_passes_on_all_groups() {
    let out = weyl(&["verify-group", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check,group,metric,value,tolerance,pass"));
    for group in ["affine", "sim2", "paff"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("associativity,{group},"))));
    }
    assert!(lines.all(|l| l.ends_with(",true")));
}

#[test]
fn impossible_tolerance_fails_with_code_one() {
    let out = weyl(&["verify-group", "--group", "affine", "--trials", "50", "--tolerance", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fixed_seed_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = weyl(&["verify-group", "--group", "sim2", "--seed", "17", "--trials", "100", "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(a.with_extension("jsonl")).unwrap(), fs::read(b.with_extension("jsonl")).unwrap());
}

#[test]
fn jsonl_has_one_object_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("checks.csv");
    let out = weyl(&["verify-group", "--group", "paff", "--trials", "50", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(&out_path).unwrap();
    let jsonl = fs::read_to_string(out_path.with_extension("jsonl")).unwrap();
    assert_eq!(jsonl.lines().count(), csv.lines().count() - 1);
    for line in jsonl.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["group"], "paff");
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn affine_sweep_above_threshold_diverges_at_predicted_rate() {
    let out = weyl(&["sweep-divergence", "--group", "affine", "--alpha", "0.45", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("group,alpha,p_prime,L,R,T,value,predicted_exponent\n"));
    let slope: f64 = summary_field(&csv, "fitted_slope").parse().unwrap();
    // e + 1 = 2(α − (1 − 1/p′)) with p′ = 3/2
    let predicted = 2.0 * (0.45 - (1.0 - 2.0 / 3.0));
    assert!((slope - predicted).abs() <= 0.05 * predicted, "slope {slope}");
    assert_eq!(summary_field(&csv, "verdict"), "divergent");
}

#[test]
fn affine_sweep_below_threshold_converges() {
    let out = weyl(&["sweep-divergence", "--group", "affine", "--alpha", "0.2", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(summary_field(&csv, "verdict"), "convergent");
}

#[test]
fn sim2_sweep_diverges() {
    // p′ = 1.6
    let out = weyl(&["sweep-divergence", "--group", "sim2", "--alpha", "0.45", "--p", "2.6666666666666665"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(summary_field(&csv, "verdict"), "divergent");
}

#[test]
fn out_of_window_parameters_exit_two() {
    for args in [
        &["sweep-divergence", "--alpha", "0.6", "--p", "3"][..],
        &["sweep-divergence", "--alpha", "0.3", "--p", "1.5"][..],
        &["sweep-divergence", "--p", "3"][..],
        &["verify-group", "--group", "so3"][..],
        &["verify-group", "--grid", "rep=4"][..],
        &["verify-group", "--bogus"][..],
    ] {
        let out = weyl(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# sweep settings\ngroup = affine\nalpha = 0.6\np = 3\n").unwrap();
    let bad = weyl(&["sweep-divergence", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    let good = weyl(&["sweep-divergence", "--config", cfg.to_str().unwrap(), "--alpha", "0.45"]);
    assert_eq!(good.status.code(), Some(0));
    let missing = weyl(&["verify-group", "--config", Path::new("/nonexistent/weyl.cfg").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn zero_function_harmonic_suite_passes_on_affine() {
    let out = weyl(&["verify-harmonic", "--group", "affine", "--function", "zero"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
