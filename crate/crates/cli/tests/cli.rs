use std::process::{Command, Output};

use serde_json::Value;
use zzc_core::optimizer::SearchReport;
use zzc_core::{ConstantTriple, DTriple};

const ROW1: [&str; 6] = ["--c", "1.000011314", "--r", "1.064340602", "--eta", "4.2826451e-6"];

fn zzc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zzc"))
        .args(args)
        .env_remove("ZZC_DIGITS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn with(base: &[&str], extra: &[&str]) -> Vec<String> {
    base.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run(args: Vec<String>) -> Output {
    zzc(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn compute_row_one_prints_c1() {
    let out = run(with(&["compute"], &ROW1));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("C1 = 0.2273699"));
    assert!(stdout(&out).contains("D  = (0.228, 23.108, 4.520)"));
}

#[test]
fn compute_json_has_envelope_and_breakdown() {
    let out = run(with(&["compute", "--format", "json"], &ROW1));
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "compute");
    assert_eq!(v["inputs"]["eta"], "4.2826451e-6");
    for key in ["gk_term", "zeta_ratio_term", "lstar_term", "t0_log_term"] {
        assert!(v["results"]["breakdown"][key].is_number(), "{key}");
    }
    assert!(v["diagnostics"]["kappa1"].is_number());
    let t: ConstantTriple = serde_json::from_value(v["results"]["constants"].clone()).unwrap();
    assert!((t.c1 - 0.22737).abs() < 1e-5);
    let d: DTriple = serde_json::from_value(v["results"]["d_triple"].clone()).unwrap();
    assert_eq!(d, DTriple { d1: 0.228, d2: 23.108, d3: 4.52 });
}

#[test]
fn compute_csv_has_header() {
    let out = run(with(&["compute", "--format", "csv"], &ROW1));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("quantity,value"));
    assert!(lines.next().unwrap().starts_with("C1,0.22736"));
}

#[test]
fn infeasible_eta_exits_two_with_named_violation() {
    let out = zzc(&["compute", "--c", "1.2", "--r", "1.3", "--eta", "0.6"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("eta exceeds 1/2"));
    assert!(stderr(&out).contains("eta_at_most_half"));
}

#[test]
fn parse_failures_exit_64_and_help_exits_zero() {
    assert_eq!(code(&zzc(&["compute", "--c", "one", "--r", "1", "--eta", "1e-3"])), 64);
    assert_eq!(code(&zzc(&["compute", "--c", "1.1"])), 64);
    assert_eq!(code(&zzc(&["no-such-command"])), 64);
    assert_eq!(code(&zzc(&["table", "--t0", "3"])), 64);
    assert_eq!(code(&zzc(&["--help"])), 0);
    assert_eq!(code(&zzc(&["table", "--help"])), 0);
}

#[test]
fn low_precision_exits_three() {
    assert_eq!(code(&zzc(&["--digits", "5", "verify"])), 3);
    let out = Command::new(env!("CARGO_BIN_EXE_zzc"))
        .args(["verify"])
        .env("ZZC_DIGITS", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn digits_env_var_sets_precision() {
    let out = Command::new(env!("CARGO_BIN_EXE_zzc"))
        .args(["compute", "--format", "json"])
        .args(ROW1)
        .env("ZZC_DIGITS", "30")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["inputs"]["digits"], 30);
}

#[test]
fn table_default_marks_only_row_one_c2() {
    // Row 1 C2 sits 2.5e-5 and 3.7e-5 above the published value, outside
    // the 2e-5 tolerance; every other cell matches.
    let out = zzc(&["table", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let triples = v["results"]["c_triples"].as_array().unwrap();
    assert_eq!(triples.len(), 10);
    for t in triples {
        let ok: Vec<bool> = t["ok"].as_array().unwrap().iter().map(|b| b.as_bool().unwrap()).collect();
        if t["row"] == 1 {
            assert_eq!(ok, [true, false, true]);
        } else {
            assert_eq!(ok, [true, true, true]);
        }
    }
    assert_eq!(v["diagnostics"]["d_rows_ok"], 9);
    assert!(stdout(&zzc(&["table"])).contains("8/10 C-triples OK, 9/9 D-rows OK"));
}

#[test]
fn table_single_height_and_tight_tolerance() {
    let out = zzc(&["table", "--t0", "10", "--format", "csv"]);
    let text = stdout(&out);
    let c_lines = text.lines().filter(|l| l.starts_with("C,")).count();
    assert_eq!(c_lines, 5 * 3);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2) == Some("10")));

    let out = zzc(&["table", "--tol", "1e-9"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("0/10 C-triples OK"));
}

#[test]
fn table_markdown_mirrors_layout() {
    let out = zzc(&["table", "--format", "markdown"]);
    let text = stdout(&out);
    assert!(text.starts_with("| c | r | η | C1 | C2 (T0=1) | C3 (T0=1) | C2 (T0=10) | C3 (T0=10) |"));
    assert!(text.contains("| corollary | 1 | 0.228 OK | 23.108 OK | 4.520 OK |"));
}

#[test]
fn bound_window_for_trivial_field() {
    let out = zzc(&["bound", "--nk", "1", "--dk", "1", "--r1", "1", "--T", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let w = &json(&out)["results"]["window"];
    assert_eq!(w["low"], 0.0);
    assert!((w["high"].as_f64().unwrap() - 26.22).abs() < 0.01);
}

#[test]
fn bound_checks_parity_and_accepts_huge_discriminants() {
    let ok = zzc(&["bound", "--nk", "2", "--log-dk", "log(5)", "--r1", "0", "--T", "1"]);
    assert_eq!(code(&ok), 0);
    let odd = zzc(&["bound", "--nk", "2", "--log-dk", "log(5)", "--r1", "1", "--T", "1"]);
    assert_eq!(code(&odd), 2);
    let huge = zzc(&["bound", "--nk", "2", "--dk", "1e300", "--r1", "0", "--T", "10", "--format", "json"]);
    assert_eq!(code(&huge), 0);
    let log_dk = json(&huge)["results"]["field"]["log_dk"].as_f64().unwrap();
    assert!((log_dk - 300.0 * std::f64::consts::LN_10).abs() < 1e-9);
    assert_eq!(code(&zzc(&["bound", "--nk", "1", "--dk", "1", "--r1", "1", "--T", "0.5"])), 2);
}

#[test]
fn bound_with_explicit_constants() {
    let out = zzc(&[
        "bound", "--nk", "1", "--log-dk", "0", "--r1", "1", "--T", "1", "--c1", "0.22737", "--c2", "23.02528",
        "--c3", "4.51954", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let b = json(&out)["results"]["window"]["bound"].as_f64().unwrap();
    assert!((b - 27.37673).abs() < 1e-5);
    assert_eq!(code(&zzc(&["bound", "--nk", "1", "--log-dk", "0", "--r1", "1", "--T", "1", "--c1", "0.2"])), 64);
}

#[test]
fn optimize_beats_row_two_and_is_deterministic() {
    let args = ["optimize", "--objective", "min-c2", "--c1-cap", "0.245", "--t0", "1", "--budget", "60", "--format", "json"];
    let a = zzc(&args);
    let b = zzc(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let rep: SearchReport = serde_json::from_value(json(&a)["results"].clone()).unwrap();
    assert!(rep.best_constants.c1 <= 0.245);
    assert!(rep.best_constants.c2 <= 6.666);
}

#[test]
fn optimize_zero_budget_returns_best_seed() {
    let out = zzc(&["optimize", "--objective", "min-c2", "--c1-cap", "0.245", "--budget", "0", "--format", "json"]);
    let rep: SearchReport = serde_json::from_value(json(&out)["results"].clone()).unwrap();
    assert_eq!(rep.trace.len(), 1);
    assert!((rep.best_constants.c2 - 6.66557).abs() < 1e-5);
}

#[test]
fn optimize_empty_seed_exits_two() {
    let out = zzc(&["optimize", "--objective", "min-c1", "--seed-grid", "c=0.9,r=1,eta=1e-3"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&zzc(&["optimize", "--objective", "min-c2"])), 64);
    assert_eq!(code(&zzc(&["optimize", "--objective", "min-c1", "--seed-grid", "c=1"])), 64);
}

#[test]
fn verify_fast_passes_and_canary_fails() {
    let out = zzc(&["verify", "--level", "fast"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("10/10 checks pass"));

    let out = zzc(&["verify", "--canary-weight", "7/18"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("FAIL row2/lstar"));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("zzc-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = zzc(&["verify", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "verify");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn weighted_objective_takes_three_comma_separated_weights() {
    let grid = "c=1.01:1.1:3,r=1.1:1.5:3,eta=1e-4:5e-2:3";
    let out = zzc(&["optimize", "--objective", "weighted", "--weights", "1,0.1,0.1", "--seed-grid", grid, "--budget", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let two = zzc(&["optimize", "--objective", "weighted", "--weights", "1,0.1", "--seed-grid", grid]);
    assert_eq!(code(&two), 64);
    let negative = zzc(&["optimize", "--objective", "weighted", "--weights=-1,0,0", "--seed-grid", grid]);
    assert_eq!(code(&negative), 2);
}
