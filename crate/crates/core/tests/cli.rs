use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_frictionnet");
const SCENARIO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/scenario_test_track.json");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("FRICTIONNET_MODEL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn validate_bundled_model() {
    let o = run(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let warnings: Vec<_> = stderr(&o).lines().filter(|l| l.starts_with("warning:")).map(String::from).collect();
    assert_eq!(warnings.len(), 3, "{warnings:?}");
    assert!(warnings[0].contains("S_T=S_T1") && warnings[0].contains("0.980000"));
    assert!(warnings[2].contains("R=Asphalt, W=Snow") && warnings[2].contains("0.730000"));
}

#[test]
fn validate_rejects_cycles_and_missing_files() {
    let dir = TempDir::new().unwrap();
    let cyclic = r#"{
        "variables": [
            {"name": "A", "states": ["0", "1"]},
            {"name": "B", "states": ["0", "1"]}
        ],
        "cpts": [
            {"child": "A", "parents": ["B"], "rows": [[0.5, 0.5], [0.5, 0.5]]},
            {"child": "B", "parents": ["A"], "rows": [[0.5, 0.5], [0.5, 0.5]]}
        ]
    }"#;
    let path = p(&dir, "cyclic.json");
    std::fs::write(&path, cyclic).unwrap();
    let o = run(&["--model", &path, "validate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cycle"), "{}", stderr(&o));

    let o = run(&["--model", &p(&dir, "absent.json"), "validate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn model_path_from_environment() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(BIN).arg("validate").env("FRICTIONNET_MODEL", p(&dir, "absent.json")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.json"));
}

#[test]
fn infer_prints_six_decimals() {
    let o = run(&["infer", "--evidence", "P=true", "--evidence", "S_T=S_T1", "--query", "W"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "W=Dry 0.050000\nW=Wet 0.940077\nW=Snow 0.009923\n");

    let o = run(&["infer", "--query", "R"]);
    assert_eq!(stdout(&o), "R=Asphalt 0.333333\nR=Concrete 0.333333\nR=Cobblestone 0.333333\n");
}

#[test]
fn infer_errors() {
    assert_eq!(run(&["infer", "--query", "P", "--evidence", "P=true"]).status.code(), Some(1));
    assert_eq!(run(&["infer", "--query", "Q"]).status.code(), Some(1));
    assert_eq!(run(&["infer", "--query", "W", "--evidence", "P=maybe"]).status.code(), Some(1));
    assert_eq!(run(&["infer", "--query", "W", "--evidence", "P"]).status.code(), Some(1));
}

#[test]
fn eval_domain_reports() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (p(&dir, "a.csv"), p(&dir, "b.csv"));
    assert_eq!(run(&["eval-domain", "--out", &a]).status.code(), Some(0));
    let o = run(&["eval-domain", "--out", &b]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 97);
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());

    let o = run(&["eval-domain", "--subsets", "S_RCS1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);

    let o = run(&["eval-domain", "--subsets", "S_C+S_FO", "--weighted"]);
    let out = stdout(&o);
    assert!(out.starts_with("subset,variable,metric,mean,n,weighted_mean\nS_C;S_FO,R,hellinger,"), "{out}");
    assert_eq!(run(&["eval-domain", "--subsets", "S_X"]).status.code(), Some(1));
}

#[test]
fn simulate_and_replay_round_trip() {
    let dir = TempDir::new().unwrap();
    let (log, log2, log3) = (p(&dir, "drive.csv"), p(&dir, "drive2.csv"), p(&dir, "drive3.csv"));
    let o = run(&["simulate", "--scenario", SCENARIO, "--seed", "5", "--out", &log]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let truth = dir.path().join("drive.truth.csv");
    assert!(truth.exists());
    let text = std::fs::read_to_string(&log).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 60 * 10);

    run(&["simulate", "--scenario", SCENARIO, "--seed", "5", "--out", &log2]);
    run(&["simulate", "--scenario", SCENARIO, "--seed", "6", "--out", &log3]);
    assert_eq!(text, std::fs::read_to_string(&log2).unwrap());
    assert_ne!(text, std::fs::read_to_string(&log3).unwrap());

    let (post, report) = (p(&dir, "post.csv"), p(&dir, "report.csv"));
    let truth = truth.display().to_string();
    let o = run(&["replay", "--log", &log, "--truth", &truth, "--out", &post, "--report", &report]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report_text = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = report_text.lines().collect();
    assert_eq!(lines[0], "source,acc_R,acc_W,hellinger_R,hellinger_W,n_R,n_W");
    assert!(lines[1].starts_with("camera,") && lines[2].starts_with("network,"));
    let posteriors = std::fs::read_to_string(&post).unwrap();
    assert!(posteriors.starts_with("t,R_1,R_2,R_3,W_1,W_2,W_3,mu_1,"));
    assert_eq!(posteriors.lines().count(), 2401);
}

#[test]
fn replay_without_truth_skips_the_report() {
    let dir = TempDir::new().unwrap();
    let log = p(&dir, "drive.csv");
    run(&["simulate", "--scenario", SCENARIO, "--out", &log, "--rate", "1"]);
    let post = p(&dir, "post.csv");
    let o = run(&["replay", "--log", &log, "--out", &post, "--truth", &p(&dir, "none.csv")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("report skipped"));
    assert!(stdout(&o).is_empty());
    assert!(Path::new(&post).exists());
}

#[test]
fn replay_names_a_bad_column() {
    let dir = TempDir::new().unwrap();
    let log = p(&dir, "bad.csv");
    std::fs::write(&log, "t,v,T_air,cam_s1,cam_s2,cam_s3,cam_s4,cam_s5,cam_s6,cam_seven\n").unwrap();
    let o = run(&["replay", "--log", &log, "--out", &p(&dir, "post.csv")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cam_s7"), "{}", stderr(&o));
    let o = run(&["replay", "--log", &p(&dir, "missing.csv"), "--out", &p(&dir, "post.csv")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_rejects_bad_scenarios() {
    let dir = TempDir::new().unwrap();
    let scenario = p(&dir, "s.json");
    std::fs::write(&scenario, r#"{"segments": []}"#).unwrap();
    let o = run(&["simulate", "--scenario", &scenario, "--out", &p(&dir, "x.csv")]);
    assert_eq!(o.status.code(), Some(1));
}
