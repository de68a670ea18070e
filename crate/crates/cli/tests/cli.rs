use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isotuple")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn repro_paper_passes() {
    let o = run(&["repro-paper"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("15 of 15 checks passed"));
    let o = run(&["repro-paper", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 15);
}

#[test]
fn corrupted_golden_file_fails_with_diff() {
    let text = isotuple::golden::EMBEDDED.replacen("\"s_star_a0_s\": [[[1, 0]", "\"s_star_a0_s\": [[[7, 0]", 1);
    assert_ne!(text, isotuple::golden::EMBEDDED);
    let path = std::env::temp_dir().join(format!("isotuple-golden-{}.json", std::process::id()));
    std::fs::write(&path, text).unwrap();
    let o = run(&["repro-paper", "--golden", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL") && out.contains("expected:") && out.contains("actual:"), "{out}");
}

#[test]
fn unreadable_golden_file_is_a_usage_error() {
    assert_eq!(run(&["repro-paper", "--golden", "/nonexistent/golden.json"]).status.code(), Some(2));
}

#[test]
fn check_reports_isometry() {
    let o = run(&["check", "--tuple-b", &data("jordan_t.json"), "--x", &data("a0.json"), "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("isometric at m=2: true"));
    let o = run(&["check", "--tuple-b", &data("jordan_t.json"), "--k-max", "12", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["profile"]["triangle_norms"].as_array().unwrap().len(), 13);
}

#[test]
fn mismatched_dimensions_exit_2() {
    let o = run(&["check", "--tuple-b", &data("jordan_t.json"), "--x", &data("identity3.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["check", "--tuple-b", &data("missing.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn min_degrees() {
    let o = run(&["min-degree", "--tuple-b", &data("jordan_t.json")]);
    assert_eq!(stdout(&o).trim(), "symmetry: 3, isometry: 3");
    let o = run(&["min-degree", "--tuple-b", &data("flip.json")]);
    assert_eq!(stdout(&o).trim(), "symmetry: 1, isometry: 1");
    let inv = data("inverse_tuple.json");
    let o = run(&["min-degree", "--tuple-a", &inv, "--tuple-b", &inv, "--k-max", "12"]);
    assert!(stdout(&o).contains("isometry: none ≤ 12"));
}

#[test]
fn campaign_exit_codes() {
    let o = run(&["campaign", "--theorem", "thm05", "--trials", "100", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["campaign", "--theorem", "bogus"]).status.code(), Some(2));
    let o = run(&["campaign", "--theorem", "pro02", "--trials", "100000000", "--budget", "1", "--json"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["budget_exhausted"], true);
    assert!(v["trials"].as_u64().unwrap() < 100_000_000);
}

#[test]
fn campaign_writes_files_and_reads_config() {
    let dir = std::env::temp_dir().join(format!("isotuple-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("c.toml");
    let out = dir.join("r.json");
    let csv = dir.join("s.csv");
    std::fs::write(&cfg, "theorem = \"cor050\"\ntrials = 5\nseed = 3\n").unwrap();
    let o = run(&[
        "campaign",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "7",
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["theorem_id"], "cor050");
    assert_eq!(v["trials"], 7);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["schema_version"], 1);
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("theorem_id,trials,passes,anomalies,max_defect\ncor050,7,7,0,"));
    std::fs::write(&cfg, "theorem = \"cor050\"\nbogus_key = 1\n").unwrap();
    assert_eq!(run(&["campaign", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sequential_and_parallel_reports_match() {
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_secs");
        v
    };
    let args = ["campaign", "--theorem", "thm06", "--trials", "40", "--seed", "9", "--json"];
    let par = strip(run(&args));
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    assert_eq!(par, strip(run(&seq_args)));
    let threads = Command::new(env!("CARGO_BIN_EXE_isotuple"))
        .args(args)
        .env("ISOTUPLE_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(par, strip(threads));
}
