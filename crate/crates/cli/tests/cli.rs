use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcmorph")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = run(&all);
    (code(&o), serde_json::from_slice(&o.stdout).expect("valid json"))
}

fn statuses(v: &Value) -> Vec<(String, String)> {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["law"].as_str().unwrap().to_string(), c["status"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn seprel_alpha_laws_pass() {
    let o = run(&["laws", "seprel-alpha"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for law in ["definedness", "strengthening", "unit", "symmetry", "associativity"] {
        assert!(out.contains(&format!("pass  {law}\n")), "{out}");
    }
}

#[test]
fn text_and_json_list_the_same_checks() {
    let text = stdout(&run(&["laws", "seprel-upsilon"]));
    let (c, v) = json(&["laws", "seprel-upsilon"]);
    assert_eq!(c, 1);
    assert_eq!(v["suite"], "seprel laws: upsilon");
    for (law, status) in statuses(&v) {
        let line = if status == "pass" { format!("pass  {law}") } else { format!("FAIL  {law}") };
        assert!(text.contains(&line), "{line} missing from\n{text}");
    }
    let assoc = v["checks"].as_array().unwrap().iter().find(|c| c["law"] == "associativity").unwrap();
    assert_eq!(assoc["witness"], serde_json::json!(["{2↦wait}", "{1↦wait}", "{3↦wait}"]));
    assert!(v["stats"]["triples"].as_u64().unwrap() > 0);
}

#[test]
fn passing_checks_omit_witnesses() {
    let (c, v) = json(&["laws", "pcm-o"]);
    assert_eq!(c, 0);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c.get("witness").is_none()));
}

#[test]
fn upsilon_counterexample() {
    let o = run(&["counterexample", "upsilon"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("dom x = {2}, dom y = {1}, dom z = {3}"), "{out}");
    assert!(out.contains("FAIL  associativity  witness ({2↦wait}, {1↦wait}, {3↦wait})"), "{out}");
}

#[test]
fn exploration_passes_mutex() {
    let o = run(&["explore", "--threads", "2", "--rounds", "1", "--check", "mutex"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn full_exploration_passes() {
    let (c, v) = json(&["explore", "--threads", "2", "--rounds", "1", "--bound", "3"]);
    assert_eq!(c, 0, "{v}");
    let laws: Vec<String> = statuses(&v).into_iter().map(|(l, _)| l).collect();
    for law in ["mutex", "statespace", "seprel", "outline", "quotient/abstractions-agree"] {
        assert!(laws.iter().any(|l| l == law), "{law} missing");
    }
    assert!(laws.iter().any(|l| l.starts_with("stability/")));
}

#[test]
fn mutant_lock_violates_mutex_with_trace() {
    let (c, v) = json(&["explore", "--mutate", "lock", "--check", "mutex"]);
    assert_eq!(c, 1);
    assert_eq!(statuses(&v), [("mutex".to_string(), "fail".to_string())]);
    let trace = v["trace"].as_array().unwrap();
    assert_eq!(trace.len(), 5);
    assert!(trace[0]["thread"].is_null());
}

#[test]
fn usage_errors_exit_two() {
    let o = run(&["laws", "seprel-nope"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("seprel-alpha"));
    assert_eq!(code(&run(&["explore", "--threads", "3", "--bound", "2"])), 2);
    assert_eq!(code(&run(&["explore", "--check", "liveness"])), 2);
    assert_eq!(code(&run(&["explore", "--mutate", "spin"])), 2);
    assert_eq!(code(&run(&["laws", "pcm-o", "--bound", "0"])), 2);
    assert_eq!(code(&run(&["subpcm", "tickets", "hist"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn quotient_commands() {
    assert_eq!(code(&run(&["subpcm", "tickets", "alpha"])), 0);
    assert_eq!(code(&run(&["subpcm", "oxo", "trivial"])), 2);
    let o = run(&["subpcm", "tickets", "upsilon"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("quotient refused"));
}

#[test]
fn invertibility_commands() {
    assert_eq!(code(&run(&["invert", "seprel-alpha"])), 0);
    assert_eq!(code(&run(&["invert", "morph-alpha-inject"])), 0);
    assert_eq!(code(&run(&["invert", "morph-tensor-alpha", "--bound", "2"])), 1);
    assert_eq!(code(&run(&["laws", "cancel-natmax"])), 1);
}

#[test]
fn framing_and_category() {
    assert_eq!(code(&run(&["laws", "framing-alpha", "--bound", "2"])), 0);
    assert_eq!(code(&run(&["laws", "framing-psi-top-used"])), 1);
    assert_eq!(code(&run(&["laws", "category", "--bound", "2"])), 0);
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("pcmorph-report-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let o = run(&["laws", "pcm-tickets", "--format", "json", "--output", p]);
    assert_eq!(code(&o), 0);
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written, stdout(&o));
}

#[test]
fn worker_count_does_not_change_results() {
    let one = run(&["laws", "seprel-upsilon", "--jobs", "1"]);
    let four = run(&["laws", "seprel-upsilon", "--jobs", "4"]);
    assert_eq!(one.stdout, four.stdout);
}
