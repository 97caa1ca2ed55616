use std::process::{Command, Output};

fn yangtrace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yangtrace")).args(args).output().expect("run yangtrace")
}

fn records(out: &Output) -> Vec<serde_json::Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

#[test]
fn eval_prints_a_passing_record() {
    let out = yangtrace(&["eval", "r_scalar", "--z", "0.3+0.2i"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["formula"], "r_scalar");
    assert_eq!(recs[0]["schema"], 1);
    assert!(recs[0]["elapsed_ms"].is_null());
}

#[test]
fn failing_check_exits_one() {
    let out = yangtrace(&["eval", "g_product_identity", "--z", "0.4+0.1i", "--gamma", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(records(&out)[0]["pass"], false);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(yangtrace(&["eval", "no_such_formula"]).status.code(), Some(2));
    assert_eq!(yangtrace(&["eval", "gamma"]).status.code(), Some(2));
    assert_eq!(yangtrace(&["eval", "gamma", "--z", "1", "--bogus", "2"]).status.code(), Some(2));
    assert_eq!(yangtrace(&["verify", "nonsense"]).status.code(), Some(2));
}

#[test]
fn table_sweeps_in_order() {
    let out = yangtrace(&["table", "gamma", "--sweep", "z:0.5:2.5:5"]);
    assert_eq!(out.status.code(), Some(0));
    let zs: Vec<String> = records(&out).iter().map(|r| r["params"]["z"].as_str().unwrap().to_string()).collect();
    assert_eq!(zs, ["0.5", "1", "1.5", "2", "2.5"]);
}

#[test]
fn csv_output_has_a_header_and_one_row_per_record() {
    let out = yangtrace(&["table", "gamma", "--sweep", "z:1:3:3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("schema,formula,params"));
}

#[test]
fn verify_is_deterministic_under_a_seed() {
    let a = yangtrace(&["verify", "rmatrix", "--seed", "3"]);
    let b = yangtrace(&["verify", "rmatrix", "--seed", "3"]);
    let c = yangtrace(&["verify", "rmatrix", "--seed", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn job_file_runs_like_the_command_line() {
    let dir = std::env::temp_dir().join(format!("yangtrace-job-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("job.json");
    std::fs::write(&path, r#"{"command": "eval", "target": "gamma", "params": {"z": 0.5}}"#).unwrap();
    let from_job = yangtrace(&["job", path.to_str().unwrap()]);
    let direct = yangtrace(&["eval", "gamma", "--z", "0.5"]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(from_job.status.code(), Some(0), "{}", String::from_utf8_lossy(&from_job.stderr));
    assert_eq!(from_job.stdout, direct.stdout);
}
