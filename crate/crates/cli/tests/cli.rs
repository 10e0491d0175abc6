use std::fs;
use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_crawlsieve"));
    c.env_remove("RUST_BACKTRACE");
    c
}

fn with_stdin(mut c: Command, input: &str) -> Output {
    let mut child = c.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn pii_scan_reads_stdin() {
    let mut c = bin();
    c.arg("pii-scan");
    let out = with_stdin(c, "write to bob@example.com or 8.8.8.8, not 10.0.0.1\n");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains("bob@example.com") && !text.contains("8.8.8.8"), "{text}");
    assert!(text.contains("10.0.0.1"));
}

#[test]
fn run_writes_jsonl_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("docs.jsonl");
    let long = "The harbour town wakes early and the fishing boats leave before the sun comes up over the grey water.";
    let lines = [
        serde_json::json!({"id": "a", "text": format!("{long}\n{long} Again tomorrow.\nThe gulls follow them out past the breakwater and back.")}),
        serde_json::json!({"id": "b", "text": "too short"}),
    ];
    fs::write(&input, lines.iter().map(|l| l.to_string() + "\n").collect::<String>()).unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "[stages]\nlanguage = false\nurl_filter = false\n").unwrap();

    let out = bin().args(["run", "--format", "jsonl", "--config"]).arg(&config).arg(&input).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ids: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect();
    assert!(!ids.contains(&"b".to_string()), "{ids:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("gopher_quality"));
}

#[test]
fn run_without_inputs_fails() {
    let out = bin().args(["run", "--format", "jsonl"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no inputs"));
}

#[test]
fn print_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["run", "--print-config", "--shards", "7"]).output().unwrap();
    assert!(out.status.success());
    let first = String::from_utf8(out.stdout).unwrap();
    assert!(first.contains("shard_count = 7"));
    let path = dir.path().join("c.toml");
    fs::write(&path, &first).unwrap();
    let again = bin().args(["run", "--print-config", "--config"]).arg(&path).output().unwrap();
    assert_eq!(String::from_utf8(again.stdout).unwrap(), first);
}

#[test]
fn dedup_sim_prints_one_row_per_bin() {
    let out = bin()
        .args(["dedup-sim", "--snapshots", "4", "--docs-per-snapshot", "500", "--fraction", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.split('\t').count() == 8));
}
