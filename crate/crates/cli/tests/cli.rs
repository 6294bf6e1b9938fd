use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_realcollatz")).args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("realcollatz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn iterate_u_three_halves() {
    let o = run(&["iterate", "--map", "U", "--start", "3/2", "--cap", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["fate"]["kind"], "tends_to_trivial");
    assert_eq!(v["iterates"][2], "11/8");
}

#[test]
fn iterate_f_escapes() {
    let o = run(&["iterate", "--map", "F", "--start", "3/2", "--cap", "10", "--escape", "1000", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "map,start,fate,steps_used,last,base_entry\nF,3/2,escaped_bound,6,2915/2,0\n");
}

#[test]
fn iterate_cap_and_domain_exit_codes() {
    assert_eq!(run(&["iterate", "--map", "U", "--start", "27", "--cap", "5"]).status.code(), Some(2));
    let o = run(&["iterate", "--map", "U", "--start", "1/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain"));
    assert_eq!(run(&["iterate", "--map", "W", "--start", "2"]).status.code(), Some(1));
    assert_eq!(run(&["iterate", "--bogus"]).status.code(), Some(1));
}

#[test]
fn cycles_small_sweeps() {
    let o = run(&["cycles", "--lmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let summary: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    let hits: Vec<&str> = summary["summary"]["realized_u"].as_array().unwrap().iter().map(|h| h["bits"].as_str().unwrap()).collect();
    assert_eq!(hits, ["01", "10"]);

    let o = run(&["cycles", "--lmax", "12"]);
    let summary: serde_json::Value = serde_json::from_str(stdout(&o).lines().last().unwrap()).unwrap();
    assert_eq!(summary["summary"]["realized_u"].as_array().unwrap().len(), 12);
    assert_eq!(summary["summary"]["realized_uflip"].as_array().unwrap().len(), 0);

    assert_eq!(run(&["cycles", "--lmax", "0"]).status.code(), Some(1));
}

#[test]
fn cycles_output_is_deterministic_across_workers() {
    let a = stdout(&run(&["cycles", "--lmax", "10", "--workers", "1"]));
    let b = stdout(&run(&["cycles", "--lmax", "10", "--workers", "3"]));
    assert_eq!(a, b);
}

#[test]
fn cycles_unwritable_output_exits_4() {
    let o = run(&["cycles", "--lmax", "3", "--out", "/nonexistent-dir/x.jsonl"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn trace_commands() {
    let o = run(&["trace", "--bits", "11100"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["plain"]["verdict"], serde_json::json!({"kind": "misaligned_at", "index": 1}));
    assert_eq!(v["plain"]["r"], serde_json::json!(["4", "1", "4", "1", "3", "4"]));

    let v: serde_json::Value = serde_json::from_str(&stdout(&run(&["trace", "--bits", "10"]))).unwrap();
    assert_eq!(v["plain"]["verdict"]["kind"], "integer_cycle");

    assert_eq!(run(&["trace", "--bits", "2ab"]).status.code(), Some(1));
}

#[test]
fn conjecture_reports() {
    let o = run(&["conjecture", "RV", "--samples", "200", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tallies"]["reached_base"], 200);
    let c = v["conclusion"].as_str().unwrap();
    assert!(c.starts_with("no counterexample among 200 samples"));
    assert!(c.contains("evidence only"));

    let again = run(&["conjecture", "RV", "--samples", "200", "--seed", "5", "--workers", "2"]);
    assert_eq!(stdout(&again), stdout(&o));

    let q2 = run(&["conjecture", "Q2", "--m-range", "0..100", "--samples", "50"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&q2)).unwrap();
    assert_eq!(v["family"]["failures"], serde_json::json!([]));
    assert_eq!(v["family"]["m_hi"], 100);

    assert_eq!(run(&["conjecture", "RW"]).status.code(), Some(1));
}

#[test]
fn config_file_merges_under_flags() {
    let cfg = tmp("run.conf");
    std::fs::write(&cfg, "# iterate defaults\nmap = F\nstart = 3/2\ncap = 3\nformat = csv\n").unwrap();
    let path = cfg.to_str().unwrap();
    let o = run(&["iterate", "--config", path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("F,3/2,cap_reached,3,"));
    let o = run(&["iterate", "--config", path, "--cap", "20", "--escape", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("escaped_bound"));

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(run(&["iterate", "--config", path, "--start", "2"]).status.code(), Some(1));
}

#[test]
fn rmap_scan_small_range() {
    let out = tmp("scan.jsonl");
    let o = run(&["rmap-scan", "--d-range", "5..100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let summary: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(summary["summary"]["below_bound"], 0);
    assert!(text.contains(r#""d":19"#));
}
