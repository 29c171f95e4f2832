use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn lavrik(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lavrik"))
        .args(args)
        .env_remove("LAVRIK_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn dir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn eval_values_and_exit_codes() {
    let o = lavrik(&["eval", "--which", "Lambda", "--sigma", "0.5", "--t", "0", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("-1.988483112753"));

    let o = lavrik(&["eval", "--which", "L", "--sigma", "-2", "--t", "0", "--format", "text"]);
    assert_eq!(stdout(&o).trim(), "0");

    let o = lavrik(&["eval", "--which", "Z", "--t", "14.1347251417", "--bits", "256", "--format", "text"]);
    let z: f64 = stdout(&o).trim().parse().unwrap();
    assert!(z.abs() < 1e-6);

    assert_eq!(lavrik(&["eval", "--which", "Lambda", "--sigma", "0", "--t", "0"]).status.code(), Some(2));
    assert_eq!(lavrik(&["eval", "--which", "Lambda", "--t", "100"]).status.code(), Some(3));
    assert_eq!(lavrik(&["eval", "--which", "Lambda", "--tau-re", "-1"]).status.code(), Some(2));
    assert_eq!(lavrik(&["eval", "--which", "nope"]).status.code(), Some(2));
}

#[test]
fn env_precision_is_overridden_by_the_flag() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_lavrik"));
        c.args(["eval", "--which", "theta", "--sigma", "1"]);
        if let Some(b) = flag {
            c.args(["--bits", b]);
        }
        match env {
            Some(v) => c.env("LAVRIK_BITS", v),
            None => c.env_remove("LAVRIK_BITS"),
        };
        let doc: Value = serde_json::from_slice(&c.output().unwrap().stdout).unwrap();
        doc["precision"]["bits"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 128);
    assert_eq!(run(Some("200"), None), 200);
    assert_eq!(run(Some("200"), Some("96")), 96);
}

#[test]
fn json_documents_echo_the_config_and_repeat_exactly() {
    let args = ["verify", "--which", "decomposition", "--samples", "5", "--seed", "7"];
    let a = lavrik(&args);
    let b = lavrik(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["tool"], "lavrik");
    assert_eq!(doc["config"]["seed"], 7);
    assert_eq!(doc["config"]["args"]["samples"], 5);
    assert_eq!(doc["precision"]["bits"], 128);
    assert_eq!(doc["result"]["pass"], true);
    assert!(doc["result"]["rows"][0]["residual"].is_string());

    let c = lavrik(&["verify", "--which", "decomposition", "--samples", "5", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn theta_check_at_one_is_exact() {
    let o = lavrik(&["verify", "--which", "theta_fe", "--sigma", "1", "--t", "0"]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["max_residual"], "0");
}

#[test]
fn mellin_check_at_one_half() {
    let o = lavrik(&["verify", "--which", "mellin", "--sigma", "0.5", "--t", "0", "--c", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["pass"], true);
    assert_eq!(doc["result"]["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn zero_table_from_height_zero_and_resume() {
    let d = dir("cli-zeros");
    let table = d.join("z.jsonl");
    let t = table.to_str().unwrap();
    let o = lavrik(&["zeros", "--t-max", "0", "--out", t]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&table).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains("\"re\":\"11.25170908146"));

    let o = lavrik(&["zeros", "--t-max", "30", "--resume", "--out", t]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["reused"], 1);
    assert_eq!(doc["result"]["halfplane"]["pass"], true);
    let grown = std::fs::read_to_string(&table).unwrap();
    assert_eq!(grown.lines().count(), 4);

    // a second resume to the same height changes nothing
    let o = lavrik(&["zeros", "--t-max", "30", "--resume", "--out", t]);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["result"]["region"].is_null());
    assert_eq!(std::fs::read_to_string(&table).unwrap(), grown);
}

#[test]
fn xray_writes_metadata_and_markers() {
    let d = dir("cli-xray");
    let svg = d.join("x.svg");
    let o = lavrik(&[
        "xray", "--which", "Lambda", "--region", "-10,30,-20,40", "--nx", "21", "--ny", "31", "--thick", "2.5", "--out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("<metadata>{") && text.contains("stroke-width:2.5"));
    assert!(text.contains("<polyline class=\"real\"") || text.contains("<polygon class=\"real\""));

    let csv = lavrik(&["xray", "--which", "L", "--region", "-10,30,-20,40", "--nx", "21", "--ny", "31", "--format", "csv"]);
    let text = stdout(&csv);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next(), Some("kind,idx,re,im"));

    let bad = lavrik(&["xray", "--which", "Lambda", "--region", "1,0,0,1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn argtrack_anchor_and_report() {
    let d = dir("cli-argtrack");
    let csv = d.join("a.csv");
    let o = lavrik(&["argtrack", "--t-max", "12", "--out", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let row = text.lines().nth(2).unwrap();
    assert!(row.starts_with("0,3.14159265358979323846"));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["alpha"], "0.010906559198968892180277118987156");
    assert_eq!(report["a_bound_0.19"], true);
}
