use std::fs;
use std::process::{Command, Output};

fn hvf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hvf")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn card_prints_cardinality() {
    let o = hvf(&["card", "--basis", "b2", "--delta", "d3", "--trig"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "19682");
    assert_eq!(stdout(&hvf(&["card", "--basis", "b3", "--delta", "d3"])), "19682");
}

#[test]
fn field_of_pendulum() {
    let o = hvf(&["field", "--demo", "pendulum"]);
    assert_eq!(stdout(&o), "dx: sin(y)\ndy: x");
    assert_eq!(stdout(&hvf(&["field", "--ham", "1/2*x^2 + cos(y)"])), "dx: sin(y)\ndy: x");
    let o = hvf(&["field", "--ham", "x*y", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dx"], "-x");
    assert_eq!(v["dy"], "y");
}

#[test]
fn dist_metrics() {
    let o = hvf(&["dist", "--a", "x^2 + cos(y)", "--b", "1/2*x^2+cos(y)", "--metric", "euclid"]);
    assert_eq!(stdout(&o), "1.4142135623730951");
    let o = hvf(&["dist", "--a", "x + y", "--b", "y + x", "--metric", "levenshtein", "--as-written"]);
    assert_eq!(stdout(&o), "2");
    let o = hvf(&["dist", "--a", "x + y", "--b", "y + x", "--metric", "levenshtein"]);
    assert_eq!(stdout(&o), "0");
    let o = hvf(&["dist", "--a", "x + y", "--b", "x", "--metric", "jaccard"]);
    assert_eq!(stdout(&o), "0.5");
}

#[test]
fn exit_codes() {
    assert_eq!(hvf(&["nope"]).status.code(), Some(1));
    assert_eq!(hvf(&["card", "--basis", "b9", "--delta", "d3"]).status.code(), Some(2));
    assert_eq!(hvf(&["dist", "--a", "x +", "--b", "x"]).status.code(), Some(2));
    assert_eq!(hvf(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none");
    assert_eq!(hvf(&["verify", missing.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    fs::write(&conf, "basis = b1\ndelta = d3\n").unwrap();
    let c = conf.to_str().unwrap();
    assert_eq!(stdout(&hvf(&["card", "--config", c])), "8");
    assert_eq!(stdout(&hvf(&["card", "--config", c, "--basis", "b2"])), "242");
}

#[test]
fn gen_verify_score_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ds");
    let o = out.to_str().unwrap();
    let g = hvf(&["gen", "--basis", "b1", "--delta", "d3", "--seed", "42", "--out", o, "--resolution", "32", "--no-png"]);
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
    let m: serde_json::Value = serde_json::from_str(&stdout(&g)).unwrap();
    assert_eq!(m["counts"]["records"], 400);

    assert!(hvf(&["verify", o, "--fraction", "0.2"]).status.success());
    // regenerating into a non-empty directory is refused
    assert_eq!(hvf(&["gen", "--basis", "b1", "--delta", "d3", "--seed", "42", "--out", o]).status.code(), Some(2));

    let preds = dir.path().join("p.jsonl");
    fs::write(&preds, "{\"sample_id\": 0, \"predicted\": \"-x\"}\n{\"sample_id\": 1, \"predicted\": \"y\"}\n").unwrap();
    let s = hvf(&["score", o, preds.to_str().unwrap(), "--per-sample"]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&s)).unwrap();
    assert_eq!(r["predictions"], 2);
    assert_eq!(r["samples"].as_array().unwrap().len(), 2);

    // corrupt one tensor: verify exits 3
    let rec: serde_json::Value =
        serde_json::from_str(fs::read_to_string(out.join("records.jsonl")).unwrap().lines().nth(5).unwrap()).unwrap();
    let t = out.join(rec["tensor_path"].as_str().unwrap());
    let mut bytes = fs::read(&t).unwrap();
    bytes[100] ^= 0x80;
    fs::write(&t, bytes).unwrap();
    let v = hvf(&["verify", o, "--fraction", "1"]);
    assert_eq!(v.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&v.stderr).contains(&rec["sample_id"].to_string()));
}

#[test]
fn render_writes_tensor_and_pngs() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("h");
    let o = hvf(&["render", "--demo", "harmonic", "--const", "alpha=2", "--out", base.to_str().unwrap(), "--resolution", "32"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = fs::read(dir.path().join("h.symf")).unwrap();
    assert_eq!(&t[..4], b"SYMF");
    assert_eq!(t.len(), 20 + 3 * 32 * 32 * 4);
    for s in ["q", "s", "h"] {
        assert!(dir.path().join(format!("h_{s}.png")).exists());
    }
    assert_eq!(hvf(&["render", "--demo", "harmonic", "--cloud", "3", "--out", base.to_str().unwrap()]).status.code(), Some(1));
}
