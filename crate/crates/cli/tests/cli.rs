use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const XY: &str = r#"{"points":["x","y"],"dist":[["0","1"],["1","0"]]}"#;

fn step_doc(bps: &[&str], values: &[&str]) -> String {
    let q = |v: &[&str]| v.iter().map(|s| format!("\"{s}\"")).collect::<Vec<_>>().join(",");
    format!(r#"{{"space":{XY},"breakpoints":[{}],"values":[{}]}}"#, q(bps), q(values))
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn hm<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_hm")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn dist_prints_exact_value() {
    let d = Dir::new();
    let f = d.file("f.json", &step_doc(&["0/1", "1/2", "1/1"], &["x", "y"]));
    let g = d.file("g.json", &step_doc(&["0", "2/6", "1"], &["y", "x"]));
    let o = hm(["dist", p(&f), p(&g)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "5/6");
}

#[test]
fn eval_takes_right_piece_at_breakpoint() {
    let d = Dir::new();
    let f = d.file("f.json", &step_doc(&["0", "1/2", "1"], &["x", "y"]));
    assert_eq!(stdout(&hm(["eval", p(&f), "--at", "1/2"])).trim(), "y");
    assert_eq!(hm(["eval", p(&f), "--at", "1"]).status.code(), Some(2));
}

#[test]
fn splice_and_iterate() {
    let d = Dir::new();
    let x = d.file("x.json", &step_doc(&["0", "1"], &["x"]));
    let y = d.file("y.json", &step_doc(&["0", "1"], &["y"]));
    let o = hm(["e1", p(&x), p(&y), "--t", "3/4"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["breakpoints"], serde_json::json!(["0/1", "3/4", "1/1"]));
    assert_eq!(v["values"], serde_json::json!(["x", "y"]));
    let o = hm(["en", p(&x), p(&y), p(&x), "--weights", "0,1,0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["values"], serde_json::json!(["y"]));
    assert_eq!(hm(["en", p(&x), p(&y), "--weights", "1/2,1/3"]).status.code(), Some(2));
}

#[test]
fn certificate_round_trip_and_check() {
    let d = Dir::new();
    let phi = d.file(
        "phi.json",
        &format!(r#"{{"space":{XY},"values":{{"x":"0","y":"1"}}}}"#),
    );
    let o = hm(["certificate", "--functional", p(&phi), "--delta", "1/2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 5);
    assert_eq!(v["v_threshold"], "1/100");
    assert_eq!(v["e_threshold"], "1/10");
    let cert = d.file("cert.json", &stdout(&o));
    let a = d.file("a.json", &step_doc(&["0", "1/3", "1"], &["x", "y"]));
    let b = d.file("b.json", &step_doc(&["0", "1"], &["y"]));
    let o = hm([
        "check-cert", p(&cert), p(&a), p(&b), p(&a), p(&b), "--t1", "1/2", "--t2", "1/2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v, serde_json::json!({"in_v": true, "in_e": true, "conclusion": true}));
}

#[test]
fn dugundji_verbs() {
    let d = Dir::new();
    let boundary = d.file(
        "bd.json",
        &format!(
            r#"{{"system":{{"n":1}},"values":{{"0/1":{},"1/1":{}}}}}"#,
            step_doc(&["0", "1"], &["x"]),
            step_doc(&["0", "1"], &["y"])
        ),
    );
    let o = hm(["extend", p(&boundary), "--at", "33/64"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["breakpoints"], serde_json::json!(["0/1", "3/4", "1/1"]));
    let o = hm(["probe-boundary", p(&boundary), "--point", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tail_below_tolerance"], true);
    let o = hm(["verify-system", "--n", "1", "--depth", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(hm(["build-system", "--n", "3"]).status.code(), Some(2));
    assert_eq!(hm(["extend", p(&boundary), "--at", "1/2,1/2"]).status.code(), Some(2));
}

#[test]
fn probe_shrink_reports() {
    let d = Dir::new();
    let space = d.file("xy.json", XY);
    let fam = hm(["sample-family", "--space", p(&space), "--seed", "5", "--windows", "3"]);
    assert_eq!(fam.status.code(), Some(0));
    let fam = d.file("fam.json", &stdout(&fam));
    let z = d.file("z.json", &step_doc(&["0", "1/3", "1"], &["x", "y"]));
    let o = hm([
        "probe-shrink", p(&z), "--family", p(&fam), "--outer", "1/4", "--inner", "1/8",
        "--samples", "20", "--seed", "3",
    ]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["samples"], 20);
    let bad = hm([
        "probe-shrink", p(&z), "--family", p(&fam), "--outer", "1/8", "--inner", "1/4",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn check_runs_suites_with_exit_codes() {
    let o = hm(["check", "midpoint", "--seed", "7", "--cases", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let again = hm(["check", "midpoint", "--seed", "7", "--cases", "50"]);
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["wall_time_ms"] = 0.into();
        v
    };
    assert_eq!(strip(&o), strip(&again));
    let o = hm(["check", "metric-axioms", "--cases", "5", "--corrupt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("space: triangle inequality"));
    assert_eq!(hm(["check", "nope"]).status.code(), Some(2));
}

#[test]
fn malformed_input_exits_two() {
    let d = Dir::new();
    let f = d.file("f.json", &step_doc(&["0", "1/0"], &["x"]));
    assert_eq!(hm(["dist", p(&f), p(&f)]).status.code(), Some(2));
    let bad_space = d.file(
        "s.json",
        r#"{"points":["a","b","c"],"dist":[["0","1","1/4"],["1","0","1/4"],["1/4","1/4","0"]]}"#,
    );
    let o = hm(["sample-family", "--space", p(&bad_space)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("triangle inequality"));
    assert_eq!(hm(["frobnicate"]).status.code(), Some(2));
}
