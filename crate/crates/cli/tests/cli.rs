use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use curvelift::field::{FieldCtx, FieldSpec};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_curvelift"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("curvelift-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn intersect_x33_classes() {
    let o = run(&["intersect", "--q", "3", "--r", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("norm_class,trace_class,count,lines_in_class"));
    let rows: Vec<Vec<usize>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    let counts: BTreeSet<usize> = rows.iter().map(|r| r[2]).collect();
    assert_eq!(counts, BTreeSet::from([7, 10, 13]));
    assert_eq!(rows.iter().map(|r| r[3]).sum::<usize>(), 26 * 27);
}

#[test]
fn bounds_rows_for_characteristic_three() {
    let o = run(&["bounds", "--char", "3", "--rmax", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<i64>> = text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    let r3 = rows.iter().find(|r| r[1] == 3).unwrap();
    let r4 = rows.iter().find(|r| r[1] == 4).unwrap();
    assert_eq!((r3[2], r3[3]), (1, 4));
    assert_eq!((r4[2], r4[3]), (8, 14));
}

#[test]
fn build_binary_code_report() {
    let o = run(&["build", "--q", "2", "--r", "3", "--lines", "all", "--B", "auto"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 32);
    assert_eq!(v["locality"], 2);
    assert_eq!(v["availability"], 7);
    assert_eq!(v["B"], 3);
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let dir = scratch("idem");
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for p in [&a, &b] {
        let o = run(&["build", "--q", "2", "--r", "4", "--lines", "trace-zero", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let (ra, rb) = (dir.join("ra.json"), dir.join("rb.json"));
    for p in [&ra, &rb] {
        let o = run(&["reproduce", "--suite", "ex34", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stdout(&o));
    }
    assert_eq!(fs::read(&ra).unwrap(), fs::read(&rb).unwrap());
}

#[test]
fn encode_erase_repair_round_trip() {
    let dir = scratch("repair");
    let code = dir.join("code.json");
    let s = |p: &PathBuf| p.to_str().unwrap().to_string();
    assert!(run(&["build", "--q", "2", "--r", "4", "--out", &s(&code)]).status.success());
    let cw = dir.join("cw.csv");
    assert!(run(&["encode", "--code", &s(&code), "--seed", "5", "--out", &s(&cw)]).status.success());
    let rx = dir.join("rx.csv");
    let o = run(&["erase", "--code", &s(&code), "--input", &s(&cw), "--positions", "0,17,90", "--out", &s(&rx)]);
    assert!(o.status.success());
    let erased = fs::read_to_string(&rx).unwrap();
    assert_eq!(erased.lines().nth(1).unwrap().split(',').filter(|c| *c == "?").count(), 3);
    let fixed = dir.join("fixed.csv");
    let o = run(&["repair", "--code", &s(&code), "--input", &s(&rx), "--out", &s(&fixed)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&fixed).unwrap(), fs::read(&cw).unwrap());

    let o = run(&["repair", "--code", &s(&code), "--input", &s(&rx), "--position", "17"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["read"].as_array().unwrap().len(), 6);
}

#[test]
fn drill_report_is_deterministic() {
    let args = ["drill", "--q", "2", "--r", "4", "--trials", "200", "--erasures", "3", "--seed", "2024"];
    let a = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&run(&args)));
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["successes"], 200);
    for key in ["trials", "erasures", "successes", "mean_symbols_read", "mean_lines_tried", "seed"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn oracle_only_adds_checks() {
    let plain = run(&["intersect", "--q", "2", "--r", "5"]);
    let checked = run(&["intersect", "--q", "2", "--r", "5", "--oracle"]);
    assert!(checked.status.success());
    assert_eq!(stdout(&plain), stdout(&checked));
    assert!(stderr(&checked).contains("0 mismatches"));
}

#[test]
fn field_spec_round_trips() {
    let o = run(&["field", "--q", "9", "--r", "2"]);
    let spec: FieldSpec = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((spec.p, spec.m, spec.tower), (3, 4, Some([2, 2])));
    assert_eq!(FieldCtx::from_spec(&spec).unwrap().spec(), spec);
}

#[test]
fn custom_curve_file() {
    let dir = scratch("custom");
    let path = dir.join("schmidt.json");
    let field = stdout(&run(&["field", "--char", "2", "--deg", "6"]));
    let spec = format!(
        r#"{{"kind":"custom","terms":[{{"a":0,"b":8,"coeff":1}},{{"a":0,"b":1,"coeff":1}},{{"a":3,"b":0,"coeff":1}}],"field":{field}}}"#
    );
    fs::write(&path, spec).unwrap();
    let o = run(&["curve", "--curve", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["affine_points"], 176);

    let o = run(&["profile", "--curve", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("point_x,point_y,size,num_lines\n"));

    // class reduction does not apply to this curve
    let o = run(&["intersect", "--curve", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("NoTowerDeclared"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["build", "--q", "2"]).status.code(), Some(2));
    assert_eq!(run(&["intersect", "--q", "3", "--r", "3", "--nope"]).status.code(), Some(2));
    assert_eq!(run(&["reproduce", "--suite", "nosuch"]).status.code(), Some(2));
    let o = run(&["build", "--q", "3", "--r", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("DegeneratePlan"));
    let o = run(&["build", "--q", "2", "--r", "3", "--B", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("LocalityUnsatisfiable"));
}

#[test]
fn suites_pass() {
    for suite in ["ex33", "ex34", "binary", "table1", "bounds", "memberships"] {
        let o = run(&["reproduce", "--suite", suite]);
        assert!(o.status.success(), "{suite}:\n{}", stdout(&o));
        assert!(!stdout(&o).contains("FAIL"));
    }
}

#[test]
fn table2_scoped_row() {
    let o = run(&["reproduce", "--suite", "table2", "--char", "5", "--rmax", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    let row = text.lines().find(|l| l.contains("table2.p5.r4")).unwrap();
    assert!(row.starts_with("PASS"));
    assert!(row.contains("[111,121,126,141]"));
    assert!(text.contains("SKIP table2.p7.r6"));
}
