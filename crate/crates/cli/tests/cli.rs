use std::path::PathBuf;
use std::process::{Command, Output};

use serde::de::DeserializeOwned;
use serde::Serialize;

#[path = "../src/report.rs"]
#[allow(dead_code)]
mod report;

use report::*;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn tsw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsw")).args(args).output().expect("run tsw")
}

fn tsw_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsw"))
        .args(args)
        .env("TSW_THREADS", threads)
        .output()
        .expect("run tsw")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parse JSON output, print it again, and require the same document.
fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(o: &Output) -> T {
    let text = stdout(o);
    let x: T = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    let again = serde_json::to_string_pretty(&x).unwrap();
    assert_eq!(serde_json::from_str::<T>(&again).unwrap(), x);
    assert_eq!(again.trim_end(), text.trim_end());
    x
}

#[test]
fn borromean_sw_table() {
    for f in ["borromean_f00.json", "borromean_f100.json", "borromean_pd_fm100.json"] {
        let o = tsw(&["sw", corpus(f).to_str().unwrap(), "--all", "--window", "2", "--json"]);
        assert!(o.status.success(), "{f}");
        let r: SwReport = round_trip(&o);
        let nz: Vec<_> = r.table.entries.iter().filter(|e| e.value != 0).collect();
        assert_eq!(nz.len(), 1, "{f}");
        assert_eq!(nz[0].value.abs(), 1);
        assert_eq!(r.table.global_sign, "undetermined");
    }
}

#[test]
fn unknot_tau_rendering() {
    let o = tsw(&["tau", corpus("unknot_f0.json").to_str().unwrap(), "--charge", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next().unwrap(), "tau(k = (1)) = (-t1) / (t1-1)^2");
    let o = tsw(&["tau", corpus("unknot_f0.json").to_str().unwrap(), "--charge", "1", "--json"]);
    let r: ElementReport = round_trip(&o);
    assert_eq!(r.denominator, vec!["t1-1", "t1-1"]);
}

#[test]
fn orientation_flag() {
    let f = corpus("hopf_f23.json");
    let a: ElementReport = round_trip(&tsw(&["tau", f.to_str().unwrap(), "--json"]));
    let b: ElementReport = round_trip(&tsw(&["tau", f.to_str().unwrap(), "--orientation", "canonical", "--json"]));
    assert_eq!(a.orientation_sign, 1);
    assert_eq!(b.orientation_sign.abs(), 1);
    for ((ga, ca), (gb, cb)) in a.numerator.iter().zip(&b.numerator) {
        assert_eq!(ga, gb);
        let neg = if ca.starts_with('-') { ca[1..].to_string() } else { format!("-{ca}") };
        assert_eq!(cb, if b.orientation_sign == 1 { ca } else { &neg });
    }
}

#[test]
fn selftest_corpus() {
    let mut files: Vec<String> = std::fs::read_dir(corpus(""))
        .unwrap()
        .map(|e| e.unwrap().path().display().to_string())
        .filter(|p| p.ends_with(".json"))
        .collect();
    files.sort();
    let mut args = vec!["selftest", "--json"];
    args.extend(files.iter().map(|s| s.as_str()));
    let o = tsw(&args);
    let r: SelftestReport = round_trip(&o);
    assert!(r.ok);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(r.files.len(), files.len());
}

#[test]
fn other_reports_round_trip() {
    let f = corpus("whitehead_f2m3.json");
    let f = f.to_str().unwrap();
    let h: HomologyReport = round_trip(&tsw(&["homology", f, "--json"]));
    assert_eq!((h.b1, h.torsion_order), (0, 6));
    let e: EulerReport = round_trip(&tsw(&["euler", f, "--json"]));
    assert_eq!(e.classes.len(), 6);
    let v: ValidateReport = round_trip(&tsw(&["validate", f, "--json"]));
    assert!(v.ok);
    let t = corpus("trefoil_f0.json");
    let d: ElementReport = round_trip(&tsw(&["delta", t.to_str().unwrap(), "--charge", "1", "--json"]));
    assert_eq!(d.quantity, "Delta");
    let s: SwSingle = round_trip(&tsw(&["sw", t.to_str().unwrap(), "--charge", "7", "--json"]));
    assert_eq!(s.value.abs(), 3);
}

#[test]
fn exit_codes() {
    let t = corpus("trefoil_f0.json");
    let o = tsw(&["tau", t.to_str().unwrap(), "--charge", "2", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let e: ErrorReport = round_trip(&o);
    assert_eq!(e.error, "BadParity");

    let o = tsw(&["sw", corpus("torus24_f22.json").to_str().unwrap(), "--charge", "1,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NeedsDirection"));
    let o = tsw(&["sw", corpus("torus24_f22.json").to_str().unwrap(), "--charge", "1,1", "--direction", "1,0"]);
    assert!(o.status.success());

    let o = tsw(&["sw", corpus("hopf_f11.json").to_str().unwrap(), "--all", "--split"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NotSplit"));

    let o = tsw(&["homology", "/nonexistent.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corrupted_table_is_rejected() {
    let dir = std::env::temp_dir().join(format!("tsw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let text = std::fs::read_to_string(corpus("whitehead_f00.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["conway"]["1,2"]["terms"][0][1] = serde_json::json!(7);
    let p = dir.join("bad.json");
    std::fs::write(&p, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = tsw(&["validate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = tsw(&["selftest", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    // PD whose linking numbers disagree with the matrix
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(corpus("whitehead_pd_f00.json")).unwrap()).unwrap();
    doc["linking_matrix"] = serde_json::json!([[0, 1], [1, 0]]);
    std::fs::write(&p, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = tsw(&["validate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn deterministic_across_thread_counts() {
    let f = corpus("borromean_f112.json");
    let args = ["tau", f.to_str().unwrap(), "--json"];
    let a = tsw_env(&args, "1");
    let b = tsw_env(&args, "4");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let f = corpus("whitehead_f00.json");
    let args = ["sw", f.to_str().unwrap(), "--all", "--json"];
    assert_eq!(tsw_env(&args, "1").stdout, tsw_env(&args, "3").stdout);
}
