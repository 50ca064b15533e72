//! End-to-end checks of the command line: exit codes, determinism, and the
//! wire formats.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lamplab"))
}

fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("lamplab-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const S7_SCRIPT: &str = r#"{"grid":[1,1],"steps":[{"cell_bottom":[[0,1],[0,1]],"k":1}]}"#;

#[test]
fn build_and_verify_s7() {
    let path = write_temp("s7.json", S7_SCRIPT);
    let out = run(&["build", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["elements"].as_array().unwrap().len(), 7);
    assert_eq!(doc["kind"], "lattice");

    let out = run(&["verify", path.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn malformed_script_exits_2() {
    let path = write_temp("bad.json", r#"{"grid":[1,1],"steps":[{"cell_bottom":[[7,1],[7,1]],"k":1}]}"#);
    let out = run(&["build", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let path = write_temp("junk.json", "not json");
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn render_svg_marks_the_precipitous_edge() {
    let path = write_temp("s7r.json", S7_SCRIPT);
    let out = run(&["render", path.to_str().unwrap(), "--svg"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<circle").count(), 7);
    assert_eq!(svg.matches("#c0392b").count(), 1, "exactly one precipitous edge");
    // deterministic output
    let again = run(&["render", path.to_str().unwrap(), "--svg"]);
    assert_eq!(svg, String::from_utf8(again.stdout).unwrap());

    let dot = run(&["render", path.to_str().unwrap(), "--dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("digraph"));
}

#[test]
fn estimate_and_bounds_lines() {
    let out = run(&["estimate", "5"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "1.67e106");
    let out = run(&["bounds", "5"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "length 75 size 5625 tubes/lamp 11 tubes total 38"
    );
}

#[test]
fn enumerate_census_is_stable() {
    let a = run(&["enumerate", "4"]);
    let b = run(&["enumerate", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("length 2: 1"));
    assert!(text.contains("length 3: 2"));
}

#[test]
fn props_on_the_diamonds_gadget() {
    // cde(3) as a poset document; CDE_3 must fail with exit code 1
    let p = lamplab_core::forbidden::cde(3).unwrap();
    let doc = lamplab_core::docs::poset_to_json(&p, None);
    let path = write_temp("cde3.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["props", path.to_str().unwrap(), "--nmax", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("CDE_3: fails"), "{text}");
}

#[test]
fn decide_exit_codes() {
    let two = lamplab_core::order::Poset::antichain(2);
    let doc = lamplab_core::docs::poset_to_json(&two, None);
    let path = write_temp("two.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["decide", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "representable");
    assert_eq!(v["witness"]["grid"], serde_json::json!([1, 1]));

    let chain = lamplab_core::order::Poset::chain(3);
    let doc = lamplab_core::docs::poset_to_json(&chain, None);
    let path = write_temp("chain3.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["decide", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // identical runs produce identical bytes
    let again = run(&["decide", path.to_str().unwrap()]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn verify_random_corpus_is_seed_stable() {
    let a = run(&["verify", "--random", "5", "7", "--seed", "9"]);
    assert!(a.status.success());
    let b = run(&["verify", "--random", "5", "7", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_corpus_parallel_matches_serial() {
    let serial = run(&["verify", "--corpus", "4"]);
    assert!(serial.status.success());
    let parallel = bin()
        .args(["verify", "--corpus", "4"])
        .env("LAMPLAB_THREADS", "4")
        .output()
        .unwrap();
    assert!(parallel.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn con_of_s7_is_the_v_shape() {
    let path = write_temp("s7c.json", S7_SCRIPT);
    let out = run(&["con", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["elements"].as_array().unwrap().len(), 3);
    assert_eq!(doc["covers"].as_array().unwrap().len(), 2);
}

#[test]
fn lamp_report_of_s7() {
    let path = write_temp("s7l.json", S7_SCRIPT);
    let out = run(&["lamps", path.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let lamps = doc["lamps"].as_array().unwrap();
    assert_eq!(lamps.len(), 3);
    assert_eq!(
        lamps.iter().filter(|l| l["kind"] == "internal").count(),
        1
    );
}

#[test]
fn corrupted_diagram_document_exits_1() {
    // build the S7 document, then move one coordinate off its lattice order
    let path = write_temp("s7src.json", S7_SCRIPT);
    let out = run(&["build", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let mut doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    doc["coords"]["e4"] = serde_json::json!([[9, 1], [9, 1]]);
    doc.as_object_mut().unwrap().remove("script");
    let bad = write_temp("s7bad.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    // the untouched document still verifies
    let mut clean: serde_json::Value =
        serde_json::from_slice(&run(&["build", path.to_str().unwrap(), "--format", "json"]).stdout)
            .unwrap();
    clean.as_object_mut().unwrap().remove("script");
    let good = write_temp("s7good.json", &serde_json::to_string(&clean).unwrap());
    let out = run(&["verify", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}
