use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parahoric")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn tmp(name: &str, contents: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn lemma_suite_for_c_up_to_rank_4() {
    let out = run(&["verify", "lemmas", "--family", "C", "--max-rank", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["summary"]["failed"], 0);
    assert_eq!(r["summary"]["not_computed"], 0);
    let results = r["results"].as_array().unwrap();
    assert_eq!(results.len(), 12);
    for c in results {
        let status = c["status"].as_str().unwrap();
        // C_n has a single long simple root, so no adjacent long pair to test
        if c["claim"] == "dist-of-root" {
            assert_eq!(status, "not-applicable");
        } else {
            assert_eq!(status, "verified", "{c}");
        }
    }
}

#[test]
fn e6_atlas_has_one_flagged_class_for_the_split_form() {
    let out = run(&["atlas", "--family", "E", "--rank", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let split: Vec<&Value> = r["results"].as_array().unwrap().iter().filter(|x| x["form"] == "E6").collect();
    assert_eq!(split.len(), 1);
    assert_eq!(split[0]["flagged_class_count"], 1);
    assert_eq!(split[0]["flagged_classes"], serde_json::json!([[[4]]]));
    let inner = r["results"].as_array().unwrap().iter().find(|x| x["form"] == "E6[inner 1]").unwrap();
    assert_eq!(inner["flagged_class_count"], 2);
}

#[test]
fn e8_fdeg_from_kac_file() {
    let file = tmp("e8-d8.json", r#"{"order": 2, "coords": [1, 0, 0, 0, 0, 0, 0, 0], "label": "D8"}"#);
    let out = run(&["fdeg", "--kac", file.to_str().unwrap(), "--family", "E", "--rank", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let row = &r["results"][0];
    assert_eq!(row["pseudo_levi"], "D8");
    assert_eq!(row["ratio_exponent"], 64);
    assert_eq!(row["conductor"]["conductor"], 128);
    assert_eq!(row["status"], "verified");
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "kottwitz", "--max-rank", "3", "--order", "3", "--isogeny", "both"];
    let a = run(&args);
    let b = run(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let t1 = run(&["build", "--max-rank", "3", "--format", "table"]);
    let t2 = run(&["build", "--max-rank", "3", "--format", "table"]);
    assert_eq!(t1.stdout, t2.stdout);
    assert!(String::from_utf8_lossy(&t1.stdout).contains("exit 0"));
}

#[test]
fn output_file_matches_stdout() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("apartment.json");
    let args = ["verify", "apartment", "--family", "G", "--order", "3"];
    let direct = run(&args);
    let to_file = run(&[&args[..], &["--output", path.to_str().unwrap()]].concat());
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn malformed_input_exits_64_with_location() {
    let bad = tmp("bad.json", "{\"order\": 2,\n \"coords\": [1, 0,\n");
    let out = run(&["fdeg", "--kac", bad.to_str().unwrap(), "--family", "E", "--rank", "8"]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");

    let unknown = tmp("unknown.json", "{\"order\": 2, \"coords\": [1, 0], \"weight\": 1}");
    let out = run(&["pseudo-levi", "--kac", unknown.to_str().unwrap(), "--family", "B", "--rank", "2"]);
    assert_eq!(out.status.code(), Some(64));

    let wrong_len = tmp("short.json", "[{\"order\": 2, \"coords\": [1, 0, 0]}]");
    let out = run(&["fdeg", "--kac", wrong_len.to_str().unwrap(), "--family", "E", "--rank", "8"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("entry 0"));

    // (1, 0) is a coweight but not a coroot
    let not_in_lattice = tmp("sc.json", "{\"order\": 2, \"coords\": [1, 0]}");
    let out = run(&[
        "pseudo-levi",
        "--kac",
        not_in_lattice.to_str().unwrap(),
        "--family",
        "A",
        "--rank",
        "2",
        "--isogeny",
        "sc",
    ]);
    assert_eq!(out.status.code(), Some(64));

    let form = tmp("form.json", "{\"family\": \"D\", \"rank\": 4, \"inner\": 2}");
    let out = run(&["atlas", "--form", form.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["verify", "lemmas", "--family", "Q"][..],
        &["verify", "lemmas", "--family", "E", "--max-rank", "5"],
        &["build", "--weyl-guard", "0"],
        &["build", "--twist", "4"],
        &["nonsense"],
        &[],
    ] {
        assert_eq!(run(args).status.code(), Some(64), "{args:?}");
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn inner_forms_of_d4_are_not_computed() {
    let form =
        tmp("d4-inner.json", "[{\"family\": \"D\", \"rank\": 4, \"inner\": 1}, {\"family\": \"C\", \"rank\": 3}]");
    let out = run(&["verify", "pinning", "--form", form.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["summary"]["failed"], 0);
    assert!(r["summary"]["not_computed"].as_u64().unwrap() > 0);
    assert_eq!(r["summary"]["verified"], 4);
}

#[test]
fn component_groups_and_pseudo_levis() {
    let out = run(&["component-group", "--family", "B", "--rank", "2", "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let rows = r["results"].as_array().unwrap();
    // SO5 adjoint classes with s^2 = 1: the identity, and the two involution classes
    let labels: Vec<&str> = rows.iter().map(|x| x["pseudo_levi"].as_str().unwrap()).collect();
    assert_eq!(labels, ["B2", "A1+A1", "A1"]);
    let a1a1 = &rows[1];
    assert_eq!(a1a1["order"], 2);

    let out = run(&["pseudo-levi", "--family", "G", "--order", "3", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("A2"));
}

#[test]
fn time_limit_degrades_to_not_computed() {
    let out = run(&["verify", "lemmas", "--family", "E", "--time-limit", "1", "--jobs", "1"]);
    let r = json(&out);
    // types not started in time are reported, never dropped
    assert!(r["summary"]["total"].as_u64().unwrap() >= 6);
    match out.status.code() {
        Some(0) => assert_eq!(r["summary"]["not_computed"], 0),
        Some(2) => assert!(r["summary"]["not_computed"].as_u64().unwrap() > 0),
        other => panic!("unexpected exit {other:?}"),
    }
}
