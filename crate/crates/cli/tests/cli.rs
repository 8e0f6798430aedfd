use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use csm_cli::casefile::CaseFile;
use csm_cli::generate::{generate, Family};
use csm_cli::{run_cases, CaseReport, Outcome};
use csm_core::arrangements::Arrangement;
use serde_json::{json, Value};
use tempfile::TempDir;

fn csm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csm")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    fs::write(dir.join(name), v.to_string()).unwrap();
    name.to_string()
}

fn reports(dir: &Path, name: &str) -> Vec<Value> {
    fs::read_to_string(dir.join(name)).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

/// `h^{n-d}(1+h)^{d+1}` in `Z[h]/(h^{n+1})`, as `[P^i]` coefficients.
fn flat_csm(n: usize, d: usize) -> Vec<i64> {
    let mut poly = vec![0i64; n + 1];
    poly[n - d] = 1;
    for _ in 0..=d {
        for i in (1..=n).rev() {
            poly[i] += poly[i - 1];
        }
    }
    poly.into_iter().rev().collect()
}

fn mul(n: usize, a: &[i64], b: &[i64]) -> Vec<i64> {
    // Homology coefficients: [P^i]·[P^j] = [P^{i+j-n}].
    let mut out = vec![0; n + 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j >= n {
                out[i + j - n] += x * y;
            }
        }
    }
    out
}

fn line(coeffs: [&str; 3]) -> Value {
    json!({"model": {"n": 2, "hyperplanes": [coeffs]}})
}

fn two_line_case(kind: &str, a: [&str; 3], b: [&str; 3]) -> Value {
    json!({"id": format!("{kind}-lines"), "kind": kind, "first": line(a), "second": line(b)})
}

#[test]
fn transversal_lines_intersection_exits_zero() {
    let dir = TempDir::new().unwrap();
    let file = write(
        dir.path(),
        "c.json",
        &json!({"cases": [two_line_case("intersection-formula", ["1", "0", "0"], ["0", "1", "0"])]}),
    );
    let out = csm(&["run", &file, "--json", "r.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = reports(dir.path(), "r.jsonl");
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["equal"], json!(true));
    assert_eq!(r[0]["tag"], json!("thm-1.2-ambient"));
    assert_eq!(r[0]["hypothesis"], json!({"splayed": true, "noncharacteristic": true}));
    let line = flat_csm(2, 1);
    let point = flat_csm(2, 0);
    let c_tp2 = flat_csm(2, 2);
    assert_eq!(r[0]["lhs"]["coeffs"], json!(mul(2, &line, &line)));
    assert_eq!(r[0]["rhs"]["coeffs"], json!(mul(2, &c_tp2, &point)));
}

#[test]
fn empty_casefile_gives_empty_report() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "c.json", &json!({"cases": []}));
    let out = csm(&["run", &file, "--json", "r.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(dir.path().join("r.jsonl")).unwrap(), "");
}

#[test]
fn same_line_index_case_is_refused() {
    let dir = TempDir::new().unwrap();
    let file = write(
        dir.path(),
        "c.json",
        &json!({"cases": [two_line_case("index-formula", ["1", "1", "0"], ["2", "2", "0"])]}),
    );
    let out = csm(&["run", &file, "--json", "r.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = reports(dir.path(), "r.jsonl");
    assert_eq!(r[0]["outcome"], json!("refused"));
    assert_eq!(r[0]["tag"], json!("cor-1.5"));
    assert_eq!(r[0]["hypothesis"]["noncharacteristic"], json!(false));
    assert!(r[0]["witness"].is_object(), "{}", r[0]);
}

#[test]
fn same_line_intersection_as_negative_control() {
    let dir = TempDir::new().unwrap();
    let mut case = two_line_case("intersection-formula", ["0", "0", "1"], ["0", "0", "1"]);
    let line = flat_csm(2, 1);
    let lhs = mul(2, &line, &line);
    let rhs = mul(2, &flat_csm(2, 2), &line);
    assert_ne!(lhs, rhs);
    case["expect"] = json!({"equal": false, "lhs": lhs, "rhs": rhs});
    let file = write(dir.path(), "c.json", &json!({"cases": [case.clone()]}));
    let out = csm(&["run", &file, "--json", "r.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(reports(dir.path(), "r.jsonl")[0]["hypothesis"]["splayed"], json!(false));

    case.as_object_mut().unwrap().remove("expect");
    let file = write(dir.path(), "d.json", &json!({"cases": [case]}));
    let out = csm(&["run", &file, "--json", "s.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(reports(dir.path(), "s.jsonl")[0]["outcome"], json!("refused"));
}

#[test]
fn mismatched_expectation_fails() {
    let dir = TempDir::new().unwrap();
    let mut case = json!({"id": "line", "kind": "csm-compute", "first": line(["1", "2", "3"])});
    case["expect"] = json!({"class": [0, 0, 0]});
    let file = write(dir.path(), "c.json", &json!({"cases": [case.clone()]}));
    let out = csm(&["run", &file, "--json", "r.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let r = reports(dir.path(), "r.jsonl");
    assert_eq!(r[0]["outcome"], json!("fail"));
    assert_eq!(r[0]["class"]["coeffs"], json!(flat_csm(2, 1)));

    case["expect"] = json!({"class": flat_csm(2, 1)});
    let file = write(dir.path(), "d.json", &json!({"cases": [case]}));
    assert_eq!(csm(&["run", &file], dir.path()).status.code(), Some(0));
}

#[test]
fn parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.json"), "{not json").unwrap();
    assert_eq!(csm(&["run", "bad.json"], dir.path()).status.code(), Some(2));
    assert_eq!(csm(&["run", "missing.json"], dir.path()).status.code(), Some(2));
    let unknown =
        write(dir.path(), "u.json", &json!({"cases": [two_line_case("frobnicate", ["1", "0", "0"], ["0", "1", "0"])]}));
    assert_eq!(csm(&["run", &unknown], dir.path()).status.code(), Some(2));
    let lonely = write(
        dir.path(),
        "l.json",
        &json!({"cases": [{"id": "x", "kind": "index-formula", "first": line(["1", "0", "0"])}]}),
    );
    assert_eq!(csm(&["run", &lonely], dir.path()).status.code(), Some(2));
    let rational = write(
        dir.path(),
        "r.json",
        &json!({"cases": [{"id": "x", "kind": "csm-compute", "first": line(["1/0", "0", "0"])}]}),
    );
    assert_eq!(csm(&["run", &rational], dir.path()).status.code(), Some(2));
    let range = json!({"cases": [{"id": "x", "kind": "csm-compute",
        "first": {"model": {"n": 2, "hyperplanes": [["1", "0", "0"]]}, "function": [{"meet": [3], "coeff": 1}]}}]});
    let range = write(dir.path(), "g.json", &range);
    assert_eq!(csm(&["run", &range], dir.path()).status.code(), Some(2));
}

#[test]
fn generate_and_run_are_deterministic() {
    let dir = TempDir::new().unwrap();
    for (family, extra) in
        [("generic-arrangement-pair", vec!["-k", "2"]), ("splayed-coordinate-pair", vec![]), ("flag-of-flats", vec![])]
    {
        let mut texts = Vec::new();
        for (i, jobs) in ["1", "4"].into_iter().enumerate() {
            let case_file = format!("{family}-{i}.json");
            let report = format!("{family}-{i}.jsonl");
            let mut args = vec!["generate", family, "--n", "3", "--seed", "11", "-o", &case_file];
            args.extend(&extra);
            assert_eq!(csm(&args, dir.path()).status.code(), Some(0));
            let out = csm(&["run", &case_file, "--jobs", jobs, "--json", &report], dir.path());
            assert_eq!(out.status.code(), Some(0), "{family}: {}", String::from_utf8_lossy(&out.stdout));
            texts.push((fs::read(dir.path().join(&case_file)).unwrap(), fs::read(dir.path().join(&report)).unwrap()));
        }
        assert_eq!(texts[0], texts[1], "{family}");
    }
}

#[test]
fn report_order_follows_casefile_order() {
    let file = generate(Family::SplayedCoordinatePair, 2, 0, 5).unwrap();
    let mut cases = file.cases.clone();
    cases.extend(generate(Family::FlagOfFlats, 2, 0, 5).unwrap().cases);
    cases.reverse();
    let file = CaseFile { cases };
    let reports: Vec<CaseReport> = run_cases(&file, 3).unwrap();
    let ids: Vec<&str> = reports.iter().map(|r| r.case_id.as_str()).collect();
    let expected: Vec<&str> = file.cases.iter().map(|c| c.id.as_str()).collect();
    assert_eq!(ids, expected);
    assert!(reports.iter().all(|r| r.outcome == Outcome::Pass));
}

fn arrangement(side: &csm_cli::casefile::Side) -> Arrangement {
    let m = &side.model;
    Arrangement::from_json(&json!({"n": m.n, "hyperplanes": m.hyperplanes}).to_string()).unwrap()
}

#[test]
fn splayed_family_uses_disjoint_variables() {
    let file = generate(Family::SplayedCoordinatePair, 3, 0, 1).unwrap();
    let case = &file.cases[0];
    let (a, b) = (arrangement(&case.first), arrangement(case.second.as_ref().unwrap()));
    assert!(a.variables().is_disjoint(&b.variables()));
    let r = &run_cases(&CaseFile { cases: vec![case.clone()] }, 1).unwrap()[0];
    assert_eq!(r.holds, Some(true));
    assert_eq!(r.witness.as_ref().unwrap()["kind"], json!("coordinate-split"));
}

#[test]
fn generic_family_gives_lines_in_general_position() {
    let file = generate(Family::GenericArrangementPair, 2, 2, 7).unwrap();
    let case = &file.cases[0];
    let (a, b) = (arrangement(&case.first), arrangement(case.second.as_ref().unwrap()));
    assert_eq!((a.len(), b.len()), (2, 2));
    let union = Arrangement::new(2, a.hyperplanes().iter().chain(b.hyperplanes()).cloned().collect()).unwrap();
    assert!(union.is_generic());
}

#[test]
fn flag_family_is_nested() {
    let file = generate(Family::FlagOfFlats, 3, 0, 0).unwrap();
    let flats = file.cases[0].first.model.flats.as_ref().unwrap();
    let dims: Vec<usize> = flats.iter().map(|rows| 3 - rows.len()).collect();
    assert_eq!(dims, vec![0, 1, 2]);
    // Each flat's equations include those of the next one up.
    for pair in flats.windows(2) {
        assert!(pair[1].iter().all(|row| pair[0].contains(row)));
    }
    for (k, case) in file.cases.iter().take(4).enumerate() {
        assert_eq!(case.expect.as_ref().unwrap().class, Some(json!(flat_csm(3, k))));
    }
}

#[test]
fn vrr_case_with_embedding() {
    let dir = TempDir::new().unwrap();
    // The line x = y inside the plane, pulled back to P^1 along a generic embedding.
    let case = json!({"id": "embed", "kind": "vrr", "first": line(["1", "-1", "0"]),
        "map": {"embedding": [["1", "0", "1"], ["0", "1", "2"]]}});
    let file = write(dir.path(), "c.json", &json!({"cases": [case]}));
    let out = csm(&["run", &file, "--json", "r.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = reports(dir.path(), "r.jsonl");
    assert_eq!(r[0]["tag"], json!("thm-1.4"));
    assert_eq!(r[0]["corollary"]["form"], json!("embedding"));
    assert_eq!(r[0]["corollary"]["equal"], json!(true));
}
