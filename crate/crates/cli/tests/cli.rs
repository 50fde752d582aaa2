use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use ts_groups::word::{square_free_word, Word};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ts-groups"));
    c.env_remove("TS_GROUPS_BUDGET_MB");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = run(dir, args);
    assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

// naive: any factor u u with |u| >= 1
fn has_square(s: &[u8]) -> bool {
    (0..s.len()).any(|i| (1..=(s.len() - i) / 2).any(|p| s[i..i + p] == s[i + p..i + 2 * p]))
}

#[test]
fn thue_sequence_is_square_free() {
    let dir = TempDir::new().unwrap();
    let out = ok(dir.path(), &["seq", "thue", "--n", "100"]);
    let word = out.trim();
    assert_eq!(word.len(), 100);
    assert!(!has_square(word.as_bytes()));
    assert_eq!(word.chars().collect::<std::collections::BTreeSet<_>>().len(), 3);
}

#[test]
fn xi_file_has_the_required_length() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["xi", "construct", "--seed", "1"]);
    let text = fs::read_to_string(dir.path().join("xi.word")).unwrap();
    let xi: Word = text.trim().parse().unwrap();
    assert!(xi.len() > 10_000 && xi.len() < 10_006, "{}", xi.len());
    assert!(xi.is_cyclically_reduced());
    ok(dir.path(), &["xi", "construct", "--seed", "1", "--out", "again.word"]);
    assert_eq!(fs::read_to_string(dir.path().join("again.word")).unwrap(), text);
}

#[test]
fn unit_square_tour() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("box2x2.words"), "0,0\n1,0\n0,1\n1,1\n").unwrap();
    let out = ok(
        dir.path(),
        &["tsp", "--group", "abelian:2", "--set", "box2x2.words", "--exact"],
    );
    assert_eq!(out.lines().next(), Some("L = 4"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("box.words"), "0,0\n1,0\n0,1\n1,1\n").unwrap();
    // usage
    assert_eq!(code(&run(d, &["no-such-command"])), 2);
    assert_eq!(code(&run(d, &["tsp", "--group", "nope:2", "--set", "box.words"])), 2);
    assert_eq!(
        code(&run(d, &["tsp", "--group", "abelian:2", "--set", "missing.words"])),
        2
    );
    assert_eq!(
        code(&run(
            d,
            &["lemma5", "verify", "--xi", "a b", "--xs", "box.words", "--eps", "+x"]
        )),
        2
    );
    // resource limit
    let o = bin()
        .current_dir(d)
        .env("TS_GROUPS_BUDGET_MB", "1")
        .args(["property", "test", "--family", "P", "--r", "12", "--xi", "a b a b b"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    // precondition: no element has a xi-neighbour
    assert_eq!(
        code(&run(
            d,
            &["tsp", "--group", "abelian:2", "--set", "box.words", "--xi", "5,5"]
        )),
        4
    );
    assert_eq!(
        code(&run(
            d,
            &["tsp", "--group", "abelian:2", "--set", "box.words", "--xi", "0,0"]
        )),
        4
    );
}

/// The forest instance of the core tests: `B` and `B xi` for a long
/// square-free `xi`.
fn write_forest_inputs(d: &Path) -> String {
    let xi = square_free_word(61, 2).unwrap();
    let mut lines = Vec::new();
    for b in ["", "a", "b", "a b", "a a", "b a"] {
        let b: Word = b.parse().unwrap();
        lines.push(b.to_string());
        lines.push(b.mul(&xi).to_string());
    }
    let lines: Vec<String> = lines
        .iter()
        .map(|l| if l.is_empty() { "1".into() } else { l.clone() })
        .collect();
    fs::write(d.join("set.words"), lines.join("\n") + "\n").unwrap();
    fs::write(d.join("xi.word"), format!("{xi}\n")).unwrap();
    xi.to_string()
}

#[test]
fn forest_build_verify_and_tamper() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write_forest_inputs(d);
    let args = [
        "forest",
        "build",
        "--mode",
        "P",
        "--r",
        "30",
        "--set",
        "set.words",
        "--xi",
        "xi.word",
    ];
    ok(d, &[&args[..], &["--out", "forest.json"]].concat());
    let doc = json(&d.join("forest.json"));
    assert_eq!(doc["schema"], 1);
    let forest = &doc["result"]["forest"];
    assert_eq!(forest["elements"].as_array().unwrap().len(), 12);
    assert!(forest["census"].is_object());
    assert!(forest["trees"].as_array().is_some_and(|t| !t.is_empty()));
    let report = ok(d, &["forest", "verify", "forest.json"]);
    assert!(
        report.contains("vertex-distance") && !report.contains("FAIL"),
        "{report}"
    );

    let mut bad = doc.clone();
    let members = &mut bad["result"]["forest"]["trees"][0]["vertices"][0]["members"];
    let first = members[0].clone();
    members.as_array_mut().unwrap().push(first);
    fs::write(d.join("bad.json"), bad.to_string()).unwrap();
    let o = run(d, &["forest", "verify", "bad.json"]);
    assert_eq!(code(&o), 5);
    assert!(stdout(&o).contains("disjoint-within-trees  FAIL"));
}

#[test]
fn p10_forest_with_conflicts_is_reported() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    write_forest_inputs(d);
    let args = [
        "forest",
        "build",
        "--mode",
        "p10",
        "--r",
        "30",
        "--set",
        "set.words",
        "--xi",
        "xi.word",
    ];
    ok(d, &[&args[..], &["--out", "forest.json"]].concat());
    let doc = json(&d.join("forest.json"));
    let conflicts = doc["result"]["forest"]["conflicts"].as_array().unwrap();
    let checks = doc["result"]["verification"]["checks"].as_array().unwrap();
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.is_empty() || !conflicts.is_empty(), "{failed:?}");
    // the standalone verifier agrees with the embedded verification
    let o = run(d, &["forest", "verify", "forest.json"]);
    assert_eq!(code(&o) == 0, failed.is_empty());
    for name in failed {
        assert!(stdout(&o).contains(&format!("{name:<22} FAIL")));
    }
}

#[test]
fn witnesses_replay() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    fs::write(d.join("box.words"), "0,0\n1,0\n0,1\n1,1\n").unwrap();
    write_forest_inputs(d);
    fs::write(d.join("xs.words"), "a b\nb a a\nB\n").unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec![
            "property",
            "test",
            "--family",
            "P'",
            "--r",
            "4",
            "--group",
            "abelian:2",
            "--xi",
            "1,0",
        ],
        vec![
            "property",
            "test",
            "--family",
            "P10",
            "--r",
            "6",
            "--xi",
            "a b a b b",
            "--budget",
            "k_max=3",
        ],
        vec!["gnp", "--n", "2", "--p", "2", "--m", "2"],
        vec!["gnp", "--n", "2", "--p", "2", "--m", "2", "--us", "1,2,-1,-2"],
        vec!["tsp", "--group", "abelian:2", "--set", "box.words", "--exact"],
        vec![
            "forest",
            "build",
            "--mode",
            "P",
            "--r",
            "30",
            "--set",
            "set.words",
            "--xi",
            "xi.word",
        ],
        vec!["seq", "thue", "--n", "50"],
        vec![
            "xi",
            "construct",
            "--seed",
            "3",
            "--desk-scale",
            "--out",
            "xid.word",
            "--report",
            "report.json",
        ],
    ];
    for args in runs {
        let mut full = args.clone();
        if !args.contains(&"--report") {
            full.extend(["--out", "report.json"]);
        }
        ok(d, &full);
        let doc = json(&d.join("report.json"));
        assert_eq!(doc["ok"], true, "{args:?}");
        let out = ok(d, &["--replay", "report.json"]);
        assert!(out.contains("pass") && !out.contains("FAIL"), "{args:?}: {out}");
        assert_eq!(ok(d, &["replay", "report.json"]), out);
    }
    // the lemma5 report needs the xi just written
    ok(
        d,
        &[
            "lemma5",
            "verify",
            "--xi",
            "xid.word",
            "--xs",
            "xs.words",
            "--eps",
            "+-+",
            "--desk-scale",
            "--out",
            "l5.json",
        ],
    );
    assert!(!ok(d, &["replay", "l5.json"]).contains("FAIL"));
}

#[test]
fn tampered_witness_fails_replay() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "property",
            "test",
            "--family",
            "P'",
            "--r",
            "4",
            "--group",
            "abelian:2",
            "--xi",
            "1,0",
            "--out",
            "p.json",
        ],
    );
    let mut doc = json(&d.join("p.json"));
    let x = &mut doc["result"]["counterexample"]["xs"][0];
    *x = Value::String("9,9".into());
    fs::write(d.join("p.json"), doc.to_string()).unwrap();
    assert_eq!(code(&run(d, &["replay", "p.json"])), 5);
}

fn without_run(mut v: Value) -> String {
    v.as_object_mut().unwrap().remove("run");
    serde_json::to_string_pretty(&v).unwrap()
}

#[test]
fn identical_configs_give_identical_reports() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let args = [
        "experiment",
        "ts-lambda",
        "--xi",
        "a b a B",
        "--lambda",
        "2",
        "--samples",
        "12",
        "--seed",
        "7",
    ];
    ok(d, &[&args[..], &["--out", "one.json"]].concat());
    ok(d, &[&args[..], &["--out", "two.json", "--jobs", "1"]].concat());
    let (one, two) = (json(&d.join("one.json")), json(&d.join("two.json")));
    assert_eq!(one["seed"], 7);
    assert_eq!(one["version"], env!("CARGO_PKG_VERSION"));
    assert!(one["run"]["timings"].as_array().is_some_and(|t| !t.is_empty()));
    assert_eq!(without_run(one), without_run(two));
    assert!(ok(d, &["replay", "one.json"]).contains("pass"));

    let csv = ok(d, &[&args[..], &["--format", "csv"]].concat());
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,size,L,L_kind,Lprime,ratio"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn folner_box_and_labeling() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let out = ok(d, &["folner", "--sides", "4,4", "--xi", "1,0"]);
    assert!(out.contains("|F| = 16"), "{out}");
    let tsv = ok(d, &["tree", "label", "--mode", "3letter", "--depth", "3"]);
    assert_eq!(tsv.lines().count(), 3 + 6 + 12);
    ok(
        d,
        &[
            "tree",
            "label",
            "--mode",
            "adversarial",
            "--seed",
            "5",
            "--depth",
            "3",
            "--out",
            "t.json",
        ],
    );
    let doc = json(&d.join("t.json"));
    assert!(doc["result"]["max_power_order_on_paths"].as_u64().unwrap() >= 1);
}

#[test]
fn desk_scale_pipeline_and_fault() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "burnside",
            "pipeline",
            "--samples",
            "5",
            "--desk-scale",
            "--out",
            "bp.json",
        ],
    );
    assert_eq!(json(&d.join("bp.json"))["result"]["passed"], true);
    let o = run(
        d,
        &[
            "burnside",
            "pipeline",
            "--samples",
            "3",
            "--desk-scale",
            "--corrupt-ends",
        ],
    );
    assert_eq!(code(&o), 5);
    assert!(stdout(&o).contains("FAIL"));
}
