use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const EVENS: &str = "ep(prefix=[],start=0,period=2,pattern=[0])";
const ODDS: &str = "ep(prefix=[],start=0,period=2,pattern=[1])";
const DOUBLE: &str = "qa(table=[],period=1,incr=2,base=[0])";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omega-lab"))
        .env_remove("OMEGA_LAB_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("omega-lab-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_echoes_the_canonical_value() {
    let o = run(&["eval", "ep(prefix=[1,3],start=4,period=2,pattern=[1])", "--at", "0,1,5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("ep(prefix=[],start=0,period=2,pattern=[1])\n"), "{out}");
    assert!(out.contains("contains(0): false"));
    assert!(out.contains("contains(5): true"));
}

#[test]
fn malformed_input_exits_with_two() {
    let o = run(&["eval", "ep(prefix=[1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column"));
    assert_eq!(run(&["suite", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn failed_claim_exits_with_one() {
    let f = scratch("claim.txt", &format!("claim: filter-base\n[generators]\n{EVENS}\n{ODDS}\n"));
    let o = run(&["classify", path_str(&f)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("claim_holds: false"));

    let f = scratch("ok.txt", &format!("claim: filter-base\n[generators]\n{EVENS}\n"));
    assert_eq!(run(&["classify", path_str(&f)]).status.code(), Some(0));
}

#[test]
fn splitter_witness_verifies() {
    let f = scratch("split.txt", &format!("[generators]\n{EVENS}\n{ODDS}\n"));
    let o = run(&["witness", "split1", path_str(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified"));
}

#[test]
fn glued_evens_and_odds_become_everything() {
    let c = scratch("cover.txt", &format!("[points]\nx: {EVENS}\ny: {ODDS}\n"));
    let o = run(&["cover", "glue", path_str(&c), "--h", DOUBLE]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("x: ep(prefix=[],start=0,period=1,pattern=[0])"), "{out}");
    assert!(out.contains("tags: gamma"));

    let o = run(&["cover", "game", path_str(&c), "--mode", "ufin", "--schedule", DOUBLE]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("gamma"));
}

#[test]
fn json_output_parses() {
    let o = run(&["--format", "json", "eval", EVENS]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn suite_reports_repeat_and_honour_the_seed_variable() {
    let args = ["--cases", "40", "suite", "glue"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let c = Command::new(env!("CARGO_BIN_EXE_omega-lab"))
        .env("OMEGA_LAB_SEED", "42")
        .args(args)
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);

    let d = run(&["--seed", "43", "--cases", "40", "suite", "glue"]);
    assert!(stdout(&d).contains("seed=43"));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let target = std::env::temp_dir().join(format!("omega-lab-out-{}.txt", std::process::id()));
    let o = run(&["--out", target.to_str().unwrap(), "eval", ODDS]);
    assert_eq!(o.status.code(), Some(0));
    let written = fs::read_to_string(&target).unwrap();
    assert!(written.starts_with(ODDS));
    fs::remove_file(target).ok();
}

#[test]
fn generated_values_parse_back() {
    for kind in ["epset", "qafun", "family", "cover", "sequence"] {
        let o = run(&["--cases", "1", "gen", kind]);
        assert_eq!(o.status.code(), Some(0), "gen {kind}");
        let text = stdout(&o);
        assert!(!text.trim().is_empty());
        match kind {
            "epset" | "qafun" => assert_eq!(run(&["eval", text.trim()]).status.code(), Some(0)),
            "family" => {
                let f = scratch("gen-family.txt", &text);
                assert!(run(&["classify", path_str(&f)]).status.code().unwrap() < 2);
            }
            _ => {
                let f = scratch(&format!("gen-{kind}.txt"), &text);
                let args = if kind == "cover" {
                    vec!["cover", "classify", path_str(&f)]
                } else {
                    vec!["cover", "game", path_str(&f), "--mode", "sfin", "--schedule", DOUBLE]
                };
                assert!(run(&args).status.code().unwrap() < 2, "{kind}: {text}");
            }
        }
    }
}
