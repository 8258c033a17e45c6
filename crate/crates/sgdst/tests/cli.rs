use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn sgdst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgdst")).args(args).current_dir(root()).env_remove("SGDST_SIDECAR").output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SCHEMA: &str = "data/synthetic/schema.json";
const TRAIN: &str = "data/synthetic/train";

#[test]
fn missing_path_is_a_usage_error_naming_the_flag() {
    let out = sgdst(&["predict", "--schema", "nope.json", "--dialogues", TRAIN, "--models", "oracle", "--out", "/dev/null", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--schema"), "{}", stderr(&out));
}

#[test]
fn missing_seed_is_a_usage_error() {
    let out = sgdst(&["train", "mrc", "--schema", SCHEMA, "--dialogues", TRAIN, "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn ranker_needs_a_lexicon() {
    let out = sgdst(&["train", "wd", "--schema", SCHEMA, "--dialogues", TRAIN, "--out", "/dev/null", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--lexicon"));
}

#[test]
fn misaligned_evaluation_is_a_runtime_failure() {
    let out = sgdst(&["evaluate", "--gold", "data/synthetic/oracle", "--pred", "data/synthetic/train", "--schema", SCHEMA]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("alignment"), "{}", stderr(&out));
}

#[test]
fn config_is_echoed_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("p.json");
    let out = sgdst(&["predict", "--schema", SCHEMA, "--dialogues", "data/synthetic/reset", "--models", "oracle", "--out", s(&pred), "--seed", "4"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let line = stderr(&out).lines().find_map(|l| l.strip_prefix("config ").map(String::from)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(v["seed"], 4);
    assert_eq!(v["command"], "predict");
}

#[test]
fn evaluate_prints_table_and_key_values() {
    let out = sgdst(&["evaluate", "--gold", "data/metrics/gold.json", "--pred", "data/metrics/pred.json", "--schema", SCHEMA]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("joint_goal_accuracy=0.400000"));
    assert!(text.contains("active_intent_accuracy=0.800000"));
    assert!(text.lines().next().unwrap().starts_with("group"));
}

#[test]
fn training_twice_gives_identical_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("mrc{i}.json"));
        let out = sgdst(&["train", "mrc", "--schema", SCHEMA, "--dialogues", TRAIN, "--out", s(&path), "--seed", "9", "--epochs", "3"]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert_eq!(stderr(&out).lines().filter(|l| l.starts_with("epoch")).count(), 3);
        bytes.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

/// The committed bundle is what the documented commands produce.
#[test]
fn committed_models_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for task in ["mrc", "wd", "intent", "reqslot"] {
        let path = dir.path().join(format!("{task}.json"));
        let mut args = vec!["train", task, "--schema", SCHEMA, "--dialogues", TRAIN, "--out", s(&path), "--seed", "7", "--epochs", "30"];
        if task == "wd" {
            args.extend(["--lexicon", "data/lexicon/lexicon.tsv"]);
        }
        let out = sgdst(&args);
        assert!(out.status.success(), "{}", stderr(&out));
        let committed = std::fs::read(root().join(format!("data/models/{task}.json"))).unwrap();
        assert!(std::fs::read(&path).unwrap() == committed, "{task} checkpoint differs from data/models");
    }
}

#[test]
fn lexicon_command_reproduces_committed_lexicon() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lex.tsv");
    let out = sgdst(&[
        "augment-lexicon",
        "--schema",
        SCHEMA,
        "--providers",
        "synonym_api:synonym-api:data/lexicon/synonym_api.tsv,backtrans:back-translation:data/lexicon/backtrans.tsv",
        "--k",
        "10",
        "--out",
        s(&path),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), std::fs::read_to_string(root().join("data/lexicon/lexicon.tsv")).unwrap());
    assert_eq!(
        std::fs::read_to_string(root().join("data/models/lexicon.tsv")).unwrap(),
        std::fs::read_to_string(root().join("data/lexicon/lexicon.tsv")).unwrap()
    );
}

#[test]
fn ingest_writes_one_line_per_example() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mrc.jsonl");
    let out = sgdst(&["ingest", "--schema", SCHEMA, "--dialogues", "data/synthetic/reset", "--task", "mrc", "--out", s(&path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let n: usize = stdout.trim().rsplit('=').next().unwrap().parse().unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), n);
    for line in text.lines() {
        serde_json::from_str::<sgdst_core::corpus::MrcExample>(line).unwrap();
    }
}

#[test]
fn repl_session_matches_golden_transcript() {
    let input = std::fs::File::open(root().join("data/repl/session.txt")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sgdst"))
        .args(["repl", "--schema", SCHEMA, "--rules", "data/synthetic/reset_rules.json"])
        .current_dir(root())
        .env_remove("SGDST_SIDECAR")
        .stdin(input)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let got = String::from_utf8(out.stdout).unwrap();
    let golden = root().join("data/repl/transcript.txt");
    if std::env::var_os("SGDST_REGENERATE").is_some_and(|v| v == "1") {
        std::fs::write(&golden, &got).unwrap();
    }
    assert_eq!(got, std::fs::read_to_string(golden).unwrap());
}

#[test]
fn repl_quits_cleanly() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_sgdst"))
        .args(["repl", "--schema", SCHEMA])
        .current_dir(root())
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::null())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(b":quit\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}
