#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use support::corpora::mixed_corpus;

fn lexforge(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexforge"))
        .current_dir(dir)
        .env("LEXFORGE_LOG", "warn")
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = lexforge(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_slice(&fs::read(path.as_ref()).unwrap()).unwrap()
}

fn write_corpus(path: &Path, lines: usize) {
    fs::write(path, mixed_corpus(3, lines).join("\n") + "\n").unwrap();
}

#[test]
fn corpus_and_tokenizer_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write_corpus(&d.join("raw.txt"), 300);

    ok(d, &["clean", "raw.txt", "-o", "clean.txt", "--rejects", "rejects.jsonl", "--report", "clean.json"]);
    let clean = json(d.join("clean.json"));
    let rejected: u64 = clean["rejected_by_reason"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(clean["total"], 300);
    assert_eq!(clean["kept"].as_u64().unwrap() + rejected, 300);
    assert_eq!(fs::read_to_string(d.join("rejects.jsonl")).unwrap().lines().count() as u64, rejected);

    ok(d, &["dedup", "clean.txt", "-o", "dedup.txt", "--report", "dedup.json"]);
    let dedup = json(d.join("dedup.json"));
    assert!(dedup["duplicates_removed"].as_u64().unwrap() > 0);
    let unique = fs::read_to_string(d.join("dedup.txt")).unwrap();
    assert_eq!(unique.lines().count() as u64, dedup["kept"].as_u64().unwrap());

    ok(d, &["train-tokenizer", "dedup.txt", "-o", "tok", "--vocab-size", "400", "--special-token", "<s>"]);
    for file in ["vocab.json", "merges.txt", "tokenizer_meta.json"] {
        assert!(d.join("tok").join(file).is_file(), "{file}");
    }

    ok(d, &["encode", "--tokenizer", "tok", "dedup.txt", "-o", "ids.jsonl", "--report", "encode.json"]);
    let encoded = json(d.join("encode.json"));
    let ids = fs::read_to_string(d.join("ids.jsonl")).unwrap();
    let total: usize = ids.lines().map(|l| serde_json::from_str::<Vec<u32>>(l).unwrap().len()).sum();
    assert_eq!(encoded["tokens"].as_u64().unwrap(), total as u64);

    ok(d, &["pack", "--input", "ids.jsonl", "-o", "blocks.jsonl", "--block-size", "64", "--report", "pack.json"]);
    let pack = json(d.join("pack.json"));
    assert_eq!(pack["blocks"].as_u64().unwrap(), total as u64 / 64);
    assert_eq!(
        pack["packed_tokens"].as_u64().unwrap() + pack["dropped_tokens"].as_u64().unwrap(),
        total as u64
    );

    let stats = ok(d, &["tokenize-stats", "--tokenizer", "tok", "dedup.txt"]);
    let stats: Value = serde_json::from_slice(&stats.stdout).unwrap();
    assert_eq!(stats["tokens"].as_u64().unwrap(), total as u64);
    assert!(stats["tokens_display"].as_str().unwrap().starts_with(&total.to_string()[..1]));

    ok(d, &["train-tokenizer", "raw.txt", "-o", "ws", "--vocab-size", "300", "--pretokenizer", "whitespace"]);
    let out = lexforge(d, &["merge-tokenizer", "--base", "tok", "--addon", "ws", "-o", "merged"]);
    assert!(!out.status.success());
    ok(d, &["train-tokenizer", "raw.txt", "-o", "addon", "--vocab-size", "300"]);
    ok(d, &["merge-tokenizer", "--base", "tok", "--addon", "addon", "-o", "merged", "--report", "merge.json"]);
    let merge = json(d.join("merge.json"));
    assert!(merge["final_size"].as_u64().unwrap() >= 400);
}

#[test]
fn dataset_and_scoring_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let labels = ["POSITIVE", "NEGATIVE", "NEUTRAL"];
    let mut csv = String::from("text,sentiment\n");
    for i in 0..60 {
        csv.push_str(&format!("වාක්‍ය {i},{}\n", labels[i % 3].to_lowercase()));
    }
    fs::write(d.join("sent.csv"), csv).unwrap();

    ok(d, &["prepare", "--task", "sentiment", "--input", "sent.csv", "--out-dir", "splits", "--seed", "3"]);
    let report = json(d.join("splits/prepare_report.json"));
    assert_eq!(report["split_sizes"]["train"], 48);
    assert_eq!(report["seed"], 3);

    ok(d, &["render-prompts", "--task", "sentiment", "--split", "splits/train.jsonl", "-o", "prompts.jsonl"]);
    let prompts = fs::read_to_string(d.join("prompts.jsonl")).unwrap();
    assert_eq!(prompts.lines().count(), 48);
    assert!(prompts.contains("### Response:"));

    // Gold scored against itself.
    let gold = fs::read_to_string(d.join("splits/test.jsonl")).unwrap();
    let mut pred = String::new();
    for line in gold.lines() {
        let ex: Value = serde_json::from_str(line).unwrap();
        pred.push_str(&serde_json::json!({"id": ex["id"], "raw": ex["label"]}).to_string());
        pred.push('\n');
    }
    fs::write(d.join("pred.jsonl"), pred).unwrap();
    let out = ok(d, &["score", "--task", "sentiment", "--gold", "splits/test.jsonl", "--pred", "pred.jsonl", "--report", "score.json"]);
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("sentiment |   100.000 |   100.000 |   100.000"), "{table}");
    assert_eq!(json(d.join("score.json"))["invalid_count"], 0);

    fs::write(d.join("empty.jsonl"), "").unwrap();
    let out = ok(d, &["score", "--task", "sentiment", "--gold", "splits/test.jsonl", "--pred", "empty.jsonl", "--lenient"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("|     0.000 |     0.000 |     0.000"));
}

#[test]
fn bad_arguments_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lexforge(tmp.path(), &["dedup", "missing.txt", "-o", "x.txt"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.txt"));
    let out = lexforge(tmp.path(), &["prepare", "--task", "poetry", "--input", "a", "--out-dir", "b"]);
    assert!(!out.status.success());
}

#[test]
fn empty_manifest_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("m.toml"), "version = \"1\"\n").unwrap();
    ok(tmp.path(), &["run", "m.toml"]);
    let run = json(tmp.path().join("reports/run_report.json"));
    assert_eq!(run["status"], "ok");
    assert_eq!(run["stages"].as_array().unwrap().len(), 0);
}

#[test]
fn missing_input_fails_before_any_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write_corpus(&d.join("raw.txt"), 20);
    fs::write(
        d.join("m.toml"),
        r#"
version = "1"

[[stage]]
kind = "clean"
input = ["raw.txt"]
output = "out/clean.txt"

[[stage]]
kind = "dedup"
input = ["out/nowhere.txt"]
output = "out/dedup.txt"
"#,
    )
    .unwrap();
    let out = lexforge(d, &["run", "m.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere.txt"));
    assert!(!d.join("out").exists());
    assert!(!d.join("reports").exists());
}

#[test]
fn input_written_by_later_stage_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("m.toml"),
        r#"
version = "1"

[[stage]]
kind = "dedup"
input = ["out/clean.txt"]
output = "out/dedup.txt"

[[stage]]
kind = "clean"
input = ["out/dedup.txt"]
output = "out/clean.txt"
"#,
    )
    .unwrap();
    let out = lexforge(d, &["run", "m.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_stage_stops_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write_corpus(&d.join("raw.txt"), 50);
    fs::create_dir(d.join("not-a-tokenizer")).unwrap();
    fs::write(
        d.join("m.toml"),
        r#"
version = "1"

[[stage]]
kind = "clean"
input = ["raw.txt"]
output = "out/clean.txt"

[[stage]]
kind = "encode"
tokenizer = "not-a-tokenizer"
input = ["out/clean.txt"]
output = "out/ids.jsonl"

[[stage]]
kind = "pack"
input = "out/ids.jsonl"
output = "out/blocks.jsonl"
"#,
    )
    .unwrap();
    let out = lexforge(d, &["run", "m.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(d.join("out/clean.txt").exists());
    assert!(!d.join("out/blocks.jsonl").exists());
    let run = json(d.join("reports/run_report.json"));
    assert_eq!(run["status"], "failed");
    assert_eq!(run["stages"].as_array().unwrap().len(), 1);
    assert!(run["error"].as_str().unwrap().starts_with("stage 1 (encode)"));
}

#[test]
fn run_totals_are_sums_of_stage_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write_corpus(&d.join("raw.txt"), 100);
    fs::write(
        d.join("m.toml"),
        r#"
version = "1"
report_dir = "rep"

[[stage]]
kind = "clean"
input = ["raw.txt"]
output = "out/clean.txt"

[[stage]]
kind = "dedup"
input = ["out/clean.txt"]
output = "out/dedup.txt"

[[stage]]
kind = "train-tokenizer"
input = ["out/dedup.txt"]
output = "out/tok"
vocab_size = 300
"#,
    )
    .unwrap();
    ok(d, &["run", "m.toml"]);
    let clean = json(d.join("rep/00-clean.json"));
    let dedup = json(d.join("rep/01-dedup.json"));
    let train = json(d.join("rep/02-train-tokenizer.json"));
    let run = json(d.join("rep/run_report.json"));
    let totals = &run["totals"];
    assert_eq!(totals["lines_read"], clean["total"]);
    assert_eq!(totals["lines_read"], 100);
    assert_eq!(totals["lines_kept"], clean["kept"]);
    assert_eq!(
        totals["duplicates_removed"].as_u64().unwrap(),
        clean["duplicates_removed"].as_u64().unwrap() + dedup["duplicates_removed"].as_u64().unwrap()
    );
    assert_eq!(totals["vocab_sizes"], serde_json::json!([train["vocab_size"]]));
    let recorded: Vec<&Value> = run["stages"].as_array().unwrap().iter().map(|s| &s["report"]).collect();
    assert_eq!(recorded, [&clean, &dedup, &train]);
}

#[test]
fn seed_flag_overrides_manifest_and_stage_seeds() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let mut csv = String::from("comments,labels\n");
    for i in 0..30 {
        csv.push_str(&format!("ලිපිය {i},{}\n", ["ACADEMIC", "BLOG", "NEWS"][i % 3]));
    }
    fs::write(d.join("ws.csv"), csv).unwrap();
    fs::write(
        d.join("m.toml"),
        r#"
version = "1"
seed = 5

[[stage]]
kind = "prepare"
task = "writing_style"
input = "ws.csv"
out_dir = "splits"
seed = 6
"#,
    )
    .unwrap();
    ok(d, &["run", "m.toml"]);
    assert_eq!(json(d.join("splits/prepare_report.json"))["seed"], 6);
    ok(d, &["run", "m.toml", "--seed", "9"]);
    assert_eq!(json(d.join("splits/prepare_report.json"))["seed"], 9);
    assert_eq!(json(d.join("reports/run_report.json"))["seed"], 9);
}
