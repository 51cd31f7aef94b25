//! Runs the built binary against temporary directories.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

#[path = "../../../core/tests/common/mod.rs"]
pub mod common;

pub const BIN: &str = env!("CARGO_BIN_EXE_lingvar");

pub struct Outcome {
    pub ok: bool,
    pub summary: serde_json::Value,
    pub stderr: String,
}

impl From<Output> for Outcome {
    fn from(out: Output) -> Self {
        let stdout = String::from_utf8_lossy(&out.stdout);
        Outcome {
            ok: out.status.success(),
            summary: serde_json::from_str(stdout.trim()).unwrap_or(serde_json::Value::Null),
            stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        }
    }
}

/// `lingvar <args>` with the lexicon root pointing at the fixture lexicons.
pub fn lingvar(args: &[&str]) -> Outcome {
    Command::new(BIN)
        .args(args)
        .env("LINGVAR_LEXICON_ROOT", common::lexicon_dir())
        .output()
        .expect("spawning lingvar")
        .into()
}

/// `lingvar <args>` without a lexicon root.
pub fn lingvar_bare(args: &[&str]) -> Outcome {
    Command::new(BIN)
        .args(args)
        .env_remove("LINGVAR_LEXICON_ROOT")
        .output()
        .expect("spawning lingvar")
        .into()
}

/// Writes the 1,000-sentence synthetic corpus into `dir`.
pub fn write_corpus(dir: &Path) -> PathBuf {
    let path = dir.join("corpus.txt");
    std::fs::write(&path, common::synthetic_corpus_text(100, 10)).unwrap();
    path
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Relative path to file contents, for every file under `root`.
pub fn tree(root: &Path) -> std::collections::BTreeMap<PathBuf, Vec<u8>> {
    let mut out = std::collections::BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_path_buf();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

/// Perfect predictions for every instance of a masked dataset.
pub fn perfect_predictions(gold: &Path, out: &Path) {
    let instances = lingvar::dataset::read_dataset(gold).unwrap();
    let records: Vec<_> = instances
        .iter()
        .map(|i| lingvar::metrics::PredictionRecord {
            id: i.id.clone(),
            candidates: i
                .gold_tokens
                .iter()
                .map(|g| {
                    let mut c = vec![g.clone()];
                    c.extend(["the", "a", "of", "and"].map(String::from));
                    c
                })
                .collect(),
        })
        .collect();
    lingvar::jsonl::write(out, None, &records).unwrap();
}

/// Runs every stage into `out`, scoring perfect predictions.
pub fn full_pipeline(corpus: &Path, out: &Path, seed: &str) -> Vec<Outcome> {
    let base = ["--corpus", s(corpus), "--out", s(out), "--seed", seed];
    let with = |cmd: &str, extra: &[&str]| {
        let mut args = vec![cmd];
        args.extend(base);
        args.extend(extra);
        lingvar(&args)
    };
    let mut runs = vec![
        with("split", &["--size", "S"]),
        with("stats", &["--size", "S"]),
        with("intervene", &["--kind", "Reg"]),
        with("mask", &["--kind", "-End", "--composition", "mixed"]),
        with("testset", &[]),
    ];
    let preds = out.join("predictions.jsonl");
    perfect_predictions(&out.join("test.jsonl"), &preds);
    runs.push(with(
        "score",
        &["--predictions", s(&preds), "--model", "BERT", "--data", "S"],
    ));
    runs.push(with("report", &["--format", "json"]));
    runs
}
