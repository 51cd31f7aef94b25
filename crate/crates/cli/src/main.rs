//! `lingvar`: one subcommand per pipeline stage. Every run prints a one-line
//! JSON summary on stdout; outputs go to the `--out` directory.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use lingvar::corpus::{self, DataSplit, Document, Sentence, Source, SplitSize};
use lingvar::dataset::{self, Composition, TEST_SAMPLE_SIZE};
use lingvar::interventions::{
    kind_label, transform_sentences, ExternalRewriter, InterventionKind, Resources, DEFAULT_DROPOUT,
};
use lingvar::jsonl;
use lingvar::lexicons::{
    AffixLexicon, DerivationColumns, InflectionColumns, InflectionLexicon, SenseGraph,
};
use lingvar::metrics::{emit_report, PredictionRecord, ReportFormat, ScoreReport};
use lingvar::wordpiece::Vocab;

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(
    name = "lingvar",
    version,
    about = "Synthetic linguistic variation for masked-LM evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat key = value file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Intervention: IPA, Shift, Reg, Char, Pig, -End, Multi, Affix, Hyp, Ant.
    #[arg(long, global = true, allow_hyphen_values = true)]
    kind: Option<String>,
    /// mixed or full.
    #[arg(long, global = true)]
    composition: Option<String>,
    /// Split size: S, M or L.
    #[arg(long, global = true)]
    size: Option<String>,
    /// Dropout probability of the Reg intervention.
    #[arg(long, global = true)]
    dropout: Option<f64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Corpus file or directory of files (plain text or JSONL).
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Sentence JSONL to transform instead of a split.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    vocab: Option<PathBuf>,
    #[arg(long, global = true)]
    inflections: Option<PathBuf>,
    #[arg(long, global = true)]
    derivations: Option<PathBuf>,
    #[arg(long, global = true)]
    wordnet: Option<PathBuf>,
    #[arg(long, global = true)]
    affix_cycle: Option<PathBuf>,
    /// Command line of an external sentence rewriter used for Multi.
    #[arg(long, global = true)]
    multi_plugin: Option<String>,
    #[arg(long, global = true)]
    plugin_timeout_ms: Option<u64>,
    #[arg(long, global = true)]
    sample_size: Option<usize>,
    #[arg(long, global = true)]
    predictions: Option<PathBuf>,
    #[arg(long, global = true)]
    gold: Option<PathBuf>,
    /// Model tag recorded in score reports.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Data-size tag recorded in score reports.
    #[arg(long, global = true)]
    data: Option<String>,
    /// Score file(s) to report on, comma-separated.
    #[arg(long, global = true)]
    scores: Option<String>,
    /// tsv or json.
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Segment the corpus, partition documents, sample a split.
    Split,
    /// Sentence and word-count statistics of a split.
    Stats,
    /// Apply one intervention to a split or sentence file.
    Intervene,
    /// Build a masked fine-tuning set.
    Mask,
    /// Build the eligibility-filtered test set.
    Testset,
    /// Score predictions against a masked dataset.
    Score,
    /// Normalize scores by the baseline and write a report.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Split => "split",
            Command::Stats => "stats",
            Command::Intervene => "intervene",
            Command::Mask => "mask",
            Command::Testset => "testset",
            Command::Score => "score",
            Command::Report => "report",
        }
    }
}

impl Cli {
    fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let paths = [
            ("out", &self.out),
            ("corpus", &self.corpus),
            ("input", &self.input),
            ("vocab", &self.vocab),
            ("inflections", &self.inflections),
            ("derivations", &self.derivations),
            ("wordnet", &self.wordnet),
            ("affix_cycle", &self.affix_cycle),
            ("predictions", &self.predictions),
            ("gold", &self.gold),
        ];
        for (key, value) in paths {
            if let Some(v) = value {
                cfg.set(key, v.display().to_string());
            }
        }
        let strings = [
            ("kind", &self.kind),
            ("composition", &self.composition),
            ("size", &self.size),
            ("multi_plugin", &self.multi_plugin),
            ("model", &self.model),
            ("data", &self.data),
            ("scores", &self.scores),
            ("format", &self.format),
        ];
        for (key, value) in strings {
            if let Some(v) = value {
                cfg.set(key, v.clone());
            }
        }
        let numbers = [
            ("seed", self.seed.map(|v| v.to_string())),
            ("dropout", self.dropout.map(|v| v.to_string())),
            ("workers", self.workers.map(|v| v.to_string())),
            (
                "plugin_timeout_ms",
                self.plugin_timeout_ms.map(|v| v.to_string()),
            ),
            ("sample_size", self.sample_size.map(|v| v.to_string())),
        ];
        for (key, value) in numbers {
            if let Some(v) = value {
                cfg.set(key, v);
            }
        }
        Ok(cfg)
    }
}

/// Settings shared by every stage.
struct Run {
    cfg: RunConfig,
    seed: u64,
    out: PathBuf,
}

impl Run {
    fn new(cfg: RunConfig) -> Result<Self> {
        let seed = cfg.get_parsed("seed")?.unwrap_or(0);
        let out = PathBuf::from(cfg.get("out").unwrap_or("."));
        std::fs::create_dir_all(&out)
            .with_context(|| format!("creating output directory {}", out.display()))?;
        Ok(Run { cfg, seed, out })
    }

    fn size(&self) -> Result<SplitSize> {
        Ok(self.cfg.get_parsed("size")?.unwrap_or(SplitSize::S))
    }

    fn kind(&self) -> Result<InterventionKind> {
        Ok(self.cfg.require("kind")?.parse()?)
    }

    fn composition(&self) -> Result<Composition> {
        Ok(self
            .cfg
            .get_parsed("composition")?
            .unwrap_or(Composition::Full))
    }

    fn dropout(&self) -> Result<f64> {
        let p = self.cfg.get_parsed("dropout")?.unwrap_or(DEFAULT_DROPOUT);
        if !(0.0..=1.0).contains(&p) {
            bail!("dropout must lie in [0, 1], got {p}");
        }
        Ok(p)
    }

    fn meta(&self, stage: &str, extra: Value) -> Value {
        let mut meta = json!({ "stage": stage, "seed": self.seed });
        if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
            m.extend(e);
        }
        meta
    }

    fn sentences_path(&self) -> PathBuf {
        self.out.join("sentences.jsonl")
    }

    fn split_path(&self, size: SplitSize) -> PathBuf {
        self.out.join(format!("split-{size}.json"))
    }

    fn read_corpus(&self) -> Result<Vec<Sentence>> {
        let path = self.sentences_path();
        jsonl::read(&path)
            .with_context(|| format!("reading {} (run `lingvar split` first)", path.display()))
    }

    fn read_split(&self, size: SplitSize) -> Result<DataSplit> {
        let path = self.split_path(size);
        let raw = std::fs::read_to_string(&path).with_context(|| {
            format!(
                "reading {} (run `lingvar split --size {size}` first)",
                path.display()
            )
        })?;
        Ok(serde_json::from_str(&raw)?)
    }

    /// Load what `kinds` need. Everything else stays unloaded.
    fn resources(&self, kinds: &[InterventionKind]) -> Result<Resources> {
        let mut res = Resources {
            dropout: self.dropout()?,
            ..Resources::default()
        };
        res.vocab = Some(match self.cfg.existing_path("vocab")? {
            Some(p) => Vocab::load(&p)?,
            None => Vocab::bert_base_cased(),
        });
        if kinds.contains(&InterventionKind::End) {
            let path = self.cfg.require_path("inflections")?;
            res.inflections = Some(InflectionLexicon::load(&path, InflectionColumns::default())?.0);
        }
        if kinds.contains(&InterventionKind::Affix) {
            let path = self.cfg.require_path("derivations")?;
            let cycle = self.cfg.existing_path("affix_cycle")?;
            let (lex, _) =
                AffixLexicon::load(&path, DerivationColumns::morphynet(), cycle.as_deref())?;
            res.affixes = Some(lex);
        }
        if kinds.contains(&InterventionKind::Hyp) || kinds.contains(&InterventionKind::Ant) {
            res.senses = Some(SenseGraph::load(&self.cfg.require_path("wordnet")?)?);
        }
        if let Some(cmd) = self.cfg.get("multi_plugin") {
            let timeout = self.cfg.get_parsed("plugin_timeout_ms")?.unwrap_or(60_000);
            res.multi = Box::new(ExternalRewriter::from_command_line(
                cmd,
                Duration::from_millis(timeout),
            )?);
        }
        Ok(res)
    }
}

fn slug(kind: InterventionKind) -> String {
    kind.name().trim_start_matches('-').to_lowercase()
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let body = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn read_documents(path: &Path) -> Result<Vec<Document>> {
    if !path.is_dir() {
        return Ok(corpus::read_documents(path)?);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .with_context(|| format!("listing {}", path.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| {
        p.is_file()
            && !p
                .file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with('.'))
    });
    files.sort();
    let mut docs = Vec::new();
    for f in files {
        docs.extend(corpus::read_documents(&f)?);
    }
    Ok(docs)
}

fn cmd_split(run: &Run) -> Result<Value> {
    let path = run.cfg.require_path("corpus")?;
    let documents = read_documents(&path)?;
    if documents.is_empty() {
        bail!("{}: no documents", path.display());
    }
    let sentences = corpus::build_corpus(&documents, run.seed);
    let size = run.size()?;
    let train_pool = sentences.iter().filter(|s| s.source == Source::Train);
    let split = corpus::sample_split(train_pool.map(|s| s.id.as_str()), size, run.seed)?;
    let meta = run.meta("split", json!({}));
    jsonl::write(&run.sentences_path(), Some(&meta), &sentences)?;
    write_json(&run.split_path(size), &split)?;
    let pool = |src| sentences.iter().filter(|s| s.source == src).count();
    Ok(json!({
        "documents": documents.len(),
        "sentences": sentences.len(),
        "train_pool": pool(Source::Train),
        "test_pool": pool(Source::Test),
        "size": size.to_string(),
        "split": split.ids.len(),
    }))
}

fn cmd_stats(run: &Run) -> Result<Value> {
    let size = run.size()?;
    let stats = corpus::split_stats(&run.read_split(size)?, &run.read_corpus()?)?;
    write_json(&run.out.join(format!("stats-{size}.json")), &stats)?;
    Ok(json!({ "size": size.to_string(), "stats": stats }))
}

#[derive(Deserialize)]
struct InputSentence {
    id: String,
    text: String,
    #[serde(default)]
    source: Option<Source>,
}

fn cmd_intervene(run: &Run) -> Result<Value> {
    let kind = run.kind()?;
    let (sentences, label) = match run.cfg.existing_path("input")? {
        Some(path) => {
            let records: Vec<InputSentence> = jsonl::read(&path)?;
            let sentences: Vec<Sentence> = records
                .into_iter()
                .map(|r| Sentence {
                    id: r.id,
                    text: r.text,
                    source: r.source.unwrap_or(Source::Train),
                })
                .collect();
            let stem = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("input")
                .to_string();
            (sentences, stem)
        }
        None => {
            let size = run.size()?;
            let split = run.read_split(size)?;
            let corpus = run.read_corpus()?;
            let wanted: std::collections::BTreeSet<&str> =
                split.ids.iter().map(String::as_str).collect();
            let sentences = corpus
                .into_iter()
                .filter(|s| wanted.contains(s.id.as_str()))
                .collect();
            (sentences, size.to_string())
        }
    };
    let mut sentences = sentences;
    sentences.sort_by(|a, b| a.id.cmp(&b.id));
    let res = run.resources(&[kind])?;
    let transformed = transform_sentences(Some(kind), &sentences, &res, run.seed)?;
    let records: Vec<_> = transformed
        .iter()
        .map(|t| t.record(res.vocab.as_ref()))
        .collect();
    let path = run
        .out
        .join(format!("intervene-{label}-{}.jsonl", slug(kind)));
    let meta = run.meta(
        "intervene",
        json!({ "kind": kind.name(), "dropout": res.dropout }),
    );
    jsonl::write(&path, Some(&meta), &records)?;
    Ok(json!({
        "kind": kind.name(),
        "sentences": records.len(),
        "changed": transformed.iter().filter(|t| t.changed()).count(),
        "output": path,
    }))
}

fn cmd_mask(run: &Run) -> Result<Value> {
    let kind = run.kind()?;
    let composition = run.composition()?;
    let size = run.size()?;
    let split = run.read_split(size)?;
    let corpus = run.read_corpus()?;
    let res = run.resources(&[kind])?;
    let set = dataset::build_training_set(&split, &corpus, kind, composition, &res, run.seed)?;
    let path = run
        .out
        .join(format!("train-{size}-{}-{composition}.jsonl", slug(kind)));
    let meta = run.meta(
        "mask",
        json!({
            "kind": kind.name(),
            "composition": composition.name(),
            "size": size.to_string(),
            "dropout": res.dropout,
        }),
    );
    dataset::emit_dataset(&set.instances, &path, Some(&meta))?;
    Ok(json!({
        "kind": kind.name(),
        "composition": composition.name(),
        "size": size.to_string(),
        "instances": set.instances.len(),
        "transformed": set.transformed.len(),
        "output": path,
    }))
}

fn cmd_testset(run: &Run) -> Result<Value> {
    let corpus = run.read_corpus()?;
    let pool: Vec<Sentence> = corpus
        .into_iter()
        .filter(|s| s.source == Source::Test)
        .collect();
    let sample_size = run
        .cfg
        .get_parsed("sample_size")?
        .unwrap_or(TEST_SAMPLE_SIZE);
    let res = run.resources(&InterventionKind::ALL)?;
    let set = dataset::build_test_set(&pool, sample_size, &res, run.seed)?;
    let path = run.out.join("test.jsonl");
    let meta = run.meta(
        "testset",
        json!({ "sample_size": sample_size, "dropout": res.dropout }),
    );
    dataset::emit_dataset(&set.instances, &path, Some(&meta))?;
    let mut per_kind = serde_json::Map::new();
    for kind in std::iter::once(None).chain(InterventionKind::ALL.map(Some)) {
        let n = set.instances.iter().filter(|i| i.kind == kind).count();
        per_kind.insert(kind_label(kind).to_string(), json!(n));
    }
    Ok(json!({
        "pool": pool.len(),
        "sampled": set.sampled,
        "retained": set.retained.len(),
        "instances": set.instances.len(),
        "per_kind": per_kind,
        "multi_dropped": set.multi_dropped.len(),
        "output": path,
    }))
}

fn cmd_score(run: &Run) -> Result<Value> {
    let preds_path = run.cfg.require_path("predictions")?;
    let gold_path = run
        .cfg
        .existing_path("gold")?
        .unwrap_or_else(|| run.out.join("test.jsonl"));
    let preds: Vec<PredictionRecord> = jsonl::read(&preds_path)?;
    let gold = dataset::read_dataset(&gold_path)
        .with_context(|| format!("reading gold dataset {}", gold_path.display()))?;
    let model = run.cfg.require("model")?;
    let data = run.cfg.require("data")?;
    let composition = run.composition()?;
    let path = run.out.join("scores.tsv");
    let mut report = if path.exists() {
        ScoreReport::load(&path)?
    } else {
        ScoreReport::default()
    };
    let mut fresh = ScoreReport::default();
    fresh.add_scores(model, data, composition, &preds, &gold)?;
    let cells = fresh.cells.len();
    report.merge(fresh);
    emit_report(&report, ReportFormat::Tsv, &path)?;
    Ok(json!({
        "model": model,
        "data": data,
        "composition": composition.name(),
        "instances": gold.len(),
        "cells": cells,
        "output": path,
    }))
}

fn cmd_report(run: &Run) -> Result<Value> {
    let inputs: Vec<PathBuf> = match run.cfg.get("scores") {
        Some(list) => list.split(',').map(|s| PathBuf::from(s.trim())).collect(),
        None => vec![run.out.join("scores.tsv")],
    };
    let mut report = ScoreReport::default();
    for p in &inputs {
        report.merge(ScoreReport::load(p).with_context(|| format!("reading {}", p.display()))?);
    }
    let format: ReportFormat = run.cfg.get_parsed("format")?.unwrap_or(ReportFormat::Tsv);
    let normalized = report.normalize_relative()?;
    let path = run.out.join(match format {
        ReportFormat::Tsv => "report.tsv",
        ReportFormat::Json => "report.json",
    });
    emit_report(&normalized, format, &path)?;
    Ok(json!({ "cells": normalized.cells.len(), "output": path }))
}

fn run(cli: &Cli) -> Result<Value> {
    let cfg = cli.run_config()?;
    let run = Run::new(cfg)?;
    if let Some(workers) = run.cfg.get_parsed::<usize>("workers")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("configuring worker pool")?;
    }
    let mut summary = match cli.command {
        Command::Split => cmd_split(&run),
        Command::Stats => cmd_stats(&run),
        Command::Intervene => cmd_intervene(&run),
        Command::Mask => cmd_mask(&run),
        Command::Testset => cmd_testset(&run),
        Command::Score => cmd_score(&run),
        Command::Report => cmd_report(&run),
    }?;
    if let Value::Object(m) = &mut summary {
        m.insert("stage".into(), json!(cli.command.name()));
        m.insert("seed".into(), json!(run.seed));
    }
    Ok(summary)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lingvar {}: {e:#}", cli.command.name());
            ExitCode::FAILURE
        }
    }
}
