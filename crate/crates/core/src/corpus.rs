//! Corpus ingestion: documents, sentences, words, fixed-size splits.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::seed::SeedKey;
use crate::{jsonl, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "train-pool")]
    Train,
    #[serde(rename = "test-pool")]
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub id: String,
    pub text: String,
    pub source: Source,
}

/// One segment of a sentence. `span` holds `[start, end)` character offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordToken {
    pub surface: String,
    pub span: (usize, usize),
    pub is_word: bool,
}

/// A string counts as a word when it is non-empty and every character is
/// alphabetic.
pub fn is_word(s: &str) -> bool {
    !s.is_empty() && s.chars().all(char::is_alphabetic)
}

/// Segment text into tokens: split on whitespace, keep maximal runs of
/// alphanumeric characters together, and emit every other character as a
/// token of its own. "co-op" gives `co`, `-`, `op`.
pub fn tokenize_words(text: &str) -> Vec<WordToken> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_alphanumeric() {
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
        } else {
            i += 1;
        }
        let surface: String = chars[start..i].iter().collect();
        out.push(WordToken {
            is_word: is_word(&surface),
            surface,
            span: (start, i),
        });
    }
    out
}

pub fn word_count(text: &str) -> usize {
    tokenize_words(text).iter().filter(|t| t.is_word).count()
}

/// Lowercased abbreviations (without their final period) that never end a
/// sentence.
const ABBREVIATIONS: &[&str] = &[
    "a.m", "adm", "approx", "apr", "aug", "ave", "blvd", "capt", "cf", "cmdr", "co", "col", "corp",
    "dec", "dept", "dr", "e.g", "esp", "est", "feb", "fig", "figs", "ft", "gen", "gov", "hon",
    "i.e", "inc", "jan", "jr", "jul", "jun", "lt", "ltd", "maj", "messrs", "mme", "mr", "mrs",
    "ms", "mt", "nov", "oct", "p.m", "pp", "prof", "rep", "rev", "sen", "sep", "sept", "sgt", "sr",
    "st", "u.k", "u.n", "u.s", "u.s.a", "vol", "vols", "vs",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '}', '\u{2019}', '\u{201d}', '\u{bb}'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '{', '\u{2018}', '\u{201c}', '\u{ab}'];

fn is_abbreviation(token: &str) -> bool {
    let token = token.trim_start_matches(OPENERS);
    let stem = token.strip_suffix('.').unwrap_or(token);
    if stem.is_empty() {
        return false;
    }
    let lower = stem.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // single initials ("J.") and dotted acronyms ("U.S.A.")
    let mut parts = stem.split('.');
    parts.all(|p| {
        let mut cs = p.chars();
        matches!((cs.next(), cs.next()), (Some(c), None) if c.is_alphabetic())
    })
}

/// Split a document into trimmed sentence strings, before any word-count
/// filtering. Boundaries are runs of `.`, `!` or `?` (plus closing quotes or
/// brackets) followed by whitespace or the end of text, unless the run is a
/// single period ending a known abbreviation or an initial, or the next
/// character is lowercase.
pub fn sentence_texts(text: &str) -> Vec<&str> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !matches!(c, '.' | '!' | '?') {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < chars.len() && matches!(chars[i].1, '.' | '!' | '?') {
            i += 1;
        }
        let only_period = i - run_start == 1 && c == '.';
        while i < chars.len() && CLOSERS.contains(&chars[i].1) {
            i += 1;
        }
        let end_byte = chars.get(i).map_or(text.len(), |&(b, _)| b);
        if i < chars.len() && !chars[i].1.is_whitespace() {
            continue;
        }
        let next = chars[i..]
            .iter()
            .map(|&(_, c)| c)
            .find(|c| !c.is_whitespace());
        if next.is_some_and(char::is_lowercase) {
            continue;
        }
        if only_period {
            let run_byte = chars[run_start].0;
            let token_start = text[..run_byte].rfind(char::is_whitespace).map_or(0, |p| {
                p + text[p..].chars().next().map_or(1, char::len_utf8)
            });
            let token = &text[token_start.max(start)..run_byte + 1];
            if is_abbreviation(token) {
                continue;
            }
        }
        let sentence = text[start..end_byte].trim();
        if !sentence.is_empty() {
            out.push(sentence);
        }
        start = end_byte;
    }
    let rest = text[start..].trim();
    if !rest.is_empty() {
        out.push(rest);
    }
    out
}

fn content_hash(text: &str) -> String {
    let normalized = text.split_whitespace().collect::<Vec<_>>().join(" ");
    let digest = Sha256::digest(normalized.as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sentence_id(document: usize, ordinal: usize, text: &str) -> String {
    format!("d{document:06}-s{ordinal:05}-{}", content_hash(text))
}

/// Split one document into sentences, dropping sentences with fewer than two
/// words. Ids combine the document ordinal, the sentence ordinal within the
/// document and a hash of the sentence text.
pub fn split_sentences(document: usize, text: &str, source: Source) -> Vec<Sentence> {
    sentence_texts(text)
        .into_iter()
        .enumerate()
        .filter(|(_, s)| word_count(s) >= 2)
        .map(|(ordinal, s)| Sentence {
            id: sentence_id(document, ordinal, s),
            text: s.to_string(),
            source,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub text: String,
}

#[derive(Deserialize)]
struct JsonDocument {
    text: String,
}

/// Read documents from a `.jsonl` file (`{"id", "text"}` per line) or from
/// plain text, where blank lines separate documents.
pub fn read_documents(path: &Path) -> Result<Vec<Document>> {
    let is_jsonl = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("jsonl"));
    if is_jsonl {
        let docs: Vec<JsonDocument> = jsonl::read(path)?;
        return Ok(docs
            .into_iter()
            .map(|d| Document { text: d.text })
            .collect());
    }
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    let mut current = Vec::new();
    for line in raw.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                docs.push(Document {
                    text: current.join("\n"),
                });
                current.clear();
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        docs.push(Document {
            text: current.join("\n"),
        });
    }
    Ok(docs)
}

/// Seeded 50/50 partition of documents into the fine-tuning and held-out
/// pools. With an odd count the extra document goes to the fine-tuning pool.
pub fn partition_documents(count: usize, seed: u64) -> Vec<Source> {
    let mut order: Vec<usize> = (0..count).collect();
    order.shuffle(&mut SeedKey::derive(seed, &["partition"]).rng());
    let train = count.div_ceil(2);
    let mut sources = vec![Source::Test; count];
    for &doc in &order[..train] {
        sources[doc] = Source::Train;
    }
    sources
}

/// Partition documents, split them into sentences, and return the corpus in
/// canonical (id) order.
pub fn build_corpus(documents: &[Document], seed: u64) -> Vec<Sentence> {
    let sources = partition_documents(documents.len(), seed);
    let mut sentences: Vec<Sentence> = documents
        .par_iter()
        .zip(sources.par_iter())
        .enumerate()
        .flat_map_iter(|(i, (doc, &source))| split_sentences(i, &doc.text, source))
        .collect();
    sentences.sort_by(|a, b| a.id.cmp(&b.id));
    sentences
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SplitSize {
    S,
    M,
    L,
}

impl SplitSize {
    pub const ALL: [SplitSize; 3] = [SplitSize::S, SplitSize::M, SplitSize::L];

    pub fn sentences(self) -> usize {
        match self {
            SplitSize::S => 264,
            SplitSize::M => 2641,
            SplitSize::L => 26415,
        }
    }
}

impl fmt::Display for SplitSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitSize::S => "S",
            SplitSize::M => "M",
            SplitSize::L => "L",
        })
    }
}

impl FromStr for SplitSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "S" | "s" => Ok(SplitSize::S),
            "M" | "m" => Ok(SplitSize::M),
            "L" | "l" => Ok(SplitSize::L),
            other => Err(Error::Invalid(format!(
                "unknown split size {other:?} (expected S, M or L)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataSplit {
    pub name: SplitSize,
    pub seed: u64,
    pub ids: Vec<String>,
}

/// Uniformly sample `size` sentence ids without replacement. The pool is
/// deduplicated and sorted first, so the result depends only on the set of
/// ids and the seed. Output ids are sorted.
pub fn sample_split<'a>(
    pool: impl IntoIterator<Item = &'a str>,
    size: SplitSize,
    seed: u64,
) -> Result<DataSplit> {
    let mut ids: Vec<&str> = pool.into_iter().collect();
    ids.sort_unstable();
    ids.dedup();
    let required = size.sentences();
    if ids.len() < required {
        return Err(Error::PoolTooSmall {
            split: size.to_string(),
            required,
            available: ids.len(),
        });
    }
    let mut rng = SeedKey::derive(seed, &["split", &size.to_string()]).rng();
    let mut chosen: Vec<String> = rand::seq::index::sample(&mut rng, ids.len(), required)
        .into_iter()
        .map(|i| ids[i].to_string())
        .collect();
    chosen.sort();
    Ok(DataSplit {
        name: size,
        seed,
        ids: chosen,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitStats {
    pub sentence_count: usize,
    pub mean_words: f64,
    pub p25: usize,
    pub p50: usize,
    pub p75: usize,
}

/// Nearest-rank percentile of an ascending slice.
fn nearest_rank(sorted: &[usize], pct: usize) -> usize {
    let rank = (pct * sorted.len()).div_ceil(100).max(1);
    sorted[rank - 1]
}

pub fn compute_stats(word_counts: &[usize]) -> Result<SplitStats> {
    if word_counts.is_empty() {
        return Err(Error::Empty(
            "cannot compute statistics of an empty split".into(),
        ));
    }
    let mut sorted = word_counts.to_vec();
    sorted.sort_unstable();
    let total: usize = sorted.iter().sum();
    Ok(SplitStats {
        sentence_count: sorted.len(),
        mean_words: total as f64 / sorted.len() as f64,
        p25: nearest_rank(&sorted, 25),
        p50: nearest_rank(&sorted, 50),
        p75: nearest_rank(&sorted, 75),
    })
}

/// Statistics of a split, looking sentence texts up in `corpus`.
pub fn split_stats(split: &DataSplit, corpus: &[Sentence]) -> Result<SplitStats> {
    let by_id: BTreeMap<&str, &Sentence> = corpus.iter().map(|s| (s.id.as_str(), s)).collect();
    let counts = split
        .ids
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .map(|s| word_count(&s.text))
                .ok_or_else(|| Error::Invalid(format!("split references unknown sentence {id}")))
        })
        .collect::<Result<Vec<_>>>()?;
    compute_stats(&counts)
}
