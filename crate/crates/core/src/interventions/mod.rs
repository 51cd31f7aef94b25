//! The ten variation interventions.
//!
//! Word-level kinds transform every alphabetic word of a sentence and leave
//! other tokens untouched. `Reg` and `Char` change only how words are split
//! into subwords, so their output is a pre-tokenized sentence. `Multi`
//! rewrites whole sentences.

mod multi;
pub mod plugin;
mod spelling;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::casing::restore_case;
use crate::corpus::{is_word, tokenize_words, Sentence, WordToken};
use crate::lexicons::{first_antonym, first_hyponym, AffixLexicon, InflectionLexicon, SenseGraph};
use crate::seed::SeedKey;
use crate::wordpiece::{char_pieces, tokenize_word, tokenize_word_dropout, SubwordSeq, Vocab};
use crate::{Error, Result};

pub use multi::{multi_lite_text, MultiLite, Rewrite, SentenceRewriter};
pub use plugin::ExternalRewriter;
pub use spelling::{ipa, pig, shift};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InterventionKind {
    #[serde(rename = "IPA")]
    Ipa,
    Shift,
    Reg,
    Char,
    Pig,
    #[serde(rename = "-End")]
    End,
    Multi,
    Affix,
    Hyp,
    Ant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Spelling,
    Tokenization,
    Sentence,
}

impl InterventionKind {
    /// Report column order.
    pub const ALL: [InterventionKind; 10] = [
        InterventionKind::Ipa,
        InterventionKind::Shift,
        InterventionKind::Reg,
        InterventionKind::Char,
        InterventionKind::Pig,
        InterventionKind::End,
        InterventionKind::Multi,
        InterventionKind::Affix,
        InterventionKind::Hyp,
        InterventionKind::Ant,
    ];

    pub const WORD_LEVEL: [InterventionKind; 9] = [
        InterventionKind::Ipa,
        InterventionKind::Shift,
        InterventionKind::Reg,
        InterventionKind::Char,
        InterventionKind::Pig,
        InterventionKind::End,
        InterventionKind::Affix,
        InterventionKind::Hyp,
        InterventionKind::Ant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InterventionKind::Ipa => "IPA",
            InterventionKind::Shift => "Shift",
            InterventionKind::Reg => "Reg",
            InterventionKind::Char => "Char",
            InterventionKind::Pig => "Pig",
            InterventionKind::End => "-End",
            InterventionKind::Multi => "Multi",
            InterventionKind::Affix => "Affix",
            InterventionKind::Hyp => "Hyp",
            InterventionKind::Ant => "Ant",
        }
    }

    pub fn level(self) -> Level {
        match self {
            InterventionKind::Reg | InterventionKind::Char => Level::Tokenization,
            InterventionKind::Multi => Level::Sentence,
            _ => Level::Spelling,
        }
    }

    pub fn is_word_level(self) -> bool {
        self != InterventionKind::Multi
    }
}

impl fmt::Display for InterventionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InterventionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_lowercase();
        let kind = match lower.trim_start_matches(['-', '\u{2212}']) {
            "ipa" => InterventionKind::Ipa,
            "shift" => InterventionKind::Shift,
            "reg" => InterventionKind::Reg,
            "char" => InterventionKind::Char,
            "pig" => InterventionKind::Pig,
            "end" => InterventionKind::End,
            "multi" => InterventionKind::Multi,
            "affix" => InterventionKind::Affix,
            "hyp" => InterventionKind::Hyp,
            "ant" => InterventionKind::Ant,
            _ => return Err(Error::UnknownKind(s.to_string())),
        };
        Ok(kind)
    }
}

/// Label of an optional kind; `None` is the untransformed baseline.
pub fn kind_label(kind: Option<InterventionKind>) -> &'static str {
    kind.map_or("None", InterventionKind::name)
}

/// Parse a kind label, accepting "None" for the baseline.
pub fn parse_kind_label(s: &str) -> Result<Option<InterventionKind>> {
    if s.trim().eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

/// Serde adapter writing an optional kind as its label.
pub mod label {
    use super::{kind_label, parse_kind_label, InterventionKind};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        kind: &Option<InterventionKind>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.serialize_str(kind_label(*kind))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<InterventionKind>, D::Error> {
        let label = String::deserialize(d)?;
        parse_kind_label(&label).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Output {
    Surface(String),
    Pieces(SubwordSeq),
    Sentence(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterventionResult {
    pub output: Output,
    pub changed: bool,
}

impl InterventionResult {
    pub(crate) fn spelling(input: &str, output: String) -> Self {
        InterventionResult {
            changed: output != input,
            output: Output::Surface(output),
        }
    }

    fn unchanged(input: &str) -> Self {
        Self::spelling(input, input.to_string())
    }

    pub fn surface(&self) -> Option<&str> {
        match &self.output {
            Output::Surface(s) | Output::Sentence(s) => Some(s),
            Output::Pieces(_) => None,
        }
    }

    pub fn pieces(&self) -> Option<&SubwordSeq> {
        match &self.output {
            Output::Pieces(p) => Some(p),
            _ => None,
        }
    }
}

/// One token per character; changed when the word has more than one.
pub fn char_split(word: &str) -> InterventionResult {
    InterventionResult {
        changed: word.chars().count() > 1,
        output: Output::Pieces(char_pieces(word)),
    }
}

/// MaxMatch-Dropout tokenization; changed when it differs from the plain
/// greedy tokenization.
pub fn reg_split(word: &str, vocab: &Vocab, p: f64, key: &SeedKey) -> InterventionResult {
    let pieces = tokenize_word_dropout(word, vocab, p, key);
    InterventionResult {
        changed: pieces != tokenize_word(word, vocab),
        output: Output::Pieces(pieces),
    }
}

/// Lexicon replacements keep the word a single alphabetic token.
fn replace_with(word: &str, replacement: Option<&str>) -> InterventionResult {
    match replacement {
        Some(r) if is_word(r) => InterventionResult::spelling(word, restore_case(word, r)),
        _ => InterventionResult::unchanged(word),
    }
}

pub fn drop_inflection(word: &str, lex: &InflectionLexicon) -> InterventionResult {
    replace_with(word, lex.lemma(word))
}

pub fn cycle_affix(word: &str, lex: &AffixLexicon) -> InterventionResult {
    replace_with(word, lex.cycled(word).as_deref())
}

pub fn hyponym_sub(word: &str, graph: &SenseGraph) -> InterventionResult {
    replace_with(word, first_hyponym(graph, &word.to_lowercase()).as_deref())
}

pub fn antonym_sub(word: &str, graph: &SenseGraph) -> InterventionResult {
    replace_with(word, first_antonym(graph, &word.to_lowercase()).as_deref())
}

pub fn multi_lite(sentence: &Sentence) -> InterventionResult {
    let r = multi_lite_text(&sentence.text);
    InterventionResult {
        output: Output::Sentence(r.text),
        changed: r.changed,
    }
}

pub const DEFAULT_DROPOUT: f64 = 0.5;

/// Everything the interventions may consult. Kinds fail with
/// [`Error::MissingResource`] when what they need is absent.
pub struct Resources {
    pub vocab: Option<Vocab>,
    pub inflections: Option<InflectionLexicon>,
    pub affixes: Option<AffixLexicon>,
    pub senses: Option<SenseGraph>,
    /// Dropout probability of the `Reg` kind.
    pub dropout: f64,
    pub multi: Box<dyn SentenceRewriter>,
}

impl Default for Resources {
    fn default() -> Self {
        Resources {
            vocab: None,
            inflections: None,
            affixes: None,
            senses: None,
            dropout: DEFAULT_DROPOUT,
            multi: Box::new(MultiLite),
        }
    }
}

impl fmt::Debug for Resources {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Resources")
            .field("vocab", &self.vocab.as_ref().map(Vocab::len))
            .field(
                "inflections",
                &self.inflections.as_ref().map(InflectionLexicon::len),
            )
            .field("affixes", &self.affixes.as_ref().map(AffixLexicon::len))
            .field("senses", &self.senses.as_ref().map(SenseGraph::word_count))
            .field("dropout", &self.dropout)
            .finish_non_exhaustive()
    }
}

fn need<'a, T>(r: &'a Option<T>, what: &'static str, kind: InterventionKind) -> Result<&'a T> {
    r.as_ref().ok_or(Error::MissingResource {
        what,
        kind: kind.to_string(),
    })
}

impl Resources {
    pub fn vocab_for(&self, kind: InterventionKind) -> Result<&Vocab> {
        need(&self.vocab, "vocabulary", kind)
    }

    /// Fail early when `kind` cannot run with these resources.
    pub fn check(&self, kind: InterventionKind) -> Result<()> {
        match kind {
            InterventionKind::Reg | InterventionKind::Char => self.vocab_for(kind).map(drop),
            InterventionKind::End => need(&self.inflections, "inflection lexicon", kind).map(drop),
            InterventionKind::Affix => need(&self.affixes, "derivation lexicon", kind).map(drop),
            InterventionKind::Hyp | InterventionKind::Ant => {
                need(&self.senses, "WordNet", kind).map(drop)
            }
            _ => Ok(()),
        }
    }
}

/// Key of the random stream behind one word's dropout tokenization.
pub fn word_key(
    seed: u64,
    sentence_id: &str,
    word_index: usize,
    kind: InterventionKind,
) -> SeedKey {
    SeedKey::derive(
        seed,
        &["dropout", sentence_id, &word_index.to_string(), kind.name()],
    )
}

/// Apply a word-level kind to one word.
pub fn apply_word(
    kind: InterventionKind,
    word: &str,
    res: &Resources,
    key: impl FnOnce() -> SeedKey,
) -> Result<InterventionResult> {
    Ok(match kind {
        InterventionKind::Ipa => ipa(word),
        InterventionKind::Shift => shift(word),
        InterventionKind::Pig => pig(word),
        InterventionKind::Char => char_split(word),
        InterventionKind::Reg => reg_split(word, res.vocab_for(kind)?, res.dropout, &key()),
        InterventionKind::End => {
            drop_inflection(word, need(&res.inflections, "inflection lexicon", kind)?)
        }
        InterventionKind::Affix => {
            cycle_affix(word, need(&res.affixes, "derivation lexicon", kind)?)
        }
        InterventionKind::Hyp => hyponym_sub(word, need(&res.senses, "WordNet", kind)?),
        InterventionKind::Ant => antonym_sub(word, need(&res.senses, "WordNet", kind)?),
        InterventionKind::Multi => {
            return Err(Error::Invalid(
                "Multi is a sentence-level intervention".into(),
            ))
        }
    })
}

/// Would `kind` change this word? Used by the test-set filter: `Reg` and
/// `Char` count any word longer than one character, since dropout can
/// always split it.
pub fn word_is_modified(kind: InterventionKind, word: &str, res: &Resources) -> Result<bool> {
    match kind {
        InterventionKind::Reg | InterventionKind::Char => Ok(word.chars().count() > 1),
        _ => apply_word(kind, word, res, || SeedKey::derive(0, &[])).map(|r| r.changed),
    }
}

/// A sentence after an intervention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformedSentence {
    pub id: String,
    pub kind: Option<InterventionKind>,
    pub text: String,
    /// Segmentation of `text`.
    pub tokens: Vec<WordToken>,
    /// Subword pieces per token, for `Reg` and `Char`.
    pub pieces: Option<Vec<SubwordSeq>>,
    /// Changed flag per word (tokens with `is_word`), by word ordinal.
    pub word_changed: Vec<bool>,
}

impl TransformedSentence {
    pub fn identity(sentence: &Sentence) -> Self {
        let tokens = tokenize_words(&sentence.text);
        let words = tokens.iter().filter(|t| t.is_word).count();
        TransformedSentence {
            id: sentence.id.clone(),
            kind: None,
            text: sentence.text.clone(),
            tokens,
            pieces: None,
            word_changed: vec![false; words],
        }
    }

    pub fn changed(&self) -> bool {
        self.word_changed.iter().any(|&c| c)
    }

    pub fn changed_words(&self) -> Vec<usize> {
        self.word_changed
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| c.then_some(i))
            .collect()
    }

    /// Token indices of the words, by word ordinal.
    pub fn word_positions(&self) -> Vec<usize> {
        self.tokens
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.is_word.then_some(i))
            .collect()
    }

    pub fn words(&self) -> Vec<&str> {
        self.tokens
            .iter()
            .filter(|t| t.is_word)
            .map(|t| t.surface.as_str())
            .collect()
    }

    /// Subword tokens of the whole sentence plus, per word ordinal, the
    /// range of that word's tokens.
    pub fn subwords(&self, vocab: &Vocab) -> (Vec<String>, Vec<std::ops::Range<usize>>) {
        let mut tokens = Vec::new();
        let mut ranges = Vec::new();
        for (i, tok) in self.tokens.iter().enumerate() {
            let start = tokens.len();
            match &self.pieces {
                Some(pieces) => tokens.extend(pieces[i].tokens.iter().cloned()),
                None => tokens.extend(tokenize_word(&tok.surface, vocab).tokens),
            }
            if tok.is_word {
                ranges.push(start..tokens.len());
            }
        }
        (tokens, ranges)
    }

    pub fn record(&self, vocab: Option<&Vocab>) -> TransformedRecord {
        let tokens = match (&self.pieces, vocab) {
            (Some(_), Some(v)) => Some(self.subwords(v).0),
            (Some(pieces), None) => Some(pieces.iter().flat_map(|p| p.tokens.clone()).collect()),
            _ => None,
        };
        TransformedRecord {
            id: self.id.clone(),
            kind: kind_label(self.kind).to_string(),
            text: tokens.is_none().then(|| self.text.clone()),
            tokens,
            changed_words: self.changed_words(),
        }
    }
}

/// One line of a transformed-corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformedRecord {
    pub id: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tokens: Option<Vec<String>>,
    pub changed_words: Vec<usize>,
}

fn apply_word_level(
    kind: InterventionKind,
    sentence: &Sentence,
    res: &Resources,
    seed: u64,
) -> Result<TransformedSentence> {
    let original = tokenize_words(&sentence.text);
    let chars: Vec<char> = sentence.text.chars().collect();
    let mut text = String::with_capacity(sentence.text.len());
    let mut tokens = Vec::with_capacity(original.len());
    let mut pieces = Vec::new();
    let mut word_changed = Vec::new();
    let mut cursor = 0;
    let mut len = 0;
    let mut ordinal = 0;
    for tok in &original {
        let gap = &chars[cursor..tok.span.0];
        text.extend(gap);
        len += gap.len();
        cursor = tok.span.1;
        let (surface, piece) = if tok.is_word {
            let result = apply_word(kind, &tok.surface, res, || {
                word_key(seed, &sentence.id, ordinal, kind)
            })?;
            word_changed.push(result.changed);
            ordinal += 1;
            match result.output {
                Output::Surface(s) => (s, None),
                Output::Pieces(p) => (tok.surface.clone(), Some(p)),
                Output::Sentence(_) => unreachable!("word-level output"),
            }
        } else {
            let piece = match kind.level() {
                Level::Tokenization => Some(tokenize_word(&tok.surface, res.vocab_for(kind)?)),
                _ => None,
            };
            (tok.surface.clone(), piece)
        };
        let width = surface.chars().count();
        text.push_str(&surface);
        tokens.push(WordToken {
            is_word: tok.is_word,
            surface,
            span: (len, len + width),
        });
        len += width;
        pieces.extend(piece);
    }
    text.extend(&chars[cursor..]);
    Ok(TransformedSentence {
        id: sentence.id.clone(),
        kind: Some(kind),
        text,
        tokens,
        pieces: (kind.level() == Level::Tokenization).then_some(pieces),
        word_changed,
    })
}

fn from_rewrite(sentence: &Sentence, rewrite: Rewrite) -> TransformedSentence {
    let before = TransformedSentence::identity(sentence);
    let tokens = tokenize_words(&rewrite.text);
    let old_words = before.words();
    let new_words: Vec<&str> = tokens
        .iter()
        .filter(|t| t.is_word)
        .map(|t| t.surface.as_str())
        .collect();
    let word_changed = if !rewrite.changed {
        vec![false; new_words.len()]
    } else if old_words.len() == new_words.len() {
        old_words
            .iter()
            .zip(&new_words)
            .map(|(a, b)| a != b)
            .collect()
    } else {
        vec![true; new_words.len()]
    };
    TransformedSentence {
        id: sentence.id.clone(),
        kind: Some(InterventionKind::Multi),
        text: rewrite.text,
        tokens,
        pieces: None,
        word_changed,
    }
}

/// Apply `kind` to one sentence. `None` returns the sentence unchanged.
pub fn apply_to_sentence(
    kind: Option<InterventionKind>,
    sentence: &Sentence,
    res: &Resources,
    seed: u64,
) -> Result<TransformedSentence> {
    Ok(
        transform_sentences(kind, std::slice::from_ref(sentence), res, seed)?
            .pop()
            .expect("one output per input"),
    )
}

/// Apply `kind` to many sentences, in parallel for word-level kinds and as
/// one batch for the sentence rewriter. Output order follows input order.
pub fn transform_sentences(
    kind: Option<InterventionKind>,
    sentences: &[Sentence],
    res: &Resources,
    seed: u64,
) -> Result<Vec<TransformedSentence>> {
    match kind {
        None => Ok(sentences
            .iter()
            .map(TransformedSentence::identity)
            .collect()),
        Some(InterventionKind::Multi) => {
            let batch: Vec<(&str, &str)> = sentences
                .iter()
                .map(|s| (s.id.as_str(), s.text.as_str()))
                .collect();
            let rewrites = res.multi.rewrite(&batch)?;
            if rewrites.len() != sentences.len() {
                return Err(Error::Plugin(format!(
                    "rewriter returned {} sentences for {}",
                    rewrites.len(),
                    sentences.len()
                )));
            }
            Ok(sentences
                .iter()
                .zip(rewrites)
                .map(|(s, r)| from_rewrite(s, r))
                .collect())
        }
        Some(k) => {
            res.check(k)?;
            sentences
                .par_iter()
                .map(|s| apply_word_level(k, s, res, seed))
                .collect()
        }
    }
}
