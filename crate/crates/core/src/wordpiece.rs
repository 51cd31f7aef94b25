//! Greedy longest-match-first WordPiece tokenization with MaxMatch-Dropout.
//!
//! Continuation pieces carry the `##` prefix. With dropout, every
//! multi-character vocabulary entry is independently removed with
//! probability `p` for the duration of one tokenization call; single
//! characters (bare or continuation) always survive, so any word whose
//! letters are in the vocabulary stays tokenizable. At `p = 1` a word splits
//! into its characters.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::seed::SeedKey;
use crate::{Error, Result};

pub const CONTINUATION: &str = "##";
pub const UNK: &str = "[UNK]";
pub const MASK: &str = "[MASK]";
/// Words longer than this many characters tokenize to `[UNK]`.
pub const MAX_WORD_CHARS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    /// Build from tokens in id order. Duplicate tokens are an error.
    pub fn from_tokens<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::Empty("vocabulary has no tokens".into()));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            if let Some(first) = index.insert(tok.clone(), i as u32) {
                return Err(Error::DuplicateToken {
                    token: tok.clone(),
                    first: first as usize + 1,
                    second: i + 1,
                });
            }
        }
        Ok(Vocab { tokens, index })
    }

    /// Load a vocabulary file: one token per line, id = zero-based line number.
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tokens(raw.lines())
    }

    /// The published cased base vocabulary (28,996 entries).
    pub fn bert_base_cased() -> Self {
        static RAW: &str = include_str!("../data/bert-base-cased-vocab.txt");
        Self::from_tokens(RAW.lines()).expect("bundled vocabulary is well-formed")
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// A word's subword decomposition in canonical `##` form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubwordSeq {
    pub tokens: Vec<String>,
    pub source_word: String,
}

impl SubwordSeq {
    pub fn unknown(word: &str) -> Self {
        SubwordSeq {
            tokens: vec![UNK.to_string()],
            source_word: word.to_string(),
        }
    }

    pub fn is_unknown(&self) -> bool {
        self.tokens.len() == 1 && self.tokens[0] == UNK
    }

    /// Strip continuation markers and concatenate.
    pub fn detokenize(&self) -> String {
        detokenize(&self.tokens)
    }

    /// Pieces without markers, as they would be shown to a reader.
    pub fn display_pieces(&self) -> Vec<&str> {
        self.tokens
            .iter()
            .map(|t| t.strip_prefix(CONTINUATION).unwrap_or(t))
            .collect()
    }
}

impl fmt::Display for SubwordSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_pieces().join(", "))
    }
}

pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    tokens
        .iter()
        .map(|t| {
            let t = t.as_ref();
            t.strip_prefix(CONTINUATION).unwrap_or(t)
        })
        .collect()
}

/// Per-character split: first character bare, the rest `##`-prefixed.
pub fn char_pieces(word: &str) -> SubwordSeq {
    let tokens = word
        .chars()
        .enumerate()
        .map(|(i, c)| {
            if i == 0 {
                c.to_string()
            } else {
                format!("{CONTINUATION}{c}")
            }
        })
        .collect();
    SubwordSeq {
        tokens,
        source_word: word.to_string(),
    }
}

fn greedy<F>(word: &str, vocab: &Vocab, mut available: F) -> SubwordSeq
where
    F: FnMut(&str, u32) -> bool,
{
    let chars: Vec<char> = word.chars().collect();
    if chars.is_empty() || chars.len() > MAX_WORD_CHARS {
        return SubwordSeq::unknown(word);
    }
    let mut tokens = Vec::new();
    let mut start = 0;
    let mut candidate = String::new();
    while start < chars.len() {
        let mut found = None;
        for end in (start + 1..=chars.len()).rev() {
            candidate.clear();
            if start > 0 {
                candidate.push_str(CONTINUATION);
            }
            candidate.extend(&chars[start..end]);
            if let Some(id) = vocab.id(&candidate) {
                if end - start == 1 || available(&candidate, id) {
                    found = Some(end);
                    break;
                }
            }
        }
        match found {
            Some(end) => {
                tokens.push(candidate.clone());
                start = end;
            }
            None => return SubwordSeq::unknown(word),
        }
    }
    SubwordSeq {
        tokens,
        source_word: word.to_string(),
    }
}

/// Greedy longest-match-first tokenization of a single word.
pub fn tokenize_word(word: &str, vocab: &Vocab) -> SubwordSeq {
    greedy(word, vocab, |_, _| true)
}

/// Tokenize with MaxMatch-Dropout. The drop decision for each vocabulary
/// entry is a uniform draw from `key` at the entry's id, so it is fixed for
/// the whole call and independent across entries.
pub fn tokenize_word_dropout(word: &str, vocab: &Vocab, p: f64, key: &SeedKey) -> SubwordSeq {
    debug_assert!((0.0..=1.0).contains(&p));
    if p <= 0.0 {
        return tokenize_word(word, vocab);
    }
    greedy(word, vocab, |_, id| key.uniform(u64::from(id)) >= p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(tokens: &[&str]) -> Vocab {
        Vocab::from_tokens(tokens.iter().copied()).unwrap()
    }

    #[test]
    fn greedy_definition() {
        let v = vocab(&["a", "##b"]);
        assert_eq!(tokenize_word("ab", &v).tokens, vec!["a", "##b"]);
        assert!(tokenize_word("ba", &v).is_unknown());
    }

    #[test]
    fn longest_match_wins() {
        let v = vocab(&["c", "co", "cof", "##f", "##e", "##fe", "##fee"]);
        assert_eq!(tokenize_word("coffee", &v).tokens, vec!["cof", "##fee"]);
        assert_eq!(tokenize_word("cofee", &v).tokens, vec!["cof", "##e", "##e"]);
    }

    #[test]
    fn over_long_word_is_unknown() {
        let v = vocab(&["a", "##a"]);
        assert_eq!(tokenize_word(&"a".repeat(100), &v).tokens.len(), 100);
        assert!(tokenize_word(&"a".repeat(101), &v).is_unknown());
    }

    #[test]
    fn duplicate_token_is_named() {
        let err = Vocab::from_tokens(["[UNK]", "a", "b", "a"]).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("\"a\"") && msg.contains('2') && msg.contains('4'),
            "{msg}"
        );
        assert!(Vocab::from_tokens(Vec::<String>::new()).is_err());
    }

    #[test]
    fn load_indices_follow_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.txt");
        std::fs::write(&path, "[PAD]\n[UNK]\na\n##b\nab\n").unwrap();
        let v = Vocab::load(&path).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v.id("[PAD]"), Some(0));
        assert_eq!(v.id("ab"), Some(4));
        assert_eq!(v.token(3), Some("##b"));
    }

    #[test]
    fn dropout_extremes() {
        let v = vocab(&["b", "##o", "##t", "##s", "boot", "boots"]);
        let key = SeedKey::derive(0, &["t"]);
        assert_eq!(
            tokenize_word_dropout("boots", &v, 0.0, &key),
            tokenize_word("boots", &v)
        );
        assert_eq!(
            tokenize_word_dropout("boots", &v, 1.0, &key).tokens,
            vec!["b", "##o", "##o", "##t", "##s"]
        );
    }

    #[test]
    fn display_strips_markers() {
        let seq = char_pieces("boots");
        assert_eq!(seq.to_string(), "b, o, o, t, s");
        assert_eq!(seq.detokenize(), "boots");
    }
}
