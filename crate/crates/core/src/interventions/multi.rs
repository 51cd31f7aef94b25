//! Sentence-level morphosyntactic rewriting.
//!
//! [`MultiLite`] applies three dialect features in a fixed order:
//!
//! 1. negative concord: after "not", "cannot" or an n't contraction, a later
//!    "any" / "anything" / "anyone" in the same clause becomes "no" /
//!    "nothing" / "nobody";
//! 2. existential it: a sentence opening "There is/are/was/were" opens with
//!    "It" instead;
//! 3. ain't levelling: "isn't", "aren't", "hasn't", "haven't" become "ain't".
//!
//! Other rewriters (for instance an external process, see
//! [`super::plugin`]) plug in through [`SentenceRewriter`].

use crate::casing::restore_case;
use crate::corpus::{tokenize_words, WordToken};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rewrite {
    pub text: String,
    pub changed: bool,
}

/// Rewrites whole sentences. Implementations receive `(id, text)` pairs and
/// return one [`Rewrite`] per input, in input order.
pub trait SentenceRewriter: Send + Sync {
    fn rewrite(&self, batch: &[(&str, &str)]) -> Result<Vec<Rewrite>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MultiLite;

impl SentenceRewriter for MultiLite {
    fn rewrite(&self, batch: &[(&str, &str)]) -> Result<Vec<Rewrite>> {
        Ok(batch
            .iter()
            .map(|(_, text)| multi_lite_text(text))
            .collect())
    }
}

const CLAUSE_BREAKS: &[&str] = &[",", ";", ":", ".", "!", "?"];
const APOSTROPHES: &[&str] = &["'", "\u{2019}"];

fn adjacent(a: &WordToken, b: &WordToken) -> bool {
    a.span.1 == b.span.0
}

/// Index of the word before an n't contraction ending at token `t`.
fn contraction_host(tokens: &[WordToken], t: usize) -> Option<usize> {
    if t < 2 || !tokens[t].surface.eq_ignore_ascii_case("t") {
        return None;
    }
    let (host, apostrophe) = (&tokens[t - 2], &tokens[t - 1]);
    let ok = APOSTROPHES.contains(&apostrophe.surface.as_str())
        && adjacent(host, apostrophe)
        && adjacent(apostrophe, &tokens[t])
        && host.is_word
        && host.surface.to_lowercase().ends_with('n');
    ok.then_some(t - 2)
}

fn negative_concord(tokens: &[WordToken], out: &mut [String]) {
    let mut negated = false;
    for (i, tok) in tokens.iter().enumerate() {
        let lower = tok.surface.to_lowercase();
        if !tok.is_word {
            if CLAUSE_BREAKS.contains(&lower.as_str()) {
                negated = false;
            }
            continue;
        }
        if lower == "not" || lower == "cannot" || contraction_host(tokens, i).is_some() {
            negated = true;
            continue;
        }
        if negated {
            let replacement = match lower.as_str() {
                "any" => "no",
                "anything" => "nothing",
                "anyone" => "nobody",
                _ => continue,
            };
            out[i] = restore_case(&tok.surface, replacement);
        }
    }
}

fn existential_it(tokens: &[WordToken], out: &mut [String]) {
    if tokens.len() < 2 || !tokens[0].surface.eq_ignore_ascii_case("there") {
        return;
    }
    if matches!(
        tokens[1].surface.to_lowercase().as_str(),
        "is" | "are" | "was" | "were"
    ) {
        out[0] = restore_case(&tokens[0].surface, "it");
    }
}

fn aint_levelling(tokens: &[WordToken], out: &mut [String]) {
    for t in 0..tokens.len() {
        if let Some(host) = contraction_host(tokens, t) {
            let lower = tokens[host].surface.to_lowercase();
            if matches!(lower.as_str(), "isn" | "aren" | "hasn" | "haven") {
                out[host] = restore_case(&out[host], "ain");
            }
        }
    }
}

fn rebuild(text: &str, tokens: &[WordToken], surfaces: &[String]) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for (tok, surface) in tokens.iter().zip(surfaces) {
        out.extend(&chars[cursor..tok.span.0]);
        out.push_str(surface);
        cursor = tok.span.1;
    }
    out.extend(&chars[cursor..]);
    out
}

pub fn multi_lite_text(text: &str) -> Rewrite {
    let tokens = tokenize_words(text);
    let mut surfaces: Vec<String> = tokens.iter().map(|t| t.surface.clone()).collect();
    negative_concord(&tokens, &mut surfaces);
    existential_it(&tokens, &mut surfaces);
    aint_levelling(&tokens, &mut surfaces);
    let changed = tokens.iter().zip(&surfaces).any(|(t, s)| t.surface != *s);
    Rewrite {
        text: if changed {
            rebuild(text, &tokens, &surfaces)
        } else {
            text.to_string()
        },
        changed,
    }
}
