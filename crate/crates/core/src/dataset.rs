//! Masked-LM training and test sets with whole-word masking.
//!
//! Instance ids have the form `sentence/kind/composition/split`; the test set
//! has no composition and uses `test` for both of the last two fields.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{DataSplit, Sentence};
use crate::interventions::{
    kind_label, transform_sentences, word_is_modified, InterventionKind, Resources,
    TransformedSentence,
};
use crate::seed::SeedKey;
use crate::wordpiece::{Vocab, MASK};
use crate::{jsonl, Error, Result};

pub const TEST_SPLIT: &str = "test";
pub const TEST_SAMPLE_SIZE: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Composition {
    /// Half of the sentences transformed.
    Mixed,
    /// Every sentence transformed.
    Full,
}

impl Composition {
    pub fn name(self) -> &'static str {
        match self {
            Composition::Mixed => "mixed",
            Composition::Full => "full",
        }
    }

    /// Number of sentences out of `n` that receive the intervention.
    pub fn transformed_count(self, n: usize) -> usize {
        match self {
            Composition::Mixed => n / 2,
            Composition::Full => n,
        }
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "mixed" => Ok(Composition::Mixed),
            "full" => Ok(Composition::Full),
            other => Err(Error::Invalid(format!(
                "unknown composition {other:?} (expected mixed or full)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskedInstance {
    pub id: String,
    pub split: String,
    #[serde(with = "crate::interventions::label")]
    pub kind: Option<InterventionKind>,
    pub composition: Option<Composition>,
    pub tokens: Vec<String>,
    pub mask_positions: Vec<usize>,
    pub gold_tokens: Vec<String>,
    pub masked_word_index: usize,
}

impl MaskedInstance {
    pub fn sentence_id(&self) -> &str {
        self.id.split('/').next().unwrap_or(&self.id)
    }

    /// Tokens with the masks filled by the gold tokens.
    pub fn unmasked(&self) -> Vec<String> {
        let mut tokens = self.tokens.clone();
        for (&pos, gold) in self.mask_positions.iter().zip(&self.gold_tokens) {
            tokens[pos] = gold.clone();
        }
        tokens
    }

    fn sort_key(&self) -> (&str, Option<InterventionKind>, &str) {
        (self.sentence_id(), self.kind, &self.id)
    }
}

pub fn instance_id(
    sentence_id: &str,
    kind: Option<InterventionKind>,
    composition: Option<Composition>,
    split: &str,
) -> String {
    let comp = composition.map_or(TEST_SPLIT, Composition::name);
    format!("{sentence_id}/{}/{comp}/{split}", kind_label(kind))
}

/// Tokenize `sentence` and mask every subword of word `word`.
fn mask_word(
    sentence: &TransformedSentence,
    vocab: &Vocab,
    word: usize,
) -> Result<(Vec<String>, Range<usize>, Vec<String>)> {
    let (mut tokens, ranges) = sentence.subwords(vocab);
    let range = ranges.get(word).cloned().ok_or_else(|| {
        Error::Invalid(format!(
            "sentence {} has no word {word} to mask",
            sentence.id
        ))
    })?;
    let gold = tokens[range.clone()].to_vec();
    for t in &mut tokens[range.clone()] {
        *t = MASK.to_string();
    }
    Ok((tokens, range, gold))
}

fn instance(
    sentence: &TransformedSentence,
    vocab: &Vocab,
    word: usize,
    composition: Option<Composition>,
    split: &str,
    kind: Option<InterventionKind>,
) -> Result<MaskedInstance> {
    let (tokens, range, gold_tokens) = mask_word(sentence, vocab, word)?;
    Ok(MaskedInstance {
        id: instance_id(&sentence.id, kind, composition, split),
        split: split.to_string(),
        kind,
        composition,
        tokens,
        mask_positions: range.collect(),
        gold_tokens,
        masked_word_index: word,
    })
}

fn lookup<'a>(split: &DataSplit, corpus: &'a [Sentence]) -> Result<Vec<&'a Sentence>> {
    let by_id: BTreeMap<&str, &Sentence> = corpus.iter().map(|s| (s.id.as_str(), s)).collect();
    split
        .ids
        .iter()
        .map(|id| {
            by_id
                .get(id.as_str())
                .copied()
                .ok_or_else(|| Error::Invalid(format!("split references unknown sentence {id}")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSet {
    pub instances: Vec<MaskedInstance>,
    /// Ids of the sentences the intervention was applied to, sorted.
    pub transformed: Vec<String>,
}

/// Build a fine-tuning set: apply `kind` to the sentences chosen by
/// `composition`, mask one uniformly chosen word per sentence.
pub fn build_training_set(
    split: &DataSplit,
    corpus: &[Sentence],
    kind: InterventionKind,
    composition: Composition,
    res: &Resources,
    seed: u64,
) -> Result<TrainingSet> {
    let vocab = res.vocab_for(kind)?;
    let sentences = lookup(split, corpus)?;
    let n = sentences.len();
    let split_name = split.name.to_string();
    let mut selected = vec![false; n];
    match composition {
        Composition::Full => selected.fill(true),
        Composition::Mixed => {
            let mut rng = SeedKey::derive(seed, &["composition", &split_name, kind.name()]).rng();
            for i in rand::seq::index::sample(&mut rng, n, n / 2) {
                selected[i] = true;
            }
        }
    }
    let chosen: Vec<Sentence> = sentences
        .iter()
        .zip(&selected)
        .filter(|(_, &s)| s)
        .map(|(s, _)| (*s).clone())
        .collect();
    let mut transformed = transform_sentences(Some(kind), &chosen, res, seed)?.into_iter();
    let prepared: Vec<TransformedSentence> = sentences
        .iter()
        .zip(&selected)
        .map(|(s, &sel)| {
            if sel {
                transformed
                    .next()
                    .expect("one output per selected sentence")
            } else {
                TransformedSentence::identity(s)
            }
        })
        .collect();

    let mut instances = prepared
        .par_iter()
        .map(|t| {
            let words = t.word_changed.len();
            if words == 0 {
                return Err(Error::Invalid(format!("sentence {} has no words", t.id)));
            }
            let word = SeedKey::derive(seed, &["mask", &t.id])
                .rng()
                .gen_range(0..words);
            instance(t, vocab, word, Some(composition), &split_name, Some(kind))
        })
        .collect::<Result<Vec<_>>>()?;
    instances.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut transformed: Vec<String> = chosen.into_iter().map(|s| s.id).collect();
    transformed.sort();
    Ok(TrainingSet {
        instances,
        transformed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSet {
    pub instances: Vec<MaskedInstance>,
    /// Sentences drawn from the pool before filtering.
    pub sampled: usize,
    /// Sentences kept by the eligibility filter.
    pub retained: Vec<String>,
    /// Multi instances dropped because the rewrite altered the masked word.
    pub multi_dropped: Vec<String>,
}

/// Word ordinals of `sentence` that every word-level kind modifies.
pub fn eligible_words(sentence: &TransformedSentence, res: &Resources) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (i, word) in sentence.words().into_iter().enumerate() {
        let mut all = true;
        for kind in InterventionKind::WORD_LEVEL {
            if !word_is_modified(kind, word, res)? {
                all = false;
                break;
            }
        }
        if all {
            out.push(i);
        }
    }
    Ok(out)
}

/// Build the evaluation set from the held-out pool. Up to `sample_size`
/// sentences are drawn; a sentence is kept when the rewriter changes it and
/// some word is modified by all nine word-level kinds. One such word is
/// masked in an untransformed instance and in one instance per kind.
pub fn build_test_set(
    pool: &[Sentence],
    sample_size: usize,
    res: &Resources,
    seed: u64,
) -> Result<TestSet> {
    for kind in InterventionKind::ALL {
        res.check(kind)?;
    }
    let vocab = res.vocab_for(InterventionKind::Reg)?;
    let mut pool: Vec<&Sentence> = pool.iter().collect();
    pool.sort_by(|a, b| a.id.cmp(&b.id));
    pool.dedup_by(|a, b| a.id == b.id);
    let take = sample_size.min(pool.len());
    let mut rng = SeedKey::derive(seed, &["test-sample"]).rng();
    let mut sampled: Vec<Sentence> = rand::seq::index::sample(&mut rng, pool.len(), take)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect();
    sampled.sort_by(|a, b| a.id.cmp(&b.id));

    let multi = transform_sentences(Some(InterventionKind::Multi), &sampled, res, seed)?;
    let candidates: Vec<(Sentence, usize, TransformedSentence)> = sampled
        .par_iter()
        .zip(multi)
        .map(|(s, m)| -> Result<Option<_>> {
            if !m.changed() {
                return Ok(None);
            }
            let eligible = eligible_words(&TransformedSentence::identity(s), res)?;
            if eligible.is_empty() {
                return Ok(None);
            }
            let pick = SeedKey::derive(seed, &["test-word", &s.id])
                .rng()
                .gen_range(0..eligible.len());
            Ok(Some((s.clone(), eligible[pick], m)))
        })
        .filter_map(Result::transpose)
        .collect::<Result<_>>()?;
    if candidates.is_empty() {
        return Err(Error::Empty(format!(
            "no test sentence out of {take} passed the eligibility filter"
        )));
    }

    let retained_sentences: Vec<Sentence> = candidates.iter().map(|(s, ..)| s.clone()).collect();
    let mut instances = Vec::new();
    let mut multi_dropped = Vec::new();
    for (s, word, m) in &candidates {
        let base = TransformedSentence::identity(s);
        instances.push(instance(&base, vocab, *word, None, TEST_SPLIT, None)?);
        if m.word_changed.get(*word).copied().unwrap_or(true) {
            multi_dropped.push(s.id.clone());
        } else {
            instances.push(instance(m, vocab, *word, None, TEST_SPLIT, m.kind)?);
        }
    }
    for kind in InterventionKind::WORD_LEVEL {
        let transformed = transform_sentences(Some(kind), &retained_sentences, res, seed)?;
        for ((_, word, _), t) in candidates.iter().zip(&transformed) {
            instances.push(instance(t, vocab, *word, None, TEST_SPLIT, Some(kind))?);
        }
    }
    instances.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(TestSet {
        instances,
        sampled: take,
        retained: retained_sentences.into_iter().map(|s| s.id).collect(),
        multi_dropped,
    })
}

/// Write instances in canonical order, after an optional metadata line.
pub fn emit_dataset(
    instances: &[MaskedInstance],
    path: &Path,
    meta: Option<&serde_json::Value>,
) -> Result<usize> {
    let mut sorted: Vec<&MaskedInstance> = instances.iter().collect();
    sorted.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    jsonl::write(path, meta, sorted)
}

pub fn read_dataset(path: &Path) -> Result<Vec<MaskedInstance>> {
    jsonl::read(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Source;

    fn sentences(texts: &[&str]) -> Vec<Sentence> {
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| Sentence {
                id: format!("s{i:03}"),
                text: t.to_string(),
                source: Source::Train,
            })
            .collect()
    }

    fn res() -> Resources {
        Resources {
            vocab: Some(
                Vocab::from_tokens([
                    "[UNK]", "[MASK]", ".", "'", "W", "##e", "we", "ran", "r", "##a", "##n", "##f",
                    "##o", "##p", "##s", "##t", "x", "s", "##b",
                ])
                .unwrap(),
            ),
            ..Resources::default()
        }
    }

    fn split(ids: &[Sentence]) -> DataSplit {
        DataSplit {
            name: crate::corpus::SplitSize::S,
            seed: 0,
            ids: ids.iter().map(|s| s.id.clone()).collect(),
        }
    }

    #[test]
    fn composition_counts() {
        assert_eq!(Composition::Mixed.transformed_count(264), 132);
        assert_eq!(Composition::Mixed.transformed_count(5), 2);
        assert_eq!(Composition::Full.transformed_count(5), 5);
        assert_eq!("Mixed".parse::<Composition>().unwrap(), Composition::Mixed);
    }

    #[test]
    fn char_training_masks_letters() {
        let corpus = sentences(&["We ran.", "we ran fast."]);
        let set = build_training_set(
            &split(&corpus),
            &corpus,
            InterventionKind::Char,
            Composition::Full,
            &res(),
            3,
        )
        .unwrap();
        assert_eq!(set.transformed.len(), 2);
        for inst in &set.instances {
            let t = crate::corpus::tokenize_words(
                &corpus
                    .iter()
                    .find(|s| s.id == inst.sentence_id())
                    .unwrap()
                    .text,
            );
            let word = t
                .iter()
                .filter(|t| t.is_word)
                .nth(inst.masked_word_index)
                .unwrap();
            assert_eq!(inst.gold_tokens.len(), word.surface.chars().count());
            assert!(inst.mask_positions.windows(2).all(|w| w[1] == w[0] + 1));
            assert!(inst.mask_positions.iter().all(|&p| inst.tokens[p] == MASK));
        }
    }

    #[test]
    fn mixed_transforms_half() {
        let texts: Vec<String> = (0..11)
            .map(|i| format!("we ran {}.", "x".repeat(i + 1)))
            .collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let corpus = sentences(&refs);
        let set = build_training_set(
            &split(&corpus),
            &corpus,
            InterventionKind::Shift,
            Composition::Mixed,
            &res(),
            1,
        )
        .unwrap();
        assert_eq!(set.transformed.len(), 5);
        assert_eq!(set.instances.len(), 11);
    }

    #[test]
    fn instance_json_shape() {
        let inst = MaskedInstance {
            id: instance_id("s1", Some(InterventionKind::End), None, TEST_SPLIT),
            split: TEST_SPLIT.into(),
            kind: Some(InterventionKind::End),
            composition: None,
            tokens: vec!["we".into(), MASK.into(), MASK.into()],
            mask_positions: vec![1, 2],
            gold_tokens: vec!["r".into(), "##an".into()],
            masked_word_index: 1,
        };
        let json = serde_json::to_value(&inst).unwrap();
        assert_eq!(json["kind"], "-End");
        assert_eq!(json["id"], "s1/-End/test/test");
        assert!(json["composition"].is_null());
        let back: MaskedInstance = serde_json::from_value(json).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.unmasked(), vec!["we", "r", "##an"]);
    }
}
