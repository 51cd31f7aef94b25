//! Synthetic corpora and fixture lexicons shared by integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use lingvar::interventions::Resources;
use lingvar::lexicons::{AffixLexicon, DerivationColumns, InflectionLexicon, SenseGraph};
use lingvar::wordpiece::Vocab;

/// Resolves from any crate in the workspace.
const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures");

pub fn lexicon_dir() -> PathBuf {
    Path::new(FIXTURES).join("lexicon")
}

pub fn tables_dir() -> PathBuf {
    Path::new(FIXTURES).join("tables")
}

/// Resources backed by the fixture lexicons and the bundled vocabulary.
pub fn fixture_resources() -> Resources {
    let dir = lexicon_dir();
    let inflections = InflectionLexicon::load(&dir.join("inflection.tsv"), Default::default())
        .unwrap()
        .0;
    let affixes = AffixLexicon::load(
        &dir.join("derivation.tsv"),
        DerivationColumns::morphynet(),
        Some(&dir.join("affix-cycle.tsv")),
    )
    .unwrap()
    .0;
    Resources {
        vocab: Some(Vocab::bert_base_cased()),
        inflections: Some(inflections),
        affixes: Some(affixes),
        senses: Some(SenseGraph::load(&dir.join("wordnet.tsv")).unwrap()),
        ..Resources::default()
    }
}

const NOUNS: [&str; 8] = [
    "river", "garden", "table", "window", "market", "forest", "station", "letter",
];
const ADJECTIVES: [&str; 5] = ["quiet", "bright", "little", "ancient", "narrow"];
/// Words every fixture lexicon covers.
const RICH: [&str; 4] = ["boots", "dogs", "cats", "happier"];

fn sentence(i: usize) -> String {
    let noun = NOUNS[i % NOUNS.len()];
    let noun2 = NOUNS[(i / 3 + 5) % NOUNS.len()];
    let adj = ADJECTIVES[(i / 2) % ADJECTIVES.len()];
    let rich = RICH[(i / 7) % RICH.len()];
    match i % 7 {
        0 => format!("There is a {rich} near the {noun}."),
        1 => format!("I don't have any {rich} for the {noun}."),
        2 => format!("The {adj} {noun} walked home."),
        3 => format!("She isn't fond of the {rich}."),
        4 => format!("We saw the {noun} and {rich} yesterday."),
        5 => format!("There were {rich} in the {noun}."),
        _ => format!("A {noun} sat by the {adj} {noun2}."),
    }
}

/// `documents` blank-line separated documents of `per_document` sentences.
pub fn synthetic_corpus_text(documents: usize, per_document: usize) -> String {
    (0..documents)
        .map(|d| {
            (0..per_document)
                .map(|s| sentence(d * per_document + s))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n\n")
        + "\n"
}
