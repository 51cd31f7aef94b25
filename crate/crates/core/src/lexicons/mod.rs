//! Read-only lexical resources behind the morphological and lexical
//! interventions: MorphyNet inflection and derivation tables, and WordNet
//! hyponym/antonym relations.

mod affix;
mod inflection;
mod wordnet;

pub use affix::{AffixEntry, AffixKind, AffixLexicon, DerivationColumns};
pub use inflection::{InflectionColumns, InflectionEntry, InflectionLexicon};
pub use wordnet::{first_antonym, first_hyponym, SenseGraph, SynsetId};

/// Counts reported by the table loaders.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub rows: usize,
    pub ingested: usize,
    /// 1-based line numbers of rows that could not be parsed.
    pub malformed: Vec<usize>,
}
