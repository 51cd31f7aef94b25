//! Synthetic linguistic variation for English text.
//!
//! The crate covers the whole offline pipeline: segmenting a corpus into
//! sentences and words, sampling fixed-size fine-tuning splits, applying ten
//! variation interventions (spelling, subword-boundary, morphosyntactic and
//! lexicosemantic), building whole-word-masked datasets, and scoring
//! mask-filling predictions.
//!
//! ```
//! use lingvar::interventions::{ipa, shift};
//!
//! assert_eq!(ipa("boots").surface(), Some("poodz"));
//! assert_eq!(shift("boots").surface(), Some("cpput"));
//! ```

pub mod casing;
pub mod corpus;
pub mod dataset;
mod error;
pub mod interventions;
pub mod jsonl;
pub mod lexicons;
pub mod metrics;
pub mod seed;
pub mod wordpiece;

pub use error::{Error, Result};
