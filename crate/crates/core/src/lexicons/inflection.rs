use std::collections::BTreeMap;
use std::path::Path;

use super::LoadReport;
use crate::{Error, Result};

/// Column indices of a MorphyNet inflection table. MorphyNet ships
/// `lemma, inflected form, features, segmentation`; only the first three are
/// read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InflectionColumns {
    pub lemma: usize,
    pub form: usize,
    pub features: usize,
}

impl Default for InflectionColumns {
    fn default() -> Self {
        InflectionColumns {
            lemma: 0,
            form: 1,
            features: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflectionEntry {
    pub lemma: String,
    pub features: String,
}

/// Inflected form (lowercase) to its lemmas, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InflectionLexicon {
    forms: BTreeMap<String, Vec<InflectionEntry>>,
}

impl InflectionLexicon {
    pub fn load(path: &Path, columns: InflectionColumns) -> Result<(Self, LoadReport)> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let (lex, report) = Self::parse(&raw, columns);
        if report.ingested == 0 {
            return Err(Error::Empty(format!(
                "{}: no well-formed inflection rows",
                path.display()
            )));
        }
        Ok((lex, report))
    }

    /// Parse tab-separated rows. Rows whose form equals the lemma carry no
    /// inflectional ending and are skipped without counting as malformed.
    pub fn parse(raw: &str, columns: InflectionColumns) -> (Self, LoadReport) {
        let mut lex = InflectionLexicon::default();
        let mut report = LoadReport::default();
        let needed = columns.lemma.max(columns.form).max(columns.features);
        for (i, line) in raw.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            report.rows += 1;
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if fields.len() <= needed
                || fields[columns.lemma].is_empty()
                || fields[columns.form].is_empty()
            {
                report.malformed.push(i + 1);
                continue;
            }
            let lemma = fields[columns.lemma].to_lowercase();
            let form = fields[columns.form].to_lowercase();
            if lemma == form {
                continue;
            }
            let entries = lex.forms.entry(form).or_default();
            if !entries.iter().any(|e| e.lemma == lemma) {
                entries.push(InflectionEntry {
                    lemma,
                    features: fields[columns.features].to_string(),
                });
            }
            report.ingested += 1;
        }
        (lex, report)
    }

    pub fn insert(&mut self, lemma: &str, form: &str, features: &str) {
        let (lemma, form) = (lemma.to_lowercase(), form.to_lowercase());
        if lemma == form {
            return;
        }
        let entries = self.forms.entry(form).or_default();
        if !entries.iter().any(|e| e.lemma == lemma) {
            entries.push(InflectionEntry {
                lemma,
                features: features.to_string(),
            });
        }
    }

    /// Case-insensitive lookup.
    pub fn lookup(&self, form: &str) -> &[InflectionEntry] {
        self.forms
            .get(&form.to_lowercase())
            .map_or(&[], Vec::as_slice)
    }

    /// The lemma to use for `form`: the shortest candidate, ties broken
    /// lexicographically.
    pub fn lemma(&self, form: &str) -> Option<&str> {
        self.lookup(form)
            .iter()
            .map(|e| e.lemma.as_str())
            .min_by(|a, b| a.chars().count().cmp(&b.chars().count()).then(a.cmp(b)))
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}
