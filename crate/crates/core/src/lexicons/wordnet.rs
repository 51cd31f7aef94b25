//! WordNet hyponym and antonym relations.
//!
//! Two input formats are accepted: a standard WordNet database directory
//! (`index.{noun,verb,adj,adv}` with matching `data.*` files), or a
//! tab-separated fixture file with `word<TAB>relation<TAB>target` rows where
//! relation is `hyponym` or `antonym`. Sense order is always file order; for
//! the database, senses are listed noun, verb, adjective, adverb.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::corpus::is_word;
use crate::{Error, Result};

const POS_FILES: [(char, &str); 4] = [('n', "noun"), ('v', "verb"), ('a', "adj"), ('r', "adv")];

/// A synset address: part-of-speech file and byte offset. Fixture synsets
/// use pos `t` and a running number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId {
    pub pos: char,
    pub offset: u64,
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:08}", self.pos, self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct AntonymLink {
    /// 0-based lemma index in the source synset.
    source: usize,
    target: SynsetId,
    target_lemma: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Synset {
    lemmas: Vec<String>,
    hyponyms: Vec<SynsetId>,
    antonyms: Vec<AntonymLink>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SenseGraph {
    senses: BTreeMap<String, Vec<SynsetId>>,
    synsets: BTreeMap<SynsetId, Synset>,
}

impl SenseGraph {
    /// Load a WordNet database directory or a fixture TSV file.
    pub fn load(path: &Path) -> Result<Self> {
        if path.is_dir() {
            Self::load_database(path)
        } else {
            let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Self::parse_fixture(&raw, path)
        }
    }

    pub fn load_database(dir: &Path) -> Result<Self> {
        let mut graph = SenseGraph::default();
        let mut found = 0;
        for (pos, name) in POS_FILES {
            let index = dir.join(format!("index.{name}"));
            let data = dir.join(format!("data.{name}"));
            match (index.is_file(), data.is_file()) {
                (true, true) => {}
                (false, false) => continue,
                (false, true) => {
                    return Err(Error::Invalid(format!(
                        "missing index file {}",
                        index.display()
                    )))
                }
                (true, false) => {
                    return Err(Error::Invalid(format!(
                        "missing data file {}",
                        data.display()
                    )))
                }
            }
            found += 1;
            let raw = std::fs::read_to_string(&data).map_err(|e| Error::io(&data, e))?;
            for (i, line) in raw.lines().enumerate() {
                if line.starts_with("  ") || line.trim().is_empty() {
                    continue;
                }
                let (offset, synset) =
                    parse_data_line(line).map_err(|m| Error::parse(&data, i + 1, m))?;
                graph.synsets.insert(SynsetId { pos, offset }, synset);
            }
            let raw = std::fs::read_to_string(&index).map_err(|e| Error::io(&index, e))?;
            for (i, line) in raw.lines().enumerate() {
                if line.starts_with("  ") || line.trim().is_empty() {
                    continue;
                }
                let (lemma, offsets) =
                    parse_index_line(line).map_err(|m| Error::parse(&index, i + 1, m))?;
                graph
                    .senses
                    .entry(lemma)
                    .or_default()
                    .extend(offsets.into_iter().map(|offset| SynsetId { pos, offset }));
            }
        }
        if found == 0 {
            return Err(Error::Invalid(format!(
                "{}: no WordNet index files (index.noun, index.verb, index.adj, index.adv)",
                dir.display()
            )));
        }
        graph.check_references()?;
        Ok(graph)
    }

    pub fn parse_fixture(raw: &str, path: &Path) -> Result<Self> {
        let mut graph = SenseGraph::default();
        for (i, line) in raw.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let [word, relation, target] = fields[..] else {
                return Err(Error::parse(
                    path,
                    i + 1,
                    "expected word<TAB>relation<TAB>target",
                ));
            };
            let from = graph.fixture_synset(word);
            let to = graph.fixture_synset(target);
            let synset = graph.synsets.get_mut(&from).expect("just inserted");
            match relation.to_lowercase().as_str() {
                "hyponym" => synset.hyponyms.push(to),
                "antonym" => synset.antonyms.push(AntonymLink {
                    source: 0,
                    target: to,
                    target_lemma: 0,
                }),
                other => {
                    return Err(Error::parse(
                        path,
                        i + 1,
                        format!("unknown relation {other:?} (expected hyponym or antonym)"),
                    ))
                }
            }
        }
        Ok(graph)
    }

    fn fixture_synset(&mut self, word: &str) -> SynsetId {
        let key = word.to_lowercase();
        if let Some(ids) = self.senses.get(&key) {
            return ids[0];
        }
        let id = SynsetId {
            pos: 't',
            offset: self.synsets.len() as u64,
        };
        self.synsets.insert(
            id,
            Synset {
                lemmas: vec![word.to_string()],
                ..Synset::default()
            },
        );
        self.senses.insert(key, vec![id]);
        id
    }

    fn check_references(&self) -> Result<()> {
        let dangling = |from: &str, id: &SynsetId| -> Result<()> {
            if self.synsets.contains_key(id) {
                Ok(())
            } else {
                Err(Error::DanglingSynset {
                    pos: id.pos,
                    offset: id.offset,
                    from: from.to_string(),
                })
            }
        };
        for (word, ids) in &self.senses {
            for id in ids {
                dangling(&format!("index entry {word:?}"), id)?;
            }
        }
        for (id, synset) in &self.synsets {
            let from = format!("synset {id}");
            for h in &synset.hyponyms {
                dangling(&from, h)?;
            }
            for a in &synset.antonyms {
                dangling(&from, &a.target)?;
                if self.synsets[&a.target].lemmas.len() <= a.target_lemma {
                    return Err(Error::Invalid(format!(
                        "{from}: antonym points at missing lemma {} of {}",
                        a.target_lemma + 1,
                        a.target
                    )));
                }
            }
        }
        Ok(())
    }

    /// Synsets of `word` in sense order; empty for unknown words.
    pub fn synsets(&self, word: &str) -> &[SynsetId] {
        self.senses
            .get(&word.to_lowercase())
            .map_or(&[], Vec::as_slice)
    }

    pub fn lemmas(&self, id: SynsetId) -> &[String] {
        self.synsets.get(&id).map_or(&[], |s| s.lemmas.as_slice())
    }

    pub fn hyponyms(&self, id: SynsetId) -> &[SynsetId] {
        self.synsets.get(&id).map_or(&[], |s| s.hyponyms.as_slice())
    }

    /// Hyponym lemmas of every sense of `word`, in order.
    pub fn hyponym_lemmas(&self, word: &str) -> Vec<&str> {
        self.synsets(word)
            .iter()
            .flat_map(|&id| self.hyponyms(id))
            .flat_map(|&h| self.lemmas(h))
            .map(String::as_str)
            .collect()
    }

    /// Antonym lemmas of `word` across its senses, in order.
    pub fn antonyms(&self, word: &str) -> Vec<&str> {
        let key = word.to_lowercase();
        let mut out = Vec::new();
        for id in self.synsets(word) {
            let synset = &self.synsets[id];
            for link in &synset.antonyms {
                if synset.lemmas[link.source].to_lowercase() == key {
                    out.push(self.synsets[&link.target].lemmas[link.target_lemma].as_str());
                }
            }
        }
        out
    }

    pub fn word_count(&self) -> usize {
        self.senses.len()
    }

    pub fn synset_count(&self) -> usize {
        self.synsets.len()
    }
}

/// First single-word hyponym of `word`: senses in order, hyponym synsets in
/// pointer order, lemmas in synset order. Lemmas that are not a single
/// alphabetic word (multiword expressions, hyphenations) are skipped.
pub fn first_hyponym(graph: &SenseGraph, word: &str) -> Option<String> {
    graph
        .hyponym_lemmas(word)
        .into_iter()
        .find(|l| is_word(l))
        .map(str::to_string)
}

/// First single-word antonym of `word`, following lexical antonym links of
/// the word's own lemma in sense order.
pub fn first_antonym(graph: &SenseGraph, word: &str) -> Option<String> {
    graph
        .antonyms(word)
        .into_iter()
        .find(|l| is_word(l))
        .map(str::to_string)
}

fn strip_adjective_marker(lemma: &str) -> &str {
    match lemma.find('(') {
        Some(i) if lemma.ends_with(')') => &lemma[..i],
        _ => lemma,
    }
}

fn pointer_pos(s: &str) -> Result<char, String> {
    match s {
        "n" => Ok('n'),
        "v" => Ok('v'),
        "a" | "s" => Ok('a'),
        "r" => Ok('r'),
        other => Err(format!("unknown pointer part of speech {other:?}")),
    }
}

/// `offset lex_filenum ss_type w_cnt (word lex_id)+ p_cnt (ptr)* ... | gloss`
fn parse_data_line(line: &str) -> Result<(u64, Synset), String> {
    let head = line.split(" | ").next().unwrap_or(line);
    let fields: Vec<&str> = head.split_whitespace().collect();
    let get = |i: usize| fields.get(i).copied().ok_or("truncated synset line");
    let offset: u64 = get(0)?.parse().map_err(|_| "bad synset offset")?;
    let w_cnt = usize::from_str_radix(get(3)?, 16).map_err(|_| "bad word count")?;
    let mut synset = Synset::default();
    let mut i = 4;
    for _ in 0..w_cnt {
        synset
            .lemmas
            .push(strip_adjective_marker(get(i)?).to_string());
        i += 2;
    }
    let p_cnt: usize = get(i)?.parse().map_err(|_| "bad pointer count")?;
    i += 1;
    for _ in 0..p_cnt {
        let symbol = get(i)?;
        let target_offset: u64 = get(i + 1)?.parse().map_err(|_| "bad pointer offset")?;
        let target = SynsetId {
            pos: pointer_pos(get(i + 2)?)?,
            offset: target_offset,
        };
        let source_target = get(i + 3)?;
        i += 4;
        match symbol {
            "~" => synset.hyponyms.push(target),
            "!" => {
                if source_target.len() != 4 {
                    return Err("bad source/target field".into());
                }
                let src = usize::from_str_radix(&source_target[..2], 16)
                    .map_err(|_| "bad source/target field")?;
                let tgt = usize::from_str_radix(&source_target[2..], 16)
                    .map_err(|_| "bad source/target field")?;
                if src == 0 || tgt == 0 || src > synset.lemmas.len() {
                    return Err("antonym pointer without lemma numbers".into());
                }
                synset.antonyms.push(AntonymLink {
                    source: src - 1,
                    target,
                    target_lemma: tgt - 1,
                });
            }
            _ => {}
        }
    }
    Ok((offset, synset))
}

/// `lemma pos synset_cnt p_cnt (ptr_symbol)* sense_cnt tagsense_cnt (offset)+`
fn parse_index_line(line: &str) -> Result<(String, Vec<u64>), String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let get = |i: usize| fields.get(i).copied().ok_or("truncated index line");
    let lemma = get(0)?.to_string();
    let synset_cnt: usize = get(2)?.parse().map_err(|_| "bad synset count")?;
    let p_cnt: usize = get(3)?.parse().map_err(|_| "bad pointer count")?;
    let first = 4 + p_cnt + 2;
    let offsets = (first..first + synset_cnt)
        .map(|i| get(i)?.parse::<u64>().map_err(|_| "bad synset offset"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((lemma, offsets))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(raw: &str) -> SenseGraph {
        SenseGraph::parse_fixture(raw, Path::new("fixture.tsv")).unwrap()
    }

    #[test]
    fn fixture_relations() {
        let g = fixture("boot\thyponym\tbuskin\nboot\thyponym\tjackboot\nnice\tantonym\tnasty\n");
        assert_eq!(g.hyponym_lemmas("boot"), vec!["buskin", "jackboot"]);
        assert_eq!(first_hyponym(&g, "boot").as_deref(), Some("buskin"));
        assert_eq!(g.antonyms("nice"), vec!["nasty"]);
        assert_eq!(first_antonym(&g, "nice").as_deref(), Some("nasty"));
        assert_eq!(first_hyponym(&g, "unknown"), None);
        assert_eq!(first_antonym(&g, "the"), None);
    }

    #[test]
    fn multiword_lemmas_are_skipped() {
        let g = fixture(
            "boot\thyponym\tcombat_boot\nboot\thyponym\thalf-boot\nboot\thyponym\thessian\n",
        );
        assert_eq!(first_hyponym(&g, "boot").as_deref(), Some("hessian"));
    }

    #[test]
    fn fixture_errors() {
        assert!(SenseGraph::parse_fixture("a\tsynonym\tb\n", Path::new("f")).is_err());
        assert!(SenseGraph::parse_fixture("a\thyponym\n", Path::new("f")).is_err());
    }

    // Synsets are keyed by the offset field of each data line.
    fn write_database(dir: &Path, dangling: bool) {
        let header = "  1 This is a license header line\n";
        let target = if dangling { 99 } else { 1040 };
        std::fs::write(
            dir.join("data.noun"),
            format!(
                "{header}00000034 06 n 02 boot 0 Boot 1 001 ~ {target:08} n 0000 | footwear\n\
                 00001040 06 n 02 combat_boot 0 buskin 0 001 @ 00000034 n 0000 | a boot\n"
            ),
        )
        .unwrap();
        std::fs::write(
            dir.join("index.noun"),
            format!("{header}boot n 1 1 ~ 1 0 00000034\nbuskin n 1 1 @ 1 0 00001040\n"),
        )
        .unwrap();
        std::fs::write(
            dir.join("data.adj"),
            "00000000 00 a 01 good(a) 0 001 ! 00000050 a 0102 | ok\n\
             00000050 00 s 02 bad 0 evil 0 001 ! 00000000 a 0201 | not ok\n",
        )
        .unwrap();
        std::fs::write(
            dir.join("index.adj"),
            "good a 1 1 ! 1 0 00000000\nbad a 1 1 ! 1 0 00000050\nevil a 1 1 ! 1 0 00000050\n",
        )
        .unwrap();
    }

    #[test]
    fn database_directory() {
        let dir = tempfile::tempdir().unwrap();
        write_database(dir.path(), false);
        let g = SenseGraph::load(dir.path()).unwrap();
        assert_eq!(g.synsets("boot").len(), 1);
        assert_eq!(first_hyponym(&g, "boot").as_deref(), Some("buskin"));
        assert_eq!(first_antonym(&g, "good").as_deref(), Some("evil"));
        assert_eq!(first_antonym(&g, "evil").as_deref(), Some("good"));
        assert_eq!(first_antonym(&g, "bad"), None);
        assert_eq!(g.synset_count(), 4);
    }

    #[test]
    fn dangling_reference_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        write_database(dir.path(), true);
        let err = SenseGraph::load(dir.path()).unwrap_err();
        assert!(matches!(err, Error::DanglingSynset { .. }), "{err}");
    }

    #[test]
    fn missing_index_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(SenseGraph::load(dir.path()).is_err());
        std::fs::write(dir.path().join("data.noun"), "").unwrap();
        assert!(SenseGraph::load(dir.path()).is_err());
    }

    #[test]
    fn loading_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        write_database(dir.path(), false);
        assert_eq!(
            SenseGraph::load(dir.path()).unwrap(),
            SenseGraph::load(dir.path()).unwrap()
        );
    }
}
