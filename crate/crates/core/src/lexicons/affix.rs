use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::LoadReport;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffixKind {
    Prefix,
    Suffix,
}

impl AffixKind {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "prefix" | "pre" | "p" => Some(AffixKind::Prefix),
            "suffix" | "suf" | "s" => Some(AffixKind::Suffix),
            _ => None,
        }
    }
}

/// Column indices of a derivation table. The default layout is
/// `base, derived, affix, kind`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivationColumns {
    pub base: usize,
    pub derived: usize,
    pub affix: usize,
    pub kind: usize,
}

impl Default for DerivationColumns {
    fn default() -> Self {
        DerivationColumns {
            base: 0,
            derived: 1,
            affix: 2,
            kind: 3,
        }
    }
}

impl DerivationColumns {
    /// Layout of MorphyNet's own derivational files:
    /// `base, derived, base POS, derived POS, affix, kind`.
    pub fn morphynet() -> Self {
        DerivationColumns {
            base: 0,
            derived: 1,
            affix: 4,
            kind: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffixEntry {
    pub base: String,
    pub affix: String,
    pub kind: AffixKind,
}

/// Derived words plus a cyclic successor map over each affix inventory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AffixLexicon {
    derived: BTreeMap<String, AffixEntry>,
    prefixes: Vec<String>,
    suffixes: Vec<String>,
    /// Cycle order per kind; successor of `order[i]` is `order[(i + 1) % n]`.
    prefix_cycle: Vec<String>,
    suffix_cycle: Vec<String>,
    prefix_next: BTreeMap<String, String>,
    suffix_next: BTreeMap<String, String>,
}

fn strip_hyphens(affix: &str) -> String {
    affix.trim().trim_matches('-').to_lowercase()
}

impl AffixLexicon {
    pub fn load(
        path: &Path,
        columns: DerivationColumns,
        cycle_override: Option<&Path>,
    ) -> Result<(Self, LoadReport)> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let overrides = match cycle_override {
            Some(p) => {
                parse_override(&std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?, p)?
            }
            None => Vec::new(),
        };
        let (lex, report) = Self::parse(&raw, columns, &overrides)?;
        if lex.prefixes.is_empty() && lex.suffixes.is_empty() {
            return Err(Error::Empty(format!(
                "{}: no prefixes or suffixes found",
                path.display()
            )));
        }
        Ok((lex, report))
    }

    /// Parse tab-separated derivation rows. When a derived word appears more
    /// than once, the first row wins.
    pub fn parse(
        raw: &str,
        columns: DerivationColumns,
        overrides: &[(String, String)],
    ) -> Result<(Self, LoadReport)> {
        let mut report = LoadReport::default();
        let mut derived = BTreeMap::new();
        let mut prefixes = BTreeSet::new();
        let mut suffixes = BTreeSet::new();
        let needed = columns
            .base
            .max(columns.derived)
            .max(columns.affix)
            .max(columns.kind);
        for (i, line) in raw.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            report.rows += 1;
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let parsed = (fields.len() > needed)
                .then(|| {
                    let kind = AffixKind::parse(fields[columns.kind])?;
                    let affix = strip_hyphens(fields[columns.affix]);
                    let base = fields[columns.base].to_lowercase();
                    let word = fields[columns.derived].to_lowercase();
                    (!affix.is_empty() && !base.is_empty() && !word.is_empty())
                        .then_some((word, base, affix, kind))
                })
                .flatten();
            let Some((word, base, affix, kind)) = parsed else {
                report.malformed.push(i + 1);
                continue;
            };
            match kind {
                AffixKind::Prefix => prefixes.insert(affix.clone()),
                AffixKind::Suffix => suffixes.insert(affix.clone()),
            };
            derived
                .entry(word)
                .or_insert(AffixEntry { base, affix, kind });
            report.ingested += 1;
        }
        let prefixes: Vec<String> = prefixes.into_iter().collect();
        let suffixes: Vec<String> = suffixes.into_iter().collect();
        let prefix_cycle = build_cycle(&prefixes, overrides)?;
        let suffix_cycle = build_cycle(&suffixes, overrides)?;
        let pairs: Vec<(&str, &str)> = overrides
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        for (from, to) in &pairs {
            let in_prefixes =
                prefixes.iter().any(|p| p == from) && prefixes.iter().any(|p| p == to);
            let in_suffixes =
                suffixes.iter().any(|s| s == from) && suffixes.iter().any(|s| s == to);
            if !in_prefixes && !in_suffixes {
                return Err(Error::AffixCycle(format!(
                    "override {from} -> {to} does not name two affixes of the same inventory"
                )));
            }
        }
        Ok((
            AffixLexicon {
                derived,
                prefix_next: successor_map(&prefix_cycle),
                suffix_next: successor_map(&suffix_cycle),
                prefixes,
                suffixes,
                prefix_cycle,
                suffix_cycle,
            },
            report,
        ))
    }

    pub fn lookup(&self, word: &str) -> Option<&AffixEntry> {
        self.derived.get(&word.to_lowercase())
    }

    pub fn prefixes(&self) -> &[String] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }

    /// The affix inventory of `kind` in cycle order.
    pub fn cycle(&self, kind: AffixKind) -> &[String] {
        match kind {
            AffixKind::Prefix => &self.prefix_cycle,
            AffixKind::Suffix => &self.suffix_cycle,
        }
    }

    pub fn successor(&self, affix: &str, kind: AffixKind) -> Option<&str> {
        let map = match kind {
            AffixKind::Prefix => &self.prefix_next,
            AffixKind::Suffix => &self.suffix_next,
        };
        map.get(affix).map(String::as_str)
    }

    /// Re-affix the base of a derived word with the successor affix.
    pub fn cycled(&self, word: &str) -> Option<String> {
        let entry = self.lookup(word)?;
        let next = self.successor(&entry.affix, entry.kind)?;
        Some(match entry.kind {
            AffixKind::Prefix => format!("{next}{}", entry.base),
            AffixKind::Suffix => format!("{}{next}", entry.base),
        })
    }

    pub fn len(&self) -> usize {
        self.derived.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derived.is_empty()
    }
}

/// Parse `affix<TAB>successor` lines.
pub(crate) fn parse_override(raw: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) if !a.trim().is_empty() && !b.trim().is_empty() => {
                pairs.push((strip_hyphens(a), strip_hyphens(b)))
            }
            _ => return Err(Error::parse(path, i + 1, "expected `affix<TAB>successor`")),
        }
    }
    Ok(pairs)
}

/// Arrange `inventory` (sorted) into one cycle that honours every override
/// pair whose affixes both belong to it. Override pairs form chains; chains
/// are laid out by their first affix, then the remaining affixes follow in
/// sorted order, and the last element wraps to the first. Without overrides
/// this is the sorted order, i.e. `i -> i + 1 mod n`.
fn build_cycle(inventory: &[String], overrides: &[(String, String)]) -> Result<Vec<String>> {
    let members: BTreeSet<&str> = inventory.iter().map(String::as_str).collect();
    let mut next: BTreeMap<&str, &str> = BTreeMap::new();
    let mut prev: BTreeMap<&str, &str> = BTreeMap::new();
    for (a, b) in overrides {
        let (a, b) = (a.as_str(), b.as_str());
        if !members.contains(a) || !members.contains(b) {
            continue;
        }
        if a == b && members.len() > 1 {
            return Err(Error::AffixCycle(format!("{a} mapped to itself")));
        }
        if next.insert(a, b).is_some_and(|old| old != b) {
            return Err(Error::AffixCycle(format!("{a} has two successors")));
        }
        if prev.insert(b, a).is_some_and(|old| old != a) {
            return Err(Error::AffixCycle(format!("{b} has two predecessors")));
        }
    }
    let mut order: Vec<String> = Vec::with_capacity(inventory.len());
    let mut placed: BTreeSet<&str> = BTreeSet::new();
    for &start in &members {
        if prev.contains_key(start) || !next.contains_key(start) {
            continue;
        }
        let mut cur = start;
        loop {
            order.push(cur.to_string());
            placed.insert(cur);
            match next.get(cur) {
                Some(&n) => cur = n,
                None => break,
            }
        }
    }
    // Every override affix not yet placed lies on a closed loop.
    if next.keys().any(|a| !placed.contains(a)) {
        let closed = next.keys().filter(|a| !placed.contains(*a)).count();
        if closed != members.len() {
            return Err(Error::AffixCycle(format!(
                "overrides close a cycle of {closed} affixes inside an inventory of {}",
                members.len()
            )));
        }
        let start = *next.keys().next().expect("non-empty");
        let mut cur = start;
        loop {
            order.push(cur.to_string());
            placed.insert(cur);
            cur = next[cur];
            if cur == start {
                break;
            }
        }
        if next.keys().any(|a| !placed.contains(a)) {
            return Err(Error::AffixCycle(
                "overrides form more than one cycle".into(),
            ));
        }
    }
    order.extend(
        members
            .iter()
            .filter(|a| !placed.contains(*a))
            .map(|a| a.to_string()),
    );
    Ok(order)
}

fn successor_map(order: &[String]) -> BTreeMap<String, String> {
    order
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), order[(i + 1) % order.len()].clone()))
        .collect()
}
