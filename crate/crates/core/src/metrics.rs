//! Scoring predictions against masked datasets, and baseline-relative reports.
//!
//! Tokens compare by exact, case-sensitive string equality in `##` form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{Composition, MaskedInstance};
use crate::interventions::{parse_kind_label, InterventionKind};
use crate::{Error, Result};

/// Ranked candidates per mask position, aligned with `mask_positions`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub candidates: Vec<Vec<String>>,
}

fn align<'a>(
    preds: &'a [PredictionRecord],
    gold: &'a [MaskedInstance],
    k: usize,
) -> Result<Vec<(&'a MaskedInstance, &'a PredictionRecord)>> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    if preds.is_empty() {
        return Err(Error::Alignment("prediction file is empty".into()));
    }
    if gold.is_empty() {
        return Err(Error::Empty("gold dataset is empty".into()));
    }
    let mut by_id: HashMap<&str, &PredictionRecord> = HashMap::with_capacity(preds.len());
    for p in preds {
        if by_id.insert(p.id.as_str(), p).is_some() {
            return Err(Error::Alignment(format!(
                "duplicate prediction for {}",
                p.id
            )));
        }
    }
    let gold_ids: HashMap<&str, ()> = gold.iter().map(|g| (g.id.as_str(), ())).collect();
    if let Some(p) = preds.iter().find(|p| !gold_ids.contains_key(p.id.as_str())) {
        return Err(Error::Alignment(format!(
            "prediction for unknown instance {}",
            p.id
        )));
    }
    gold.iter()
        .map(|g| {
            let p = by_id
                .get(g.id.as_str())
                .ok_or_else(|| Error::Alignment(format!("no prediction for instance {}", g.id)))?;
            if p.candidates.len() != g.mask_positions.len() {
                return Err(Error::Alignment(format!(
                    "instance {} has {} masks but {} candidate lists",
                    g.id,
                    g.mask_positions.len(),
                    p.candidates.len()
                )));
            }
            if g.gold_tokens.len() != g.mask_positions.len() {
                return Err(Error::Alignment(format!(
                    "instance {} has {} masks but {} gold tokens",
                    g.id,
                    g.mask_positions.len(),
                    g.gold_tokens.len()
                )));
            }
            if let Some(short) = p.candidates.iter().find(|c| c.len() < k) {
                return Err(Error::Alignment(format!(
                    "instance {} has a candidate list of length {} (need {k})",
                    g.id,
                    short.len()
                )));
            }
            Ok((g, *p))
        })
        .collect()
}

/// Fraction of instances whose every mask is predicted correctly at rank 1.
pub fn exact_match(preds: &[PredictionRecord], gold: &[MaskedInstance]) -> Result<f64> {
    let pairs = align(preds, gold, 1)?;
    let hits = pairs
        .iter()
        .filter(|(g, p)| {
            g.gold_tokens
                .iter()
                .zip(&p.candidates)
                .all(|(t, c)| &c[0] == t)
        })
        .count();
    Ok(hits as f64 / pairs.len() as f64)
}

/// Fraction of mask positions whose top `k` candidates contain the gold token.
pub fn best_k(preds: &[PredictionRecord], gold: &[MaskedInstance], k: usize) -> Result<f64> {
    let pairs = align(preds, gold, k)?;
    let mut positions = 0usize;
    let mut hits = 0usize;
    for (g, p) in pairs {
        for (t, c) in g.gold_tokens.iter().zip(&p.candidates) {
            positions += 1;
            hits += usize::from(c[..k].contains(t));
        }
    }
    Ok(hits as f64 / positions as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    ExactMatch,
    Best1,
    Best5,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::ExactMatch, Metric::Best1, Metric::Best5];

    pub fn name(self) -> &'static str {
        match self {
            Metric::ExactMatch => "exact_match",
            Metric::Best1 => "best1",
            Metric::Best5 => "best5",
        }
    }

    pub fn compute(self, preds: &[PredictionRecord], gold: &[MaskedInstance]) -> Result<f64> {
        match self {
            Metric::ExactMatch => exact_match(preds, gold),
            Metric::Best1 => best_k(preds, gold, 1),
            Metric::Best5 => best_k(preds, gold, 5),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown metric {s:?}")))
    }
}

const RELATIVE_SUFFIX: &str = "_rel";

/// One cell of a report: a model, a fine-tuning data size, a composition
/// and an intervention (`None` for the baseline).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub model: String,
    pub data: String,
    pub composition: Composition,
    #[serde(with = "crate::interventions::label")]
    pub kind: Option<InterventionKind>,
}

/// Zero-shot, then S, M, L, then anything else.
fn data_rank(data: &str) -> u8 {
    match data {
        "0" => 0,
        "S" => 1,
        "M" => 2,
        "L" => 3,
        _ => 4,
    }
}

impl CellKey {
    fn row(&self) -> (&str, u8, &str, Composition) {
        (
            &self.model,
            data_rank(&self.data),
            &self.data,
            self.composition,
        )
    }

    fn baseline(&self) -> CellKey {
        CellKey {
            kind: None,
            ..self.clone()
        }
    }
}

impl Ord for CellKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.row()
            .cmp(&other.row())
            .then(self.kind.cmp(&other.kind))
    }
}

impl PartialOrd for CellKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    /// Accuracies in `[0, 1]`.
    pub scores: BTreeMap<Metric, f64>,
    /// Percent of the baseline, one decimal.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub relative: BTreeMap<Metric, f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreReport {
    pub cells: BTreeMap<CellKey, Cell>,
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    #[serde(flatten)]
    key: CellKey,
    #[serde(flatten)]
    cell: Cell,
}

/// Round to one decimal, halves away from zero.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// `100 * score / baseline`, rounded to one decimal.
pub fn relative(score: f64, baseline: f64) -> f64 {
    round1(100.0 * score / baseline)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Tsv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "tsv" => Ok(ReportFormat::Tsv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Invalid(format!("unknown report format {other:?}"))),
        }
    }
}

impl ScoreReport {
    pub fn set(&mut self, key: CellKey, metric: Metric, value: f64) {
        self.cells
            .entry(key)
            .or_default()
            .scores
            .insert(metric, value);
    }

    pub fn get(&self, key: &CellKey, metric: Metric) -> Option<f64> {
        self.cells.get(key)?.scores.get(&metric).copied()
    }

    pub fn relative_value(&self, key: &CellKey, metric: Metric) -> Option<f64> {
        self.cells.get(key)?.relative.get(&metric).copied()
    }

    /// Score every kind present in `gold` and add the cells under
    /// `(model, data, composition)`. A metric is skipped when the candidate
    /// lists are too short for it.
    pub fn add_scores(
        &mut self,
        model: &str,
        data: &str,
        composition: Composition,
        preds: &[PredictionRecord],
        gold: &[MaskedInstance],
    ) -> Result<()> {
        // Every prediction must belong to some gold instance.
        align(preds, gold, 1)?;
        let mut by_kind: BTreeMap<Option<InterventionKind>, Vec<MaskedInstance>> = BTreeMap::new();
        for g in gold {
            by_kind.entry(g.kind).or_default().push(g.clone());
        }
        for (kind, instances) in by_kind {
            let ids: HashMap<&str, ()> = instances.iter().map(|g| (g.id.as_str(), ())).collect();
            let subset: Vec<PredictionRecord> = preds
                .iter()
                .filter(|p| ids.contains_key(p.id.as_str()))
                .cloned()
                .collect();
            let key = CellKey {
                model: model.to_string(),
                data: data.to_string(),
                composition,
                kind,
            };
            let min_candidates = subset
                .iter()
                .flat_map(|p| p.candidates.iter().map(Vec::len))
                .min()
                .unwrap_or(0);
            for metric in Metric::ALL {
                if metric == Metric::Best5 && min_candidates < 5 {
                    continue;
                }
                self.set(key.clone(), metric, metric.compute(&subset, &instances)?);
            }
        }
        Ok(())
    }

    /// Fill in every cell's relative values. The baseline is the `None` cell
    /// with the same model, data and composition, or failing that, the
    /// first `None` cell with the same model and data.
    pub fn normalize_relative(&self) -> Result<ScoreReport> {
        let mut out = self.clone();
        for (key, cell) in out.cells.iter_mut() {
            cell.relative.clear();
            for (&metric, &score) in &cell.scores {
                let base = self.baseline_for(key, metric)?;
                if base == 0.0 {
                    return Err(Error::ZeroBaseline {
                        metric: metric.to_string(),
                        model: key.model.clone(),
                        data: key.data.clone(),
                    });
                }
                cell.relative.insert(metric, relative(score, base));
            }
        }
        Ok(out)
    }

    fn baseline_for(&self, key: &CellKey, metric: Metric) -> Result<f64> {
        if let Some(v) = self.get(&key.baseline(), metric) {
            return Ok(v);
        }
        self.cells
            .iter()
            .find(|(k, c)| {
                k.kind.is_none()
                    && k.model == key.model
                    && k.data == key.data
                    && c.scores.contains_key(&metric)
            })
            .map(|(_, c)| c.scores[&metric])
            .ok_or_else(|| Error::MissingBaseline {
                model: key.model.clone(),
                data: key.data.clone(),
            })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("model\tdata\tcomposition\tmetric");
        out.push_str("\tNone");
        for k in InterventionKind::ALL {
            out.push('\t');
            out.push_str(k.name());
        }
        out.push('\n');
        type Row<'a> = (&'a str, u8, &'a str, Composition);
        let mut rows: BTreeMap<Row, Vec<(&CellKey, &Cell)>> = BTreeMap::new();
        for (key, cell) in &self.cells {
            rows.entry(key.row()).or_default().push((key, cell));
        }
        for ((model, _, data, composition), cells) in rows {
            let columns: Vec<(Option<InterventionKind>, Option<&Cell>)> = std::iter::once(None)
                .chain(InterventionKind::ALL.map(Some))
                .map(|kind| {
                    (
                        kind,
                        cells.iter().find(|(k, _)| k.kind == kind).map(|(_, c)| *c),
                    )
                })
                .collect();
            for relative in [false, true] {
                for metric in Metric::ALL {
                    let value = |c: &Cell| {
                        if relative {
                            c.relative.get(&metric).copied()
                        } else {
                            c.scores.get(&metric).copied()
                        }
                    };
                    if !columns.iter().any(|(_, c)| c.and_then(value).is_some()) {
                        continue;
                    }
                    let suffix = if relative { RELATIVE_SUFFIX } else { "" };
                    let _ = write!(out, "{model}\t{data}\t{composition}\t{metric}{suffix}");
                    for (_, c) in &columns {
                        out.push('\t');
                        if let Some(v) = c.and_then(value) {
                            let _ = write!(out, "{v}");
                        }
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn from_tsv(raw: &str) -> Result<Self> {
        let path = Path::new("<report>");
        let mut lines = raw
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Empty("report has no header".into()))?;
        let header: Vec<&str> = header.split('\t').collect();
        if header.len() < 5 || header[..4] != ["model", "data", "composition", "metric"] {
            return Err(Error::parse(
                path,
                1,
                "expected model, data, composition, metric columns",
            ));
        }
        let kinds = header[4..]
            .iter()
            .map(|h| parse_kind_label(h))
            .collect::<Result<Vec<_>>>()?;
        let mut report = ScoreReport::default();
        for (i, line) in lines {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != header.len() {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("expected {} fields, found {}", header.len(), fields.len()),
                ));
            }
            let composition: Composition = fields[2].parse()?;
            let (metric, relative) = match fields[3].strip_suffix(RELATIVE_SUFFIX) {
                Some(m) => (m.parse::<Metric>()?, true),
                None => (fields[3].parse::<Metric>()?, false),
            };
            for (kind, field) in kinds.iter().zip(&fields[4..]) {
                if field.trim().is_empty() {
                    continue;
                }
                let value: f64 = field
                    .trim()
                    .parse()
                    .map_err(|e| Error::parse(path, i + 1, format!("{field:?}: {e}")))?;
                let key = CellKey {
                    model: fields[0].to_string(),
                    data: fields[1].to_string(),
                    composition,
                    kind: *kind,
                };
                let cell = report.cells.entry(key).or_default();
                if relative {
                    cell.relative.insert(metric, value);
                } else {
                    cell.scores.insert(metric, value);
                }
            }
        }
        Ok(report)
    }

    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<JsonRow> = self
            .cells
            .iter()
            .map(|(key, cell)| JsonRow {
                key: key.clone(),
                cell: cell.clone(),
            })
            .collect();
        Ok(serde_json::to_string_pretty(&rows)? + "\n")
    }

    pub fn from_json(raw: &str) -> Result<Self> {
        let rows: Vec<JsonRow> = serde_json::from_str(raw)?;
        Ok(ScoreReport {
            cells: rows.into_iter().map(|r| (r.key, r.cell)).collect(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if raw.trim_start().starts_with('[') {
            Self::from_json(&raw)
        } else {
            Self::from_tsv(&raw)
        }
    }

    pub fn merge(&mut self, other: ScoreReport) {
        for (key, cell) in other.cells {
            let entry = self.cells.entry(key).or_default();
            entry.scores.extend(cell.scores);
            entry.relative.extend(cell.relative);
        }
    }
}

pub fn emit_report(report: &ScoreReport, format: ReportFormat, path: &Path) -> Result<()> {
    let body = match format {
        ReportFormat::Tsv => report.to_tsv(),
        ReportFormat::Json => report.to_json()?,
    };
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}
