//! Published score tables as report fixtures.

mod common;

use std::collections::BTreeSet;

use lingvar::dataset::Composition;
use lingvar::interventions::InterventionKind;
use lingvar::metrics::{CellKey, Metric, ScoreReport};

fn table(name: &str) -> ScoreReport {
    ScoreReport::load(&common::tables_dir().join(name)).unwrap()
}

/// Cells whose relative value cannot be recomputed from the rounded 1-best
/// table within 0.1.
const INCONSISTENT: [(&str, &str, &str); 5] = [
    ("BERT", "L", "Char"),
    ("mBERT", "M", "Reg"),
    ("mBERT", "M", "Hyp"),
    ("mBERT", "L", "-End"),
    ("mBERT", "L", "Affix"),
];

#[test]
fn fixtures_have_every_cell() {
    for name in [
        "full_1best.tsv",
        "mixed_1best.tsv",
        "full_em.tsv",
        "full_5best.tsv",
        "relative.tsv",
    ] {
        let t = table(name);
        assert_eq!(t.cells.len(), 88, "{name}");
        let models: BTreeSet<&str> = t.cells.keys().map(|k| k.model.as_str()).collect();
        assert_eq!(models, BTreeSet::from(["BERT", "mBERT"]));
    }
}

#[test]
fn recomputed_relative_table() {
    let scores = table("full_1best.tsv").normalize_relative().unwrap();
    let published = table("relative.tsv");
    let mut off = BTreeSet::new();
    for (key, cell) in &published.cells {
        let expected = cell.relative[&Metric::Best1];
        let got = scores.relative_value(key, Metric::Best1).unwrap();
        if key.kind.is_none() {
            assert_eq!(got, 100.0);
        }
        if (got - expected).abs() > 0.1 + 1e-9 {
            off.insert((
                key.model.clone(),
                key.data.clone(),
                lingvar::interventions::kind_label(key.kind).to_string(),
            ));
        }
    }
    let known: BTreeSet<(String, String, String)> = INCONSISTENT
        .iter()
        .map(|(m, d, k)| (m.to_string(), d.to_string(), k.to_string()))
        .collect();
    assert_eq!(off, known);
    let ipa = CellKey {
        model: "BERT".into(),
        data: "L".into(),
        composition: Composition::Full,
        kind: Some(InterventionKind::Ipa),
    };
    assert_eq!(scores.relative_value(&ipa, Metric::Best1), Some(39.4));
}

/// Every published relative value is attainable from some pair of
/// unrounded scores consistent with the two rounded table entries.
#[test]
fn relative_values_within_rounding_intervals() {
    let scores = table("full_1best.tsv");
    let published = table("relative.tsv");
    let half = 0.0005; // half a unit in the last place of a fraction with 3 decimals
    for (key, cell) in &published.cells {
        let r = cell.relative[&Metric::Best1];
        let s = scores.get(key, Metric::Best1).unwrap();
        let base = scores
            .get(
                &CellKey {
                    kind: None,
                    ..key.clone()
                },
                Metric::Best1,
            )
            .unwrap();
        let lo = 100.0 * (s - half).max(0.0) / (base + half);
        let hi = 100.0 * (s + half) / (base - half);
        assert!(
            lo <= r + 0.05 && r - 0.05 <= hi,
            "{key:?}: {r} outside [{lo:.3}, {hi:.3}]"
        );
    }
}

#[test]
fn tables_round_trip() {
    for name in [
        "full_1best.tsv",
        "mixed_1best.tsv",
        "full_em.tsv",
        "full_5best.tsv",
        "relative.tsv",
    ] {
        let t = table(name);
        assert_eq!(ScoreReport::from_tsv(&t.to_tsv()).unwrap(), t, "{name}");
        assert_eq!(
            ScoreReport::from_json(&t.to_json().unwrap()).unwrap(),
            t,
            "{name}"
        );
    }
}

#[test]
fn merged_tables_normalize_per_composition() {
    let mut all = table("full_1best.tsv");
    all.merge(table("mixed_1best.tsv"));
    all.merge(table("full_em.tsv"));
    all.merge(table("full_5best.tsv"));
    let n = all.normalize_relative().unwrap();
    let key = |composition, kind| CellKey {
        model: "mBERT".into(),
        data: "S".into(),
        composition,
        kind,
    };
    // 10.5 / 38.8
    assert_eq!(
        n.relative_value(
            &key(Composition::Mixed, Some(InterventionKind::Ipa)),
            Metric::Best1
        ),
        Some(27.1)
    );
    // 21.2 / 63.5
    assert_eq!(
        n.relative_value(
            &key(Composition::Full, Some(InterventionKind::Ipa)),
            Metric::Best5
        ),
        Some(33.4)
    );
    assert_eq!(
        n.relative_value(&key(Composition::Full, None), Metric::ExactMatch),
        Some(100.0)
    );
}
