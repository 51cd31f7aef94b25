use std::collections::HashMap;
use std::sync::OnceLock;

use proptest::collection::vec;
use proptest::prelude::*;

use lingvar::corpus::{
    compute_stats, is_word, sample_split, tokenize_words, Sentence, Source, SplitSize,
};
use lingvar::dataset::MaskedInstance;
use lingvar::interventions::{
    apply_to_sentence, char_split, ipa, pig, shift, InterventionKind, Resources,
};
use lingvar::metrics::{
    best_k, exact_match, relative, CellKey, Metric, PredictionRecord, ScoreReport,
};
use lingvar::seed::SeedKey;
use lingvar::wordpiece::{char_pieces, tokenize_word, tokenize_word_dropout, Vocab};

fn vocab() -> &'static Vocab {
    static VOCAB: OnceLock<Vocab> = OnceLock::new();
    VOCAB.get_or_init(Vocab::bert_base_cased)
}

fn word() -> impl Strategy<Value = String> {
    "[a-zA-Z]{1,16}"
}

fn apply_n(mut w: String, n: usize, f: impl Fn(&str) -> String) -> String {
    for _ in 0..n {
        w = f(&w);
    }
    w
}

fn surface(r: lingvar::interventions::InterventionResult) -> String {
    r.surface().unwrap().to_string()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn ipa_is_an_involution(w in word()) {
        prop_assert_eq!(surface(ipa(&surface(ipa(&w)))), w);
    }

    #[test]
    fn shift_has_period_26(w in word()) {
        prop_assert_eq!(apply_n(w.clone(), 26, |x| surface(shift(x))), w.clone());
        prop_assert!(shift(&w).changed);
    }

    #[test]
    fn spelling_outputs_stay_alphabetic(w in word()) {
        for r in [ipa(&w), shift(&w), pig(&w)] {
            let out = surface(r);
            prop_assert!(is_word(&out), "{out:?}");
        }
    }

    #[test]
    fn changed_flag_is_exact(w in word()) {
        for r in [ipa(&w), shift(&w), pig(&w)] {
            let changed = r.changed;
            prop_assert_eq!(changed, surface(r) != w);
        }
    }

    #[test]
    fn char_split_counts_letters(w in word()) {
        let r = char_split(&w);
        let p = r.pieces().unwrap();
        prop_assert_eq!(p.tokens.len(), w.chars().count());
        prop_assert_eq!(p.detokenize(), w.clone());
        prop_assert_eq!(r.changed, w.chars().count() > 1);
    }

    #[test]
    fn dropout_limits(w in "[a-z]{1,20}", seed in any::<u64>()) {
        let v = vocab();
        let key = SeedKey::derive(seed, &["limits"]);
        prop_assert_eq!(tokenize_word_dropout(&w, v, 0.0, &key), tokenize_word(&w, v));
        prop_assert_eq!(tokenize_word_dropout(&w, v, 1.0, &key), char_pieces(&w));
    }

    #[test]
    fn tokenization_detokenizes(w in "[a-zA-Z]{1,24}", seed in any::<u64>(), p in 0.0f64..=1.0) {
        let v = vocab();
        let plain = tokenize_word(&w, v);
        prop_assert!(!plain.is_unknown());
        prop_assert_eq!(plain.detokenize(), w.clone());
        let dropped = tokenize_word_dropout(&w, v, p, &SeedKey::derive(seed, &[]));
        prop_assert_eq!(dropped.detokenize(), w);
    }

    #[test]
    fn word_predicate_matches_definition(s in "\\PC{0,8}") {
        prop_assert_eq!(is_word(&s), !s.is_empty() && s.chars().all(char::is_alphabetic));
    }

    #[test]
    fn word_level_kinds_keep_non_words(text in "[a-zA-Z ,.;!?0-9'-]{1,60}", seed in any::<u64>()) {
        let res = Resources { vocab: Some(vocab().clone()), ..Resources::default() };
        let s = Sentence { id: "p".into(), text: text.clone(), source: Source::Test };
        let before: Vec<_> = tokenize_words(&text).into_iter().filter(|t| !t.is_word).map(|t| t.surface).collect();
        for kind in [InterventionKind::Ipa, InterventionKind::Shift, InterventionKind::Pig, InterventionKind::Reg, InterventionKind::Char] {
            let t = apply_to_sentence(Some(kind), &s, &res, seed).unwrap();
            let after: Vec<_> = t.tokens.iter().filter(|t| !t.is_word).map(|t| t.surface.clone()).collect();
            prop_assert_eq!(&after, &before);
            for tok in &t.tokens {
                let span: String = t.text.chars().skip(tok.span.0).take(tok.span.1 - tok.span.0).collect();
                prop_assert_eq!(&span, &tok.surface);
            }
        }
    }

    #[test]
    fn split_ignores_pool_order(mut ids in vec("[a-z]{6}", 264..400), seed in any::<u64>()) {
        ids.sort();
        ids.dedup();
        prop_assume!(ids.len() >= 264);
        let a = sample_split(ids.iter().map(String::as_str), SplitSize::S, seed).unwrap();
        let b = sample_split(ids.iter().rev().map(String::as_str), SplitSize::S, seed).unwrap();
        prop_assert_eq!(a.ids.len(), 264);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn stats_match_oracle(counts in vec(2usize..60, 1..1000)) {
        let stats = compute_stats(&counts).unwrap();
        // Smallest count with at least pct percent of counts at or below it.
        let oracle = |pct: usize| {
            let mut values = counts.clone();
            values.sort();
            values.dedup();
            *values.iter().find(|&&v| counts.iter().filter(|&&c| c <= v).count() * 100 >= pct * counts.len()).unwrap()
        };
        prop_assert_eq!(stats.p25, oracle(25));
        prop_assert_eq!(stats.p50, oracle(50));
        prop_assert_eq!(stats.p75, oracle(75));
        prop_assert_eq!(stats.sentence_count, counts.len());
        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        prop_assert!((stats.mean_words - mean).abs() < 1e-12);
    }

    #[test]
    fn relative_to_self_is_100(score in 1e-6f64..1.0) {
        let key = CellKey { model: "m".into(), data: "S".into(), composition: lingvar::dataset::Composition::Full, kind: None };
        let mut r = ScoreReport::default();
        r.set(key.clone(), Metric::Best1, score);
        let n = r.normalize_relative().unwrap();
        prop_assert_eq!(n.relative_value(&key, Metric::Best1), Some(100.0));
        prop_assert_eq!(relative(score, score), 100.0);
    }
}

type Fixture = (Vec<MaskedInstance>, Vec<PredictionRecord>);

fn fixture() -> impl Strategy<Value = Fixture> {
    let token = prop::sample::select(vec!["a", "b", "c", "##d", "##e", "f"]);
    let position = (token.clone(), vec(token, 5..8));
    vec(vec(position, 1..4), 1..100).prop_map(|instances| {
        let mut gold = Vec::new();
        let mut preds = Vec::new();
        for (i, positions) in instances.into_iter().enumerate() {
            let id = format!("i{i}");
            gold.push(MaskedInstance {
                id: id.clone(),
                split: "test".into(),
                kind: None,
                composition: None,
                tokens: vec!["[MASK]".into(); positions.len()],
                mask_positions: (0..positions.len()).collect(),
                gold_tokens: positions.iter().map(|(g, _)| g.to_string()).collect(),
                masked_word_index: 0,
            });
            preds.push(PredictionRecord {
                id,
                candidates: positions
                    .iter()
                    .map(|(_, c)| c.iter().map(|t| t.to_string()).collect())
                    .collect(),
            });
        }
        preds.reverse();
        (gold, preds)
    })
}

/// Direct enumeration over positions.
fn oracle(gold: &[MaskedInstance], preds: &[PredictionRecord], k: usize) -> (f64, f64) {
    let by_id: HashMap<&str, &PredictionRecord> =
        preds.iter().map(|p| (p.id.as_str(), p)).collect();
    let mut all_right = 0;
    let mut hits = 0;
    let mut total = 0;
    for g in gold {
        let p = by_id[g.id.as_str()];
        let mut right = true;
        for j in 0..g.gold_tokens.len() {
            total += 1;
            if p.candidates[j][0] != g.gold_tokens[j] {
                right = false;
            }
            if (0..k).any(|r| p.candidates[j][r] == g.gold_tokens[j]) {
                hits += 1;
            }
        }
        if right {
            all_right += 1;
        }
    }
    (
        all_right as f64 / gold.len() as f64,
        hits as f64 / total as f64,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metrics_match_oracle((gold, preds) in fixture()) {
        for k in 1..=5 {
            let (em, bk) = oracle(&gold, &preds, k);
            prop_assert_eq!(exact_match(&preds, &gold).unwrap(), em);
            prop_assert_eq!(best_k(&preds, &gold, k).unwrap(), bk);
        }
    }

    #[test]
    fn best_k_is_monotone((gold, preds) in fixture()) {
        let scores: Vec<f64> = (1..=5).map(|k| best_k(&preds, &gold, k).unwrap()).collect();
        prop_assert!(scores.windows(2).all(|w| w[0] <= w[1]), "{scores:?}");
        prop_assert!(scores.iter().all(|s| (0.0..=1.0).contains(s)));
    }
}
