use alloc::sync::Arc;
use alloc::vec::Vec;

use super::synthetic::worst_case;
use super::*;
use crate::chart::{InstanceId, ParseError, ParserConfig, ParserState};
use crate::lexicon::fixtures::micro;

fn strict_exhaustive() -> ParserConfig {
    ParserConfig { strict_fill: true, ..ParserConfig::exhaustive() }
}

#[test]
fn micro_lexicon_best_matches_chart() {
    let lex = micro();
    let out = recursive_parse(&lex, &["cat", "drink", "milk"], &ParserConfig::default()).unwrap();
    let best = out.table.best().unwrap();
    assert!((best.score - 1.0).abs() < 1e-9);
    assert_eq!(best.choices[0].fills, [Some(InstanceId(0)), Some(InstanceId(2))]);
    // No per-predicate truncation here: all four assignments survive.
    assert_eq!(out.table.len(), 4);
}

#[test]
fn one_enumeration_recomputes_each_slot_per_upstream_choice() {
    // A single predicate among three icons: (N-1) + (N-1)^2 = 2 + 4.
    let lex = micro();
    let out = recursive_parse(&lex, &["cat", "drink", "milk"], &strict_exhaustive()).unwrap();
    assert_eq!(out.counters.structure_compat_evals, 6);
    assert_eq!(out.counters.assignment_scorings, 2);
}

#[test]
fn worst_case_three_icons_valency_two() {
    let (lex, ids) = worst_case(3, 2);
    let out = recursive_parse(&lex, &ids, &strict_exhaustive()).unwrap();
    // P = 2; enumerations = 1 + 2 + 4; each enumeration costs 2 + 4 = 6.
    assert_eq!(out.counters.structure_compat_evals, 6 * (1 + 2 + 4));
    assert_eq!(out.counters.assignment_scorings, 2 + 4 + 8);
    assert_eq!(out.counters.interpretations_scored, 8);
    assert_eq!(out.counters.elementary_sums, 2 * 8);
}

#[test]
fn single_predicate_alone() {
    let (lex, ids) = worst_case(1, 2);
    let out = recursive_parse(&lex, &ids, &strict_exhaustive()).unwrap();
    assert_eq!(out.table.len(), 1);
    assert!(out.table.ranked[0].choices[0].is_empty());
    assert_eq!(out.counters.structure_compat_evals, 0);
    assert_eq!(out.counters.assignment_scorings, 0);
}

#[test]
fn budget_guard() {
    let (lex, ids) = worst_case(5, 2);
    let err = recursive_parse_with_budget(&lex, &ids, &strict_exhaustive(), 100.0).unwrap_err();
    assert!(matches!(err, ParseError::BudgetExceeded { budget, .. } if budget == 100.0));
}

#[test]
fn prediction_bounds_actual_work() {
    for (n, v) in [(3, 1), (3, 2), (4, 2), (5, 1)] {
        let (lex, ids) = worst_case(n, v);
        for config in [strict_exhaustive(), ParserConfig::exhaustive()] {
            let out = recursive_parse(&lex, &ids, &config).unwrap();
            let c = out.counters;
            let actual = (c.structure_compat_evals + c.assignment_scorings + c.interpretations_scored) as f64;
            assert!(actual <= predicted_work(&lex, &ids, &config).unwrap(), "n={n} v={v}");
        }
    }
}

#[test]
fn bounded_top_m_equals_prefix_of_full_ranking() {
    let lex = micro();
    let ids = ["cat", "drink", "dog", "milk", "drink"];
    let full = recursive_parse(&lex, &ids, &ParserConfig::exhaustive()).unwrap();
    for m in [1, 2, 5, 17] {
        let cfg = ParserConfig { top_m_interpretations: m, ..ParserConfig::exhaustive() };
        let top = recursive_parse(&lex, &ids, &cfg).unwrap();
        assert_eq!(top.table.ranked[..], full.table.ranked[..m]);
    }
}

#[test]
fn engines_agree_on_micro_sequences() {
    let lex = Arc::new(micro());
    let sequences: [&[&str]; 5] = [
        &[],
        &["daddy"],
        &["cat", "drink", "milk"],
        &["milk", "write", "daddy", "drink", "cat"],
        &["drink", "drink", "cat"],
    ];
    for ids in sequences {
        for config in [strict_exhaustive(), ParserConfig::exhaustive()] {
            let cmp = compare_engines(&lex, ids, &config, &mut || 0.0).unwrap();
            assert!(cmp.is_equal(), "{ids:?}: {:?}", cmp.verdict);
        }
    }
}

#[test]
fn worst_case_chart_counters() {
    for n in 3..=5usize {
        let (lex, ids) = worst_case(n, 2);
        let mut state = ParserState::new(Arc::new(lex), strict_exhaustive()).unwrap();
        state.parse_from_scratch(&ids).unwrap();
        let c = state.counters();
        assert_eq!(c.structure_compat_evals, (n * (n - 1) * 2) as u64);
        assert_eq!(c.assignment_scorings, n as u64 * permutations(n as u64 - 1, 2).unwrap() as u64);
    }
}

#[test]
fn comparison_reports_predictions_when_in_range() {
    let (lex, ids) = worst_case(4, 2);
    let cmp = compare_engines(&Arc::new(lex), &ids, &strict_exhaustive(), &mut || 0.0).unwrap();
    let (rec, chart) = cmp.predictions.unwrap();
    assert_eq!(chart.role_filler, 24);
    assert_eq!(rec.sums, 3888);
    let empty: Vec<&str> = Vec::new();
    let cmp = compare_engines(&Arc::new(micro()), &empty, &strict_exhaustive(), &mut || 0.0).unwrap();
    assert!(cmp.is_equal());
    assert!(cmp.predictions.is_none());
}
