use alloc::vec;
use alloc::vec::Vec;

use super::sequence::InstanceId;
use super::tables::{score_fills, Assignment, Interpretation, InterpretationsTable};
use crate::baseline::OpCounters;
use crate::compatibility::FadingConfig;

/// A candidate that passed the threshold for one slot.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SlotOption {
    pub id: InstanceId,
    pub position: usize,
    pub raw: f64,
}

pub(crate) struct AssignmentSearch<'a> {
    pub predicate: InstanceId,
    pub predicate_pos: usize,
    /// Passing candidates per case slot, in slot order.
    pub options: &'a [Vec<SlotOption>],
    pub strict_fill: bool,
    /// When set, only assignments with at least one filler whose id is at
    /// least this value are scored and returned.
    pub newer_than: Option<InstanceId>,
    pub fading: &'a FadingConfig,
}

impl AssignmentSearch<'_> {
    /// Every injective allotment of passing candidates to slots. In strict
    /// mode each slot must be filled; otherwise any slot may stay open.
    pub fn run(&self, counters: &mut OpCounters) -> Vec<Assignment> {
        let mut out = Vec::new();
        let mut chosen: Vec<Option<SlotOption>> = vec![None; self.options.len()];
        self.descend(0, &mut chosen, &mut out, counters);
        out
    }

    fn descend(
        &self,
        slot: usize,
        chosen: &mut Vec<Option<SlotOption>>,
        out: &mut Vec<Assignment>,
        counters: &mut OpCounters,
    ) {
        if slot == self.options.len() {
            if let Some(floor) = self.newer_than {
                if !chosen.iter().flatten().any(|o| o.id >= floor) {
                    return;
                }
            }
            counters.assignment_scorings += 1;
            let score = score_fills(
                self.predicate_pos,
                chosen.iter().flatten().map(|o| (o.position, o.raw)),
                self.fading,
            );
            out.push(Assignment {
                predicate: self.predicate,
                fills: chosen.iter().map(|o| o.map(|o| o.id)).collect(),
                score,
            });
            return;
        }
        if !self.strict_fill {
            chosen[slot] = None;
            self.descend(slot + 1, chosen, out, counters);
        }
        for option in &self.options[slot] {
            if chosen[..slot].iter().flatten().any(|o| o.id == option.id) {
                continue;
            }
            chosen[slot] = Some(*option);
            self.descend(slot + 1, chosen, out, counters);
        }
        chosen[slot] = None;
    }
}

/// Sum of assignment scores in predicate order.
pub fn interpretation_score<'a>(choices: impl IntoIterator<Item = &'a Assignment>) -> f64 {
    let mut score = 0.0;
    for a in choices {
        score += a.score;
    }
    score
}

/// Scores every element of the cartesian product of the per-predicate lists
/// and keeps the best `top_m`. Ties keep the lexicographically smaller
/// vector of per-predicate list indices.
pub(crate) fn rank_interpretations(
    lists: &[&[Assignment]],
    top_m: usize,
    counters: &mut OpCounters,
) -> InterpretationsTable {
    debug_assert!(lists.iter().all(|l| !l.is_empty()));
    let sums_per_leaf = lists.len().saturating_sub(1) as u64;
    let total = lists
        .iter()
        .try_fold(1usize, |acc, l| acc.checked_mul(l.len()));
    let keep_all = total.is_some_and(|t| t <= top_m);

    let mut kept: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut index = vec![0usize; lists.len()];
    loop {
        let score = interpretation_score(lists.iter().zip(&index).map(|(l, &i)| &l[i]));
        counters.interpretations_scored += 1;
        counters.elementary_sums += sums_per_leaf;
        if keep_all {
            kept.push((score, index.clone()));
        } else if kept.len() < top_m || kept.last().is_some_and(|w| score > w.0) {
            let at = kept.partition_point(|k| k.0.total_cmp(&score).is_ge());
            kept.insert(at, (score, index.clone()));
            kept.truncate(top_m);
        }
        // odometer, last predicate fastest
        let mut d = lists.len();
        loop {
            if d == 0 {
                if keep_all {
                    kept.sort_by(|a, b| b.0.total_cmp(&a.0));
                }
                return InterpretationsTable {
                    ranked: kept
                        .into_iter()
                        .map(|(score, idx)| Interpretation {
                            choices: lists.iter().zip(&idx).map(|(l, &i)| l[i].clone()).collect(),
                            score,
                        })
                        .collect(),
                };
            }
            d -= 1;
            index[d] += 1;
            if index[d] < lists[d].len() {
                break;
            }
            index[d] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(p: u32, score: f64) -> Assignment {
        Assignment { predicate: InstanceId(p), fills: Vec::new(), score }
    }

    #[test]
    fn product_of_two_lists_of_three() {
        let l1 = [a(0, 3.0), a(0, 2.0), a(0, 1.0)];
        let l2 = [a(1, 0.3), a(1, 0.2), a(1, 0.1)];
        let mut c = OpCounters::default();
        let t = rank_interpretations(&[&l1, &l2], usize::MAX, &mut c);
        assert_eq!(t.len(), 9);
        assert_eq!(c.interpretations_scored, 9);
        assert_eq!(c.elementary_sums, 9);
        assert!((t.ranked[0].score - 3.3).abs() < 1e-12);
        assert!((t.ranked[8].score - 1.1).abs() < 1e-12);
    }

    #[test]
    fn zero_predicates_give_one_empty_interpretation() {
        let mut c = OpCounters::default();
        let t = rank_interpretations(&[], 10, &mut c);
        assert_eq!(t.len(), 1);
        assert!(t.ranked[0].choices.is_empty());
        assert_eq!(t.ranked[0].score, 0.0);
        assert_eq!(c.elementary_sums, 0);
    }

    #[test]
    fn bounded_selection_matches_full_sort() {
        let l1: Vec<_> = [0.5, 0.5, 0.25, 0.0].iter().map(|&s| a(0, s)).collect();
        let l2: Vec<_> = [1.0, 0.75, 0.75, 0.5, 0.25].iter().map(|&s| a(1, s)).collect();
        let l3: Vec<_> = [0.125, 0.0].iter().map(|&s| a(2, s)).collect();
        let lists: [&[Assignment]; 3] = [&l1, &l2, &l3];
        let full = rank_interpretations(&lists, usize::MAX, &mut OpCounters::default());
        for m in 1..=full.len() {
            let top = rank_interpretations(&lists, m, &mut OpCounters::default());
            assert_eq!(top.ranked[..], full.ranked[..m], "top_m = {m}");
        }
    }

    #[test]
    fn ties_keep_enumeration_order() {
        let first = Assignment { predicate: InstanceId(0), fills: vec![Some(InstanceId(5))], score: 1.0 };
        let second = Assignment { fills: vec![Some(InstanceId(6))], ..first.clone() };
        let l1 = [first.clone(), second.clone()];
        let t = rank_interpretations(&[&l1], 1, &mut OpCounters::default());
        assert_eq!(t.ranked[0].choices, core::slice::from_ref(&first));
        let full = rank_interpretations(&[&l1], 2, &mut OpCounters::default());
        assert_eq!(full.ranked[0].choices, [first]);
        assert_eq!(full.ranked[1].choices, [second]);
    }
}
