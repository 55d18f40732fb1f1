use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::sequence::InstanceId;
use crate::compatibility::{fading, FadingConfig};

/// Chart (a): raw structure compatibilities that passed the threshold, keyed
/// by (predicate, case-slot index, candidate).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompatibilityTable {
    entries: BTreeMap<(InstanceId, usize, InstanceId), f64>,
}

impl CompatibilityTable {
    pub fn get(&self, predicate: InstanceId, slot: usize, candidate: InstanceId) -> Option<f64> {
        self.entries.get(&(predicate, slot, candidate)).copied()
    }

    pub(crate) fn insert(&mut self, predicate: InstanceId, slot: usize, candidate: InstanceId, raw: f64) {
        debug_assert_ne!(predicate, candidate);
        self.entries.insert((predicate, slot, candidate), raw);
    }

    /// Candidates that passed for one slot, in sequence order.
    pub fn candidates(
        &self,
        predicate: InstanceId,
        slot: usize,
    ) -> impl Iterator<Item = (InstanceId, f64)> + '_ {
        self.entries
            .range((predicate, slot, InstanceId::MIN)..=(predicate, slot, InstanceId::MAX))
            .map(|(&(_, _, c), &raw)| (c, raw))
    }

    pub(crate) fn retain(&mut self, mut keep: impl FnMut(InstanceId, InstanceId) -> bool) {
        self.entries.retain(|&(p, _, c), _| keep(p, c));
    }

    /// `((predicate, slot, candidate), raw)` in key order.
    pub fn iter(&self) -> impl Iterator<Item = ((InstanceId, usize, InstanceId), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One predicate's allotment of candidates to its case slots.
///
/// `fills[i]` is the filler of the `i`-th slot of the predicate's case
/// structure, or `None` when the slot is left open.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub predicate: InstanceId,
    pub fills: Vec<Option<InstanceId>>,
    pub score: f64,
}

impl Assignment {
    /// No slot filled, score 0.
    pub fn empty(predicate: InstanceId, valency: usize) -> Self {
        Assignment { predicate, fills: alloc::vec![None; valency], score: 0.0 }
    }

    pub fn is_empty(&self) -> bool {
        self.fills.iter().all(Option::is_none)
    }

    pub fn fillers(&self) -> impl Iterator<Item = InstanceId> + '_ {
        self.fills.iter().flatten().copied()
    }
}

/// Sum of faded raw values over filled slots, in slot order.
///
/// Every engine scores through this function so identical inputs produce
/// identical bits.
pub fn score_fills(
    predicate_pos: usize,
    filled: impl IntoIterator<Item = (usize, f64)>,
    cfg: &FadingConfig,
) -> f64 {
    let mut score = 0.0;
    for (candidate_pos, raw) in filled {
        score += fading(predicate_pos.abs_diff(candidate_pos), cfg) * raw;
    }
    score
}

/// Ranking of two assignments of the same predicate: higher score first, then
/// the vector of filler positions read in case-type order (open slots sort
/// before any position).
pub fn assignment_order(
    a: &Assignment,
    b: &Assignment,
    case_order: &[usize],
    position: &impl Fn(InstanceId) -> usize,
) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| {
        for &slot in case_order {
            let pa = a.fills[slot].map(position);
            let pb = b.fills[slot].map(position);
            match pa.cmp(&pb) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    })
}

/// Chart (b): retained assignments per predicate, best first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssignmentsTable {
    pub(crate) per_predicate: BTreeMap<InstanceId, Vec<Assignment>>,
}

impl AssignmentsTable {
    pub fn get(&self, predicate: InstanceId) -> Option<&[Assignment]> {
        self.per_predicate.get(&predicate).map(Vec::as_slice)
    }

    /// Predicates in sequence order with their ranked lists.
    pub fn iter(&self) -> impl Iterator<Item = (InstanceId, &[Assignment])> {
        self.per_predicate.iter().map(|(&p, v)| (p, v.as_slice()))
    }

    pub fn predicate_count(&self) -> usize {
        self.per_predicate.len()
    }
}

/// One assignment per predicate, in sequence order.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpretation {
    pub choices: Vec<Assignment>,
    pub score: f64,
}

impl Interpretation {
    pub fn choice(&self, predicate: InstanceId) -> Option<&Assignment> {
        self.choices.iter().find(|a| a.predicate == predicate)
    }
}

/// Chart (c): interpretations ranked best first, truncated to `top_m`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InterpretationsTable {
    pub ranked: Vec<Interpretation>,
}

impl InterpretationsTable {
    pub fn best(&self) -> Option<&Interpretation> {
        self.ranked.first()
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }
}
