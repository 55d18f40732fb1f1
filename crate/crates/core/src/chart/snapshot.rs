use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::sequence::IconSequence;
use super::tables::{Assignment, Interpretation, InterpretationsTable};
use super::ParserState;
use crate::lexicon::Lexicon;

/// An assignment with instances replaced by 1-based positions and slot
/// indices replaced by case types.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacedAssignment {
    pub predicate: usize,
    pub fills: Vec<(String, Option<usize>)>,
    pub score: f64,
}

impl PlacedAssignment {
    pub fn place(a: &Assignment, sequence: &IconSequence, lexicon: &Lexicon) -> Self {
        let predicate = sequence.position(a.predicate).expect("assignment of a live predicate");
        let entry = lexicon
            .lookup(&sequence.at(predicate).expect("live").lexicon_id)
            .expect("sequence ids resolve");
        PlacedAssignment {
            predicate,
            fills: entry
                .case_structure
                .iter()
                .zip(&a.fills)
                .map(|(slot, k)| {
                    (slot.case_type.clone(), k.map(|k| sequence.position(k).expect("live filler")))
                })
                .collect(),
            score: a.score,
        }
    }

    fn same(&self, other: &Self, tol: f64) -> bool {
        self.predicate == other.predicate
            && self.fills == other.fills
            && (self.score - other.score).abs() <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacedInterpretation {
    pub choices: Vec<PlacedAssignment>,
    pub score: f64,
}

impl PlacedInterpretation {
    pub fn place(i: &Interpretation, sequence: &IconSequence, lexicon: &Lexicon) -> Self {
        PlacedInterpretation {
            choices: i.choices.iter().map(|a| PlacedAssignment::place(a, sequence, lexicon)).collect(),
            score: i.score,
        }
    }

    fn same(&self, other: &Self, tol: f64) -> bool {
        (self.score - other.score).abs() <= tol
            && self.choices.len() == other.choices.len()
            && self.choices.iter().zip(&other.choices).all(|(a, b)| a.same(b, tol))
    }
}

pub fn place_interpretations(
    table: &InterpretationsTable,
    sequence: &IconSequence,
    lexicon: &Lexicon,
) -> Vec<PlacedInterpretation> {
    table.ranked.iter().map(|i| PlacedInterpretation::place(i, sequence, lexicon)).collect()
}

/// First difference found between two snapshots.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{table} differs: {detail}")]
pub struct SnapshotMismatch {
    pub table: &'static str,
    pub detail: String,
}

/// All three charts keyed by position, comparable across sessions whose
/// instance ids differ.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSnapshot {
    pub sequence: Vec<String>,
    /// `(predicate position, case type, candidate position, raw score)`.
    pub compatibility: Vec<(usize, String, usize, f64)>,
    pub assignments: Vec<(usize, Vec<PlacedAssignment>)>,
    pub interpretations: Vec<PlacedInterpretation>,
}

impl ChartSnapshot {
    pub(super) fn capture(state: &ParserState) -> Self {
        let seq = state.sequence();
        let lexicon = state.lexicon();
        let case_type = |p: usize, slot: usize| {
            let entry = lexicon.lookup(&seq.at(p).expect("live").lexicon_id).expect("resolves");
            entry.case_structure[slot].case_type.clone()
        };
        let mut compatibility: Vec<_> = state
            .compatibility()
            .iter()
            .map(|((p, slot, k), raw)| {
                let pp = seq.position(p).expect("live");
                (pp, case_type(pp, slot), seq.position(k).expect("live"), raw)
            })
            .collect();
        compatibility.sort_by(|a, b| (a.0, &a.1, a.2).cmp(&(b.0, &b.1, b.2)));
        ChartSnapshot {
            sequence: seq.lexicon_ids().map(String::from).collect(),
            compatibility,
            assignments: state
                .assignments()
                .iter()
                .map(|(p, list)| {
                    (
                        seq.position(p).expect("live"),
                        list.iter().map(|a| PlacedAssignment::place(a, seq, lexicon)).collect(),
                    )
                })
                .collect(),
            interpretations: state
                .interpretations()
                .map(|t| place_interpretations(t, seq, lexicon))
                .unwrap_or_default(),
        }
    }

    /// Same entries in the same order, scores within `tol`.
    pub fn compare(&self, other: &Self, tol: f64) -> Result<(), SnapshotMismatch> {
        let fail = |table, detail| Err(SnapshotMismatch { table, detail });
        if self.sequence != other.sequence {
            return fail("sequence", format!("{:?} vs {:?}", self.sequence, other.sequence));
        }
        if self.compatibility.len() != other.compatibility.len() {
            return fail(
                "compatibility",
                format!("{} vs {} entries", self.compatibility.len(), other.compatibility.len()),
            );
        }
        for (a, b) in self.compatibility.iter().zip(&other.compatibility) {
            if (a.0, &a.1, a.2) != (b.0, &b.1, b.2) || (a.3 - b.3).abs() > tol {
                return fail("compatibility", format!("{a:?} vs {b:?}"));
            }
        }
        if self.assignments.len() != other.assignments.len() {
            return fail("assignments", format!("{} vs {} predicates", self.assignments.len(), other.assignments.len()));
        }
        for ((pa, la), (pb, lb)) in self.assignments.iter().zip(&other.assignments) {
            if pa != pb || la.len() != lb.len() {
                return fail("assignments", format!("predicate {pa} ({} rows) vs {pb} ({} rows)", la.len(), lb.len()));
            }
            for (rank, (a, b)) in la.iter().zip(lb).enumerate() {
                if !a.same(b, tol) {
                    return fail("assignments", format!("predicate {pa} rank {}: {a:?} vs {b:?}", rank + 1));
                }
            }
        }
        compare_rankings(&self.interpretations, &other.interpretations, tol)
    }
}

/// Compares two ranked interpretation lists entry by entry.
pub fn compare_rankings(
    a: &[PlacedInterpretation],
    b: &[PlacedInterpretation],
    tol: f64,
) -> Result<(), SnapshotMismatch> {
    for (rank, (x, y)) in a.iter().zip(b).enumerate() {
        if !x.same(y, tol) {
            return Err(SnapshotMismatch {
                table: "interpretations",
                detail: format!("rank {}: {x:?} vs {y:?}", rank + 1),
            });
        }
    }
    if a.len() != b.len() {
        return Err(SnapshotMismatch {
            table: "interpretations",
            detail: format!("{} vs {} ranked entries", a.len(), b.len()),
        });
    }
    Ok(())
}
