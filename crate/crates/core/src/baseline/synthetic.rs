//! Synthetic inputs for counter checks and benchmarks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::lexicon::{CaseSlot, Feature, FeatureSet, FeatureValue, LexEntry, Lexicon};

fn thing() -> FeatureSet {
    FeatureSet::from_features([Feature::new("thing", FeatureValue::plus())]).expect("one attribute")
}

fn predicate(id: String, valency: usize) -> LexEntry {
    (1..=valency).fold(LexEntry::new(id.clone(), id, thing()), |e, k| {
        e.with_case(CaseSlot::new(format!("role{k}"), thing()))
    })
}

/// `n` icons, all predicative with `valency` slots, and every role/filler
/// pair scoring 1.0 so nothing falls under any threshold up to 1.
pub fn worst_case(n: usize, valency: usize) -> (Lexicon, Vec<String>) {
    let ids: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
    let lexicon = Lexicon::new(ids.iter().map(|id| predicate(id.clone(), valency)))
        .expect("generated entries are valid");
    (lexicon, ids)
}

/// `n` icons of which `predicates` are predicative with `valency` slots,
/// spread evenly through the sequence; the rest are plain fillers. Every
/// role/filler pair scores 1.0.
pub fn mixed(n: usize, predicates: usize, valency: usize) -> (Lexicon, Vec<String>) {
    assert!(predicates <= n);
    let is_predicate = |i: usize| predicates > 0 && (i * predicates) % n < predicates;
    let mut entries = Vec::new();
    let ids: Vec<String> = (0..n)
        .map(|i| {
            let id = format!("{}{}", if is_predicate(i) { "p" } else { "f" }, i + 1);
            entries.push(if is_predicate(i) {
                predicate(id.clone(), valency)
            } else {
                LexEntry::new(id.clone(), id.clone(), thing())
            });
            id
        })
        .collect();
    (Lexicon::new(entries).expect("generated entries are valid"), ids)
}
