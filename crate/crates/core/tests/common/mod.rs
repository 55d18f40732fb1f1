#![allow(dead_code)]

use rand::Rng;
use semchart_core::lexicon::{CaseSlot, Feature, FeatureSet, FeatureValue, LexEntry, Lexicon, ValueKind};

const ATTRIBUTES: [&str; 4] = ["animate", "human", "liquid", "concrete"];
const CASES: [&str; 3] = ["agent", "object", "goal"];

fn random_value(rng: &mut impl Rng) -> FeatureValue {
    match rng.gen_range(0..4) {
        0 => FeatureValue::plus(),
        1 => FeatureValue::minus(),
        // quarter steps keep sums exactly representable
        _ => FeatureValue::real(rng.gen_range(-4..=4) as f64 / 4.0).unwrap(),
    }
}

fn random_set(rng: &mut impl Rng, min: usize, max: usize) -> FeatureSet {
    let n = rng.gen_range(min..=max);
    let mut attrs = ATTRIBUTES.to_vec();
    let mut set = FeatureSet::new();
    for _ in 0..n {
        let a = attrs.swap_remove(rng.gen_range(0..attrs.len()));
        set.insert(Feature::new(a, random_value(rng))).unwrap();
    }
    set
}

/// A lexicon of `n` distinct random icons `i1..in` (valency 0..=max_valency)
/// and the sequence listing them in order.
pub fn random_instance(rng: &mut impl Rng, n: usize, max_valency: usize) -> (Lexicon, Vec<String>) {
    let ids: Vec<String> = (1..=n).map(|i| format!("i{i}")).collect();
    let entries = ids.iter().map(|id| {
        let mut e = LexEntry::new(id.clone(), id.clone(), random_set(rng, 0, 3));
        let v = rng.gen_range(0..=max_valency);
        for case in &CASES[..v] {
            e = e.with_case(CaseSlot::new(*case, random_set(rng, 1, 2)));
        }
        e
    });
    (Lexicon::new(entries).unwrap(), ids)
}

/// Random sequence over an existing lexicon, repeats allowed.
pub fn random_sequence(rng: &mut impl Rng, lexicon: &Lexicon, n: usize) -> Vec<String> {
    let ids: Vec<&str> = lexicon.entries().map(|e| e.id.as_str()).collect();
    (0..n).map(|_| ids[rng.gen_range(0..ids.len())].to_string()).collect()
}

/// Flat-ontology feature match, written out from the definition.
fn feature_match(intrinsic: &FeatureValue, selectional: &FeatureValue) -> f64 {
    let both_int = intrinsic.kind() == ValueKind::Integer && selectional.kind() == ValueKind::Integer;
    if both_int {
        if intrinsic.magnitude() == selectional.magnitude() { 1.0 } else { -1.0 }
    } else {
        intrinsic.magnitude() * selectional.magnitude()
    }
}

/// Structure compatibility by attribute lookup rather than the double loop.
pub fn oracle_compat(intrinsic: &FeatureSet, selectional: &FeatureSet) -> f64 {
    let total: f64 = selectional
        .iter()
        .filter_map(|s| intrinsic.get(&s.attribute).map(|i| feature_match(i, &s.value)))
        .sum();
    total / selectional.len() as f64
}

/// Best score over every way to fill (or leave open) each slot of the
/// predicate at `pred` with distinct other icons, by exhaustive search.
pub fn oracle_best_assignment(
    lexicon: &Lexicon,
    ids: &[&str],
    pred: usize,
    gamma: f64,
    threshold: f64,
) -> (f64, Vec<Option<usize>>) {
    let entry = lexicon.lookup(ids[pred]).unwrap();
    let v = entry.valency();
    let n = ids.len();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    // each slot picks 0 (open) or 1 + icon index
    let total = (n + 1).pow(v as u32);
    for code in 0..total {
        let mut c = code;
        let picks: Vec<Option<usize>> = (0..v)
            .map(|_| {
                let d = c % (n + 1);
                c /= n + 1;
                d.checked_sub(1)
            })
            .collect();
        let filled: Vec<usize> = picks.iter().flatten().copied().collect();
        let mut distinct = filled.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() != filled.len() || filled.contains(&pred) {
            continue;
        }
        let mut score = 0.0;
        let mut ok = true;
        for (slot, pick) in picks.iter().enumerate() {
            if let Some(k) = pick {
                let raw = oracle_compat(
                    &lexicon.lookup(ids[*k]).unwrap().intrinsic,
                    &entry.case_structure[slot].selectional,
                );
                if raw < threshold {
                    ok = false;
                }
                score += gamma.powi(pred.abs_diff(*k) as i32) * raw;
            }
        }
        if ok && score > best.0 {
            best = (score, picks);
        }
    }
    best
}
