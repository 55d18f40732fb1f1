//! Memo-free backtracking parser.
//!
//! Walks predicates in sequence order (the first predicate heads the
//! backtracking chain) and, inside each predicate, its case slots in order.
//! Nothing is cached: entering a slot recomputes the raw score of every other
//! icon for that slot, and every choice made for one predicate re-enumerates
//! all the predicates after it. Slot fillers are generated independently and
//! checked for distinctness only once the last slot is chosen, so one
//! enumeration of a valency-`V` predicate computes
//! `sum_{k=1..V} (N-1)^k` raw scores when nothing is thresholded away.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::OpCounters;
use crate::chart::{
    assignment_order, case_order, check_input, interpretation_score, score_fills, Assignment,
    IconSequence, InstanceId, Interpretation, InterpretationsTable, ParseError, ParserConfig,
};
use crate::compatibility::structure_compat;
use crate::lexicon::{LexEntry, Lexicon};

/// Default ceiling on [`predicted_work`] before the engine refuses to run.
pub const DEFAULT_WORK_BUDGET: f64 = 5e9;

#[derive(Debug, Clone)]
pub struct RecursiveOutcome {
    pub sequence: IconSequence,
    pub table: InterpretationsTable,
    pub counters: OpCounters,
}

/// Runs the backtracking parser with [`DEFAULT_WORK_BUDGET`].
///
/// The ranking and tie order match the chart parser whenever the chart does
/// not truncate assignment lists; `top_k_assignments` is ignored here.
pub fn recursive_parse<S: AsRef<str>>(
    lexicon: &Lexicon,
    ids: &[S],
    config: &ParserConfig,
) -> Result<RecursiveOutcome, ParseError> {
    recursive_parse_with_budget(lexicon, ids, config, DEFAULT_WORK_BUDGET)
}

pub fn recursive_parse_with_budget<S: AsRef<str>>(
    lexicon: &Lexicon,
    ids: &[S],
    config: &ParserConfig,
    budget: f64,
) -> Result<RecursiveOutcome, ParseError> {
    config.validate()?;
    check_input(lexicon, ids, 0, config)?;
    let predicted = predicted_work(lexicon, ids, config)?;
    if predicted > budget {
        return Err(ParseError::BudgetExceeded { predicted, budget });
    }

    let sequence = IconSequence::from_ids(ids);
    let icons: Vec<Icon<'_>> = sequence
        .iter()
        .enumerate()
        .map(|(i, inst)| Icon {
            id: inst.instance,
            position: i + 1,
            entry: lexicon.lookup(&inst.lexicon_id).expect("checked"),
        })
        .collect();
    let predicates: Vec<usize> = (0..icons.len()).filter(|&i| icons[i].entry.is_predicative()).collect();
    let mut walker = Walker {
        case_orders: predicates.iter().map(|&p| case_order(icons[p].entry)).collect(),
        fills: predicates.iter().map(|&p| vec![None; icons[p].entry.valency()]).collect(),
        chosen: Vec::with_capacity(predicates.len()),
        kept: Vec::new(),
        counters: OpCounters::default(),
        config,
        icons,
        predicates,
    };
    walker.walk_predicate(0);
    let mut kept = walker.kept;
    if walker.config.top_m_interpretations == usize::MAX {
        let orders = &walker.case_orders;
        kept.sort_by(|a, b| rank(a.score, &a.choices, b.score, &b.choices, orders));
    }
    Ok(RecursiveOutcome {
        sequence,
        table: InterpretationsTable { ranked: kept },
        counters: walker.counters,
    })
}

/// Upper bound on the raw scores, assignments and interpretation leaves the
/// walk can visit, assuming every pair passes the threshold.
pub fn predicted_work<S: AsRef<str>>(
    lexicon: &Lexicon,
    ids: &[S],
    config: &ParserConfig,
) -> Result<f64, ParseError> {
    let others = ids.len().saturating_sub(1) as f64;
    let branching = others + if config.strict_fill { 0.0 } else { 1.0 };
    let mut enumerations = 1.0f64;
    let mut work = 0.0f64;
    for id in ids {
        let v = lexicon.lookup(id.as_ref())?.valency();
        if v == 0 {
            continue;
        }
        // Slot k is entered branching^(k-1) times and scores every other icon.
        let mut entries = 1.0;
        let mut per_enumeration = 0.0;
        for _ in 0..v {
            per_enumeration += entries * others;
            entries *= branching;
        }
        let leaves = entries.max(1.0);
        work += enumerations * (per_enumeration + leaves);
        enumerations *= leaves;
    }
    Ok(work + enumerations)
}

struct Icon<'a> {
    id: InstanceId,
    position: usize,
    entry: &'a LexEntry,
}

struct Walker<'a> {
    icons: Vec<Icon<'a>>,
    /// Indices into `icons`, in sequence order.
    predicates: Vec<usize>,
    case_orders: Vec<Vec<usize>>,
    /// Per predicate, per slot: chosen icon index and its raw score.
    fills: Vec<Vec<Option<(usize, f64)>>>,
    chosen: Vec<Assignment>,
    kept: Vec<Interpretation>,
    counters: OpCounters,
    config: &'a ParserConfig,
}

fn position_of(id: InstanceId) -> usize {
    id.0 as usize + 1
}

/// Score descending, then each predicate's assignment in its list order.
fn rank(
    score_a: f64,
    a: &[Assignment],
    score_b: f64,
    b: &[Assignment],
    orders: &[Vec<usize>],
) -> Ordering {
    score_b.total_cmp(&score_a).then_with(|| {
        for ((x, y), order) in a.iter().zip(b).zip(orders) {
            match assignment_order(x, y, order, &position_of) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    })
}

impl Walker<'_> {
    fn walk_predicate(&mut self, i: usize) {
        if i == self.predicates.len() {
            self.leaf();
            return;
        }
        let mut found = false;
        self.walk_slot(i, 0, &mut found);
        if !found {
            let p = &self.icons[self.predicates[i]];
            self.chosen.push(Assignment::empty(p.id, p.entry.valency()));
            self.walk_predicate(i + 1);
            self.chosen.pop();
        }
    }

    fn walk_slot(&mut self, i: usize, slot: usize, found: &mut bool) {
        let pi = self.predicates[i];
        let entry = self.icons[pi].entry;
        if slot == entry.valency() {
            let fills = &self.fills[i];
            let injective = fills
                .iter()
                .enumerate()
                .all(|(s, f)| f.is_none_or(|(k, _)| !fills[..s].iter().flatten().any(|&(j, _)| j == k)));
            if !injective {
                return;
            }
            *found = true;
            self.counters.assignment_scorings += 1;
            let icons = &self.icons;
            let score = score_fills(
                icons[pi].position,
                fills.iter().flatten().map(|&(k, raw)| (icons[k].position, raw)),
                &self.config.fading,
            );
            let assignment = Assignment {
                predicate: icons[pi].id,
                fills: fills.iter().map(|f| f.map(|(k, _)| icons[k].id)).collect(),
                score,
            };
            self.chosen.push(assignment);
            self.walk_predicate(i + 1);
            self.chosen.pop();
            return;
        }

        let selectional = &entry.case_structure[slot].selectional;
        let mut options = Vec::with_capacity(self.icons.len());
        for (k, icon) in self.icons.iter().enumerate() {
            if k == pi {
                continue;
            }
            let raw = structure_compat(&icon.entry.intrinsic, selectional)
                .expect("lexicon rejects empty selectional sets");
            self.counters.structure_compat_evals += 1;
            if raw >= self.config.pair_threshold {
                options.push((k, raw));
            }
        }
        if !self.config.strict_fill {
            self.fills[i][slot] = None;
            self.walk_slot(i, slot + 1, found);
        }
        for option in options {
            self.fills[i][slot] = Some(option);
            self.walk_slot(i, slot + 1, found);
        }
        self.fills[i][slot] = None;
    }

    fn leaf(&mut self) {
        self.counters.interpretations_scored += 1;
        self.counters.elementary_sums += self.chosen.len().saturating_sub(1) as u64;
        let score = interpretation_score(&self.chosen);
        let top_m = self.config.top_m_interpretations;
        if top_m == usize::MAX {
            self.kept.push(Interpretation { choices: self.chosen.clone(), score });
            return;
        }
        let orders = &self.case_orders;
        if self.kept.len() == top_m {
            let worst = self.kept.last().expect("non-empty");
            if rank(score, &self.chosen, worst.score, &worst.choices, orders) != Ordering::Less {
                return;
            }
        }
        let at = self
            .kept
            .partition_point(|k| rank(k.score, &k.choices, score, &self.chosen, orders) == Ordering::Less);
        self.kept.insert(at, Interpretation { choices: self.chosen.clone(), score });
        self.kept.truncate(top_m);
    }
}
