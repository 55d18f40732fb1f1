//! The chart parser.
//!
//! A [`ParserState`] keeps the current icon sequence together with three
//! memo tables:
//!
//! 1. the [`CompatibilityTable`] of raw (distance-free) role/filler scores,
//!    with sub-threshold pairs dropped as soon as they are computed;
//! 2. the [`AssignmentsTable`] of each predicate's best `top_k` assignments,
//!    scored from stored raw values times distance fading;
//! 3. the [`InterpretationsTable`] of the best `top_m` combinations of one
//!    assignment per predicate.
//!
//! Appending icons only computes raw scores and assignments that involve a
//! new icon. Removing icons purges the entries that mention them and rescores
//! surviving assignments whose distances shrank. The interpretations table is
//! always rebuilt in full.

mod enumerate;
mod sequence;
mod snapshot;
mod tables;

pub use enumerate::interpretation_score;
pub use sequence::{IconInstance, IconSequence, InstanceId};
pub use snapshot::{
    compare_rankings, place_interpretations, ChartSnapshot, PlacedAssignment, PlacedInterpretation,
    SnapshotMismatch,
};
pub use tables::{
    assignment_order, score_fills, Assignment, AssignmentsTable, CompatibilityTable,
    Interpretation, InterpretationsTable,
};

pub(crate) use enumerate::{rank_interpretations, AssignmentSearch, SlotOption};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::baseline::OpCounters;
use crate::compatibility::{structure_compat, FadingConfig};
use crate::lexicon::{LexEntry, Lexicon, UnknownIcon};

pub const DEFAULT_MAX_SEQUENCE_LEN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParserConfig {
    pub fading: FadingConfig,
    /// Raw scores strictly below this never enter the compatibility table.
    /// `f64::NEG_INFINITY` disables thresholding.
    pub pair_threshold: f64,
    pub top_k_assignments: usize,
    pub top_m_interpretations: usize,
    /// Require every case slot to be filled.
    pub strict_fill: bool,
    pub max_sequence_len: usize,
}

impl Default for ParserConfig {
    fn default() -> Self {
        ParserConfig {
            fading: FadingConfig::default(),
            pair_threshold: 0.1,
            top_k_assignments: 3,
            top_m_interpretations: 10,
            strict_fill: false,
            max_sequence_len: DEFAULT_MAX_SEQUENCE_LEN,
        }
    }
}

impl ParserConfig {
    /// No threshold and no truncation.
    pub fn exhaustive() -> Self {
        ParserConfig {
            pair_threshold: f64::NEG_INFINITY,
            top_k_assignments: usize::MAX,
            top_m_interpretations: usize::MAX,
            ..ParserConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParseError> {
        if self.pair_threshold.is_nan() {
            return Err(ParseError::InvalidConfig("pair_threshold is NaN"));
        }
        if self.top_k_assignments == 0 {
            return Err(ParseError::InvalidConfig("top_k_assignments must be at least 1"));
        }
        if self.top_m_interpretations == 0 {
            return Err(ParseError::InvalidConfig("top_m_interpretations must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("unknown icon `{0}`")]
    UnknownIcon(String),
    #[error("sequence too long: {len} icons, limit is {cap}")]
    SequenceTooLong { len: usize, cap: usize },
    #[error("instances not in the sequence: {0:?}")]
    UnknownInstances(Vec<InstanceId>),
    #[error("positions not in the sequence: {0:?}")]
    UnknownPositions(Vec<usize>),
    #[error("nothing has been parsed yet")]
    NotParsed,
    #[error("invalid parser configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("predicted work {predicted:e} exceeds the budget of {budget:e}")]
    BudgetExceeded { predicted: f64, budget: f64 },
}

impl From<UnknownIcon> for ParseError {
    fn from(e: UnknownIcon) -> Self {
        ParseError::UnknownIcon(e.0)
    }
}

/// Checks the length cap and that every id resolves.
pub(crate) fn check_input<S: AsRef<str>>(
    lexicon: &Lexicon,
    ids: &[S],
    existing: usize,
    config: &ParserConfig,
) -> Result<(), ParseError> {
    let len = existing + ids.len();
    if len > config.max_sequence_len {
        return Err(ParseError::SequenceTooLong { len, cap: config.max_sequence_len });
    }
    for id in ids {
        lexicon.lookup(id.as_ref())?;
    }
    Ok(())
}

/// Indices of an entry's slots sorted by case-type token.
pub(crate) fn case_order(entry: &LexEntry) -> Vec<usize> {
    let mut order: Vec<usize> = (0..entry.valency()).collect();
    order.sort_by(|&a, &b| entry.case_structure[a].case_type.cmp(&entry.case_structure[b].case_type));
    order
}

/// A parsing session: the sequence, its charts and the configuration.
#[derive(Debug, Clone)]
pub struct ParserState {
    lexicon: Arc<Lexicon>,
    config: ParserConfig,
    sequence: IconSequence,
    compat: CompatibilityTable,
    /// Every enumerated assignment per predicate, before truncation.
    pool: BTreeMap<InstanceId, Vec<Assignment>>,
    assignments: AssignmentsTable,
    interpretations: Option<InterpretationsTable>,
    counters: OpCounters,
}

impl ParserState {
    pub fn new(lexicon: Arc<Lexicon>, config: ParserConfig) -> Result<Self, ParseError> {
        config.validate()?;
        Ok(ParserState {
            lexicon,
            config,
            sequence: IconSequence::new(),
            compat: CompatibilityTable::default(),
            pool: BTreeMap::new(),
            assignments: AssignmentsTable::default(),
            interpretations: None,
            counters: OpCounters::default(),
        })
    }

    pub fn lexicon(&self) -> &Arc<Lexicon> {
        &self.lexicon
    }

    pub fn config(&self) -> &ParserConfig {
        &self.config
    }

    pub fn sequence(&self) -> &IconSequence {
        &self.sequence
    }

    pub fn compatibility(&self) -> &CompatibilityTable {
        &self.compat
    }

    pub fn assignments(&self) -> &AssignmentsTable {
        &self.assignments
    }

    /// `None` until the first parse.
    pub fn interpretations(&self) -> Option<&InterpretationsTable> {
        self.interpretations.as_ref()
    }

    /// Work done by the most recent parse, append or removal.
    pub fn counters(&self) -> &OpCounters {
        &self.counters
    }

    pub fn is_parsed(&self) -> bool {
        self.interpretations.is_some()
    }

    /// Replaces the configuration and reparses the current sequence, if any.
    pub fn set_config(&mut self, config: ParserConfig) -> Result<(), ParseError> {
        config.validate()?;
        if self.sequence.len() > config.max_sequence_len {
            return Err(ParseError::SequenceTooLong {
                len: self.sequence.len(),
                cap: config.max_sequence_len,
            });
        }
        self.config = config;
        if self.is_parsed() {
            let ids: Vec<String> = self.sequence.lexicon_ids().map(String::from).collect();
            self.parse_from_scratch(&ids)?;
        }
        Ok(())
    }

    /// Discards any previous state and parses `ids` as a new sequence.
    pub fn parse_from_scratch<S: AsRef<str>>(
        &mut self,
        ids: &[S],
    ) -> Result<&InterpretationsTable, ParseError> {
        check_input(&self.lexicon, ids, 0, &self.config)?;
        self.counters.reset();
        self.sequence = IconSequence::from_ids(ids);
        self.compat = CompatibilityTable::default();
        self.pool.clear();

        self.fill_compatibility(|_, _| true);
        let mut counters = self.counters;
        for p in self.predicates() {
            let found = self.search(p, None, &mut counters);
            self.pool.insert(p, found);
        }
        self.counters = counters;
        self.retain_top_k();
        Ok(self.rebuild_interpretations())
    }

    /// Appends icons to the end of the sequence and updates the charts.
    ///
    /// On a never-parsed state this is the same as
    /// [`parse_from_scratch`](Self::parse_from_scratch).
    pub fn add_icons<S: AsRef<str>>(&mut self, ids: &[S]) -> Result<&InterpretationsTable, ParseError> {
        if !self.is_parsed() {
            return self.parse_from_scratch(ids);
        }
        if ids.is_empty() {
            return Ok(self.interpretations.as_ref().expect("parsed"));
        }
        check_input(&self.lexicon, ids, self.sequence.len(), &self.config)?;
        self.counters.reset();
        let first_new = self.sequence.append(ids);

        self.fill_compatibility(|p, k| p >= first_new || k >= first_new);
        let mut counters = self.counters;
        for p in self.predicates() {
            if p >= first_new {
                let found = self.search(p, None, &mut counters);
                self.pool.insert(p, found);
            } else {
                let found = self.search(p, Some(first_new), &mut counters);
                self.pool.get_mut(&p).expect("old predicate has a pool").extend(found);
            }
        }
        self.counters = counters;
        self.retain_top_k();
        Ok(self.rebuild_interpretations())
    }

    /// Removes instances and updates the charts.
    ///
    /// Assignments between surviving icons are kept, but are rescored from
    /// their stored raw values when position compaction changed one of their
    /// distances.
    pub fn remove_icons(
        &mut self,
        instances: &[InstanceId],
    ) -> Result<&InterpretationsTable, ParseError> {
        if !self.is_parsed() {
            return Err(ParseError::NotParsed);
        }
        let mut missing: Vec<InstanceId> =
            instances.iter().copied().filter(|&i| !self.sequence.contains(i)).collect();
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(ParseError::UnknownInstances(missing));
        }
        if instances.is_empty() {
            return Ok(self.interpretations.as_ref().expect("parsed"));
        }
        self.counters.reset();
        let before = self.sequence.clone();
        self.sequence.remove(instances);

        self.compat.retain(|p, k| !instances.contains(&p) && !instances.contains(&k));
        self.pool.retain(|p, _| !instances.contains(p));
        let after = &self.sequence;
        for (&p, list) in self.pool.iter_mut() {
            list.retain(|a| a.fillers().all(|k| !instances.contains(&k)));
            let (old_p, new_p) = (before.position(p).unwrap(), after.position(p).unwrap());
            for a in list.iter_mut() {
                let moved = a.fillers().any(|k| {
                    old_p.abs_diff(before.position(k).unwrap())
                        != new_p.abs_diff(after.position(k).unwrap())
                });
                if moved {
                    self.counters.assignment_scorings += 1;
                    let compat = &self.compat;
                    a.score = score_fills(
                        new_p,
                        a.fills.iter().enumerate().filter_map(|(slot, k)| {
                            k.map(|k| {
                                let raw = compat.get(p, slot, k).expect("filler has a stored raw score");
                                (after.position(k).unwrap(), raw)
                            })
                        }),
                        &self.config.fading,
                    );
                }
            }
        }
        self.retain_top_k();
        Ok(self.rebuild_interpretations())
    }

    /// [`remove_icons`](Self::remove_icons) addressed by 1-based positions.
    pub fn remove_positions(
        &mut self,
        positions: &[usize],
    ) -> Result<&InterpretationsTable, ParseError> {
        if !self.is_parsed() {
            return Err(ParseError::NotParsed);
        }
        let mut bad: Vec<usize> =
            positions.iter().copied().filter(|&p| self.sequence.at(p).is_none()).collect();
        if !bad.is_empty() {
            bad.sort_unstable();
            bad.dedup();
            return Err(ParseError::UnknownPositions(bad));
        }
        let ids: Vec<InstanceId> =
            positions.iter().map(|&p| self.sequence.at(p).unwrap().instance).collect();
        self.remove_icons(&ids)
    }

    /// The ranked, truncated assignment list for one predicate, recomputed
    /// from the compatibility table. Does not touch the counters.
    pub fn enumerate_assignments(&self, predicate: InstanceId) -> Result<Vec<Assignment>, ParseError> {
        let entry = self.entry_of(predicate)?;
        let mut list = self.search(predicate, None, &mut OpCounters::default());
        self.rank_list(entry, &mut list);
        Ok(self.truncate(predicate, entry, &list))
    }

    /// The interpretations product over the current assignments table,
    /// recomputed. Does not touch the counters.
    pub fn enumerate_interpretations(&self) -> Result<InterpretationsTable, ParseError> {
        if !self.is_parsed() {
            return Err(ParseError::NotParsed);
        }
        let lists: Vec<&[Assignment]> = self.assignments.iter().map(|(_, l)| l).collect();
        Ok(rank_interpretations(&lists, self.config.top_m_interpretations, &mut OpCounters::default()))
    }

    pub fn best_interpretation(&self) -> Result<&Interpretation, ParseError> {
        self.interpretations
            .as_ref()
            .and_then(InterpretationsTable::best)
            .ok_or(ParseError::NotParsed)
    }

    /// Position-keyed view of all three tables.
    pub fn snapshot(&self) -> ChartSnapshot {
        ChartSnapshot::capture(self)
    }

    fn entry_of(&self, instance: InstanceId) -> Result<&LexEntry, ParseError> {
        let pos = self
            .sequence
            .position(instance)
            .ok_or_else(|| ParseError::UnknownInstances(vec![instance]))?;
        let id = &self.sequence.at(pos).expect("live").lexicon_id;
        Ok(self.lexicon.lookup(id)?)
    }

    /// Predicative instances in sequence order.
    fn predicates(&self) -> Vec<InstanceId> {
        self.sequence
            .iter()
            .filter(|i| self.lexicon.lookup(&i.lexicon_id).expect("checked on entry").is_predicative())
            .map(|i| i.instance)
            .collect()
    }

    fn fill_compatibility(&mut self, include: impl Fn(InstanceId, InstanceId) -> bool) {
        let lexicon = Arc::clone(&self.lexicon);
        let icons: Vec<(InstanceId, &LexEntry)> = self
            .sequence
            .iter()
            .map(|i| (i.instance, lexicon.lookup(&i.lexicon_id).expect("checked on entry")))
            .collect();
        for &(p, entry) in icons.iter().filter(|(_, e)| e.is_predicative()) {
            for (slot, case) in entry.case_structure.iter().enumerate() {
                for &(k, candidate) in &icons {
                    if k == p || !include(p, k) {
                        continue;
                    }
                    let raw = structure_compat(&candidate.intrinsic, &case.selectional)
                        .expect("lexicon rejects empty selectional sets");
                    self.counters.structure_compat_evals += 1;
                    if raw >= self.config.pair_threshold {
                        self.compat.insert(p, slot, k, raw);
                    }
                }
            }
        }
    }

    fn search(
        &self,
        predicate: InstanceId,
        newer_than: Option<InstanceId>,
        counters: &mut OpCounters,
    ) -> Vec<Assignment> {
        let entry = self.entry_of(predicate).expect("live predicate");
        let options: Vec<Vec<SlotOption>> = (0..entry.valency())
            .map(|slot| {
                self.compat
                    .candidates(predicate, slot)
                    .map(|(id, raw)| SlotOption {
                        id,
                        position: self.sequence.position(id).expect("live candidate"),
                        raw,
                    })
                    .collect()
            })
            .collect();
        AssignmentSearch {
            predicate,
            predicate_pos: self.sequence.position(predicate).expect("live predicate"),
            options: &options,
            strict_fill: self.config.strict_fill,
            newer_than,
            fading: &self.config.fading,
        }
        .run(counters)
    }

    fn rank_list(&self, entry: &LexEntry, list: &mut [Assignment]) {
        let order = case_order(entry);
        let position = |id: InstanceId| self.sequence.position(id).expect("live");
        list.sort_by(|a, b| assignment_order(a, b, &order, &position));
    }

    fn truncate(&self, predicate: InstanceId, entry: &LexEntry, ranked: &[Assignment]) -> Vec<Assignment> {
        if ranked.is_empty() {
            vec![Assignment::empty(predicate, entry.valency())]
        } else {
            ranked[..ranked.len().min(self.config.top_k_assignments)].to_vec()
        }
    }

    fn retain_top_k(&mut self) {
        let mut pool = core::mem::take(&mut self.pool);
        let mut table = BTreeMap::new();
        for (&p, list) in pool.iter_mut() {
            let entry = self.entry_of(p).expect("live predicate");
            self.rank_list(entry, list);
            table.insert(p, self.truncate(p, entry, list));
        }
        self.pool = pool;
        self.assignments = AssignmentsTable { per_predicate: table };
    }

    fn rebuild_interpretations(&mut self) -> &InterpretationsTable {
        let lists: Vec<&[Assignment]> = self.assignments.iter().map(|(_, l)| l).collect();
        let table = rank_interpretations(&lists, self.config.top_m_interpretations, &mut self.counters);
        self.interpretations.insert(table)
    }
}
