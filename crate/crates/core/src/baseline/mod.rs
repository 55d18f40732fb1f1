//! The memo-free recursive parser, work counters, and closed-form complexity
//! predictors for both engines.

mod counters;
mod predict;
mod recursive;
pub mod synthetic;
#[cfg(test)]
mod tests;

pub use counters::OpCounters;
pub use predict::{
    permutations, predict_chart_ops, predict_recursive_ops, ComplexityError, ComplexityParams,
    OpsPrediction,
};
pub use recursive::{
    predicted_work, recursive_parse, recursive_parse_with_budget, RecursiveOutcome,
    DEFAULT_WORK_BUDGET,
};

use alloc::sync::Arc;

use crate::chart::{
    compare_rankings, place_interpretations, ParseError, ParserConfig, ParserState, SnapshotMismatch,
};
use crate::lexicon::Lexicon;

/// Counters and elapsed time of one engine run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineRun {
    pub counters: OpCounters,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineComparison {
    /// `Ok` when both engines produced the same ranking, otherwise the first
    /// differing interpretation.
    pub verdict: Result<(), SnapshotMismatch>,
    pub chart: EngineRun,
    pub recursive: EngineRun,
    /// `(recursive, chart)` worst-case predictions for this length and the
    /// largest valency present, when those parameters are in range.
    pub predictions: Option<(OpsPrediction, OpsPrediction)>,
}

impl EngineComparison {
    pub fn is_equal(&self) -> bool {
        self.verdict.is_ok()
    }
}

/// Ranking-equality tolerance for engine comparison.
pub const SCORE_TOLERANCE: f64 = 1e-9;

/// Runs both engines on the same input and compares their rankings.
///
/// `clock` returns a monotonic time in milliseconds; pass `|| 0.0` where no
/// clock is available.
pub fn compare_engines<S: AsRef<str>>(
    lexicon: &Arc<Lexicon>,
    ids: &[S],
    config: &ParserConfig,
    clock: &mut dyn FnMut() -> f64,
) -> Result<EngineComparison, ParseError> {
    let start = clock();
    let mut state = ParserState::new(Arc::clone(lexicon), *config)?;
    state.parse_from_scratch(ids)?;
    let chart = EngineRun { counters: *state.counters(), wall_ms: clock() - start };

    let start = clock();
    let outcome = recursive_parse(lexicon, ids, config)?;
    let recursive = EngineRun { counters: outcome.counters, wall_ms: clock() - start };

    let chart_ranked = state.snapshot().interpretations;
    let recursive_ranked = place_interpretations(&outcome.table, &outcome.sequence, lexicon);
    let verdict = compare_rankings(&chart_ranked, &recursive_ranked, SCORE_TOLERANCE);

    let max_valency = ids
        .iter()
        .map(|id| lexicon.lookup(id.as_ref()).map(|e| e.valency()).unwrap_or(0))
        .max()
        .unwrap_or(0);
    let predictions = ComplexityParams::new(ids.len() as u32, max_valency as u32, 1.0, 1.0)
        .ok()
        .and_then(|p| Some((predict_recursive_ops(&p).ok()?, predict_chart_ops(&p).ok()?)));

    Ok(EngineComparison { verdict, chart, recursive, predictions })
}
