//! Worst-case sweeps over sequence length, as CSV.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use semchart_core::baseline::synthetic::worst_case;
use semchart_core::baseline::{
    predict_chart_ops, predict_recursive_ops, recursive_parse_with_budget, ComplexityParams, OpCounters,
};
use semchart_core::chart::{ParseError, ParserConfig, ParserState};
use serde::{Serialize, Serializer};

use crate::report::{elapsed_ms, Engine};

#[derive(Debug, Clone)]
pub struct BenchParams {
    pub lengths: std::ops::RangeInclusive<usize>,
    pub valency: usize,
    pub engines: Vec<Engine>,
    pub config: ParserConfig,
    /// Recursive runs predicted to exceed this much work are skipped.
    pub budget: f64,
}

/// A measured cell, or `skipped` when the run was not attempted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measured<T> {
    Ran(T),
    Skipped,
}

impl<T: Serialize> Serialize for Measured<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Measured::Ran(v) => v.serialize(s),
            Measured::Skipped => s.serialize_str("skipped"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "V")]
    pub v: usize,
    pub engine: Engine,
    pub structure_compat_evals: Measured<u64>,
    pub assignment_scorings: Measured<u64>,
    pub interpretations_scored: Measured<u64>,
    pub wall_ms: Measured<String>,
    /// Closed-form operation count with unit costs; empty outside the
    /// formula's domain.
    pub predicted_ops: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("N={n}: {source}")]
    Parse { n: usize, source: ParseError },
}

fn predicted(n: usize, v: usize, engine: Engine) -> Option<String> {
    let params = ComplexityParams::new(n as u32, v as u32, 1.0, 1.0).ok()?;
    let ops = match engine {
        Engine::Chart => predict_chart_ops(&params),
        Engine::Recursive => predict_recursive_ops(&params),
    };
    ops.ok()?.total_exact(1, 1).ok().map(|t| t.to_string())
}

fn row(n: usize, v: usize, engine: Engine, run: Option<(OpCounters, f64)>) -> BenchRow {
    let cell = |f: fn(&OpCounters) -> u64| run.as_ref().map_or(Measured::Skipped, |(c, _)| Measured::Ran(f(c)));
    BenchRow {
        n,
        v,
        engine,
        structure_compat_evals: cell(|c| c.structure_compat_evals),
        assignment_scorings: cell(|c| c.assignment_scorings),
        interpretations_scored: cell(|c| c.interpretations_scored),
        wall_ms: run.map_or(Measured::Skipped, |(_, ms)| Measured::Ran(format!("{ms:.3}"))),
        predicted_ops: predicted(n, v, engine),
    }
}

fn measure(n: usize, params: &BenchParams, engine: Engine) -> Result<Option<(OpCounters, f64)>, ParseError> {
    let (lexicon, ids) = worst_case(n, params.valency);
    let lexicon = Arc::new(lexicon);
    let config = ParserConfig { max_sequence_len: params.config.max_sequence_len.max(n), ..params.config };
    let start = Instant::now();
    match engine {
        Engine::Chart => {
            let mut state = ParserState::new(lexicon, config)?;
            state.parse_from_scratch(&ids)?;
            Ok(Some((*state.counters(), elapsed_ms(start))))
        }
        Engine::Recursive => match recursive_parse_with_budget(&lexicon, &ids, &config, params.budget) {
            Ok(out) => Ok(Some((out.counters, elapsed_ms(start)))),
            Err(ParseError::BudgetExceeded { .. }) => Ok(None),
            Err(e) => Err(e),
        },
    }
}

/// Writes the CSV header and one row per (length, engine), flushing each
/// row as it completes.
pub fn run_bench<W: Write>(params: &BenchParams, out: W) -> Result<(), BenchError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record([
        "N",
        "V",
        "engine",
        "structure_compat_evals",
        "assignment_scorings",
        "interpretations_scored",
        "wall_ms",
        "predicted_ops",
    ])?;
    writer.flush()?;
    for n in params.lengths.clone() {
        for &engine in &params.engines {
            let run = measure(n, params, engine).map_err(|source| BenchError::Parse { n, source })?;
            writer.serialize(row(n, params.valency, engine, run))?;
            writer.flush()?;
        }
    }
    Ok(())
}
