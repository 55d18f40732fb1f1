//! Parse reports: the ranked interpretations with per-slot arithmetic, the
//! work counters and timing, in a serializable form shared by the CLI, the
//! REPL and the service.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use semchart_core::baseline::{recursive_parse, OpCounters};
use semchart_core::chart::{IconSequence, InterpretationsTable, ParseError, ParserConfig, ParserState};
use semchart_core::compatibility::{fading, structure_compat, FadingConfig};
use semchart_core::lexicon::Lexicon;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Chart,
    Recursive,
}

/// Parser settings in wire form. Missing fields take the parser defaults;
/// `threshold: null` disables the pair threshold and `top_k`/`top_m: null`
/// disable truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_threshold")]
    pub threshold: Option<f64>,
    #[serde(default = "default_top_k")]
    pub top_k: Option<usize>,
    #[serde(default = "default_top_m")]
    pub top_m: Option<usize>,
    #[serde(default)]
    pub strict_fill: bool,
    #[serde(default = "default_max_len")]
    pub max_sequence_len: usize,
}

fn default_gamma() -> f64 {
    ParserConfig::default().fading.gamma()
}
fn default_threshold() -> Option<f64> {
    Some(ParserConfig::default().pair_threshold)
}
fn default_top_k() -> Option<usize> {
    Some(ParserConfig::default().top_k_assignments)
}
fn default_top_m() -> Option<usize> {
    Some(ParserConfig::default().top_m_interpretations)
}
fn default_max_len() -> usize {
    ParserConfig::default().max_sequence_len
}

impl Default for ConfigSpec {
    fn default() -> Self {
        ConfigSpec::from(&ParserConfig::default())
    }
}

impl From<&ParserConfig> for ConfigSpec {
    fn from(c: &ParserConfig) -> Self {
        let bounded = |n: usize| (n != usize::MAX).then_some(n);
        ConfigSpec {
            gamma: c.fading.gamma(),
            threshold: c.pair_threshold.is_finite().then_some(c.pair_threshold),
            top_k: bounded(c.top_k_assignments),
            top_m: bounded(c.top_m_interpretations),
            strict_fill: c.strict_fill,
            max_sequence_len: c.max_sequence_len,
        }
    }
}

impl ConfigSpec {
    /// Validated parser configuration; the error names the offending field.
    pub fn to_config(&self) -> Result<ParserConfig, (&'static str, String)> {
        let fading = FadingConfig::new(self.gamma).map_err(|e| ("gamma", e.to_string()))?;
        let positive = |field: &'static str, n: Option<usize>| match n {
            Some(0) => Err((field, format!("{field} must be at least 1"))),
            Some(n) => Ok(n),
            None => Ok(usize::MAX),
        };
        let threshold = match self.threshold {
            Some(t) if t.is_nan() => return Err(("threshold", "threshold is NaN".into())),
            Some(t) => t,
            None => f64::NEG_INFINITY,
        };
        Ok(ParserConfig {
            fading,
            pair_threshold: threshold,
            top_k_assignments: positive("top_k", self.top_k)?,
            top_m_interpretations: positive("top_m", self.top_m)?,
            strict_fill: self.strict_fill,
            max_sequence_len: self.max_sequence_len,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IconReport {
    pub position: usize,
    pub id: String,
    pub gloss: String,
    pub predicative: bool,
}

/// One case slot of an assignment. Open slots have no filler and no values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotReport {
    pub case: String,
    pub filler: Option<usize>,
    pub filler_id: Option<String>,
    pub raw: Option<f64>,
    pub fading: Option<f64>,
    pub weighted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentReport {
    pub predicate: usize,
    pub predicate_id: String,
    pub score: f64,
    pub slots: Vec<SlotReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpretationReport {
    pub rank: usize,
    pub score: f64,
    pub assignments: Vec<AssignmentReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterReport {
    pub structure_compat_evals: u64,
    pub assignment_scorings: u64,
    pub elementary_sums: u64,
    pub interpretations_scored: u64,
}

impl From<&OpCounters> for CounterReport {
    fn from(c: &OpCounters) -> Self {
        CounterReport {
            structure_compat_evals: c.structure_compat_evals,
            assignment_scorings: c.assignment_scorings,
            elementary_sums: c.elementary_sums,
            interpretations_scored: c.interpretations_scored,
        }
    }
}

/// Everything but `timing_ms` is determined by lexicon, sequence and config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseReport {
    pub engine: Engine,
    pub config: ConfigSpec,
    pub sequence: Vec<IconReport>,
    pub interpretations: Vec<InterpretationReport>,
    pub counters: CounterReport,
    pub timing_ms: f64,
}

impl ParseReport {
    pub fn build(
        lexicon: &Lexicon,
        sequence: &IconSequence,
        table: &InterpretationsTable,
        config: &ParserConfig,
        engine: Engine,
        counters: &OpCounters,
        timing_ms: f64,
    ) -> Self {
        let entry = |position: usize| {
            let icon = sequence.at(position).expect("position within sequence");
            (icon, lexicon.lookup(&icon.lexicon_id).expect("sequence ids resolve"))
        };
        let icons = (1..=sequence.len())
            .map(|position| {
                let (icon, e) = entry(position);
                IconReport {
                    position,
                    id: icon.lexicon_id.clone(),
                    gloss: e.gloss.clone(),
                    predicative: e.is_predicative(),
                }
            })
            .collect();

        let interpretations = table
            .ranked
            .iter()
            .enumerate()
            .map(|(rank, interpretation)| InterpretationReport {
                rank: rank + 1,
                score: interpretation.score,
                assignments: interpretation
                    .choices
                    .iter()
                    .map(|a| {
                        let predicate = sequence.position(a.predicate).expect("live predicate");
                        let (icon, pred_entry) = entry(predicate);
                        let slots = pred_entry
                            .case_structure
                            .iter()
                            .zip(&a.fills)
                            .map(|(slot, fill)| {
                                let Some(filler) = fill.map(|k| sequence.position(k).expect("live filler")) else {
                                    return SlotReport {
                                        case: slot.case_type.clone(),
                                        filler: None,
                                        filler_id: None,
                                        raw: None,
                                        fading: None,
                                        weighted: None,
                                    };
                                };
                                let (filler_icon, filler_entry) = entry(filler);
                                let raw = structure_compat(&filler_entry.intrinsic, &slot.selectional)
                                    .expect("validated slots are non-empty");
                                let fade = fading(predicate.abs_diff(filler), &config.fading);
                                SlotReport {
                                    case: slot.case_type.clone(),
                                    filler: Some(filler),
                                    filler_id: Some(filler_icon.lexicon_id.clone()),
                                    raw: Some(raw),
                                    fading: Some(fade),
                                    weighted: Some(fade * raw),
                                }
                            })
                            .collect();
                        AssignmentReport {
                            predicate,
                            predicate_id: icon.lexicon_id.clone(),
                            score: a.score,
                            slots,
                        }
                    })
                    .collect(),
            })
            .collect();

        ParseReport {
            engine,
            config: ConfigSpec::from(config),
            sequence: icons,
            interpretations,
            counters: counters.into(),
            timing_ms,
        }
    }

    /// Report of the current chart state, with the given timing.
    pub fn from_state(state: &ParserState, timing_ms: f64) -> Result<Self, ParseError> {
        let table = state.interpretations().ok_or(ParseError::NotParsed)?;
        Ok(ParseReport::build(
            state.lexicon(),
            state.sequence(),
            table,
            state.config(),
            Engine::Chart,
            state.counters(),
            timing_ms,
        ))
    }

    /// Parses `ids` from scratch with the chosen engine.
    pub fn run<S: AsRef<str>>(
        lexicon: &Arc<Lexicon>,
        ids: &[S],
        config: &ParserConfig,
        engine: Engine,
    ) -> Result<Self, ParseError> {
        let start = Instant::now();
        match engine {
            Engine::Chart => {
                let mut state = ParserState::new(Arc::clone(lexicon), *config)?;
                state.parse_from_scratch(ids)?;
                ParseReport::from_state(&state, elapsed_ms(start))
            }
            Engine::Recursive => {
                let out = recursive_parse(lexicon, ids, config)?;
                let timing = elapsed_ms(start);
                Ok(ParseReport::build(lexicon, &out.sequence, &out.table, config, engine, &out.counters, timing))
            }
        }
    }

    pub fn best(&self) -> Option<&InterpretationReport> {
        self.interpretations.first()
    }

    /// Compares the first `ranks` interpretations (fills exactly, scores
    /// within `tol`).
    pub fn agrees_with(&self, other: &Self, ranks: usize, tol: f64) -> Result<(), String> {
        let mine = &self.interpretations[..ranks.min(self.interpretations.len())];
        let theirs = &other.interpretations[..ranks.min(other.interpretations.len())];
        if mine.len() != theirs.len() {
            return Err(format!("{} vs {} interpretations", mine.len(), theirs.len()));
        }
        for (a, b) in mine.iter().zip(theirs) {
            let fills = |i: &InterpretationReport| -> Vec<(usize, Vec<Option<usize>>)> {
                i.assignments.iter().map(|a| (a.predicate, a.slots.iter().map(|s| s.filler).collect())).collect()
            };
            if fills(a) != fills(b) || (a.score - b.score).abs() > tol {
                return Err(format!("rank {}: {} vs {}", a.rank, self.headline(a), other.headline(b)));
            }
        }
        Ok(())
    }

    fn label(&self, position: usize) -> String {
        let id = &self.sequence[position - 1].id;
        if self.sequence.iter().filter(|icon| &icon.id == id).count() > 1 {
            format!("{id}#{position}")
        } else {
            id.clone()
        }
    }

    /// `drink(agent=cat, object=milk) score=1.0`; open slots print as `_`.
    pub fn headline(&self, interpretation: &InterpretationReport) -> String {
        let mut line = String::new();
        for a in &interpretation.assignments {
            let fills: Vec<String> = a
                .slots
                .iter()
                .map(|s| format!("{}={}", s.case, s.filler.map_or_else(|| "_".to_string(), |k| self.label(k))))
                .collect();
            let _ = write!(line, "{}({}) ", self.label(a.predicate), fills.join(", "));
        }
        if interpretation.assignments.is_empty() {
            line.push_str("(no predicates) ");
        }
        let _ = write!(line, "score={}", format_score(interpretation.score));
        line
    }

    /// Ranked headlines, each followed by its dependency triples.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        for interpretation in &self.interpretations {
            let _ = writeln!(out, "{}", self.headline(interpretation));
            for a in &interpretation.assignments {
                for s in &a.slots {
                    if let (Some(k), Some(raw), Some(fade), Some(w)) = (s.filler, s.raw, s.fading, s.weighted) {
                        let _ = writeln!(
                            out,
                            "  {} -{}-> {}  raw={} fading={} weighted={}",
                            self.label(a.predicate),
                            s.case,
                            self.label(k),
                            format_score(raw),
                            format_score(fade),
                            format_score(w)
                        );
                    }
                }
            }
        }
        out
    }
}

/// Rounded to six decimals, printed with Rust's shortest round-trip form.
pub fn format_score(x: f64) -> String {
    format!("{:?}", (x * 1e6).round() / 1e6 + 0.0)
}

pub fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon_io::resolve_lexicon;

    fn micro() -> Arc<Lexicon> {
        Arc::new(resolve_lexicon("micro").unwrap())
    }

    #[test]
    fn headline_and_triples() {
        let r = ParseReport::run(&micro(), &["cat", "drink", "milk"], &ParserConfig::default(), Engine::Chart).unwrap();
        let text = r.render_human();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("drink(agent=cat, object=milk) score=1.0"));
        assert_eq!(lines.next(), Some("  drink -agent-> cat  raw=1.0 fading=0.5 weighted=0.5"));
        assert_eq!(lines.next(), Some("  drink -object-> milk  raw=1.0 fading=0.5 weighted=0.5"));
        assert!(text.contains("\ndrink(agent=_, object=milk) score=0.5\n"));
    }

    #[test]
    fn repeated_ids_are_labelled_by_position() {
        let r = ParseReport::run(&micro(), &["drink", "drink", "cat"], &ParserConfig::default(), Engine::Chart).unwrap();
        assert!(r.headline(r.best().unwrap()).contains("drink#2(agent=cat"));
    }

    #[test]
    fn empty_sequence_report() {
        let r = ParseReport::run::<&str>(&micro(), &[], &ParserConfig::default(), Engine::Chart).unwrap();
        assert!(r.sequence.is_empty());
        assert_eq!(r.render_human(), "(no predicates) score=0.0\n");
    }

    #[test]
    fn score_formatting() {
        assert_eq!(format_score(1.0), "1.0");
        assert_eq!(format_score(0.1 + 0.2), "0.3");
        assert_eq!(format_score(-1e-9), "0.0");
        assert_eq!(format_score(0.625), "0.625");
    }

    #[test]
    fn config_spec_round_trip() {
        for config in [ParserConfig::default(), ParserConfig::exhaustive()] {
            assert_eq!(ConfigSpec::from(&config).to_config().unwrap(), config);
        }
        let spec: ConfigSpec = serde_json::from_str(r#"{"top_k": 0}"#).unwrap();
        assert_eq!(spec.to_config().unwrap_err().0, "top_k");
        let spec: ConfigSpec = serde_json::from_str(r#"{"gamma": 1.5}"#).unwrap();
        assert_eq!(spec.to_config().unwrap_err().0, "gamma");
        assert!(serde_json::from_str::<ConfigSpec>(r#"{"gama": 0.5}"#).is_err());
    }

    #[test]
    fn engines_agree_on_top_rank() {
        let lex = micro();
        let ids = ["milk", "write", "daddy", "drink", "cat"];
        let config = ParserConfig::default();
        let chart = ParseReport::run(&lex, &ids, &config, Engine::Chart).unwrap();
        let rec = ParseReport::run(&lex, &ids, &config, Engine::Recursive).unwrap();
        chart.agrees_with(&rec, 1, 1e-9).unwrap();
        let exhaustive = ParserConfig::exhaustive();
        let chart = ParseReport::run(&lex, &ids, &exhaustive, Engine::Chart).unwrap();
        let rec = ParseReport::run(&lex, &ids, &exhaustive, Engine::Recursive).unwrap();
        chart.agrees_with(&rec, usize::MAX, 1e-9).unwrap();
    }
}
