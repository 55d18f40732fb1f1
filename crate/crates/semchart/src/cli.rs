//! Command-line front end.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use semchart_core::baseline::{DEFAULT_WORK_BUDGET, SCORE_TOLERANCE};
use semchart_core::chart::{ParseError, ParserConfig, ParserState, DEFAULT_MAX_SEQUENCE_LEN};
use semchart_core::lexicon::Lexicon;
use serde_json::json;

use crate::bench::{run_bench, BenchParams};
use crate::lexicon_io::{resolve_lexicon, serialize_lexicon, LoadError};
use crate::report::{ConfigSpec, Engine, ParseReport};
use crate::repl::run_repl;
use crate::service::{serve, ServiceOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_BAD_LEXICON: i32 = 2;
pub const EXIT_UNKNOWN_ICON: i32 = 3;
pub const EXIT_TOO_LONG: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "semchart", version, about = "Semantic chart parser for grammarless icon sequences")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse one icon sequence and print the ranked interpretations.
    Parse(ParseArgs),
    /// Edit a sequence interactively with incremental reparsing.
    Repl {
        #[command(flatten)]
        lexicon: LexiconArg,
        #[command(flatten)]
        parser: ParserFlags,
    },
    /// Sweep worst-case sequence lengths and print counters as CSV.
    Bench(BenchArgs),
    /// Serve the session API over HTTP.
    Serve {
        #[command(flatten)]
        lexicon: LexiconArg,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Minutes of inactivity before a session is dropped.
        #[arg(long, default_value_t = 30)]
        idle_minutes: u64,
        #[command(flatten)]
        parser: ParserFlags,
    },
    /// Validate a lexicon and print its canonical form.
    Lexicon {
        #[command(flatten)]
        lexicon: LexiconArg,
    },
}

#[derive(Debug, Args)]
struct LexiconArg {
    /// Lexicon file, or the name of a built-in lexicon (micro, demo).
    #[arg(long, default_value = "demo")]
    lexicon: String,
}

/// `off` or a number.
#[derive(Debug, Clone, Copy)]
struct Threshold(Option<f64>);

impl FromStr for Threshold {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "off" => Ok(Threshold(None)),
            _ => match s.parse::<f64>() {
                Ok(t) if t.is_nan() => Err("threshold is NaN".into()),
                Ok(t) => Ok(Threshold(Some(t).filter(|t| t.is_finite() || *t > 0.0))),
                Err(e) => Err(e.to_string()),
            },
        }
    }
}

/// `all` or a positive count.
#[derive(Debug, Clone, Copy)]
struct Bound(Option<usize>);

impl FromStr for Bound {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Bound(None)),
            _ => match s.parse::<usize>() {
                Ok(0) => Err("must be at least 1".into()),
                Ok(n) => Ok(Bound(Some(n))),
                Err(e) => Err(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Args)]
struct ParserFlags {
    /// Fading base: a filler at distance d is weighted by gamma^d.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Minimum raw compatibility for a role/filler pair, or `off`.
    #[arg(long, default_value = "0.1", allow_hyphen_values = true)]
    threshold: Threshold,
    /// Assignments kept per predicate, or `all`.
    #[arg(long, default_value = "3")]
    top_k: Bound,
    /// Interpretations kept, or `all`.
    #[arg(long, default_value = "10")]
    top_m: Bound,
    /// Only accept assignments that fill every case slot.
    #[arg(long)]
    strict_fill: bool,
    /// Longest accepted sequence.
    #[arg(long, default_value_t = DEFAULT_MAX_SEQUENCE_LEN)]
    max_len: usize,
}

impl ParserFlags {
    fn config(&self) -> Result<ParserConfig, String> {
        ConfigSpec {
            gamma: self.gamma,
            threshold: self.threshold.0,
            top_k: self.top_k.0,
            top_m: self.top_m.0,
            strict_fill: self.strict_fill,
            max_sequence_len: self.max_len,
        }
        .to_config()
        .map_err(|(field, message)| format!("--{}: {message}", field.replace('_', "-")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineChoice {
    Chart,
    Recursive,
    Both,
}

impl EngineChoice {
    fn engines(self) -> Vec<Engine> {
        match self {
            EngineChoice::Chart => vec![Engine::Chart],
            EngineChoice::Recursive => vec![Engine::Recursive],
            EngineChoice::Both => vec![Engine::Chart, Engine::Recursive],
        }
    }
}

#[derive(Debug, Args)]
struct ParseArgs {
    #[command(flatten)]
    lexicon: LexiconArg,
    /// Comma-separated icon ids.
    #[arg(long, default_value = "")]
    icons: String,
    #[command(flatten)]
    parser: ParserFlags,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[arg(long, value_enum, default_value_t = EngineChoice::Chart)]
    engine: EngineChoice,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Shortest sequence.
    #[arg(long, default_value_t = 2)]
    min_n: usize,
    /// Longest sequence; below --min-n gives a header-only CSV.
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    /// Case slots per icon.
    #[arg(long, default_value_t = 2)]
    valency: usize,
    #[arg(long, value_enum, default_value_t = EngineChoice::Both)]
    engine: EngineChoice,
    #[arg(long, default_value = "3")]
    top_k: Bound,
    #[arg(long, default_value = "10")]
    top_m: Bound,
    #[arg(long, default_value = "off", allow_hyphen_values = true)]
    threshold: Threshold,
    /// Allow assignments that leave slots open (default: every slot filled).
    #[arg(long)]
    open_slots: bool,
    /// Recursive runs predicted to exceed this many operations are skipped.
    #[arg(long, default_value_t = DEFAULT_WORK_BUDGET)]
    budget: f64,
}

fn exit_code(e: &ParseError) -> i32 {
    match e {
        ParseError::UnknownIcon(_) => EXIT_UNKNOWN_ICON,
        ParseError::SequenceTooLong { .. } => EXIT_TOO_LONG,
        _ => EXIT_FAILURE,
    }
}

fn load(name: &str, err: &mut impl Write) -> Result<Arc<Lexicon>, i32> {
    resolve_lexicon(name).map(Arc::new).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        match e {
            LoadError::Io { .. } | LoadError::Invalid(_) => EXIT_BAD_LEXICON,
        }
    })
}

fn parse_icons(csv: &str) -> Vec<String> {
    csv.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn cmd_parse(args: &ParseArgs, out: &mut impl Write, err: &mut impl Write) -> Result<i32, i32> {
    let lexicon = load(&args.lexicon.lexicon, err)?;
    let config = args.parser.config().map_err(|m| {
        let _ = writeln!(err, "error: {m}");
        EXIT_USAGE
    })?;
    let ids = parse_icons(&args.icons);
    let mut reports = Vec::new();
    for engine in args.engine.engines() {
        reports.push(ParseReport::run(&lexicon, &ids, &config, engine).map_err(|e| {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        })?);
    }

    let io = |r: std::io::Result<()>| r.map_err(|_| EXIT_FAILURE);
    if let [chart, recursive] = &reports[..] {
        // The recursive engine keeps every assignment; below rank one the
        // rankings only coincide when the chart keeps every assignment too.
        let ranks = if config.top_k_assignments == usize::MAX { usize::MAX } else { 1 };
        let verdict = chart.agrees_with(recursive, ranks, SCORE_TOLERANCE);
        let compared = ranks.min(chart.interpretations.len());
        match args.format {
            Format::Machine => {
                let doc = json!({
                    "chart": chart,
                    "recursive": recursive,
                    "agreement": { "ranks_compared": compared, "agree": verdict.is_ok(), "detail": verdict.as_ref().err() },
                });
                io(writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable")))?;
            }
            Format::Human => {
                io(write!(out, "{}", chart.render_human()))?;
                match &verdict {
                    Ok(()) => io(writeln!(
                        out,
                        "engines agree on {compared} interpretation(s); chart {:.3} ms, recursive {:.3} ms",
                        chart.timing_ms, recursive.timing_ms
                    ))?,
                    Err(d) => io(writeln!(out, "engines disagree: {d}"))?,
                }
            }
        }
        return Ok(if verdict.is_ok() { EXIT_OK } else { EXIT_FAILURE });
    }

    let report = &reports[0];
    match args.format {
        Format::Machine => io(writeln!(out, "{}", serde_json::to_string_pretty(report).expect("serializable")))?,
        Format::Human => io(write!(out, "{}", report.render_human()))?,
    }
    Ok(EXIT_OK)
}

fn cmd_bench(args: &BenchArgs, out: &mut impl Write, err: &mut impl Write) -> Result<i32, i32> {
    let config = ConfigSpec {
        gamma: ParserConfig::default().fading.gamma(),
        threshold: args.threshold.0,
        top_k: args.top_k.0,
        top_m: args.top_m.0,
        strict_fill: !args.open_slots,
        max_sequence_len: DEFAULT_MAX_SEQUENCE_LEN,
    }
    .to_config()
    .map_err(|(_, m)| {
        let _ = writeln!(err, "error: {m}");
        EXIT_USAGE
    })?;
    let params = BenchParams {
        lengths: args.min_n..=args.max_n,
        valency: args.valency,
        engines: args.engine.engines(),
        config,
        budget: args.budget,
    };
    run_bench(&params, out).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_FAILURE
    })?;
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, input: impl BufRead, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let usage = |m: String, err: &mut dyn Write| {
        let _ = writeln!(err, "error: {m}");
        EXIT_USAGE
    };
    let result = match &cli.command {
        Command::Parse(args) => cmd_parse(args, out, err),
        Command::Bench(args) => cmd_bench(args, out, err),
        Command::Lexicon { lexicon } => load(&lexicon.lexicon, err).map(|lex| {
            let _ = write!(out, "{}", serialize_lexicon(&lex));
            EXIT_OK
        }),
        Command::Repl { lexicon, parser } => (|| {
            let lex = load(&lexicon.lexicon, err)?;
            let config = parser.config().map_err(|m| usage(m, err))?;
            let state = ParserState::new(lex, config).map_err(|e| usage(e.to_string(), err))?;
            run_repl(state, input, &mut *out).map_err(|_| EXIT_FAILURE)?;
            Ok(EXIT_OK)
        })(),
        Command::Serve { lexicon, bind, idle_minutes, parser } => (|| {
            let lex = load(&lexicon.lexicon, err)?;
            let config = parser.config().map_err(|m| usage(m, err))?;
            let options = ServiceOptions { idle_expiry: Duration::from_secs(idle_minutes * 60), default_config: config };
            let runtime = tokio::runtime::Runtime::new().map_err(|_| EXIT_FAILURE)?;
            runtime.block_on(serve(lex, *bind, options)).map_err(|e| {
                let _ = writeln!(err, "error: {e}");
                EXIT_FAILURE
            })?;
            Ok(EXIT_OK)
        })(),
    };
    result.unwrap_or_else(|code| code)
}
