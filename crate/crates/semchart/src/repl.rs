//! Line-oriented editing session over one chart parser state.

use std::io::{self, BufRead, Write};
use std::time::Instant;

use semchart_core::chart::{ParseError, ParserState};

use crate::report::{elapsed_ms, format_score, ConfigSpec, ParseReport};

const USAGE: &str = "commands: add <ids>, rm <positions>, show, config [key=value ...], help, quit";
const CONFIG_KEYS: &str = "keys: gamma, threshold (number or off), top-k, top-m (number or all), strict (on/off)";

/// Runs commands from `input` until `quit` or end of input. Command errors
/// are reported on `out` and never end the loop.
pub fn run_repl<R: BufRead, W: Write>(mut state: ParserState, input: R, mut out: W) -> io::Result<()> {
    if !state.is_parsed() {
        state.parse_from_scratch::<&str>(&[]).expect("empty sequence parses");
    }
    writeln!(out, "{USAGE}")?;
    for line in input.lines() {
        let line = line?;
        let mut words = line.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty());
        let Some(command) = words.next() else { continue };
        let args: Vec<&str> = words.collect();
        match command {
            "quit" | "exit" => break,
            "help" => writeln!(out, "{USAGE}\n{CONFIG_KEYS}")?,
            "show" => show(&state, 0.0, &mut out)?,
            "add" => {
                let start = Instant::now();
                match state.add_icons(&args) {
                    Ok(_) => show(&state, elapsed_ms(start), &mut out)?,
                    Err(e) => writeln!(out, "error: {e}")?,
                }
            }
            "rm" => match args.iter().map(|a| a.parse::<usize>()).collect::<Result<Vec<_>, _>>() {
                Ok(positions) => {
                    let start = Instant::now();
                    match state.remove_positions(&positions) {
                        Ok(_) => show(&state, elapsed_ms(start), &mut out)?,
                        Err(e) => writeln!(out, "error: {e}")?,
                    }
                }
                Err(_) => writeln!(out, "error: positions are 1-based integers")?,
            },
            "config" if args.is_empty() => print_config(&state, &mut out)?,
            "config" => match apply_settings(&state, &args) {
                Ok(spec) => match spec.to_config().map_err(|(_, m)| m) {
                    Ok(config) => match state.set_config(config) {
                        Ok(()) => print_config(&state, &mut out)?,
                        Err(e) => writeln!(out, "error: {e}")?,
                    },
                    Err(m) => writeln!(out, "error: {m}")?,
                },
                Err(m) => writeln!(out, "error: {m}\n{CONFIG_KEYS}")?,
            },
            other => writeln!(out, "unknown command `{other}`; {USAGE}")?,
        }
    }
    Ok(())
}

fn show<W: Write>(state: &ParserState, timing_ms: f64, out: &mut W) -> io::Result<()> {
    let report = ParseReport::from_state(state, timing_ms).map_err(|e: ParseError| io::Error::other(e.to_string()))?;
    let icons: Vec<String> = report.sequence.iter().map(|i| format!("{}:{}", i.position, i.id)).collect();
    writeln!(out, "sequence: {}", if icons.is_empty() { "(empty)".into() } else { icons.join(" ") })?;
    write!(out, "{}", report.render_human())
}

fn print_config<W: Write>(state: &ParserState, out: &mut W) -> io::Result<()> {
    let spec = ConfigSpec::from(state.config());
    let bound = |n: Option<usize>| n.map_or_else(|| "all".to_string(), |n| n.to_string());
    writeln!(
        out,
        "gamma={} threshold={} top-k={} top-m={} strict={}",
        format_score(spec.gamma),
        spec.threshold.map_or_else(|| "off".to_string(), format_score),
        bound(spec.top_k),
        bound(spec.top_m),
        if spec.strict_fill { "on" } else { "off" },
    )
}

fn apply_settings(state: &ParserState, args: &[&str]) -> Result<ConfigSpec, String> {
    let mut spec = ConfigSpec::from(state.config());
    for arg in args {
        let (key, value) = arg.split_once('=').ok_or_else(|| format!("expected key=value, got `{arg}`"))?;
        let bad = || format!("bad value `{value}` for {key}");
        let count = || match value {
            "all" => Ok(None),
            v => v.parse().map(Some).map_err(|_| bad()),
        };
        match key {
            "gamma" => spec.gamma = value.parse().map_err(|_| bad())?,
            "threshold" if value == "off" => spec.threshold = None,
            "threshold" => spec.threshold = Some(value.parse().map_err(|_| bad())?),
            "top-k" => spec.top_k = count()?,
            "top-m" => spec.top_m = count()?,
            "strict" => {
                spec.strict_fill = match value {
                    "on" | "true" => true,
                    "off" | "false" => false,
                    _ => return Err(bad()),
                }
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
    }
    Ok(spec)
}
