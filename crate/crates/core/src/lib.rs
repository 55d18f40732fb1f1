//! Semantic chart parsing of grammarless icon sequences.
//!
//! Icons carry intrinsic semantic features; predicative icons also carry a
//! case structure stating which features each role expects of its filler.
//! Parsing assigns fillers to roles by feature compatibility, fades each
//! score by the distance between predicate and filler, and ranks whole
//! interpretations (one assignment per predicate) by their summed score.
//!
//! * [`lexicon`]: icon senses and validation.
//! * [`compatibility`]: feature-level, structure-level and faded scores.
//! * [`chart`]: the memoizing parser with incremental append and removal.
//! * [`baseline`]: a memo-free backtracking parser used as an oracle, work
//!   counters, and closed-form complexity predictors.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod baseline;
pub mod chart;
pub mod compatibility;
pub mod lexicon;

pub use chart::{ParseError, ParserConfig, ParserState};
pub use lexicon::Lexicon;
