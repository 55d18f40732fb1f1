//! Lexicon files, parse reports, and the command-line and HTTP front ends of
//! the semantic chart parser.

pub mod bench;
pub mod cli;
pub mod lexicon_io;
pub mod repl;
pub mod report;
pub mod service;

pub use lexicon_io::{load_lexicon, resolve_lexicon, serialize_lexicon};
pub use report::{Engine, ParseReport};
