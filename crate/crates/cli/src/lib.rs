//! Command implementations behind the `cvtelefi` binary.

pub mod error;
pub mod eval;
pub mod figure;
pub mod grid;
pub mod output;
pub mod selfcheck;

pub use error::{CliError, CliResult};
pub use eval::{compare, evaluate, sweep, CompareRecord, EvalConfig, Path, PathChoice, SweepRecord};
pub use figure::{figure, Panel};
