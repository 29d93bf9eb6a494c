//! Instance files, generators and the command layer of the `bilevel`
//! command-line tool.
//!
//! * [`format`](mod@format) — the JSON instance format with exhaustive validation.
//! * [`generate`] — seeded random instances and vertex-cover reductions.
//! * [`check`] — randomised comparison against the brute-force oracles.
//! * [`commands`] — `solve`, `adversary`, `plf-dump`, `oracle-check` and
//!   `generate`, returning structured results.

pub mod check;
pub mod commands;
pub mod error;
pub mod format;
pub mod generate;

pub use error::{exit, CliError};
