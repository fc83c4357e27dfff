//! Command-line front end for the `cheeger-gap` library.
//!
//! The binary exposes six subcommands: `gap` and `bounds` print spectral
//! quantities for one model, `sweep` tabulates them over a field or size
//! range, `verify` runs the invariant check suites, and the two `export-*`
//! commands dump the dressed graph and the certification flow network in
//! their text formats. Everything structured comes out as CSV with a
//! header row and floats in scientific notation with 17 significant
//! digits, so repeated runs compare byte for byte.
//!
//! The pieces live in a library so the integration tests can drive the
//! same pipeline the binary uses without spawning processes.

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;
pub mod parallel;
pub mod pipeline;
