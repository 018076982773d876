//! Document formats for the `walras` command-line tool, exposed as a
//! library so tests and downstream tooling can parse what the binary
//! emits.

pub mod document;
