//! Front end for the `willmore-core` kernel.
//!
//! This crate owns everything that touches the outside world: the manifold
//! configuration schema, report serialization (JSON, CSV and a plain-text
//! summary), the seeded property suite and the subcommands behind the
//! `willmore` binary. Each subcommand is a plain function returning an
//! [`Outcome`], so the binary only parses flags and writes bytes.

// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod suite;

pub use commands::Outcome;
pub use error::{CliError, ExitStatus};
