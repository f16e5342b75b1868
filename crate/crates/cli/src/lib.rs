//! Library half of the `nearfocus` command-line tool, split out so the
//! integration tests can drive commands without spawning a process.

// `!(x > 0.0)` is how validation rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod seed;
