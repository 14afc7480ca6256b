//! File format, reports and command-line driver for `nilcenter-core`.

pub mod analysis;
pub mod cli;
pub mod parse;
pub mod print;
pub mod report;
