//! Batch interface over `entrank-core`: dataset ingest, distribution
//! caching, per-record ratios, crops, profiles and scatter exports.

pub mod app;
pub mod commands;
pub mod config;
pub mod dataset;
mod error;

pub use error::{CliError, Result};
