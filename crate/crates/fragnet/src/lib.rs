//! Std companion to `fragnet-core`: parallel sweeps, result files,
//! analysis reports, SVG plots, graph exports and the `fragnet` CLI.

pub mod config;
pub mod error;
pub mod graph;
pub mod plot;
pub mod report;
pub mod results;
pub mod sweep;

pub use error::{Error, Result};
