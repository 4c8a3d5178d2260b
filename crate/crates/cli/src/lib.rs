//! Batch front-end: JSON configurations, table presets, text/CSV/JSON output.

pub mod config;
pub mod error;
pub mod presets;
pub mod report;
pub mod run;
pub mod tables;
