//! Experiment presets and their config and report formats, shared by the
//! `splicer` binary and the acceptance suite.

pub mod config;
pub mod presets;
pub mod report;
