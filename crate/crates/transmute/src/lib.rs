//! File formats, configuration, parallel drivers and the validation suite
//! for the `transmute` command-line tool.

pub mod commands;
pub mod config;
pub mod parallel;
pub mod validate;
