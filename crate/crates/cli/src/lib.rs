//! Library side of the `stabgrad` command-line harness: problem
//! construction from CLI-style parameters, experiment tables, analysis
//! sweeps and the deterministic output writers. The binary in `main.rs`
//! is a thin argument-parsing layer over these modules.

pub mod output;
pub mod parallel;
pub mod problems_cli;
pub mod report;
pub mod tables;
