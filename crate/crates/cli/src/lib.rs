//! Command-line orchestration: fit, score, rank, forecast and plot.

pub mod args;
pub mod commands;
pub mod plot;
pub mod report;

pub use commands::{exit_code, run};
pub use report::RunReport;
