//! Configuration, grid suites, replicate orchestration and the command line.

pub mod cli;
pub mod config;
pub mod report;
pub mod suite;

pub use config::{load_config, ArmsSpec, Circle, ExperimentConfig, GridSpec, SCHEMA_VERSION};
pub use report::{rounds_csv, run_replicates, summarize, Quantiles, Summary, ROUNDS_HEADER};
pub use suite::{tails_suite, verify_suite, Grid, LemmaCertificate, TailsReport, VerifyReport};
