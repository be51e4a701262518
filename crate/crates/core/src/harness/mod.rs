//! Configuration, orchestration, reports and the acceptance recipes.

pub mod acceptance;
pub mod config;
pub mod experiment;
pub mod report;

pub use config::{parse_list, ExperimentConfig, ExperimentKind, ResolvedModel};
pub use experiment::{
    cell_seed, pool_provider, run_experiment, run_experiment_with, write_path_dump, write_state_dump,
    ExperimentOutput, PathRecord, RunOptions, StateRecord,
};
pub use report::{read_csv, summarize, to_csv_string, write_csv, Check, ReportRow, Summary};
