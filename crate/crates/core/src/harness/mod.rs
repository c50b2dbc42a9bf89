//! Simulation studies: grids of populations and designs, repeated sampling,
//! and bias / standard error / coverage summaries.

pub mod config;
mod study;

pub use config::{parse_study_config, read_study_config, StudyConfig};
pub use study::{
    replicate_sample, run_sensitivity_n, run_study, write_skipped_csv, write_study_csv, Estimator,
    StudyResult, StudyRow, StudySpec,
};
