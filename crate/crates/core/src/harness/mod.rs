//! Baseline recommenders, run configuration, the evaluation sweep and its
//! report files.

pub mod baselines;
pub mod config;
pub mod report;
pub mod run;

use thiserror::Error;

use crate::corpus::CorpusError;
use crate::enrich::EnrichError;

pub use baselines::{click_counts, impression_seed, recommend_popular, recommend_random};
pub use config::{cutoff_label, parse_cutoffs, RunConfig};
pub use report::{EvaluationRun, ReportFile, ReportRow, ReportSettings};
pub use run::{run_enrich, run_evaluate, run_recommend, run_sensitivity, RunOutcome, Strategy};

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Missing, unreadable or malformed inputs, and invalid settings.
    #[error("input error: {0}")]
    Input(String),
    /// Failures writing outputs, or broken internal assumptions.
    #[error("internal error: {0}")]
    Internal(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Input(_) => 1,
            HarnessError::Internal(_) => 2,
        }
    }
}

impl From<CorpusError> for HarnessError {
    fn from(e: CorpusError) -> Self {
        HarnessError::Input(e.to_string())
    }
}

impl From<EnrichError> for HarnessError {
    fn from(e: EnrichError) -> Self {
        HarnessError::Input(e.to_string())
    }
}
