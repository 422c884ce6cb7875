//! Event logs, timing metrics, SUS scoring and the statistical study report.

mod log;
mod questionnaire;
mod report;
mod stats;
mod sus;
mod timings;

use thiserror::Error;

use crate::orchestrator::Modality;

pub use log::{
    log_file_name, parse_ndjson, read_log, to_ndjson, Answer, CommandSource, EventKind, LogEvent,
};
pub use questionnaire::{Questionnaire, QUESTIONNAIRE_STATEMENTS};
pub use report::{
    render_csv, render_plot_data, render_table, summarize_study, synthetic_cohort, CohortTarget,
    Metric, MetricRow, PlotPoint, PreferenceRow, StudyReport, Summary, SusItemRow, SusSummary,
    TestOutcome,
};
pub use stats::{
    incomplete_beta, ln_gamma, mean_sd, paired_t_test, proportion, student_t_cdf,
    student_t_two_sided, TTestResult,
};
pub use sus::{sus_score, SusResponse, SUS_ITEMS};
pub use timings::{derive_timings, SessionRecord, SessionTimings};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("malformed log: {0}")]
    MalformedLog(String),
    #[error("log line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("SUS item {item} out of range: {value}")]
    OutOfRangeItem { item: usize, value: i64 },
    #[error("expected {SUS_ITEMS} SUS items, got {0}")]
    WrongItemCount(usize),
    #[error("sample lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("all paired differences are equal")]
    ZeroVariance,
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid counts {count}/{total}")]
    InvalidCounts { count: usize, total: usize },
    #[error("subject {0} lacks one of the two modalities")]
    UnpairedSubject(String),
    #[error("subject {subject} has two {modality:?} sessions")]
    DuplicateSession { subject: String, modality: Modality },
    #[error("invalid questionnaire: {0}")]
    InvalidQuestionnaire(String),
    #[error("io: {0}")]
    Io(String),
}
