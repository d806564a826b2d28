//! Landing tables, Likert handling and the hypothesis tests used to compare
//! feedback conditions.

mod hypothesis;
mod landing;
mod likert;
mod rows;
pub mod special;

pub use hypothesis::{
    average_ranks, fisher_exact, kruskal_wallis, kruskal_wallis_permutation_p, t_test, TestKind,
    TestResult, PERMUTATION_MAX_N,
};
pub use landing::{
    landing_table, mastery, mean, sample_sd, sample_variance, session_counts, summarize_counts,
    ConditionSummary, ExcludedSession, LandingColumns, LandingTable, Mastery, MeanSd,
    SessionCounts,
};
pub use likert::{
    collapse_likert, likert_summary, per_participant_mode, LikertCounts, LikertLevel,
};
pub use rows::{SurveyItem, SurveyResponse, TrialRow, TRIALS_PER_SESSION};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("a row or column of the table sums to zero")]
    ZeroMargin,
    #[error("group {group} has {n} samples, need at least 2")]
    TooFewSamples { group: &'static str, n: usize },
    #[error("need at least 2 groups, got {0}")]
    TooFewGroups(usize),
    #[error("groups must not be empty")]
    EmptyGroup,
    #[error("need at least 3 observations, got {0}")]
    TooFewObservations(usize),
    #[error("samples must be finite")]
    NonFinite,
    #[error("permutation test supports at most 12 observations, got {0}")]
    PermutationTooLarge(usize),
    #[error("rating {0} is outside 1..=5")]
    RatingOutOfRange(u8),
}
