//! Trial assessment: robustness report, area of improvement, annotation
//! point and overall score.

mod annotate;
mod heuristic;
mod report;
mod score;

pub use annotate::{annotation_point, AnnotationError, AnnotationPoint, UNSAFE_WINDOW};
pub use heuristic::{select_improvement_area, ImprovementArea};
pub use report::{assess, AssessError, RobustnessReport, REPORT_SPECS};
pub use score::{component_ranges, overall_score};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssessmentConfig {
    /// Safe landings slower than this (seconds) get efficiency feedback.
    pub efficiency_threshold: f64,
}

impl Default for AssessmentConfig {
    fn default() -> Self {
        Self {
            efficiency_threshold: 45.0,
        }
    }
}
