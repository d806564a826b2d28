use serde::{Deserialize, Serialize};

use crate::assessment::{overall_score, RobustnessReport};
use crate::sim::{LandingOutcome, SimConfig};

/// The baseline condition's table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub outcome: LandingOutcome,
    pub score: u8,
    pub final_speed: f64,
    pub final_angle: f64,
    pub duration: f64,
}

pub fn summarize(report: &RobustnessReport, config: &SimConfig) -> SummaryStats {
    SummaryStats {
        outcome: report.outcome,
        score: overall_score(report, config),
        final_speed: report.final_speed,
        final_angle: report.final_angle,
        duration: report.duration,
    }
}
