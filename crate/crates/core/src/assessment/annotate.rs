use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::heuristic::ImprovementArea;
use super::report::RobustnessReport;
use crate::sim::{LandingOutcome, Trajectory, TrajectorySample};

/// Unsafe landings are annotated within this many final samples.
pub const UNSAFE_WINDOW: usize = 50;

/// Where the feedback image draws its highlight circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotationPoint {
    pub x: f64,
    pub y: f64,
    pub step_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cannot annotate an empty trajectory")]
pub struct AnnotationError;

/// Crash: the final position. Unsafe: the worst sample of the selected
/// landing component among the last 50 (the whole trajectory if shorter).
/// Safe: the sample with the largest `throttle + |attitude|`. Ties go to
/// the earliest step.
pub fn annotation_point(
    trajectory: &Trajectory,
    report: &RobustnessReport,
    area: ImprovementArea,
) -> Result<AnnotationPoint, AnnotationError> {
    let samples = &trajectory.samples;
    if samples.is_empty() {
        return Err(AnnotationError);
    }
    let index = match report.outcome {
        LandingOutcome::Crash => samples.len() - 1,
        LandingOutcome::Unsafe => {
            let start = samples.len().saturating_sub(UNSAFE_WINDOW);
            let component = |s: &TrajectorySample| match area {
                ImprovementArea::LandingAngle => s.rob.l4,
                _ => s.rob.l3,
            };
            start + first_extreme(&samples[start..], |s| -component(s))
        }
        LandingOutcome::Safe => first_extreme(samples, |s| s.input().magnitude()),
    };
    let s = &samples[index];
    Ok(AnnotationPoint {
        x: s.x,
        y: s.y,
        step_index: index,
    })
}

/// Index of the first sample maximising `key`.
fn first_extreme(samples: &[TrajectorySample], key: impl Fn(&TrajectorySample) -> f64) -> usize {
    let mut best = 0;
    for (i, s) in samples.iter().enumerate().skip(1) {
        if key(s) > key(&samples[best]) {
            best = i;
        }
    }
    best
}
