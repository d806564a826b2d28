use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{classify_outcome, ClassifyError, LandingOutcome, SimConfig, Trajectory};
use crate::stl::{robustness, robustness_series, SpecSet, TraceError};

/// Worst-case robustness of each component for one trial.
///
/// Safety components are minimised over the steps before touchdown (all
/// steps for a crash, so a wall hit shows up as zero). Landing components
/// are taken at the final step. `full` is the until formula at t = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    #[serde(rename = "S")]
    pub safety: f64,
    #[serde(rename = "L")]
    pub landing: f64,
    pub full: f64,
    pub outcome: LandingOutcome,
    pub duration: f64,
    /// Speed at the final sample.
    pub final_speed: f64,
    /// Absolute rotation at the final sample, degrees.
    pub final_angle: f64,
}

impl RobustnessReport {
    pub fn safety_parts(&self) -> [f64; 4] {
        [self.s1, self.s2, self.s3, self.s4]
    }

    pub fn landing_parts(&self) -> [f64; 4] {
        [self.l1, self.l2, self.l3, self.l4]
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssessError {
    #[error("specification set has no formula named {0:?}")]
    MissingSpec(String),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Names `assess` looks up in the specification set.
pub const REPORT_SPECS: [&str; 11] = [
    "s1", "s2", "s3", "s4", "l1", "l2", "l3", "l4", "S", "L", "full",
];

pub fn assess(
    trajectory: &Trajectory,
    specs: &SpecSet,
    config: &SimConfig,
) -> Result<RobustnessReport, AssessError> {
    let formulas = REPORT_SPECS
        .iter()
        .map(|name| {
            specs
                .get(name)
                .ok_or_else(|| AssessError::MissingSpec((*name).into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let outcome = classify_outcome(trajectory, config)?;
    let trace = trajectory.to_trace()?;
    let last = trace.len() - 1;
    // Touchdown itself sits on the floor, so it is excluded from safety.
    let safety_steps = if outcome.reached_pad() && last > 0 {
        last
    } else {
        last + 1
    };

    let worst = |i: usize| {
        robustness_series(formulas[i], &trace)[..safety_steps]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    };
    let at_end = |i: usize| robustness(formulas[i], &trace, last);
    let final_sample = trajectory.samples[last];

    Ok(RobustnessReport {
        s1: worst(0),
        s2: worst(1),
        s3: worst(2),
        s4: worst(3),
        l1: at_end(4),
        l2: at_end(5),
        l3: at_end(6),
        l4: at_end(7),
        safety: worst(8),
        landing: at_end(9),
        full: robustness(formulas[10], &trace, 0),
        outcome,
        duration: trajectory.duration(),
        final_speed: final_sample.speed(),
        final_angle: libm::fabs(final_sample.phi),
    })
}
