use serde::{Deserialize, Serialize};

use super::report::RobustnessReport;
use super::AssessmentConfig;
use crate::sim::{LandingOutcome, SimConfig, Trajectory};

/// The single skill gap the next round of feedback focuses on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ImprovementArea {
    AvoidLeftEdge,
    AvoidRightEdge,
    AvoidBottomEdge,
    AvoidTopEdge,
    LandingSpeed,
    LandingAngle,
    Efficiency,
    Smoothness,
}

impl ImprovementArea {
    pub const ALL: [ImprovementArea; 8] = [
        ImprovementArea::AvoidLeftEdge,
        ImprovementArea::AvoidRightEdge,
        ImprovementArea::AvoidBottomEdge,
        ImprovementArea::AvoidTopEdge,
        ImprovementArea::LandingSpeed,
        ImprovementArea::LandingAngle,
        ImprovementArea::Efficiency,
        ImprovementArea::Smoothness,
    ];

    const EDGES: [ImprovementArea; 4] = [
        ImprovementArea::AvoidLeftEdge,
        ImprovementArea::AvoidRightEdge,
        ImprovementArea::AvoidBottomEdge,
        ImprovementArea::AvoidTopEdge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ImprovementArea::AvoidLeftEdge => "AvoidLeftEdge",
            ImprovementArea::AvoidRightEdge => "AvoidRightEdge",
            ImprovementArea::AvoidBottomEdge => "AvoidBottomEdge",
            ImprovementArea::AvoidTopEdge => "AvoidTopEdge",
            ImprovementArea::LandingSpeed => "LandingSpeed",
            ImprovementArea::LandingAngle => "LandingAngle",
            ImprovementArea::Efficiency => "Efficiency",
            ImprovementArea::Smoothness => "Smoothness",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.as_str() == name)
    }

    pub fn is_edge(self) -> bool {
        Self::EDGES.contains(&self)
    }

    /// Plain-language label used in prompts and feedback.
    pub fn describe(self) -> &'static str {
        match self {
            ImprovementArea::AvoidLeftEdge => "avoiding the left edge",
            ImprovementArea::AvoidRightEdge => "avoiding the right edge",
            ImprovementArea::AvoidBottomEdge => "avoiding the bottom edge",
            ImprovementArea::AvoidTopEdge => "avoiding the top edge",
            ImprovementArea::LandingSpeed => "landing speed",
            ImprovementArea::LandingAngle => "landing angle",
            ImprovementArea::Efficiency => "efficiency",
            ImprovementArea::Smoothness => "smoothness",
        }
    }
}

/// Picks the area of improvement.
///
/// Priority: a touched window edge (earliest contact wins), then the worse
/// of landing speed and angle on an unsafe landing (each normalised by the
/// size of its negative range), then efficiency for slow safe landings,
/// otherwise smoothness. A crash without edge contact is a timeout and is
/// reported as efficiency.
pub fn select_improvement_area(
    report: &RobustnessReport,
    trajectory: &Trajectory,
    sim: &SimConfig,
    config: &AssessmentConfig,
) -> ImprovementArea {
    let first_contact = |component: usize| {
        trajectory
            .samples
            .iter()
            .position(|s| s.rob.safety_parts()[component] <= 0.0)
            .unwrap_or(usize::MAX)
    };
    let touched = report
        .safety_parts()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v <= 0.0)
        .map(|(i, _)| (first_contact(i), i))
        .min();
    if let Some((_, edge)) = touched {
        return ImprovementArea::EDGES[edge];
    }
    match report.outcome {
        LandingOutcome::Unsafe => {
            let speed = report.l3 / (sim.max_speed - sim.speed_limit);
            let angle = report.l4 / (sim.max_angle - sim.angle_limit);
            if speed < angle {
                ImprovementArea::LandingSpeed
            } else {
                ImprovementArea::LandingAngle
            }
        }
        LandingOutcome::Safe if report.duration <= config.efficiency_threshold => {
            ImprovementArea::Smoothness
        }
        LandingOutcome::Safe | LandingOutcome::Crash => ImprovementArea::Efficiency,
    }
}
