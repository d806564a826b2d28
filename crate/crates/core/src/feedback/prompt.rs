use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::svg::AnnotatedImage;
use crate::assessment::{AnnotationPoint, AssessmentConfig, ImprovementArea, RobustnessReport};
use crate::sim::{LandingOutcome, SimConfig};

/// What each part of the generated feedback has to do.
pub const ELEMENT_INSTRUCTIONS: &str = "\
Write one short paragraph of feedback addressed to the learner that covers five elements:
1. Reflection: give specific information about the task and how the learner flew, and ask one question that invites them to reflect on their own performance.
2. Motivation: express confidence that the learner can improve.
3. Timely: refer directly to the trial the learner just finished and what happened in it.
4. Actionable: give a concrete suggestion tied to the area of improvement, phrased in terms of the throttle (W/S keys) and rotation (A/D keys) of the quadrotor.
5. Manageable: keep it focused on the single area of improvement and between 60 and 160 words.";

/// The assessment facts a feedback generator needs about one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImprovementContext {
    pub area: ImprovementArea,
    pub outcome: LandingOutcome,
    pub duration: f64,
    pub final_speed: f64,
    pub final_angle: f64,
    /// Robustness component behind the area, e.g. `l3`.
    pub component: String,
    pub robustness: f64,
    /// The highlighted point on the trajectory.
    pub location: AnnotationPoint,
    pub speed_limit: f64,
    pub angle_limit: f64,
    pub efficiency_threshold: f64,
    /// One-line statement of the problem with its margin.
    pub detail: String,
}

/// Everything sent to a feedback generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub task_description: String,
    pub improvement: ImprovementContext,
    /// SVG document of the annotated trajectory.
    pub trajectory_image: Option<String>,
    pub element_instructions: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("an annotated trajectory image is required for this prompt")]
    MissingImage,
}

impl PromptBundle {
    /// The text part of the prompt, stable for identical bundles.
    pub fn to_text(&self) -> String {
        format!(
            "## Task\n{}\n\n## Area of improvement\n{}: {}\nOutcome: {}. Duration: {:.1} s.\n\n## Trajectory image\n{}\n\n## Feedback elements\n{}\n",
            self.task_description,
            self.improvement.area.describe(),
            self.improvement.detail,
            self.improvement.outcome.as_str(),
            self.improvement.duration,
            if self.trajectory_image.is_some() {
                "Attached: the flight path drawn over the window, with a circle on the point to focus on."
            } else {
                "Not available."
            },
            self.element_instructions,
        )
    }
}

fn task_description(sim: &SimConfig) -> String {
    format!(
        "The learner pilots a simulated 2D quadrotor with the keyboard: W and S raise and lower the throttle (vertical force), \
A and D rotate the quadrotor so that thrust also pushes it sideways. The quadrotor starts above and to the left of a landing pad \
on the floor (x from {pad_min} to {pad_max} in a {w} by {h} window). A safe landing touches down on the pad with speed below \
{speed} m/s and rotation within +/-{angle} degrees; reaching the pad outside those limits is an unsafe landing, and touching any \
edge of the window is a crash. Each trial is capped at {cap} seconds.",
        pad_min = sim.pad_x_min,
        pad_max = sim.pad_x_max,
        w = sim.window_width,
        h = sim.window_height,
        speed = sim.speed_limit,
        angle = sim.angle_limit,
        cap = sim.trial_cap,
    )
}

fn detail(
    area: ImprovementArea,
    report: &RobustnessReport,
    at: &AnnotationPoint,
    sim: &SimConfig,
    cfg: &AssessmentConfig,
) -> (String, f64, String) {
    let (component, value) = match area {
        ImprovementArea::AvoidLeftEdge => ("s1", report.s1),
        ImprovementArea::AvoidRightEdge => ("s2", report.s2),
        ImprovementArea::AvoidBottomEdge => ("s3", report.s3),
        ImprovementArea::AvoidTopEdge => ("s4", report.s4),
        ImprovementArea::LandingSpeed => ("l3", report.l3),
        ImprovementArea::LandingAngle => ("l4", report.l4),
        ImprovementArea::Efficiency | ImprovementArea::Smoothness => ("L", report.landing),
    };
    let text = match area {
        ImprovementArea::AvoidLeftEdge | ImprovementArea::AvoidRightEdge | ImprovementArea::AvoidBottomEdge | ImprovementArea::AvoidTopEdge => {
            let edge = match area {
                ImprovementArea::AvoidLeftEdge => "left",
                ImprovementArea::AvoidRightEdge => "right",
                ImprovementArea::AvoidBottomEdge => "bottom",
                _ => "top",
            };
            format!(
                "the quadrotor contacted the {edge} edge at ({:.1}, {:.1}) at step {}; {component} robustness {value:.2}",
                at.x, at.y, at.step_index
            )
        }
        ImprovementArea::LandingSpeed => format!(
            "touchdown speed {:.1} m/s against a limit of {} m/s; {component} robustness margin {value:.2}",
            report.final_speed, sim.speed_limit
        ),
        ImprovementArea::LandingAngle => format!(
            "touchdown rotation {:.1} degrees against a limit of {} degrees; {component} robustness margin {value:.2}",
            report.final_angle, sim.angle_limit
        ),
        ImprovementArea::Efficiency => format!(
            "the trial took {:.1} s, longer than the {} s target; {component} robustness {value:.2}",
            report.duration, cfg.efficiency_threshold
        ),
        ImprovementArea::Smoothness => format!(
            "safe landing in {:.1} s; strongest combined control input at ({:.1}, {:.1}), step {}",
            report.duration, at.x, at.y, at.step_index
        ),
    };
    (component.into(), value, text)
}

/// Assembles the prompt. With `require_image` set, a missing image is an
/// error; otherwise the image is attached when available.
pub fn build_prompt(
    report: &RobustnessReport,
    area: ImprovementArea,
    annotation: &AnnotationPoint,
    image: Option<&AnnotatedImage>,
    require_image: bool,
    sim: &SimConfig,
    assessment: &AssessmentConfig,
) -> Result<PromptBundle, PromptError> {
    if require_image && image.is_none() {
        return Err(PromptError::MissingImage);
    }
    let (component, robustness, detail) = detail(area, report, annotation, sim, assessment);
    Ok(PromptBundle {
        task_description: task_description(sim),
        improvement: ImprovementContext {
            area,
            outcome: report.outcome,
            duration: report.duration,
            final_speed: report.final_speed,
            final_angle: report.final_angle,
            component,
            robustness,
            location: *annotation,
            speed_limit: sim.speed_limit,
            angle_limit: sim.angle_limit,
            efficiency_threshold: assessment.efficiency_threshold,
            detail,
        },
        trajectory_image: image.map(|i| i.svg.clone()),
        element_instructions: ELEMENT_INSTRUCTIONS.into(),
    })
}
