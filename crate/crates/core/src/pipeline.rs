//! Trajectory in, assessment and all feedback artifacts out.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assessment::{
    annotation_point, assess, select_improvement_area, AnnotationError, AssessError,
    AssessmentConfig, RobustnessReport,
};
use crate::feedback::{
    build_prompt, generate_feedback, render_trajectory_image, summarize, FeedbackArtifacts,
    FeedbackProvider, ImageStyle, PromptBundle, PromptError, TemplateProvider,
};
use crate::sim::{SimConfig, Trajectory};
use crate::stl::SpecSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Assess(#[from] AssessError),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

/// Settings shared by every trial of a deployment.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub sim: SimConfig,
    pub assessment: AssessmentConfig,
    pub image: ImageStyle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialEvaluation {
    pub report: RobustnessReport,
    pub prompt: PromptBundle,
    pub artifacts: FeedbackArtifacts,
}

pub fn evaluate_trial(
    trajectory: &Trajectory,
    specs: &SpecSet,
    config: &PipelineConfig,
    provider: &dyn FeedbackProvider,
    fallback: &TemplateProvider,
) -> Result<TrialEvaluation, PipelineError> {
    let report = assess(trajectory, specs, &config.sim)?;
    let area = select_improvement_area(&report, trajectory, &config.sim, &config.assessment);
    let annotation = annotation_point(trajectory, &report, area)?;
    let image = render_trajectory_image(trajectory, &annotation, &config.sim, &config.image);
    let prompt = build_prompt(
        &report,
        area,
        &annotation,
        Some(&image),
        true,
        &config.sim,
        &config.assessment,
    )?;
    let text = generate_feedback(&prompt, provider, fallback);
    let summary = summarize(&report, &config.sim);
    Ok(TrialEvaluation {
        report,
        prompt,
        artifacts: FeedbackArtifacts {
            area,
            annotation,
            summary,
            text,
            image,
        },
    })
}
