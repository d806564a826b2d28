use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::provider::FeedbackText;
use super::summary::SummaryStats;
use super::svg::AnnotatedImage;
use crate::assessment::{AnnotationPoint, ImprovementArea};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeedbackCondition {
    Baseline,
    Text,
    Multimodal,
}

impl FeedbackCondition {
    pub const ALL: [FeedbackCondition; 3] = [
        FeedbackCondition::Baseline,
        FeedbackCondition::Text,
        FeedbackCondition::Multimodal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeedbackCondition::Baseline => "Baseline",
            FeedbackCondition::Text => "Text",
            FeedbackCondition::Multimodal => "Multimodal",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(name))
    }

    /// Round-robin assignment for the `n`-th session (zero based).
    pub fn round_robin(n: usize) -> Self {
        Self::ALL[n % 3]
    }
}

/// All feedback produced for one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackArtifacts {
    pub area: ImprovementArea,
    pub annotation: AnnotationPoint,
    pub summary: SummaryStats,
    pub text: FeedbackText,
    pub image: AnnotatedImage,
}

/// What a participant is shown, by condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition")]
pub enum FeedbackPayload {
    Baseline { summary: SummaryStats },
    Text { text: String },
    Multimodal { text: String, image_svg: String },
}

impl FeedbackPayload {
    pub fn condition(&self) -> FeedbackCondition {
        match self {
            FeedbackPayload::Baseline { .. } => FeedbackCondition::Baseline,
            FeedbackPayload::Text { .. } => FeedbackCondition::Text,
            FeedbackPayload::Multimodal { .. } => FeedbackCondition::Multimodal,
        }
    }
}

pub fn payload_for(condition: FeedbackCondition, artifacts: &FeedbackArtifacts) -> FeedbackPayload {
    match condition {
        FeedbackCondition::Baseline => FeedbackPayload::Baseline {
            summary: artifacts.summary.clone(),
        },
        FeedbackCondition::Text => FeedbackPayload::Text {
            text: artifacts.text.body.clone(),
        },
        FeedbackCondition::Multimodal => FeedbackPayload::Multimodal {
            text: artifacts.text.body.clone(),
            image_svg: artifacts.image.svg.clone(),
        },
    }
}
