use alloc::string::String;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::feedback::FeedbackCondition;
use crate::sim::LandingOutcome;

/// Trials per session.
pub const TRIALS_PER_SESSION: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurveyItem {
    Motivation,
    Manageable,
    Actionable,
    Timely,
    Reflection,
}

impl SurveyItem {
    pub const ALL: [SurveyItem; 5] = [
        SurveyItem::Motivation,
        SurveyItem::Manageable,
        SurveyItem::Actionable,
        SurveyItem::Timely,
        SurveyItem::Reflection,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SurveyItem::Motivation => "motivation",
            SurveyItem::Manageable => "manageable",
            SurveyItem::Actionable => "actionable",
            SurveyItem::Timely => "timely",
            SurveyItem::Reflection => "reflection",
        }
    }

    /// Questionnaire wording.
    pub fn prompt(self) -> &'static str {
        match self {
            SurveyItem::Motivation => "The feedback motivated me to do better in future trials.",
            SurveyItem::Manageable => "How much information did the feedback give?",
            SurveyItem::Actionable => "The feedback suggestions were actionable.",
            SurveyItem::Timely => "How often was the feedback presented?",
            SurveyItem::Reflection => "The feedback prompted me to reflect on my performance.",
        }
    }

    /// Labels for ratings 1 and 5.
    pub fn anchors(self) -> (&'static str, &'static str) {
        match self {
            SurveyItem::Manageable => ("Much too little", "Much too much"),
            SurveyItem::Timely => ("Much too infrequent", "Much too often"),
            _ => ("Strongly disagree", "Strongly agree"),
        }
    }
}

/// Per-trial questionnaire, each item on a 1 to 5 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyResponse {
    pub motivation: u8,
    pub manageable: u8,
    pub actionable: u8,
    pub timely: u8,
    pub reflection: u8,
}

impl SurveyResponse {
    pub fn uniform(rating: u8) -> Self {
        Self {
            motivation: rating,
            manageable: rating,
            actionable: rating,
            timely: rating,
            reflection: rating,
        }
    }

    pub fn get(&self, item: SurveyItem) -> u8 {
        match item {
            SurveyItem::Motivation => self.motivation,
            SurveyItem::Manageable => self.manageable,
            SurveyItem::Actionable => self.actionable,
            SurveyItem::Timely => self.timely,
            SurveyItem::Reflection => self.reflection,
        }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        for item in SurveyItem::ALL {
            let r = self.get(item);
            if !(1..=5).contains(&r) {
                return Err(AnalysisError::RatingOutOfRange(r));
            }
        }
        Ok(())
    }
}

/// One exported trial. Field order is the column order of the export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub session_id: String,
    pub condition: FeedbackCondition,
    pub trial_index: u32,
    pub outcome: LandingOutcome,
    pub duration: f64,
    /// Seconds spent reviewing feedback before the survey was submitted.
    pub feedback_time: Option<f64>,
    pub motivation: Option<u8>,
    pub manageable: Option<u8>,
    pub actionable: Option<u8>,
    pub timely: Option<u8>,
    pub reflection: Option<u8>,
}

impl TrialRow {
    pub fn new(
        session_id: impl Into<String>,
        condition: FeedbackCondition,
        trial_index: u32,
        outcome: LandingOutcome,
        duration: f64,
    ) -> Self {
        Self {
            session_id: session_id.into(),
            condition,
            trial_index,
            outcome,
            duration,
            feedback_time: None,
            motivation: None,
            manageable: None,
            actionable: None,
            timely: None,
            reflection: None,
        }
    }

    pub fn with_survey(mut self, survey: SurveyResponse, feedback_time: f64) -> Self {
        self.feedback_time = Some(feedback_time);
        self.motivation = Some(survey.motivation);
        self.manageable = Some(survey.manageable);
        self.actionable = Some(survey.actionable);
        self.timely = Some(survey.timely);
        self.reflection = Some(survey.reflection);
        self
    }

    /// The survey, if every item was answered.
    pub fn survey(&self) -> Option<SurveyResponse> {
        Some(SurveyResponse {
            motivation: self.motivation?,
            manageable: self.manageable?,
            actionable: self.actionable?,
            timely: self.timely?,
            reflection: self.reflection?,
        })
    }

    pub fn rating(&self, item: SurveyItem) -> Option<u8> {
        match item {
            SurveyItem::Motivation => self.motivation,
            SurveyItem::Manageable => self.manageable,
            SurveyItem::Actionable => self.actionable,
            SurveyItem::Timely => self.timely,
            SurveyItem::Reflection => self.reflection,
        }
    }
}
