//! Session state rebuilt from an append-only event log.

use quadcoach_core::analysis::{AnalysisError, SurveyResponse, TrialRow, TRIALS_PER_SESSION};
use quadcoach_core::assessment::RobustnessReport;
use quadcoach_core::feedback::{FeedbackArtifacts, FeedbackCondition};
use quadcoach_core::sim::{ControlInput, LandingOutcome};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitSurvey {
    pub gender_identity: String,
    pub age: u32,
    pub drone_experience: String,
    pub game_frequency: String,
    /// "The feedback I received helped me perform better on the task", 1 to 5.
    pub helpfulness: u8,
    pub strategy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackRecord {
    pub generated_at: f64,
    pub report: RobustnessReport,
    pub artifacts: FeedbackArtifacts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub submitted_at: f64,
    pub response: SurveyResponse,
    /// Seconds between first feedback delivery and submission.
    pub review_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u32,
    pub started_at: f64,
    pub completed_at: f64,
    /// One input per simulated step.
    pub inputs: Vec<ControlInput>,
    /// Relative to the session directory.
    pub trajectory_file: String,
    pub outcome: LandingOutcome,
    pub duration: f64,
    pub samples: usize,
    pub feedback: Option<FeedbackRecord>,
    pub delivered_at: Option<f64>,
    pub survey: Option<SurveyRecord>,
}

impl TrialRecord {
    /// Wall-clock seconds from start to completion.
    pub fn trial_seconds(&self) -> f64 {
        self.completed_at - self.started_at
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InFlight {
    pub index: u32,
    pub started_at: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub condition: FeedbackCondition,
    pub created_at: f64,
    pub trials: Vec<TrialRecord>,
    pub in_flight: Option<InFlight>,
    pub exit_survey: Option<ExitSurvey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Created {
        id: String,
        condition: FeedbackCondition,
        at: f64,
    },
    TrialStarted {
        index: u32,
        at: f64,
    },
    TrialCompleted {
        index: u32,
        at: f64,
        inputs: Vec<ControlInput>,
        trajectory_file: String,
        outcome: LandingOutcome,
        duration: f64,
        samples: usize,
    },
    FeedbackReady {
        index: u32,
        at: f64,
        report: Box<RobustnessReport>,
        artifacts: Box<FeedbackArtifacts>,
    },
    FeedbackDelivered {
        index: u32,
        at: f64,
    },
    SurveySubmitted {
        index: u32,
        at: f64,
        response: SurveyResponse,
    },
    ExitSurveySubmitted {
        at: f64,
        survey: ExitSurvey,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error("session already has {TRIALS_PER_SESSION} trials")]
    TrialLimit,
    #[error("trial {0} is still in progress")]
    TrialInFlight(u32),
    #[error("no trial {0} in progress")]
    NotInFlight(u32),
    #[error("expected trial {expected}, got {got}")]
    WrongTrial { expected: u32, got: u32 },
    #[error("unknown trial {0}")]
    UnknownTrial(u32),
    #[error("feedback for trial {0} is not ready")]
    FeedbackPending(u32),
    #[error("feedback for trial {0} already recorded")]
    DuplicateFeedback(u32),
    #[error("feedback for trial {0} has not been delivered")]
    NotDelivered(u32),
    #[error("trial {0} already has a survey")]
    DuplicateSurvey(u32),
    #[error("exit survey already submitted")]
    DuplicateExitSurvey,
    #[error("invalid survey: {0}")]
    Rating(#[from] AnalysisError),
    #[error("first event must create the session")]
    NotCreated,
    #[error("session already created")]
    AlreadyCreated,
}

impl Session {
    pub fn new(id: impl Into<String>, condition: FeedbackCondition, created_at: f64) -> Self {
        Self {
            id: id.into(),
            condition,
            created_at,
            trials: Vec::new(),
            in_flight: None,
            exit_survey: None,
        }
    }

    /// Replays a log that starts with `Created`.
    pub fn from_events<'a>(
        events: impl IntoIterator<Item = &'a SessionEvent>,
    ) -> Result<Self, SessionError> {
        let mut events = events.into_iter();
        let mut session = match events.next() {
            Some(SessionEvent::Created { id, condition, at }) => {
                Session::new(id.clone(), *condition, *at)
            }
            _ => return Err(SessionError::NotCreated),
        };
        for event in events {
            session.apply(event)?;
        }
        Ok(session)
    }

    /// Index the next trial will get.
    pub fn next_index(&self) -> u32 {
        self.trials.len() as u32 + 1
    }

    pub fn trial(&self, index: u32) -> Result<&TrialRecord, SessionError> {
        index
            .checked_sub(1)
            .and_then(|i| self.trials.get(i as usize))
            .ok_or(SessionError::UnknownTrial(index))
    }

    fn trial_mut(&mut self, index: u32) -> Result<&mut TrialRecord, SessionError> {
        index
            .checked_sub(1)
            .and_then(|i| self.trials.get_mut(i as usize))
            .ok_or(SessionError::UnknownTrial(index))
    }

    /// Checks that `event` is legal in the current state.
    pub fn check(&self, event: &SessionEvent) -> Result<(), SessionError> {
        match event {
            SessionEvent::Created { .. } => Err(SessionError::AlreadyCreated),
            SessionEvent::TrialStarted { index, .. } => {
                if let Some(f) = self.in_flight {
                    return Err(SessionError::TrialInFlight(f.index));
                }
                if self.trials.len() >= TRIALS_PER_SESSION as usize {
                    return Err(SessionError::TrialLimit);
                }
                if *index != self.next_index() {
                    return Err(SessionError::WrongTrial {
                        expected: self.next_index(),
                        got: *index,
                    });
                }
                Ok(())
            }
            SessionEvent::TrialCompleted { index, .. } => match self.in_flight {
                Some(f) if f.index == *index => Ok(()),
                _ => Err(SessionError::NotInFlight(*index)),
            },
            SessionEvent::FeedbackReady { index, .. } => {
                if self.trial(*index)?.feedback.is_some() {
                    return Err(SessionError::DuplicateFeedback(*index));
                }
                Ok(())
            }
            SessionEvent::FeedbackDelivered { index, .. } => {
                if self.trial(*index)?.feedback.is_none() {
                    return Err(SessionError::FeedbackPending(*index));
                }
                Ok(())
            }
            SessionEvent::SurveySubmitted {
                index, response, ..
            } => {
                response.validate()?;
                let trial = self.trial(*index)?;
                if trial.survey.is_some() {
                    return Err(SessionError::DuplicateSurvey(*index));
                }
                if trial.delivered_at.is_none() {
                    return Err(SessionError::NotDelivered(*index));
                }
                Ok(())
            }
            SessionEvent::ExitSurveySubmitted { survey, .. } => {
                if self.exit_survey.is_some() {
                    return Err(SessionError::DuplicateExitSurvey);
                }
                if !(1..=5).contains(&survey.helpfulness) {
                    return Err(AnalysisError::RatingOutOfRange(survey.helpfulness).into());
                }
                Ok(())
            }
        }
    }

    pub fn apply(&mut self, event: &SessionEvent) -> Result<(), SessionError> {
        self.check(event)?;
        match event {
            SessionEvent::Created { .. } => unreachable!("rejected by check"),
            SessionEvent::TrialStarted { index, at } => {
                self.in_flight = Some(InFlight {
                    index: *index,
                    started_at: *at,
                });
            }
            SessionEvent::TrialCompleted {
                index,
                at,
                inputs,
                trajectory_file,
                outcome,
                duration,
                samples,
            } => {
                let started_at = self.in_flight.take().map_or(*at, |f| f.started_at);
                self.trials.push(TrialRecord {
                    index: *index,
                    started_at,
                    completed_at: *at,
                    inputs: inputs.clone(),
                    trajectory_file: trajectory_file.clone(),
                    outcome: *outcome,
                    duration: *duration,
                    samples: *samples,
                    feedback: None,
                    delivered_at: None,
                    survey: None,
                });
            }
            SessionEvent::FeedbackReady {
                index,
                at,
                report,
                artifacts,
            } => {
                self.trial_mut(*index)?.feedback = Some(FeedbackRecord {
                    generated_at: *at,
                    report: (**report).clone(),
                    artifacts: (**artifacts).clone(),
                });
            }
            SessionEvent::FeedbackDelivered { index, at } => {
                let trial = self.trial_mut(*index)?;
                trial.delivered_at.get_or_insert(*at);
            }
            SessionEvent::SurveySubmitted {
                index,
                at,
                response,
            } => {
                let trial = self.trial_mut(*index)?;
                let review_seconds = at - trial.delivered_at.unwrap_or(*at);
                trial.survey = Some(SurveyRecord {
                    submitted_at: *at,
                    response: *response,
                    review_seconds,
                });
            }
            SessionEvent::ExitSurveySubmitted { survey, .. } => {
                self.exit_survey = Some(survey.clone());
            }
        }
        Ok(())
    }

    /// Export rows for completed trials, in trial order.
    pub fn rows(&self) -> Vec<TrialRow> {
        self.trials
            .iter()
            .map(|t| {
                let row = TrialRow::new(
                    self.id.clone(),
                    self.condition,
                    t.index,
                    t.outcome,
                    t.duration,
                );
                match &t.survey {
                    Some(s) => row.with_survey(s.response, s.review_seconds),
                    None => row,
                }
            })
            .collect()
    }
}
