//! The experiment protocol: sessions, trials, feedback delivery and surveys.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex as StdMutex};
use std::time::{SystemTime, UNIX_EPOCH};

use quadcoach_core::analysis::{SurveyResponse, TrialRow};
use quadcoach_core::feedback::{
    payload_for, FeedbackCondition, FeedbackPayload, FeedbackProvider, TemplateProvider,
};
use quadcoach_core::sim::{
    ComponentSpecs, ControlInput, LandingOutcome, MissingSpec, SimState, Trajectory,
};
use quadcoach_core::stl::SpecSet;
use quadcoach_core::{evaluate_trial, PipelineConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::{watch, Mutex};

use crate::config::{Assignment, ConfigError, ServiceConfig};
use crate::frames::{FrameError, FrameIngestor, InputFrame};
use crate::provider::ExternalProvider;
use crate::session::{ExitSurvey, InFlight, Session, SessionError, SessionEvent, SurveyRecord};
use crate::store::{Store, StoreError};

/// Source of wall-clock timestamps, seconds since the Unix epoch.
pub trait Clock: Send + Sync {
    fn now(&self) -> f64;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> f64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0.0, |d| d.as_secs_f64())
    }
}

/// Clock that only moves when told to.
#[derive(Debug, Default)]
pub struct ManualClock(AtomicU64);

impl ManualClock {
    pub fn new(start: f64) -> Self {
        Self(AtomicU64::new(start.to_bits()))
    }

    pub fn set(&self, t: f64) {
        self.0.store(t.to_bits(), Ordering::SeqCst);
    }

    pub fn advance(&self, dt: f64) {
        self.set(self.now() + dt);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::SeqCst))
    }
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("frame {index}: {source}")]
    Frame { index: usize, source: FrameError },
    #[error("trial {0} already has a live input connection")]
    AlreadyLive(u32),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    MissingSpec(#[from] MissingSpec),
    #[error("background task failed: {0}")]
    Task(String),
}

/// Outcome of a finished trial as reported to the client.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub index: u32,
    pub outcome: LandingOutcome,
    pub duration: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialView {
    pub index: u32,
    pub outcome: LandingOutcome,
    pub duration: f64,
    pub feedback_ready: bool,
    pub feedback_delivered: bool,
    pub survey_submitted: bool,
}

/// Session overview without input logs or artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub condition: FeedbackCondition,
    pub created_at: f64,
    pub trials: Vec<TrialView>,
    pub in_flight: Option<InFlight>,
    pub exit_survey_submitted: bool,
}

impl From<&Session> for SessionView {
    fn from(s: &Session) -> Self {
        Self {
            id: s.id.clone(),
            condition: s.condition,
            created_at: s.created_at,
            trials: s
                .trials
                .iter()
                .map(|t| TrialView {
                    index: t.index,
                    outcome: t.outcome,
                    duration: t.duration,
                    feedback_ready: t.feedback.is_some(),
                    feedback_delivered: t.delivered_at.is_some(),
                    survey_submitted: t.survey.is_some(),
                })
                .collect(),
            in_flight: s.in_flight,
            exit_survey_submitted: s.exit_survey.is_some(),
        }
    }
}

struct Slot {
    session: Mutex<Session>,
    /// Bumped whenever feedback for one of the session's trials lands.
    ready: watch::Sender<u64>,
    live: AtomicBool,
}

impl Slot {
    fn new(session: Session) -> Arc<Self> {
        Arc::new(Self {
            session: Mutex::new(session),
            ready: watch::channel(0).0,
            live: AtomicBool::new(false),
        })
    }
}

type SharedProvider = Arc<dyn FeedbackProvider + Send + Sync>;

struct Inner {
    store: Store,
    specs: SpecSet,
    components: ComponentSpecs,
    pipeline: PipelineConfig,
    provider: SharedProvider,
    fallback: Arc<TemplateProvider>,
    assignment: Assignment,
    clock: Arc<dyn Clock>,
    sessions: StdMutex<BTreeMap<String, Arc<Slot>>>,
    /// Serializes session creation so ids and assignment stay sequential.
    creating: Mutex<()>,
}

/// Cheap to clone; all clones share state.
#[derive(Clone)]
pub struct SessionService {
    inner: Arc<Inner>,
}

pub struct ServiceBuilder {
    store: Store,
    specs: SpecSet,
    pipeline: PipelineConfig,
    provider: Option<SharedProvider>,
    fallback: TemplateProvider,
    assignment: Assignment,
    clock: Arc<dyn Clock>,
}

impl ServiceBuilder {
    pub fn new(store: Store) -> Self {
        Self {
            store,
            specs: SpecSet::table1(),
            pipeline: PipelineConfig::default(),
            provider: None,
            fallback: TemplateProvider::default(),
            assignment: Assignment::RoundRobin,
            clock: Arc::new(SystemClock),
        }
    }

    pub fn specs(mut self, specs: SpecSet) -> Self {
        self.specs = specs;
        self
    }

    pub fn pipeline(mut self, pipeline: PipelineConfig) -> Self {
        self.pipeline = pipeline;
        self
    }

    /// Primary feedback generator; the template provider when unset.
    pub fn provider(mut self, provider: SharedProvider) -> Self {
        self.provider = Some(provider);
        self
    }

    pub fn fallback(mut self, fallback: TemplateProvider) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn assignment(mut self, assignment: Assignment) -> Self {
        self.assignment = assignment;
        self
    }

    pub fn clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    /// Loads stored sessions and restarts feedback generation for trials
    /// that finished without it. Must run inside a Tokio runtime.
    pub fn build(self) -> Result<SessionService, ServiceError> {
        let components = ComponentSpecs::from_set(&self.specs)?;
        let fallback = Arc::new(self.fallback);
        let provider = self.provider.unwrap_or_else(|| fallback.clone());
        let sessions = self.store.load_all()?;
        let service = SessionService {
            inner: Arc::new(Inner {
                store: self.store,
                specs: self.specs,
                components,
                pipeline: self.pipeline,
                provider,
                fallback,
                assignment: self.assignment,
                clock: self.clock,
                sessions: StdMutex::new(BTreeMap::new()),
                creating: Mutex::new(()),
            }),
        };
        for session in sessions {
            let pending: Vec<(u32, String)> = session
                .trials
                .iter()
                .filter(|t| t.feedback.is_none())
                .map(|t| (t.index, t.trajectory_file.clone()))
                .collect();
            let id = session.id.clone();
            service
                .inner
                .sessions
                .lock()
                .expect("session map")
                .insert(id.clone(), Slot::new(session));
            for (index, file) in pending {
                let trajectory = service.inner.store.read_trajectory(&id, &file)?;
                service.spawn_feedback(id.clone(), index, trajectory);
            }
        }
        Ok(service)
    }
}

impl SessionService {
    pub fn builder(store: Store) -> ServiceBuilder {
        ServiceBuilder::new(store)
    }

    /// Service as described by a configuration file. Must run inside a
    /// Tokio runtime.
    pub fn from_config(config: &ServiceConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let fallback = TemplateProvider::new(config.templates()?);
        let mut builder = Self::builder(Store::open(&config.data_dir)?)
            .specs(config.specs()?)
            .pipeline(config.pipeline.clone())
            .fallback(fallback)
            .assignment(config.assignment);
        if let Some(provider) = &config.provider {
            builder = builder.provider(Arc::new(ExternalProvider::from_env(provider.clone())));
        }
        builder.build()
    }

    pub fn store(&self) -> &Store {
        &self.inner.store
    }

    pub fn pipeline(&self) -> &PipelineConfig {
        &self.inner.pipeline
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, ServiceError> {
        self.inner
            .sessions
            .lock()
            .expect("session map")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.into()))
    }

    fn slots(&self) -> Vec<Arc<Slot>> {
        self.inner
            .sessions
            .lock()
            .expect("session map")
            .values()
            .cloned()
            .collect()
    }

    fn condition_for(&self, n: usize) -> FeedbackCondition {
        match self.inner.assignment {
            Assignment::RoundRobin => FeedbackCondition::round_robin(n),
            Assignment::Seeded { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                );
                FeedbackCondition::ALL[rng.random_range(0..3)]
            }
        }
    }

    pub async fn create_session(&self) -> Result<SessionView, ServiceError> {
        let _guard = self.inner.creating.lock().await;
        let n = self.inner.sessions.lock().expect("session map").len();
        let id = format!("s{:04}", n + 1);
        let session =
            self.inner
                .store
                .create_session(&id, self.condition_for(n), self.inner.clock.now())?;
        let view = SessionView::from(&session);
        self.inner
            .sessions
            .lock()
            .expect("session map")
            .insert(id, Slot::new(session));
        Ok(view)
    }

    pub async fn session(&self, id: &str) -> Result<SessionView, ServiceError> {
        let slot = self.slot(id)?;
        let session = slot.session.lock().await;
        Ok(SessionView::from(&*session))
    }

    /// Full session record including input logs and artifacts.
    pub async fn session_record(&self, id: &str) -> Result<Session, ServiceError> {
        Ok(self.slot(id)?.session.lock().await.clone())
    }

    pub async fn session_ids(&self) -> Vec<String> {
        self.inner
            .sessions
            .lock()
            .expect("session map")
            .keys()
            .cloned()
            .collect()
    }

    fn record(
        &self,
        id: &str,
        session: &mut Session,
        event: SessionEvent,
    ) -> Result<(), ServiceError> {
        session.check(&event)?;
        self.inner.store.append(id, &event)?;
        session.apply(&event).expect("checked above");
        Ok(())
    }

    /// Starts the next trial; inputs then arrive over [`LiveTrial`].
    pub async fn start_trial(&self, id: &str) -> Result<u32, ServiceError> {
        let slot = self.slot(id)?;
        let mut session = slot.session.lock().await;
        let index = session.next_index();
        self.record(
            id,
            &mut session,
            SessionEvent::TrialStarted {
                index,
                at: self.inner.clock.now(),
            },
        )?;
        Ok(index)
    }

    /// Runs a whole trial from an uploaded frame list.
    pub async fn run_trial(
        &self,
        id: &str,
        frames: Vec<InputFrame>,
    ) -> Result<TrialSummary, ServiceError> {
        let slot = self.slot(id)?;
        let mut session = slot.session.lock().await;
        let index = session.next_index();
        let start = SessionEvent::TrialStarted {
            index,
            at: self.inner.clock.now(),
        };
        session.check(&start)?;
        let sim = self.inner.pipeline.sim.clone();
        let components = self.inner.components.clone();
        let (inputs, trajectory) = tokio::task::spawn_blocking(move || {
            let mut ingestor = FrameIngestor::new(&sim);
            for (i, frame) in frames.iter().enumerate() {
                ingestor
                    .push(frame)
                    .map_err(|source| ServiceError::Frame { index: i, source })?;
            }
            Ok::<_, ServiceError>(ingestor.finish(&components))
        })
        .await
        .map_err(|e| ServiceError::Task(e.to_string()))??;
        self.record(id, &mut session, start)?;
        self.complete_locked(id, &mut session, index, inputs, trajectory)
    }

    /// Attaches the live input stream of the in-flight trial `index`.
    pub async fn open_live(&self, id: &str, index: u32) -> Result<LiveTrial, ServiceError> {
        let slot = self.slot(id)?;
        let session = slot.session.lock().await;
        match session.in_flight {
            Some(f) if f.index == index => {}
            _ => return Err(SessionError::NotInFlight(index).into()),
        }
        if slot.live.swap(true, Ordering::SeqCst) {
            return Err(ServiceError::AlreadyLive(index));
        }
        Ok(LiveTrial {
            service: self.clone(),
            slot: slot.clone(),
            id: id.into(),
            index,
            ingestor: Some(FrameIngestor::new(&self.inner.pipeline.sim)),
        })
    }

    fn complete_locked(
        &self,
        id: &str,
        session: &mut Session,
        index: u32,
        inputs: Vec<ControlInput>,
        trajectory: Trajectory,
    ) -> Result<TrialSummary, ServiceError> {
        let probe = SessionEvent::TrialCompleted {
            index,
            at: 0.0,
            inputs: Vec::new(),
            trajectory_file: String::new(),
            outcome: LandingOutcome::Crash,
            duration: 0.0,
            samples: 0,
        };
        session.check(&probe)?;
        let outcome = quadcoach_core::sim::classify_outcome(&trajectory, &self.inner.pipeline.sim)
            .map_err(|e| ServiceError::Task(e.to_string()))?;
        let summary = TrialSummary {
            index,
            outcome,
            duration: trajectory.duration(),
            samples: trajectory.len(),
        };
        let trajectory_file = self.inner.store.write_trajectory(id, index, &trajectory)?;
        let event = SessionEvent::TrialCompleted {
            index,
            at: self.inner.clock.now(),
            inputs,
            trajectory_file,
            outcome,
            duration: summary.duration,
            samples: summary.samples,
        };
        self.record(id, session, event)?;
        self.spawn_feedback(id.into(), index, trajectory);
        Ok(summary)
    }

    /// Assessment and all three artifacts, off the async threads.
    fn spawn_feedback(&self, id: String, index: u32, trajectory: Trajectory) {
        let service = self.clone();
        tokio::spawn(async move {
            let inner = service.inner.clone();
            let evaluated = tokio::task::spawn_blocking(move || {
                evaluate_trial(
                    &trajectory,
                    &inner.specs,
                    &inner.pipeline,
                    &*inner.provider,
                    &inner.fallback,
                )
            })
            .await;
            let eval = match evaluated {
                Ok(Ok(eval)) => eval,
                Ok(Err(e)) => {
                    return tracing::error!(session = %id, trial = index, "assessment failed: {e}")
                }
                Err(e) => {
                    return tracing::error!(session = %id, trial = index, "feedback task failed: {e}")
                }
            };
            let Ok(slot) = service.slot(&id) else { return };
            let mut session = slot.session.lock().await;
            let event = SessionEvent::FeedbackReady {
                index,
                at: service.inner.clock.now(),
                report: Box::new(eval.report),
                artifacts: Box::new(eval.artifacts),
            };
            match service.record(&id, &mut session, event) {
                Ok(()) => {
                    slot.ready.send_modify(|v| *v += 1);
                }
                Err(e) => {
                    tracing::error!(session = %id, trial = index, "storing feedback failed: {e}")
                }
            }
        });
    }

    /// Waits until trial `index` has feedback and returns what the
    /// session's condition shows. The first call marks it delivered.
    pub async fn get_feedback(
        &self,
        id: &str,
        index: u32,
    ) -> Result<FeedbackPayload, ServiceError> {
        let slot = self.slot(id)?;
        loop {
            let mut ready = {
                let mut session = slot.session.lock().await;
                let trial = session.trial(index)?;
                if let Some(feedback) = &trial.feedback {
                    let payload = payload_for(session.condition, &feedback.artifacts);
                    if trial.delivered_at.is_none() {
                        let at = self.inner.clock.now();
                        self.record(
                            id,
                            &mut session,
                            SessionEvent::FeedbackDelivered { index, at },
                        )?;
                    }
                    return Ok(payload);
                }
                slot.ready.subscribe()
            };
            ready
                .changed()
                .await
                .map_err(|e| ServiceError::Task(e.to_string()))?;
        }
    }

    /// Waits for feedback without marking it delivered.
    pub async fn wait_for_feedback(&self, id: &str, index: u32) -> Result<(), ServiceError> {
        let slot = self.slot(id)?;
        loop {
            let mut ready = {
                let session = slot.session.lock().await;
                if session.trial(index)?.feedback.is_some() {
                    return Ok(());
                }
                slot.ready.subscribe()
            };
            ready
                .changed()
                .await
                .map_err(|e| ServiceError::Task(e.to_string()))?;
        }
    }

    /// Trajectory file contents (JSON-lines).
    pub async fn trajectory(&self, id: &str, index: u32) -> Result<String, ServiceError> {
        let slot = self.slot(id)?;
        let file = slot
            .session
            .lock()
            .await
            .trial(index)?
            .trajectory_file
            .clone();
        let path = self.inner.store.trajectory_path(id, &file);
        tokio::task::spawn_blocking(move || {
            std::fs::read_to_string(&path).map_err(|source| (path, source))
        })
        .await
        .map_err(|e| ServiceError::Task(e.to_string()))?
        .map_err(|(path, source)| {
            StoreError::Io {
                context: path.display().to_string(),
                source,
            }
            .into()
        })
    }

    pub async fn submit_survey(
        &self,
        id: &str,
        index: u32,
        response: SurveyResponse,
    ) -> Result<SurveyRecord, ServiceError> {
        let slot = self.slot(id)?;
        let mut session = slot.session.lock().await;
        let event = SessionEvent::SurveySubmitted {
            index,
            at: self.inner.clock.now(),
            response,
        };
        self.record(id, &mut session, event)?;
        Ok(session.trial(index)?.survey.clone().expect("just recorded"))
    }

    pub async fn submit_exit_survey(
        &self,
        id: &str,
        survey: ExitSurvey,
    ) -> Result<(), ServiceError> {
        let slot = self.slot(id)?;
        let mut session = slot.session.lock().await;
        let event = SessionEvent::ExitSurveySubmitted {
            at: self.inner.clock.now(),
            survey,
        };
        self.record(id, &mut session, event)
    }

    /// Waits for all outstanding feedback.
    pub async fn settle(&self) -> Result<(), ServiceError> {
        for slot in self.slots() {
            let (id, pending): (String, Vec<u32>) = {
                let s = slot.session.lock().await;
                (
                    s.id.clone(),
                    s.trials
                        .iter()
                        .filter(|t| t.feedback.is_none())
                        .map(|t| t.index)
                        .collect(),
                )
            };
            for index in pending {
                self.wait_for_feedback(&id, index).await?;
            }
        }
        Ok(())
    }

    /// Trial rows of every session once all feedback exists.
    pub async fn export_rows(&self) -> Result<Vec<TrialRow>, ServiceError> {
        self.settle().await?;
        let mut rows = Vec::new();
        for slot in self.slots() {
            rows.extend(slot.session.lock().await.rows());
        }
        Ok(rows)
    }
}

/// Live input for one in-flight trial.
pub struct LiveTrial {
    service: SessionService,
    slot: Arc<Slot>,
    id: String,
    index: u32,
    ingestor: Option<FrameIngestor>,
}

impl LiveTrial {
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn push(&mut self, frame: &InputFrame) -> Result<SimState, FrameError> {
        let ingestor = self.ingestor.as_mut().expect("live trial already finished");
        ingestor.push(frame)?;
        Ok(*ingestor.state())
    }

    pub fn state(&self) -> SimState {
        *self
            .ingestor
            .as_ref()
            .expect("live trial already finished")
            .state()
    }

    pub fn is_finished(&self) -> bool {
        self.ingestor
            .as_ref()
            .is_none_or(FrameIngestor::is_finished)
    }

    /// Holds the last input until the episode ends and records the trial.
    pub async fn finish(mut self) -> Result<TrialSummary, ServiceError> {
        let ingestor = self.ingestor.take().expect("live trial already finished");
        let components = self.service.inner.components.clone();
        let (inputs, trajectory) =
            tokio::task::spawn_blocking(move || ingestor.finish(&components))
                .await
                .map_err(|e| ServiceError::Task(e.to_string()))?;
        let mut session = self.slot.session.lock().await;
        self.service
            .complete_locked(&self.id, &mut session, self.index, inputs, trajectory)
    }
}

impl Drop for LiveTrial {
    fn drop(&mut self) {
        self.slot.live.store(false, Ordering::SeqCst);
    }
}
