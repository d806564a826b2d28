use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::components::{ComponentRobustness, ComponentSpecs};
use super::config::SimConfig;
use super::dynamics::{contact, step, ControlInput, Edge, SimState};
use crate::stl::{Footprint, Sample, Trace};

/// Why an episode stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Contact(Edge),
    Timeout,
}

/// One logged step: state, the input that produced it, and component
/// robustness. The first sample is the start state with neutral input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub phi: f64,
    pub throttle: f64,
    pub attitude: i8,
    pub rob: ComponentRobustness,
}

impl TrajectorySample {
    pub fn speed(&self) -> f64 {
        libm::hypot(self.vx, self.vy)
    }

    pub fn input(&self) -> ControlInput {
        ControlInput {
            throttle: self.throttle,
            attitude: self.attitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub footprint: Footprint,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }

    /// Time of the final sample.
    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Per-step input log that reproduces this trajectory.
    pub fn inputs(&self) -> Vec<ControlInput> {
        self.samples
            .iter()
            .skip(1)
            .map(TrajectorySample::input)
            .collect()
    }

    /// The signals seen by the specification language.
    pub fn to_trace(&self) -> Result<Trace, crate::stl::TraceError> {
        let samples = self
            .samples
            .iter()
            .map(|s| Sample {
                t: s.t,
                x: s.x,
                y: s.y,
                speed: s.speed(),
                phi: s.phi,
            })
            .collect();
        Trace::new(samples, self.dt, self.footprint)
    }

    /// Recomputes every sample's component robustness.
    pub fn annotate(&mut self, specs: &ComponentSpecs) {
        let Ok(trace) = self.to_trace() else { return };
        for (sample, rob) in self.samples.iter_mut().zip(specs.evaluate(&trace)) {
            sample.rob = rob;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("episode already ended: {0:?}")]
pub struct EpisodeFinished(pub Termination);

/// An episode advanced one input at a time, as when inputs arrive live.
///
/// Feeding the same inputs to [`run_episode`] reproduces the same
/// trajectory bit for bit.
#[derive(Debug, Clone)]
pub struct Episode {
    config: SimConfig,
    steps: Vec<(SimState, ControlInput)>,
    termination: Option<Termination>,
}

impl Episode {
    pub fn new(config: &SimConfig) -> Self {
        let start = SimState::initial(config);
        let termination = contact(&start, config).map(Termination::Contact);
        let mut steps = Vec::with_capacity(config.max_steps() + 1);
        steps.push((start, ControlInput::NEUTRAL));
        Self {
            config: config.clone(),
            steps,
            termination,
        }
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn state(&self) -> &SimState {
        &self.steps[self.steps.len() - 1].0
    }

    pub fn termination(&self) -> Option<Termination> {
        self.termination
    }

    pub fn is_finished(&self) -> bool {
        self.termination.is_some()
    }

    /// Inputs applied so far, one per step.
    pub fn inputs(&self) -> impl Iterator<Item = ControlInput> + '_ {
        self.steps.iter().skip(1).map(|(_, i)| *i)
    }

    pub fn advance(&mut self, input: ControlInput) -> Result<&SimState, EpisodeFinished> {
        if let Some(done) = self.termination {
            return Err(EpisodeFinished(done));
        }
        let next = step(self.state(), &input, &self.config);
        self.termination = match contact(&next, &self.config) {
            Some(edge) => Some(Termination::Contact(edge)),
            None if next.tick as usize >= self.config.max_steps() => Some(Termination::Timeout),
            None => None,
        };
        self.steps.push((next, input));
        Ok(self.state())
    }

    /// Runs out the episode with neutral input, then builds the trajectory.
    pub fn finish(mut self, specs: &ComponentSpecs) -> Trajectory {
        while self.advance(ControlInput::NEUTRAL).is_ok() {}
        let dt = self.config.dt;
        let samples = self
            .steps
            .iter()
            .map(|(s, i)| TrajectorySample {
                t: s.tick as f64 * dt,
                x: s.x,
                y: s.y,
                vx: s.vx,
                vy: s.vy,
                phi: s.phi,
                throttle: i.throttle,
                attitude: i.attitude,
                rob: ComponentRobustness::default(),
            })
            .collect();
        let mut trajectory = Trajectory {
            dt,
            footprint: self.config.footprint(),
            samples,
        };
        trajectory.annotate(specs);
        trajectory
    }
}

/// Replays `inputs` from the start state until the episode ends.
///
/// After the log runs out the drone receives neutral input, so an empty
/// log is a free fall. Inputs past a terminal event are ignored.
pub fn run_episode(inputs: &[ControlInput], config: &SimConfig) -> Trajectory {
    run_episode_with(inputs, config, &ComponentSpecs::table1())
}

/// [`run_episode`] with explicit component specifications.
pub fn run_episode_with(
    inputs: &[ControlInput],
    config: &SimConfig,
    specs: &ComponentSpecs,
) -> Trajectory {
    let mut episode = Episode::new(config);
    for input in inputs {
        if episode.advance(*input).is_err() {
            break;
        }
    }
    episode.finish(specs)
}
