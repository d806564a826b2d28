//! Timestamped pilot input and its conversion to a per-step input log.

use quadcoach_core::sim::{
    ComponentSpecs, ControlInput, Episode, InputError, SimConfig, SimState, Trajectory,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Slack when comparing a frame time with a step boundary.
const TIME_EPS: f64 = 1e-9;

/// Input state from the client, effective from `t` seconds into the trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputFrame {
    pub t: f64,
    pub throttle: f64,
    pub attitude: i8,
}

impl InputFrame {
    pub fn input(&self) -> ControlInput {
        ControlInput {
            throttle: self.throttle,
            attitude: self.attitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("frame time {0} is not a finite, non-negative number")]
    BadTime(f64),
    #[error("frame time {t} is earlier than the previous frame at {previous}")]
    OutOfOrder { previous: f64, t: f64 },
    #[error(transparent)]
    Input(#[from] InputError),
}

/// Simulates an episode from a stream of frames.
///
/// Step `k` covers `[k dt, (k + 1) dt)` and uses the latest frame with
/// `t <= k dt`; before the first frame the input is neutral. Once the
/// stream ends the last input is held until the episode terminates.
#[derive(Debug, Clone)]
pub struct FrameIngestor {
    episode: Episode,
    held: ControlInput,
    last_t: f64,
}

impl FrameIngestor {
    pub fn new(config: &SimConfig) -> Self {
        Self {
            episode: Episode::new(config),
            held: ControlInput::NEUTRAL,
            last_t: 0.0,
        }
    }

    pub fn state(&self) -> &SimState {
        self.episode.state()
    }

    pub fn is_finished(&self) -> bool {
        self.episode.is_finished()
    }

    /// Applies a frame, first advancing through every step that starts
    /// before it. Returns the number of steps simulated.
    pub fn push(&mut self, frame: &InputFrame) -> Result<usize, FrameError> {
        if !frame.t.is_finite() || frame.t < 0.0 {
            return Err(FrameError::BadTime(frame.t));
        }
        if frame.t < self.last_t {
            return Err(FrameError::OutOfOrder {
                previous: self.last_t,
                t: frame.t,
            });
        }
        let input = frame.input();
        input.validate()?;
        let dt = self.episode.config().dt;
        let mut steps = 0;
        while !self.episode.is_finished() && f64::from(self.state().tick) * dt < frame.t - TIME_EPS
        {
            let _ = self.episode.advance(self.held);
            steps += 1;
        }
        self.held = input;
        self.last_t = frame.t;
        Ok(steps)
    }

    /// Holds the last input until the episode ends; returns the per-step
    /// input log and the trajectory.
    pub fn finish(mut self, specs: &ComponentSpecs) -> (Vec<ControlInput>, Trajectory) {
        while self.episode.advance(self.held).is_ok() {}
        let inputs = self.episode.inputs().collect();
        (inputs, self.episode.finish(specs))
    }
}

/// Frames that reproduce `inputs` exactly: one frame whenever the input
/// changes, stamped with the start of its step.
pub fn frames_for_inputs(inputs: &[ControlInput], dt: f64) -> Vec<InputFrame> {
    let mut frames = Vec::new();
    let mut previous = ControlInput::NEUTRAL;
    for (k, input) in inputs.iter().enumerate() {
        if k == 0 || *input != previous {
            frames.push(InputFrame {
                t: k as f64 * dt,
                throttle: input.throttle,
                attitude: input.attitude,
            });
            previous = *input;
        }
    }
    frames
}

pub fn ingest_frames(
    frames: &[InputFrame],
    config: &SimConfig,
    specs: &ComponentSpecs,
) -> Result<(Vec<ControlInput>, Trajectory), (usize, FrameError)> {
    let mut ingestor = FrameIngestor::new(config);
    for (i, frame) in frames.iter().enumerate() {
        ingestor.push(frame).map_err(|e| (i, e))?;
    }
    Ok(ingestor.finish(specs))
}
