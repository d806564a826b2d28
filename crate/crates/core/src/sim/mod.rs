//! Fixed-timestep 2D quadrotor simulation.
//!
//! The state is advanced with semi-implicit Euler at 50 Hz. Touching any
//! window edge ends the episode; touching the floor with the whole
//! footprint over the pad is a landing, graded Safe or Unsafe against the
//! speed and angle limits. Everything else, including running out the
//! 120 s clock, is a crash.

mod components;
mod config;
mod dynamics;
mod episode;
mod outcome;
mod pilot;

pub use components::{ComponentRobustness, ComponentSpecs, MissingSpec, COMPONENT_NAMES};
pub use config::{ConfigError, SimConfig};
pub use dynamics::{contact, step, ControlInput, Edge, InputError, SimState};
pub use episode::{
    run_episode, run_episode_with, Episode, EpisodeFinished, Termination, Trajectory,
    TrajectorySample,
};
pub use outcome::{classify_outcome, termination, ClassifyError, LandingOutcome};
pub use pilot::PilotProfile;
