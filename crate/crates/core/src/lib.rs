//! Core algorithms for the quadrotor landing trainer.
//!
//! Everything in this crate is pure computation over in-memory values and
//! builds without `std`:
//!
//! - [`stl`]: a small signal temporal logic language with quantitative
//!   (robustness) semantics over discrete-time traces.
//! - [`sim`]: fixed-timestep 2D quadrotor dynamics, deterministic replay and
//!   landing classification.
//! - [`assessment`]: robustness reports, the improvement-area heuristic,
//!   annotation placement and the overall score.
//! - [`feedback`]: summary statistics, prompt bundles, the template feedback
//!   provider, element coverage checks and SVG trajectory rendering.
//! - [`analysis`]: landing tables and the hypothesis tests used to compare
//!   feedback conditions.
//! - [`pipeline`]: one call from a finished trajectory to its report and
//!   feedback artifacts.
//!
//! IO, persistence, the HTTP service and the command line tools live in the
//! `quadcoach` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod assessment;
pub mod feedback;
pub mod pipeline;
pub mod sim;
pub mod stl;

pub use assessment::{
    assess, AnnotationPoint, AssessmentConfig, ImprovementArea, RobustnessReport,
};
pub use pipeline::{evaluate_trial, PipelineConfig, TrialEvaluation};
pub use sim::{ControlInput, LandingOutcome, SimConfig, SimState, Trajectory, TrajectorySample};
pub use stl::{Formula, SpecSet, Trace};
