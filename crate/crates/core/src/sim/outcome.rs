use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::SimConfig;
use super::dynamics::{contact, Edge, SimState};
use super::episode::{Termination, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LandingOutcome {
    Safe,
    Unsafe,
    Crash,
}

impl LandingOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            LandingOutcome::Safe => "Safe",
            LandingOutcome::Unsafe => "Unsafe",
            LandingOutcome::Crash => "Crash",
        }
    }

    /// Safe or Unsafe, i.e. the drone reached the pad.
    pub fn reached_pad(self) -> bool {
        !matches!(self, LandingOutcome::Crash)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ClassifyError {
    #[error("trajectory is empty")]
    Empty,
    #[error("trajectory ends mid-flight at t = {0:.2} s")]
    NotTerminated(f64),
}

/// How the trajectory ended, read off its final sample.
pub fn termination(trajectory: &Trajectory, config: &SimConfig) -> Option<Termination> {
    let last = trajectory.last()?;
    let state = SimState {
        x: last.x,
        y: last.y,
        vx: last.vx,
        vy: last.vy,
        phi: last.phi,
        tick: 0,
    };
    match contact(&state, config) {
        Some(edge) => Some(Termination::Contact(edge)),
        None if last.t >= config.trial_cap - 1e-9 => Some(Termination::Timeout),
        None => None,
    }
}

/// Safe when the final contact is with the floor, the whole footprint is
/// over the pad, speed is below the limit and the tilt is inside the angle
/// limit. Pad contact failing either threshold is Unsafe; any other ending
/// is a Crash.
pub fn classify_outcome(
    trajectory: &Trajectory,
    config: &SimConfig,
) -> Result<LandingOutcome, ClassifyError> {
    let last = trajectory.last().ok_or(ClassifyError::Empty)?;
    match termination(trajectory, config) {
        None => Err(ClassifyError::NotTerminated(last.t)),
        Some(Termination::Contact(Edge::Bottom)) => {
            let on_pad =
                last.x > config.pad_x_min && last.x + config.drone_width <= config.pad_x_max;
            if !on_pad {
                Ok(LandingOutcome::Crash)
            } else if last.speed() < config.speed_limit && libm::fabs(last.phi) < config.angle_limit
            {
                Ok(LandingOutcome::Safe)
            } else {
                Ok(LandingOutcome::Unsafe)
            }
        }
        Some(_) => Ok(LandingOutcome::Crash),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{ComponentRobustness, TrajectorySample};
    use alloc::vec;

    fn ending(x: f64, y: f64, speed: f64, phi: f64, t: f64) -> Trajectory {
        let c = SimConfig::default();
        let start = TrajectorySample {
            t: 0.0,
            x: c.start_x,
            y: c.start_y,
            vx: 0.0,
            vy: 0.0,
            phi: 0.0,
            throttle: 0.0,
            attitude: 0,
            rob: ComponentRobustness::default(),
        };
        let end = TrajectorySample {
            t,
            x,
            y,
            vx: 0.0,
            vy: -speed,
            phi,
            ..start
        };
        Trajectory {
            dt: c.dt,
            footprint: c.footprint(),
            samples: vec![start, end],
        }
    }

    #[test]
    fn pad_contacts() {
        let c = SimConfig::default();
        assert_eq!(
            classify_outcome(&ending(720.0, 0.0, 10.0, 2.0, 20.0), &c),
            Ok(LandingOutcome::Safe)
        );
        assert_eq!(
            classify_outcome(&ending(720.0, 0.0, 20.0, 0.0, 20.0), &c),
            Ok(LandingOutcome::Unsafe)
        );
        assert_eq!(
            classify_outcome(&ending(720.0, 0.0, 3.0, -5.0, 20.0), &c),
            Ok(LandingOutcome::Unsafe)
        );
        // Straddling the pad's edge is not a pad contact.
        assert_eq!(
            classify_outcome(&ending(830.0, 0.0, 3.0, 0.0, 20.0), &c),
            Ok(LandingOutcome::Crash)
        );
        assert_eq!(
            classify_outcome(&ending(650.0, 0.0, 3.0, 0.0, 20.0), &c),
            Ok(LandingOutcome::Crash)
        );
    }

    #[test]
    fn other_endings_crash() {
        let c = SimConfig::default();
        assert_eq!(
            classify_outcome(&ending(0.0, 320.0, 10.0, 0.0, 9.0), &c),
            Ok(LandingOutcome::Crash)
        );
        assert_eq!(
            classify_outcome(&ending(1210.0, 320.0, 10.0, 0.0, 9.0), &c),
            Ok(LandingOutcome::Crash)
        );
        assert_eq!(
            classify_outcome(&ending(300.0, 575.0, 10.0, 0.0, 9.0), &c),
            Ok(LandingOutcome::Crash)
        );
        assert_eq!(
            classify_outcome(&ending(100.0, 0.0, 1.0, 0.0, 9.0), &c),
            Ok(LandingOutcome::Crash)
        );
        assert_eq!(
            classify_outcome(&ending(300.0, 200.0, 0.0, 0.0, 120.0), &c),
            Ok(LandingOutcome::Crash)
        );
    }

    #[test]
    fn mid_flight_is_an_error() {
        let c = SimConfig::default();
        assert_eq!(
            classify_outcome(&ending(300.0, 200.0, 0.0, 0.0, 10.0), &c),
            Err(ClassifyError::NotTerminated(10.0))
        );
        let empty = Trajectory {
            dt: 0.02,
            footprint: c.footprint(),
            samples: vec![],
        };
        assert_eq!(classify_outcome(&empty, &c), Err(ClassifyError::Empty));
    }
}
