use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::config::SimConfig;
use super::dynamics::{ControlInput, SimState};
use super::episode::Episode;

/// Degrees of attitude error tolerated before a rotation key is pressed.
const ATTITUDE_DEADBAND: f64 = 0.6;

/// Parameters of a scripted flight: fly across at a cruise altitude, then
/// descend over `target_x` at a fixed vertical speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PilotProfile {
    /// Left edge of the drone at touchdown.
    pub target_x: f64,
    pub cruise_altitude: f64,
    /// Held during the final descent; zero hovers until the clock runs out.
    pub descent_speed: f64,
    /// Rotation held below `flare_height`.
    pub touchdown_tilt: f64,
    pub flare_height: f64,
    pub max_tilt: f64,
}

impl PilotProfile {
    /// A gentle landing in the middle of the pad.
    pub fn centered(config: &SimConfig) -> Self {
        Self {
            target_x: (config.pad_x_min + config.pad_x_max - config.drone_width) / 2.0,
            cruise_altitude: 300.0,
            descent_speed: 8.0,
            touchdown_tilt: 0.0,
            flare_height: 30.0,
            max_tilt: 20.0,
        }
    }

    /// Input for the next step from the current state.
    pub fn control(&self, state: &SimState, config: &SimConfig) -> ControlInput {
        let ex = self.target_x - state.x;
        let vx_goal = (0.6 * ex).clamp(-25.0, 25.0);
        let descending = libm::fabs(ex) < 25.0 && self.descent_speed > 0.0;
        let vy_goal = if descending {
            -self.descent_speed
        } else {
            (1.5 * (self.cruise_altitude - state.y)).clamp(-10.0, 10.0)
        };
        let phi_goal = if descending && state.y < self.flare_height {
            self.touchdown_tilt
        } else {
            (2.0 * (vx_goal - state.vx)).clamp(-self.max_tilt, self.max_tilt)
        };
        let attitude = if phi_goal - state.phi > ATTITUDE_DEADBAND {
            1
        } else if phi_goal - state.phi < -ATTITUDE_DEADBAND {
            -1
        } else {
            0
        };
        let lift = config.thrust_gain * libm::cos(state.phi.to_radians());
        let throttle = ((config.gravity + 3.0 * (vy_goal - state.vy)) / lift).clamp(0.0, 1.0);
        ControlInput { throttle, attitude }
    }

    /// Flies a whole episode and returns the inputs applied.
    pub fn fly(&self, config: &SimConfig) -> Vec<ControlInput> {
        let mut episode = Episode::new(config);
        let mut inputs = Vec::new();
        while !episode.is_finished() {
            let input = self.control(episode.state(), config);
            inputs.push(input);
            let _ = episode.advance(input);
        }
        inputs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{classify_outcome, run_episode, LandingOutcome};

    fn outcome(profile: PilotProfile) -> (LandingOutcome, f64) {
        let config = SimConfig::default();
        let traj = run_episode(&profile.fly(&config), &config);
        (classify_outcome(&traj, &config).unwrap(), traj.duration())
    }

    #[test]
    fn profiles_reach_each_outcome() {
        let config = SimConfig::default();
        let base = PilotProfile::centered(&config);
        assert_eq!(outcome(base).0, LandingOutcome::Safe);
        assert_eq!(
            outcome(PilotProfile {
                descent_speed: 22.0,
                ..base
            })
            .0,
            LandingOutcome::Unsafe
        );
        assert_eq!(
            outcome(PilotProfile {
                touchdown_tilt: 12.0,
                ..base
            })
            .0,
            LandingOutcome::Unsafe
        );
        assert_eq!(
            outcome(PilotProfile {
                target_x: 300.0,
                ..base
            })
            .0,
            LandingOutcome::Crash
        );
        assert_eq!(
            outcome(PilotProfile {
                cruise_altitude: 700.0,
                ..base
            })
            .0,
            LandingOutcome::Crash
        );
        let (o, d) = outcome(PilotProfile {
            descent_speed: 0.0,
            ..base
        });
        assert_eq!((o, d), (LandingOutcome::Crash, 120.0));
    }
}
