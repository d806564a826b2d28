use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::SimConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    /// Degrees, positive tilts to the right.
    pub phi: f64,
    /// Steps since the start of the episode.
    pub tick: u32,
}

impl SimState {
    /// At rest at the configured start position.
    pub fn initial(config: &SimConfig) -> Self {
        Self {
            x: config.start_x,
            y: config.start_y,
            vx: 0.0,
            vy: 0.0,
            phi: 0.0,
            tick: 0,
        }
    }

    pub fn t(&self, config: &SimConfig) -> f64 {
        self.tick as f64 * config.dt
    }

    pub fn speed(&self) -> f64 {
        libm::hypot(self.vx, self.vy)
    }
}

/// One step's worth of pilot input.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    /// Fraction of full thrust, `0.0..=1.0`.
    pub throttle: f64,
    /// -1 rotates left, +1 rotates right.
    pub attitude: i8,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("throttle {0} outside [0, 1]")]
    Throttle(f64),
    #[error("attitude {0} not in {{-1, 0, 1}}")]
    Attitude(i8),
}

impl ControlInput {
    pub const NEUTRAL: ControlInput = ControlInput {
        throttle: 0.0,
        attitude: 0,
    };

    pub fn new(throttle: f64, attitude: i8) -> Result<Self, InputError> {
        let input = Self { throttle, attitude };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<(), InputError> {
        if !(0.0..=1.0).contains(&self.throttle) {
            return Err(InputError::Throttle(self.throttle));
        }
        if !(-1..=1).contains(&self.attitude) {
            return Err(InputError::Attitude(self.attitude));
        }
        Ok(())
    }

    /// Combined magnitude of the inputs, `throttle + |attitude|`.
    pub fn magnitude(&self) -> f64 {
        self.throttle + f64::from(self.attitude.unsigned_abs())
    }
}

/// Window edge touched by the drone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    Left,
    Right,
    Bottom,
    Top,
}

/// Advances `state` by one `config.dt`.
///
/// Rotation is applied first, then thrust and gravity update the velocity,
/// which is capped at `max_speed` before moving the drone. The position is
/// clamped to the window; detecting the resulting contact is left to the
/// caller (see [`contact`]).
pub fn step(state: &SimState, input: &ControlInput, config: &SimConfig) -> SimState {
    let dt = config.dt;
    let phi = (state.phi + f64::from(input.attitude) * config.rotation_rate * dt)
        .clamp(-config.max_angle, config.max_angle);
    let thrust = input.throttle.clamp(0.0, 1.0) * config.thrust_gain;
    let (sin, cos) = libm::sincos(phi.to_radians());
    let mut vx = state.vx + thrust * sin * dt;
    let mut vy = state.vy + (thrust * cos - config.gravity) * dt;
    cap_speed(&mut vx, &mut vy, config.max_speed);

    let mut x = state.x + vx * dt;
    let mut y = state.y + vy * dt;
    if x + config.drone_width >= config.window_width {
        x = config.x_max();
    }
    if y + config.drone_height >= config.window_height {
        y = config.y_max();
    }
    x = x.max(0.0);
    y = y.max(0.0);

    SimState {
        x,
        y,
        vx,
        vy,
        phi,
        tick: state.tick + 1,
    }
}

fn cap_speed(vx: &mut f64, vy: &mut f64, max_speed: f64) {
    let speed = libm::hypot(*vx, *vy);
    if speed <= max_speed {
        return;
    }
    let scale = max_speed / speed;
    *vx *= scale;
    *vy *= scale;
    // Rounding can leave the magnitude a few ulps above the cap.
    while libm::hypot(*vx, *vy) > max_speed {
        *vx *= 1.0 - f64::EPSILON;
        *vy *= 1.0 - f64::EPSILON;
    }
}

/// Edge the drone is touching, if any. Checked left, right, bottom, top.
///
/// The right and top tests compare the far edge against the window size,
/// matching how `x_right < W` and `y_top < H` are evaluated, so a state
/// without contact always has strictly positive avoidance margins.
pub fn contact(state: &SimState, config: &SimConfig) -> Option<Edge> {
    if state.x <= 0.0 {
        Some(Edge::Left)
    } else if state.x + config.drone_width >= config.window_width {
        Some(Edge::Right)
    } else if state.y <= 0.0 {
        Some(Edge::Bottom)
    } else if state.y + config.drone_height >= config.window_height {
        Some(Edge::Top)
    } else {
        None
    }
}
