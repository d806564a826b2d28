use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Geometry, thresholds and dynamics constants.
///
/// Positions are window units with the origin at the bottom-left corner.
/// The limits `max_speed` and `max_angle` bound the reachable state, which
/// in turn bounds every robustness component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub window_width: f64,
    pub window_height: f64,
    pub pad_x_min: f64,
    pub pad_x_max: f64,
    pub speed_limit: f64,
    pub angle_limit: f64,
    pub trial_cap: f64,
    pub dt: f64,
    pub drone_width: f64,
    pub drone_height: f64,
    pub gravity: f64,
    pub thrust_gain: f64,
    /// Degrees per second while an attitude key is held.
    pub rotation_rate: f64,
    pub max_speed: f64,
    pub max_angle: f64,
    pub start_x: f64,
    pub start_y: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            window_width: 1250.0,
            window_height: 600.0,
            pad_x_min: 650.0,
            pad_x_max: 850.0,
            speed_limit: 15.0,
            angle_limit: 5.0,
            trial_cap: 120.0,
            dt: 0.02,
            drone_width: 40.0,
            drone_height: 25.0,
            gravity: 20.0,
            thrust_gain: 40.0,
            rotation_rate: 60.0,
            max_speed: 32.0,
            max_angle: 29.0,
            start_x: 200.0,
            start_y: 450.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{0} must be positive and finite")]
    NotPositive(&'static str),
    #[error("landing pad [{0}, {1}] does not fit inside the window")]
    PadOutsideWindow(f64, f64),
    #[error("time step must be 1/50 s, got {0}")]
    WrongStep(f64),
    #[error("start position ({0}, {1}) is not strictly inside the window")]
    StartOutsideWindow(f64, f64),
    #[error("{limit} limit {value} exceeds its cap {cap}")]
    LimitAboveCap {
        limit: &'static str,
        value: f64,
        cap: f64,
    },
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("window_width", self.window_width),
            ("window_height", self.window_height),
            ("pad_x_min", self.pad_x_min),
            ("pad_x_max", self.pad_x_max),
            ("speed_limit", self.speed_limit),
            ("angle_limit", self.angle_limit),
            ("trial_cap", self.trial_cap),
            ("dt", self.dt),
            ("drone_width", self.drone_width),
            ("drone_height", self.drone_height),
            ("gravity", self.gravity),
            ("thrust_gain", self.thrust_gain),
            ("rotation_rate", self.rotation_rate),
            ("max_speed", self.max_speed),
            ("max_angle", self.max_angle),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::NotPositive(name));
            }
        }
        if libm::fabs(self.dt - 1.0 / 50.0) > 1e-12 {
            return Err(ConfigError::WrongStep(self.dt));
        }
        if !(self.pad_x_min + self.drone_width <= self.pad_x_max
            && self.pad_x_max <= self.window_width)
        {
            return Err(ConfigError::PadOutsideWindow(
                self.pad_x_min,
                self.pad_x_max,
            ));
        }
        let inside = self.start_x > 0.0
            && self.start_x + self.drone_width < self.window_width
            && self.start_y > 0.0
            && self.start_y + self.drone_height < self.window_height;
        if !inside {
            return Err(ConfigError::StartOutsideWindow(self.start_x, self.start_y));
        }
        if self.speed_limit > self.max_speed {
            return Err(ConfigError::LimitAboveCap {
                limit: "speed",
                value: self.speed_limit,
                cap: self.max_speed,
            });
        }
        if self.angle_limit > self.max_angle {
            return Err(ConfigError::LimitAboveCap {
                limit: "angle",
                value: self.angle_limit,
                cap: self.max_angle,
            });
        }
        Ok(())
    }

    /// Largest left-edge position that keeps the drone inside the window.
    pub fn x_max(&self) -> f64 {
        self.window_width - self.drone_width
    }

    /// Largest bottom-edge position that keeps the drone inside the window.
    pub fn y_max(&self) -> f64 {
        self.window_height - self.drone_height
    }

    /// Steps in a full-length trial (6000 at the defaults).
    pub fn max_steps(&self) -> usize {
        libm::round(self.trial_cap / self.dt) as usize
    }

    pub fn footprint(&self) -> crate::stl::Footprint {
        crate::stl::Footprint {
            width: self.drone_width,
            height: self.drone_height,
        }
    }

    /// Throttle that exactly cancels gravity when level.
    pub fn hover_throttle(&self) -> f64 {
        self.gravity / self.thrust_gain
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SimConfig::default().validate().unwrap();
        assert_eq!(SimConfig::default().max_steps(), 6000);
    }

    #[test]
    fn rejects_bad_values() {
        let c = SimConfig {
            dt: 0.01,
            ..SimConfig::default()
        };
        assert_eq!(c.validate(), Err(ConfigError::WrongStep(0.01)));
        let c = SimConfig {
            pad_x_max: 2000.0,
            ..SimConfig::default()
        };
        assert!(matches!(
            c.validate(),
            Err(ConfigError::PadOutsideWindow(..))
        ));
        let c = SimConfig {
            gravity: 0.0,
            ..SimConfig::default()
        };
        assert_eq!(c.validate(), Err(ConfigError::NotPositive("gravity")));
        let c = SimConfig {
            start_y: 590.0,
            ..SimConfig::default()
        };
        assert!(matches!(
            c.validate(),
            Err(ConfigError::StartOutsideWindow(..))
        ));
    }
}
