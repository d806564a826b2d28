use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::formula::Signal;

/// 50 Hz.
pub const DEFAULT_DT: f64 = 0.02;

const TIME_TOLERANCE: f64 = 1e-9;

/// One observation of the quadrotor.
///
/// `x` and `y` locate the lower-left corner of the drone in window units
/// with `y` growing upwards. `speed` is the velocity magnitude and `phi`
/// the rotation in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub speed: f64,
    pub phi: f64,
}

/// Size of the drone, used to derive the right and top edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    pub width: f64,
    pub height: f64,
}

impl Default for Footprint {
    fn default() -> Self {
        Self {
            width: 40.0,
            height: 25.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("trace is empty")]
    Empty,
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("sample {index} has t = {t}, expected {expected}")]
    NonUniform { index: usize, t: f64, expected: f64 },
    #[error("sample {index} has negative speed {speed}")]
    NegativeSpeed { index: usize, speed: f64 },
}

/// A uniformly sampled, non-empty sequence of [`Sample`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    samples: Vec<Sample>,
    dt: f64,
    footprint: Footprint,
}

impl Trace {
    pub fn new(samples: Vec<Sample>, dt: f64, footprint: Footprint) -> Result<Self, TraceError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(TraceError::BadStep(dt));
        }
        let first = samples.first().ok_or(TraceError::Empty)?.t;
        for (index, s) in samples.iter().enumerate() {
            let expected = first + index as f64 * dt;
            if libm::fabs(s.t - expected) > TIME_TOLERANCE * (1.0 + libm::fabs(expected)) {
                return Err(TraceError::NonUniform {
                    index,
                    t: s.t,
                    expected,
                });
            }
            if s.speed.is_nan() || s.speed < 0.0 {
                return Err(TraceError::NegativeSpeed {
                    index,
                    speed: s.speed,
                });
            }
        }
        Ok(Self {
            samples,
            dt,
            footprint,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn footprint(&self) -> Footprint {
        self.footprint
    }

    /// Value of `signal` at step `index`.
    ///
    /// # Panics
    ///
    /// If `index` is out of bounds.
    pub fn value(&self, signal: Signal, index: usize) -> f64 {
        let s = &self.samples[index];
        match signal {
            Signal::X => s.x,
            Signal::XRight => s.x + self.footprint.width,
            Signal::Y => s.y,
            Signal::YTop => s.y + self.footprint.height,
            Signal::Speed => s.speed,
            Signal::Phi => s.phi,
            Signal::AbsPhi => libm::fabs(s.phi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sample(t: f64) -> Sample {
        Sample {
            t,
            x: 1.0,
            y: 2.0,
            speed: 3.0,
            phi: -4.0,
        }
    }

    #[test]
    fn rejects_empty_and_irregular() {
        assert_eq!(
            Trace::new(vec![], 0.02, Footprint::default()),
            Err(TraceError::Empty)
        );
        let err =
            Trace::new(vec![sample(0.0), sample(0.05)], 0.02, Footprint::default()).unwrap_err();
        assert!(matches!(err, TraceError::NonUniform { index: 1, .. }));
    }

    #[test]
    fn rejects_negative_speed() {
        let mut s = sample(0.0);
        s.speed = -1.0;
        assert!(matches!(
            Trace::new(vec![s], 0.02, Footprint::default()),
            Err(TraceError::NegativeSpeed { index: 0, .. })
        ));
    }

    #[test]
    fn derived_edges() {
        let trace = Trace::new(vec![sample(0.0)], 0.02, Footprint::default()).unwrap();
        assert_eq!(trace.value(Signal::XRight, 0), 41.0);
        assert_eq!(trace.value(Signal::YTop, 0), 27.0);
        assert_eq!(trace.value(Signal::AbsPhi, 0), 4.0);
        assert_eq!(trace.value(Signal::Phi, 0), -4.0);
    }
}
