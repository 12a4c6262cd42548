//! Mapping physical readings onto the discrete states of the network.
//!
//! All functions return zero-based state indices.

use serde::{Deserialize, Serialize};

use super::ModelError;

/// Upper edges of the temperature bands, in °C, warmest first. A reading
/// equal to an edge falls into the colder band.
pub const TEMPERATURE_EDGES: [f64; 3] = [5.0, 0.0, -21.0];

pub const FRICTION_CLASS_WIDTH: f64 = 0.15;
pub const FRICTION_CLASSES: usize = 8;

/// Temperature band: 0 for t > 5 °C, 1 for (0, 5], 2 for (-21, 0], 3 for t ≤ -21.
pub fn discretize_temperature(celsius: f64) -> Result<usize, ModelError> {
    if !celsius.is_finite() {
        return Err(ModelError::NonFiniteInput(celsius));
    }
    Ok(TEMPERATURE_EDGES.iter().filter(|&&edge| celsius <= edge).count())
}

/// Friction class of width 0.15 over [0, 1.2]; anything above clamps to the
/// top class and exact multiples of the width start the upper class.
pub fn discretize_friction(mu: f64) -> Result<usize, ModelError> {
    if mu.is_nan() || mu.is_infinite() {
        return Err(ModelError::NonFiniteInput(mu));
    }
    if mu < 0.0 {
        return Err(ModelError::NegativeFriction(mu));
    }
    Ok((1..FRICTION_CLASSES).filter(|&k| mu >= k as f64 * FRICTION_CLASS_WIDTH).count())
}

/// Centre of a friction class.
pub fn friction_class_midpoint(class: usize) -> f64 {
    (class as f64 + 0.5) * FRICTION_CLASS_WIDTH
}

/// Thresholds on the raw 16-bit wetness level of the road condition sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WetnessBinning {
    low: u16,
    high: u16,
}

impl Default for WetnessBinning {
    fn default() -> Self {
        WetnessBinning { low: 1000, high: 10000 }
    }
}

impl WetnessBinning {
    pub fn new(low: u16, high: u16) -> Result<Self, ModelError> {
        if low >= high {
            return Err(ModelError::InvalidWetnessThresholds { low, high });
        }
        Ok(WetnessBinning { low, high })
    }

    pub fn low(&self) -> u16 {
        self.low
    }

    pub fn high(&self) -> u16 {
        self.high
    }

    /// Inclusive raw range covered by a class.
    pub fn class_range(&self, class: usize) -> (u16, u16) {
        match class {
            0 => (0, self.low),
            1 => (self.low + 1, self.high),
            _ => (self.high.saturating_add(1), u16::MAX),
        }
    }
}

/// Class 0 up to and including `low`, class 1 up to and including `high`,
/// class 2 above.
pub fn discretize_wetness(raw: i64, binning: &WetnessBinning) -> Result<usize, ModelError> {
    if !(0..=u16::MAX as i64).contains(&raw) {
        return Err(ModelError::OutOfRange(raw));
    }
    Ok(if raw <= binning.low as i64 {
        0
    } else if raw <= binning.high as i64 {
        1
    } else {
        2
    })
}
