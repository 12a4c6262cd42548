//! The ten-node road-condition network.
//!
//! ```text
//!   S_T ─► T ─┐
//!             ├─► W ──┬──────────────┬─► S_C, S_RCS1, S_RCS2
//!        P ───┘       │              │
//!                     └─► mu_max ◄── R
//!                           │
//!                           ▼
//!                          S_FO
//! ```
//!
//! Pavement `R`, precipitation `P` and air temperature `S_T` are uniform
//! roots. The camera, both road condition sensors and `mu_max` depend on
//! `(R, W)`; the friction observer `S_FO` hangs off `mu_max`.

mod camera;
mod discretize;
mod model;
pub mod tables;

pub use camera::CameraConfusionMatrix;
pub use discretize::{
    discretize_friction, discretize_temperature, discretize_wetness, friction_class_midpoint, WetnessBinning,
    FRICTION_CLASSES, FRICTION_CLASS_WIDTH, TEMPERATURE_EDGES,
};
pub use model::{
    build_roadnet, build_roadnet_with_warnings, renormalize_cpt_row, ModelFile, RenormalizationWarning, RoadModel,
    RowOutcome, RowPolicy, WetnessThresholds, BUNDLED_MODEL_JSON, RENORMALIZATION_WARN_TOLERANCE,
};

use thiserror::Error;

use crate::bn::io::LoadError;
use crate::bn::BnError;

/// Variable names.
pub mod names {
    pub const PAVEMENT: &str = "R";
    pub const PAVEMENT_TEMPERATURE: &str = "T";
    pub const PRECIPITATION: &str = "P";
    pub const WEATHER: &str = "W";
    pub const FRICTION: &str = "mu_max";
    pub const CAMERA: &str = "S_C";
    pub const AIR_TEMPERATURE: &str = "S_T";
    pub const RCS1: &str = "S_RCS1";
    pub const RCS2: &str = "S_RCS2";
    pub const OBSERVER: &str = "S_FO";

    /// Sensor nodes, in the bit order used for subset masks.
    pub const SENSORS: [&str; 5] = [CAMERA, AIR_TEMPERATURE, RCS1, RCS2, OBSERVER];
    /// Road-condition variables that are estimated.
    pub const TARGETS: [&str; 3] = [PAVEMENT, WEATHER, FRICTION];
}

pub const PAVEMENTS: [&str; 3] = ["Asphalt", "Concrete", "Cobblestone"];
pub const WEATHERS: [&str; 3] = ["Dry", "Wet", "Snow"];
pub const PRECIPITATION_STATES: [&str; 2] = ["true", "false"];
pub const PAVEMENT_TEMPERATURES: [&str; 4] = ["T1", "T2", "T3", "T4"];
pub const AIR_TEMPERATURES: [&str; 4] = ["S_T1", "S_T2", "S_T3", "S_T4"];
pub const FRICTION_STATES: [&str; 8] = ["mu1", "mu2", "mu3", "mu4", "mu5", "mu6", "mu7", "mu8"];
pub const OBSERVER_STATES: [&str; 8] = ["FO1", "FO2", "FO3", "FO4", "FO5", "FO6", "FO7", "FO8"];
pub const RCS_LEVELS: [&str; 3] = ["L1", "L2", "L3"];
/// Camera labels: pavement/weather combinations, then snow.
pub const CAMERA_CLASSES: [&str; 7] = ["AD", "AW", "CD", "CW", "CbD", "CbW", "S"];

pub const ASPHALT: usize = 0;
pub const CONCRETE: usize = 1;
pub const COBBLESTONE: usize = 2;
pub const DRY: usize = 0;
pub const WET: usize = 1;
pub const SNOW: usize = 2;
pub const SNOW_CLASS: usize = 6;

/// Camera label for a pavement/weather pair. Snow hides the pavement.
pub fn camera_class(pavement: usize, weather: usize) -> usize {
    if weather == SNOW {
        SNOW_CLASS
    } else {
        pavement * 2 + weather
    }
}

/// Pavement and weather encoded by a camera label; `None` pavement for snow.
pub fn camera_class_parts(class: usize) -> (Option<usize>, usize) {
    if class == SNOW_CLASS {
        (None, SNOW)
    } else {
        (Some(class / 2), class % 2)
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Network(#[from] BnError),
    #[error("CPT `{cpt}` row [{row}] is all zeros")]
    AllZeroRow { cpt: String, row: String },
    #[error("row contains a negative or non-finite entry")]
    InvalidRowEntry,
    #[error("invalid camera confusion matrix: {0}")]
    InvalidCameraMatrix(String),
    #[error("wetness thresholds must satisfy low < high (got {low}, {high})")]
    InvalidWetnessThresholds { low: u16, high: u16 },
    #[error("non-finite input {0}")]
    NonFiniteInput(f64),
    #[error("negative friction coefficient {0}")]
    NegativeFriction(f64),
    #[error("raw wetness {0} outside 0..=65535")]
    OutOfRange(i64),
    #[error("not a road-condition network: {0}")]
    NotRoadNetwork(String),
}
