use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tables;
use super::{
    camera_class, names, CameraConfusionMatrix, ModelError, WetnessBinning, AIR_TEMPERATURES, CAMERA_CLASSES,
    COBBLESTONE, FRICTION_STATES, OBSERVER_STATES, PAVEMENTS, PAVEMENT_TEMPERATURES, PRECIPITATION_STATES,
    RCS_LEVELS, WEATHERS,
};
use crate::bn::io::{CptDoc, LoadError, NetworkDocument, Units, VariableDoc};
use crate::bn::{build_network, CptDef, Network, Scale};

/// Rows whose mass differs from one by more than this are reported.
pub const RENORMALIZATION_WARN_TOLERANCE: f64 = 1e-6;

/// The default model: published CPTs in percent plus the stand-in camera matrix.
pub const BUNDLED_MODEL_JSON: &str = include_str!("../../data/road_model.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowPolicy {
    /// Scale the row by 1/sum.
    #[default]
    Renormalize,
    /// Leave the row untouched; network validation decides.
    Keep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowOutcome {
    pub probabilities: Vec<f64>,
    /// Mass of the row before any rescaling.
    pub sum: f64,
}

impl RowOutcome {
    pub fn is_deficient(&self) -> bool {
        (self.sum - 1.0).abs() > RENORMALIZATION_WARN_TOLERANCE
    }
}

/// Rescales a CPT row to unit mass.
pub fn renormalize_cpt_row(row: &[f64], policy: RowPolicy) -> Result<RowOutcome, ModelError> {
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(ModelError::InvalidRowEntry);
    }
    let sum: f64 = row.iter().sum();
    if sum <= 0.0 {
        return Err(ModelError::AllZeroRow { cpt: String::new(), row: String::new() });
    }
    let probabilities = match policy {
        RowPolicy::Renormalize if sum != 1.0 => row.iter().map(|p| p / sum).collect(),
        _ => row.to_vec(),
    };
    Ok(RowOutcome { probabilities, sum })
}

/// A CPT row whose published mass was not one.
#[derive(Debug, Clone, PartialEq)]
pub struct RenormalizationWarning {
    pub cpt: String,
    /// Parent assignment, e.g. `S_T=S_T1`, or `prior` for roots.
    pub row: String,
    pub sum: f64,
    pub rescaled: bool,
}

impl fmt::Display for RenormalizationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CPT `{}` row [{}] sums to {:.6}", self.cpt, self.row, self.sum)?;
        if self.rescaled {
            write!(f, "; rescaled to 1")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WetnessThresholds {
    pub low: u16,
    pub high: u16,
}

fn default_true() -> bool {
    true
}

/// On-disk model: a network document plus road-specific configuration.
///
/// When the network declares `S_C` over `R` and `W` without giving its CPT,
/// the table is generated from `camera_confusion_matrix` (or the stand-in).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(flatten)]
    pub network: NetworkDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera_confusion_matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wetness_thresholds: Option<WetnessThresholds>,
    #[serde(default = "default_true")]
    pub renormalize: bool,
}

/// A loaded model ready for inference.
#[derive(Debug, Clone)]
pub struct RoadModel {
    pub network: Network,
    pub warnings: Vec<RenormalizationWarning>,
    pub wetness: WetnessBinning,
    pub camera: Option<CameraConfusionMatrix>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Load(LoadError::Parse(e)))
    }

    pub fn read(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    /// The published tables, in percent, with the given camera matrix.
    pub fn reference(camera: &CameraConfusionMatrix) -> Self {
        let uniform = |n: usize| vec![vec![100.0 / n as f64; n]];
        let rcs_rows: Vec<Vec<f64>> = (0..3)
            .flat_map(|r| {
                (0..3).map(move |w| {
                    let table = if r == COBBLESTONE { &tables::RCS_COBBLESTONE } else { &tables::RCS_PAVED };
                    table[w].to_vec()
                })
            })
            .collect();
        let cpt = |child: &str, parents: &[&str], rows: Vec<Vec<f64>>| CptDoc {
            child: child.to_string(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            rows,
        };
        let cpts = vec![
            cpt(names::PAVEMENT, &[], uniform(3)),
            cpt(
                names::PAVEMENT_TEMPERATURE,
                &[names::AIR_TEMPERATURE],
                to_rows(&tables::PAVEMENT_TEMPERATURE),
            ),
            cpt(names::PRECIPITATION, &[], uniform(2)),
            cpt(
                names::WEATHER,
                &[names::PRECIPITATION, names::PAVEMENT_TEMPERATURE],
                to_rows(&tables::ROAD_WEATHER),
            ),
            cpt(
                names::FRICTION,
                &[names::PAVEMENT, names::WEATHER],
                to_rows(&tables::MAX_FRICTION),
            ),
            cpt(names::AIR_TEMPERATURE, &[], uniform(4)),
            cpt(names::RCS1, &[names::PAVEMENT, names::WEATHER], rcs_rows.clone()),
            cpt(names::RCS2, &[names::PAVEMENT, names::WEATHER], rcs_rows),
            cpt(
                names::OBSERVER,
                &[names::FRICTION],
                to_rows(&tables::FRICTION_OBSERVER),
            ),
        ];
        ModelFile {
            network: NetworkDocument { units: Units::Percent, variables: road_variables(), cpts },
            camera_confusion_matrix: Some(camera.rows().iter().map(|r| r.to_vec()).collect()),
            wetness_thresholds: Some(WetnessThresholds { low: 1000, high: 10000 }),
            renormalize: true,
        }
    }

    /// Converts units, renormalizes rows (when enabled), synthesizes the
    /// camera CPT if needed and validates the result.
    pub fn build(&self) -> Result<RoadModel, ModelError> {
        let variables = self.network.variables()?;
        let policy = if self.renormalize { RowPolicy::Renormalize } else { RowPolicy::Keep };
        let mut warnings = Vec::new();
        let mut defs = Vec::with_capacity(self.network.cpts.len() + 1);
        for def in self.network.cpt_definitions() {
            let mut rows = Vec::with_capacity(def.rows.len());
            for (i, row) in def.rows.iter().enumerate() {
                let label = || row_label(&self.network.variables, &def.parents, i);
                let outcome = renormalize_cpt_row(row, policy).map_err(|e| match e {
                    ModelError::AllZeroRow { .. } => ModelError::AllZeroRow { cpt: def.child.clone(), row: label() },
                    other => other,
                })?;
                if outcome.is_deficient() {
                    warnings.push(RenormalizationWarning {
                        cpt: def.child.clone(),
                        row: label(),
                        sum: outcome.sum,
                        rescaled: policy == RowPolicy::Renormalize,
                    });
                }
                rows.push(outcome.probabilities);
            }
            defs.push(CptDef { rows, ..def });
        }

        let camera = match &self.camera_confusion_matrix {
            Some(rows) => Some(CameraConfusionMatrix::from_rows(rows)?),
            None => None,
        };
        let declares = |name: &str| self.network.variables.iter().any(|v| v.name == name);
        let camera_needed = declares(names::CAMERA)
            && declares(names::PAVEMENT)
            && declares(names::WEATHER)
            && !defs.iter().any(|d| d.child == names::CAMERA);
        let camera = if camera_needed {
            let matrix = camera.unwrap_or_default();
            defs.push(camera_cpt(&matrix));
            Some(matrix)
        } else {
            camera
        };

        let wetness = match self.wetness_thresholds {
            Some(t) => WetnessBinning::new(t.low, t.high)?,
            None => WetnessBinning::default(),
        };
        let network = build_network(variables, defs)?;
        Ok(RoadModel { network, warnings, wetness, camera })
    }
}

impl RoadModel {
    pub fn load(path: &Path) -> Result<Self, ModelError> {
        ModelFile::read(path)?.build()
    }

    /// The model shipped with the crate.
    pub fn bundled() -> Self {
        ModelFile::from_json(BUNDLED_MODEL_JSON)
            .and_then(|f| f.build())
            .expect("bundled model is valid")
    }

    /// Checks that the network has the road-condition variables with the
    /// expected state counts.
    pub fn ensure_road_network(&self) -> Result<(), ModelError> {
        for v in road_variables() {
            let found = self
                .network
                .variable_by_name(&v.name)
                .map_err(|_| ModelError::NotRoadNetwork(format!("missing variable `{}`", v.name)))?;
            if found.cardinality() != v.states.len() {
                return Err(ModelError::NotRoadNetwork(format!(
                    "`{}` has {} states, expected {}",
                    v.name,
                    found.cardinality(),
                    v.states.len()
                )));
            }
        }
        Ok(())
    }
}

/// Builds the road network from the compiled-in tables. Deficient rows are
/// rescaled.
pub fn build_roadnet(camera: &CameraConfusionMatrix) -> Result<Network, ModelError> {
    Ok(build_roadnet_with_warnings(camera)?.0)
}

pub fn build_roadnet_with_warnings(
    camera: &CameraConfusionMatrix,
) -> Result<(Network, Vec<RenormalizationWarning>), ModelError> {
    let model = ModelFile::reference(camera).build()?;
    Ok((model.network, model.warnings))
}

fn to_rows<const N: usize>(table: &[[f64; N]]) -> Vec<Vec<f64>> {
    table.iter().map(|r| r.to_vec()).collect()
}

fn road_variables() -> Vec<VariableDoc> {
    let var = |name: &str, states: &[&str], scale: Scale| VariableDoc {
        name: name.to_string(),
        states: states.iter().map(|s| s.to_string()).collect(),
        scale,
    };
    vec![
        var(names::PAVEMENT, &PAVEMENTS, Scale::Nominal),
        var(names::PAVEMENT_TEMPERATURE, &PAVEMENT_TEMPERATURES, Scale::Ordinal),
        var(names::PRECIPITATION, &PRECIPITATION_STATES, Scale::Nominal),
        var(names::WEATHER, &WEATHERS, Scale::Nominal),
        var(names::FRICTION, &FRICTION_STATES, Scale::Ordinal),
        var(names::CAMERA, &CAMERA_CLASSES, Scale::Nominal),
        var(names::AIR_TEMPERATURE, &AIR_TEMPERATURES, Scale::Ordinal),
        var(names::RCS1, &RCS_LEVELS, Scale::Ordinal),
        var(names::RCS2, &RCS_LEVELS, Scale::Ordinal),
        var(names::OBSERVER, &OBSERVER_STATES, Scale::Ordinal),
    ]
}

/// Camera CPT over (R, W): the confusion row of the combined label.
fn camera_cpt(matrix: &CameraConfusionMatrix) -> CptDef {
    let rows = (0..PAVEMENTS.len())
        .flat_map(|r| (0..WEATHERS.len()).map(move |w| matrix.row(camera_class(r, w)).to_vec()))
        .collect();
    CptDef::new(names::CAMERA, &[names::PAVEMENT, names::WEATHER], rows)
}

fn row_label(variables: &[VariableDoc], parents: &[String], mut row: usize) -> String {
    if parents.is_empty() {
        return "prior".to_string();
    }
    let docs: Vec<Option<&VariableDoc>> =
        parents.iter().map(|p| variables.iter().find(|v| &v.name == p)).collect();
    let mut parts = vec![String::new(); parents.len()];
    for (k, doc) in docs.iter().enumerate().rev() {
        let Some(doc) = doc else {
            return format!("row {row}");
        };
        let card = doc.states.len();
        parts[k] = format!("{}={}", doc.name, doc.states[row % card]);
        row /= card;
    }
    parts.join(", ")
}
