//! Synthetic drives sampled from the network.
//!
//! Each time step clamps pavement, precipitation and air temperature from
//! the active scenario segment and samples everything else from the CPTs.
//! Sampled sensor classes are then rendered back into raw readings that
//! discretize to the same class, so a simulated log replays exactly like a
//! recorded one. Steps are independent given the segment; there is no
//! temporal model.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bn::{Assignment, BnError, Evidence, Network};
use crate::replay::{camera_delay, GroundTruthRecord, ObserverForces, SensorLogRecord, DEFAULT_CAMERA_DISTANCE};
use crate::roadnet::{
    discretize_temperature, friction_class_midpoint, names, ModelError, WetnessBinning, CAMERA_CLASSES, PAVEMENTS,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cannot clamp {0}")]
    InvalidClamp(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid simulation setting: {0}")]
    InvalidConfig(String),
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Network(#[from] BnError),
}

/// Draws complete assignments in topological order.
pub struct AncestralSampler<'a> {
    network: &'a Network,
    /// Cumulative CPT rows, flattened like the CPTs themselves.
    cumulative: Vec<Vec<f64>>,
}

impl<'a> AncestralSampler<'a> {
    pub fn new(network: &'a Network) -> Self {
        let cumulative = network
            .cpts()
            .iter()
            .map(|cpt| {
                let mut out = Vec::with_capacity(cpt.row_count() * cpt.child_cardinality());
                for row in cpt.rows() {
                    let mut acc = 0.0;
                    out.extend(row.iter().map(|p| {
                        acc += p;
                        acc
                    }));
                }
                out
            })
            .collect();
        AncestralSampler { network, cumulative }
    }

    /// Fills `states` with one sample. Variables with a `fixed` state are
    /// set to it regardless of their parents.
    pub fn sample_into<R: Rng>(&self, rng: &mut R, fixed: &[Option<usize>], states: &mut [usize]) {
        for &var in self.network.topological_order() {
            if let Some(s) = fixed[var] {
                states[var] = s;
                continue;
            }
            let cpt = self.network.cpt(var);
            let k = cpt.child_cardinality();
            let row = cpt.row_index_in(states);
            let cum = &self.cumulative[var][row * k..(row + 1) * k];
            let probs = cpt.row(row);
            let u: f64 = rng.gen::<f64>() * cum[k - 1];
            // never land on a zero-probability state, even at the top edge
            states[var] = (0..k)
                .find(|&i| u < cum[i] && probs[i] > 0.0)
                .unwrap_or_else(|| (0..k).rev().find(|&i| probs[i] > 0.0).unwrap_or(k - 1));
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R, fixed: &[Option<usize>]) -> Assignment {
        let mut states = vec![0; self.network.len()];
        self.sample_into(rng, fixed, &mut states);
        Assignment::new(states)
    }
}

fn resolve_clamp(network: &Network, clamped: &Evidence) -> Result<Vec<Option<usize>>, SimError> {
    clamped.resolve(network).map_err(|e| SimError::InvalidClamp(e.to_string()))
}

/// One assignment with the clamped variables held fixed. Clamping is an
/// intervention: a clamped child ignores its parents.
pub fn ancestral_sample(network: &Network, clamped: &Evidence, seed: u64) -> Result<Assignment, SimError> {
    let fixed = resolve_clamp(network, clamped)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(AncestralSampler::new(network).sample(&mut rng, &fixed))
}

/// `count` assignments from one seeded stream.
pub fn ancestral_samples(
    network: &Network,
    clamped: &Evidence,
    count: usize,
    seed: u64,
) -> Result<Vec<Assignment>, SimError> {
    let fixed = resolve_clamp(network, clamped)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = AncestralSampler::new(network);
    Ok((0..count).map(|_| sampler.sample(&mut rng, &fixed)).collect())
}

/// A stretch of road with constant conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    /// Seconds.
    pub duration: f64,
    /// Pavement state label, e.g. `Asphalt`.
    pub pavement: String,
    pub precipitation: bool,
    /// Degrees Celsius.
    pub air_temperature: f64,
    /// Metres per second.
    pub speed: f64,
    /// Camera label forced on every frame that looks at this segment, to
    /// emulate a classifier that fails on this surface.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub camera_fault: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub segments: Vec<Segment>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn read(path: &Path) -> Result<Self, SimError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| SimError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios always serialize")
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.segments.is_empty() {
            return Err(SimError::InvalidScenario("no segments".into()));
        }
        for (i, s) in self.segments.iter().enumerate() {
            let fail = |msg: String| Err(SimError::InvalidScenario(format!("segment {}: {msg}", i + 1)));
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return fail(format!("duration must be positive, got {}", s.duration));
            }
            if !(s.speed >= 0.0 && s.speed.is_finite()) {
                return fail(format!("speed must be nonnegative, got {}", s.speed));
            }
            if !s.air_temperature.is_finite() {
                return fail("air temperature must be finite".into());
            }
            if !PAVEMENTS.contains(&s.pavement.as_str()) {
                return fail(format!("unknown pavement `{}`", s.pavement));
            }
            if let Some(c) = &s.camera_fault {
                if !CAMERA_CLASSES.contains(&c.as_str()) {
                    return fail(format!("unknown camera label `{c}`"));
                }
            }
        }
        Ok(())
    }

    /// Number of records at `rate` Hz: each segment contributes
    /// `round(duration * rate)` steps.
    pub fn step_count(&self, rate: f64) -> usize {
        self.segments.iter().map(|s| (s.duration * rate).round() as usize).sum()
    }
}

/// How sampled sensor classes become raw readings.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub wetness: WetnessBinning,
    pub camera_distance: f64,
    /// Score of the predicted class; the rest is shared evenly.
    pub camera_confidence: f64,
    /// Probability that a step has enough tire excitation for the friction
    /// observer to pass its gate.
    pub excitation_rate: f64,
    /// Wheel load, N.
    pub wheel_load: f64,
    /// Sensitivity written for an excited tire.
    pub excited_sensitivity: f64,
    /// Sensitivity written for every tire otherwise.
    pub idle_sensitivity: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            wetness: WetnessBinning::default(),
            camera_distance: DEFAULT_CAMERA_DISTANCE,
            camera_confidence: 0.82,
            excitation_rate: 0.5,
            wheel_load: 4000.0,
            excited_sensitivity: 0.5,
            idle_sensitivity: 0.01,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidConfig(m.into()));
        if !(self.camera_confidence > 1.0 / 7.0 && self.camera_confidence <= 1.0) {
            return bad("camera confidence must lie in (1/7, 1]");
        }
        if !(0.0..=1.0).contains(&self.excitation_rate) {
            return bad("excitation rate must lie in [0, 1]");
        }
        if !(self.wheel_load > 0.0) {
            return bad("wheel load must be positive");
        }
        if !(self.camera_distance > 0.0) {
            return bad("camera distance must be positive");
        }
        Ok(())
    }

    /// Scores with `class` on top. The others are rounded to six decimals
    /// and the top takes up the remainder, so a six-decimal log still sums
    /// to one.
    pub fn camera_scores(&self, class: usize) -> [f64; 7] {
        let rest = ((1.0 - self.camera_confidence) / 6.0 * 1e6).round() / 1e6;
        let mut s = [rest; 7];
        s[class] = 1.0 - 6.0 * rest;
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDrive {
    pub records: Vec<SensorLogRecord>,
    pub truth: Vec<GroundTruthRecord>,
}

/// Samples a drive at `rate` Hz. Record `i` has timestamp `i / rate`.
///
/// The camera frame stored with record `i` shows the road reached after the
/// camera delay, i.e. the sampled camera class of the first step at or
/// after `t_i + s / v` (the last step near the end of the drive; the same
/// step when standing still).
pub fn generate_drive(
    network: &Network,
    scenario: &Scenario,
    rate: f64,
    seed: u64,
    config: &SimConfig,
) -> Result<SimulatedDrive, SimError> {
    scenario.validate()?;
    config.validate()?;
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(SimError::InvalidConfig(format!("sample rate must be positive, got {rate}")));
    }
    let id = |name: &str| network.var_id(name);
    let (r_id, p_id, st_id) = (id(names::PAVEMENT)?, id(names::PRECIPITATION)?, id(names::AIR_TEMPERATURE)?);
    let (w_id, mu_id, c_id) = (id(names::WEATHER)?, id(names::FRICTION)?, id(names::CAMERA)?);
    let (rcs1_id, rcs2_id, fo_id) = (id(names::RCS1)?, id(names::RCS2)?, id(names::OBSERVER)?);
    let precip_true = network.state_index(names::PRECIPITATION, "true")?;
    let precip_false = network.state_index(names::PRECIPITATION, "false")?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = AncestralSampler::new(network);

    // one (segment, assignment) per step
    let mut steps: Vec<(usize, Vec<usize>)> = Vec::with_capacity(scenario.step_count(rate));
    for (k, seg) in scenario.segments.iter().enumerate() {
        let mut fixed = vec![None; network.len()];
        fixed[r_id] = Some(network.state_index(names::PAVEMENT, &seg.pavement)?);
        fixed[p_id] = Some(if seg.precipitation { precip_true } else { precip_false });
        fixed[st_id] = Some(discretize_temperature(seg.air_temperature)?);
        for _ in 0..(seg.duration * rate).round() as usize {
            let mut states = vec![0; network.len()];
            sampler.sample_into(&mut rng, &fixed, &mut states);
            steps.push((k, states));
        }
    }

    let n = steps.len();
    let mut records = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    for (i, (k, states)) in steps.iter().enumerate() {
        let seg = &scenario.segments[*k];
        let t = i as f64 / rate;
        let ahead = match camera_delay(config.camera_distance, seg.speed) {
            Ok(d) => (d * rate - 1e-9).ceil() as usize,
            Err(_) => 0,
        };
        let j = (i + ahead).min(n - 1);
        let (seen_segment, seen) = &steps[j];
        let class = match &scenario.segments[*seen_segment].camera_fault {
            Some(label) => CAMERA_CLASSES.iter().position(|c| c == label).expect("validated label"),
            None => seen[c_id],
        };

        let mut rec = SensorLogRecord::new(t, seg.speed);
        rec.air_temp = Some(seg.air_temperature);
        rec.camera_scores = Some(config.camera_scores(class));
        for (slot, var) in [(&mut rec.rcs1, rcs1_id), (&mut rec.rcs2, rcs2_id)] {
            let (lo, hi) = config.wetness.class_range(states[var]);
            *slot = Some(rng.gen_range(lo..=hi));
        }
        rec.observer_mu = Some(friction_class_midpoint(states[fo_id]));
        let excited = rng.gen_bool(config.excitation_rate);
        let fz = config.wheel_load;
        let idle = config.idle_sensitivity * fz;
        let mut forces = ObserverForces { dfx: [idle; 4], dfy: [idle; 4], fz: [fz; 4] };
        if excited {
            forces.dfx[0] = config.excited_sensitivity * fz;
        }
        rec.forces = Some(forces);
        records.push(rec);
        truth.push(GroundTruthRecord { t, pavement: states[r_id], weather: states[w_id], mu_class: states[mu_id] });
    }
    Ok(SimulatedDrive { records, truth })
}
