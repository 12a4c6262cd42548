//! Sensor-log replay: turns recorded (or simulated) sensor readings into
//! evidence, runs inference per record and scores the result.
//!
//! The camera looks `s` metres ahead, so a frame captured at `t` describes
//! the road under the vehicle at `t + s / v`. Each record uses the frame
//! with the latest such effective time not after the record's timestamp.
//! The friction observer only contributes evidence while at least one tire
//! is excited enough for its estimate to be meaningful.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::bn::{posterior_ve, BnError, Distribution, Evidence, Network, Scale};
use crate::metrics::{accuracy, camera_scores_to_marginals, hellinger, MetricError, NeumaierSum};
use crate::roadnet::{
    discretize_friction, discretize_temperature, discretize_wetness, names, ModelError, WetnessBinning, PAVEMENTS,
    WEATHERS,
};

/// Column names of a sensor log, in order.
pub const LOG_HEADER: [&str; 25] = [
    "t", "v", "T_air", "cam_s1", "cam_s2", "cam_s3", "cam_s4", "cam_s5", "cam_s6", "cam_s7", "rcs1", "rcs2", "mu_obs",
    "dFx1", "dFx2", "dFx3", "dFx4", "dFy1", "dFy2", "dFy3", "dFy4", "Fz1", "Fz2", "Fz3", "Fz4",
];

/// Column names of a ground-truth file.
pub const TRUTH_HEADER: [&str; 4] = ["t", "R", "W", "mu_class"];

/// Default look-ahead distance of the camera, in metres.
pub const DEFAULT_CAMERA_DISTANCE: f64 = 6.3;

/// Frames whose effective time is within this many seconds of a record
/// count as arrived, absorbing rounding in `t + s / v`.
const TIME_EPSILON: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("cannot access {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad header: {0}")]
    Header(String),
    #[error("line {line}, column `{column}`: {reason}")]
    Field { line: usize, column: String, reason: String },
    #[error("speed {0} m/s gives no camera delay")]
    ZeroOrNegativeSpeed(f64),
    #[error("camera distance must be positive, got {0}")]
    InvalidCameraDistance(f64),
    #[error("wheel load must be positive, got {0} N")]
    NonPositiveLoad(f64),
    #[error("observer threshold must be positive, got {0}")]
    InvalidThreshold(f64),
    #[error("timestamp decreases at record {index}")]
    TimeNotMonotonic { index: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Network(#[from] BnError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Tire-force sensitivities and wheel loads of the friction observer, per
/// tire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverForces {
    /// Longitudinal force change per unit friction, N.
    pub dfx: [f64; 4],
    /// Lateral force change per unit friction, N.
    pub dfy: [f64; 4],
    /// Vertical wheel load, N.
    pub fz: [f64; 4],
}

/// One row of a sensor log. Absent readings are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorLogRecord {
    pub t: f64,
    pub speed: f64,
    pub air_temp: Option<f64>,
    pub camera_scores: Option<[f64; 7]>,
    pub rcs1: Option<u16>,
    pub rcs2: Option<u16>,
    pub observer_mu: Option<f64>,
    pub forces: Option<ObserverForces>,
}

impl SensorLogRecord {
    /// A record with only time and speed.
    pub fn new(t: f64, speed: f64) -> Self {
        SensorLogRecord {
            t,
            speed,
            air_temp: None,
            camera_scores: None,
            rcs1: None,
            rcs2: None,
            observer_mu: None,
            forces: None,
        }
    }
}

fn field_error(line: usize, column: &str, reason: impl Into<String>) -> ReplayError {
    ReplayError::Field { line, column: column.to_string(), reason: reason.into() }
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<(), ReplayError> {
    for (i, want) in expected.iter().enumerate() {
        match found.get(i).map(str::trim) {
            Some(got) if got == *want => {}
            Some(got) => {
                return Err(ReplayError::Header(format!("expected column `{want}` at position {}, found `{got}`", i + 1)))
            }
            None => return Err(ReplayError::Header(format!("missing column `{want}`"))),
        }
    }
    if found.len() > expected.len() {
        return Err(ReplayError::Header(format!("unexpected extra column `{}`", &found[expected.len()])));
    }
    Ok(())
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes())
}

/// Parses a sensor log. Errors name the line and column.
pub fn parse_log(text: &str) -> Result<Vec<SensorLogRecord>, ReplayError> {
    let mut reader = csv_reader(text);
    let header = reader.headers().map_err(|e| ReplayError::Header(e.to_string()))?.clone();
    check_header(&header, &LOG_HEADER)?;
    let mut records = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let line = row + 2;
        let rec = result.map_err(|e| ReplayError::Header(e.to_string()))?;
        if rec.len() != LOG_HEADER.len() {
            return Err(field_error(line, LOG_HEADER[rec.len().min(LOG_HEADER.len() - 1)], "wrong number of fields"));
        }
        let opt = |i: usize| -> Result<Option<f64>, ReplayError> {
            let raw = rec[i].trim();
            if raw.is_empty() {
                return Ok(None);
            }
            let v: f64 = raw.parse().map_err(|_| field_error(line, LOG_HEADER[i], format!("`{raw}` is not a number")))?;
            if !v.is_finite() {
                return Err(field_error(line, LOG_HEADER[i], "not finite"));
            }
            Ok(Some(v))
        };
        let req = |i: usize| opt(i)?.ok_or_else(|| field_error(line, LOG_HEADER[i], "required value missing"));
        // groups of columns that are present or absent together
        let group = |range: std::ops::Range<usize>| -> Result<Option<Vec<f64>>, ReplayError> {
            let values = range.clone().map(opt).collect::<Result<Vec<_>, _>>()?;
            if values.iter().all(Option::is_none) {
                return Ok(None);
            }
            if let Some(i) = values.iter().position(Option::is_none) {
                return Err(field_error(line, LOG_HEADER[range.start + i], "missing while the rest of its group is set"));
            }
            Ok(Some(values.into_iter().flatten().collect()))
        };
        let rcs = |i: usize| -> Result<Option<u16>, ReplayError> {
            let raw = rec[i].trim();
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<u16>()
                .map(Some)
                .map_err(|_| field_error(line, LOG_HEADER[i], format!("`{raw}` is not an integer in 0..=65535")))
        };
        let speed = req(1)?;
        let camera_scores = group(3..10)?.map(|v| {
            let mut s = [0.0; 7];
            s.copy_from_slice(&v);
            s
        });
        let forces = group(13..25)?.map(|v| {
            let mut f = ObserverForces { dfx: [0.0; 4], dfy: [0.0; 4], fz: [0.0; 4] };
            f.dfx.copy_from_slice(&v[0..4]);
            f.dfy.copy_from_slice(&v[4..8]);
            f.fz.copy_from_slice(&v[8..12]);
            f
        });
        if let Some(f) = &forces {
            if let Some(i) = f.fz.iter().position(|&z| z <= 0.0) {
                return Err(field_error(line, LOG_HEADER[21 + i], "wheel load must be positive"));
            }
        }
        records.push(SensorLogRecord {
            t: req(0)?,
            speed,
            air_temp: opt(2)?,
            camera_scores,
            rcs1: rcs(10)?,
            rcs2: rcs(11)?,
            observer_mu: opt(12)?,
            forces,
        });
    }
    Ok(records)
}

fn read_text(path: &Path) -> Result<String, ReplayError> {
    std::fs::read_to_string(path).map_err(|source| ReplayError::Io { path: path.display().to_string(), source })
}

fn write_text(path: &Path, text: &str) -> Result<(), ReplayError> {
    std::fs::write(path, text).map_err(|source| ReplayError::Io { path: path.display().to_string(), source })
}

pub fn read_log(path: &Path) -> Result<Vec<SensorLogRecord>, ReplayError> {
    parse_log(&read_text(path)?)
}

/// Renders a log with six decimals for real values.
pub fn render_log(records: &[SensorLogRecord]) -> String {
    let mut out = LOG_HEADER.join(",");
    out.push('\n');
    let f6 = |v: f64| format!("{v:.6}");
    for r in records {
        let mut cols: Vec<String> = vec![f6(r.t), f6(r.speed), r.air_temp.map(f6).unwrap_or_default()];
        match r.camera_scores {
            Some(s) => cols.extend(s.iter().map(|&x| f6(x))),
            None => cols.extend(std::iter::repeat_n(String::new(), 7)),
        }
        cols.push(r.rcs1.map(|x| x.to_string()).unwrap_or_default());
        cols.push(r.rcs2.map(|x| x.to_string()).unwrap_or_default());
        cols.push(r.observer_mu.map(f6).unwrap_or_default());
        match r.forces {
            Some(f) => cols.extend(f.dfx.iter().chain(&f.dfy).chain(&f.fz).map(|&x| f6(x))),
            None => cols.extend(std::iter::repeat_n(String::new(), 12)),
        }
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

pub fn write_log(records: &[SensorLogRecord], path: &Path) -> Result<(), ReplayError> {
    write_text(path, &render_log(records))
}

/// True road state at one record. `mu_class` is 0-based here and 1-based
/// in files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthRecord {
    pub t: f64,
    pub pavement: usize,
    pub weather: usize,
    pub mu_class: usize,
}

pub fn parse_truth(text: &str) -> Result<Vec<GroundTruthRecord>, ReplayError> {
    let mut reader = csv_reader(text);
    let header = reader.headers().map_err(|e| ReplayError::Header(e.to_string()))?.clone();
    check_header(&header, &TRUTH_HEADER)?;
    let mut out = Vec::new();
    for (row, result) in reader.records().enumerate() {
        let line = row + 2;
        let rec = result.map_err(|e| ReplayError::Header(e.to_string()))?;
        let get = |i: usize| rec.get(i).map(str::trim).unwrap_or("");
        let label = |i: usize, labels: &[&str]| {
            labels
                .iter()
                .position(|l| *l == get(i))
                .ok_or_else(|| field_error(line, TRUTH_HEADER[i], format!("unknown state `{}`", get(i))))
        };
        let t = get(0).parse::<f64>().map_err(|_| field_error(line, "t", format!("`{}` is not a number", get(0))))?;
        let mu: usize = get(3)
            .parse()
            .ok()
            .filter(|k| (1..=8).contains(k))
            .ok_or_else(|| field_error(line, "mu_class", format!("`{}` is not a class in 1..=8", get(3))))?;
        out.push(GroundTruthRecord { t, pavement: label(1, &PAVEMENTS)?, weather: label(2, &WEATHERS)?, mu_class: mu - 1 });
    }
    Ok(out)
}

pub fn read_truth(path: &Path) -> Result<Vec<GroundTruthRecord>, ReplayError> {
    parse_truth(&read_text(path)?)
}

pub fn render_truth(truth: &[GroundTruthRecord]) -> String {
    let mut out = TRUTH_HEADER.join(",");
    out.push('\n');
    for g in truth {
        writeln!(out, "{:.6},{},{},{}", g.t, PAVEMENTS[g.pavement], WEATHERS[g.weather], g.mu_class + 1).unwrap();
    }
    out
}

pub fn write_truth(truth: &[GroundTruthRecord], path: &Path) -> Result<(), ReplayError> {
    write_text(path, &render_truth(truth))
}

/// Time for the road seen by the camera to reach the tires.
pub fn camera_delay(distance: f64, speed: f64) -> Result<f64, ReplayError> {
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(ReplayError::InvalidCameraDistance(distance));
    }
    if !(speed > 0.0) {
        return Err(ReplayError::ZeroOrNegativeSpeed(speed));
    }
    Ok(distance / speed)
}

/// Relative change of a tire force with friction: `dF/dmu / Fz`.
pub fn observer_sensitivity(df_dmu: f64, fz: f64) -> Result<f64, ReplayError> {
    if !(fz > 0.0) {
        return Err(ReplayError::NonPositiveLoad(fz));
    }
    Ok(df_dmu / fz)
}

/// Minimum sensitivity for the friction observer to count as evidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverGate {
    threshold: f64,
}

impl ObserverGate {
    pub fn new(threshold: f64) -> Result<Self, ReplayError> {
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(ReplayError::InvalidThreshold(threshold));
        }
        Ok(ObserverGate { threshold })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl Default for ObserverGate {
    fn default() -> Self {
        ObserverGate { threshold: 0.1 }
    }
}

/// The observer's friction class if any tire, in either direction, has a
/// sensitivity magnitude above the threshold; `None` otherwise.
pub fn gate_observer(record: &SensorLogRecord, gate: &ObserverGate) -> Result<Option<usize>, ReplayError> {
    let (Some(mu), Some(forces)) = (record.observer_mu, record.forces.as_ref()) else {
        return Ok(None);
    };
    let mut excited = false;
    for tire in 0..4 {
        for df in [forces.dfx[tire], forces.dfy[tire]] {
            excited |= observer_sensitivity(df, forces.fz[tire])?.abs() > gate.threshold;
        }
    }
    if excited {
        Ok(Some(discretize_friction(mu)?))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayConfig {
    pub camera_distance: f64,
    pub gate: ObserverGate,
    pub wetness: WetnessBinning,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        ReplayConfig {
            camera_distance: DEFAULT_CAMERA_DISTANCE,
            gate: ObserverGate::default(),
            wetness: WetnessBinning::default(),
        }
    }
}

/// Evidence for one record. `camera_class` is the delayed camera label,
/// if one has arrived.
pub fn assemble_evidence(
    record: &SensorLogRecord,
    config: &ReplayConfig,
    camera_class: Option<usize>,
) -> Result<Evidence, ReplayError> {
    let mut ev = Evidence::new();
    if let Some(c) = camera_class {
        ev.insert(names::CAMERA, c);
    }
    if let Some(t) = record.air_temp {
        ev.insert(names::AIR_TEMPERATURE, discretize_temperature(t)?);
    }
    if let Some(raw) = record.rcs1 {
        ev.insert(names::RCS1, discretize_wetness(raw as i64, &config.wetness)?);
    }
    if let Some(raw) = record.rcs2 {
        ev.insert(names::RCS2, discretize_wetness(raw as i64, &config.wetness)?);
    }
    if let Some(k) = gate_observer(record, &config.gate)? {
        ev.insert(names::OBSERVER, k);
    }
    Ok(ev)
}

/// Posteriors at one record.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorEntry {
    pub t: f64,
    pub pavement: Distribution,
    pub weather: Distribution,
    pub friction: Distribution,
    /// Which sensors contributed, in sensor-list order.
    pub flags: [bool; 5],
    /// Scores of the camera frame in effect, if any.
    pub camera_scores: Option<[f64; 7]>,
}

impl PosteriorEntry {
    /// Flags as a string of `0`/`1`, one character per sensor.
    pub fn flag_string(&self) -> String {
        self.flags.iter().map(|&f| if f { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PosteriorTimeSeries {
    pub entries: Vec<PosteriorEntry>,
}

impl PosteriorTimeSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Tracks camera frames until their effective time arrives.
#[derive(Default)]
struct CameraQueue {
    pending: Vec<(f64, usize)>,
    current: Option<(f64, usize)>,
}

impl CameraQueue {
    fn push(&mut self, effective: f64, index: usize) {
        self.pending.push((effective, index));
    }

    /// Index of the frame with the latest effective time at or before `t`.
    fn applied(&mut self, t: f64) -> Option<usize> {
        let mut i = 0;
        while i < self.pending.len() {
            let (e, idx) = self.pending[i];
            if e <= t + TIME_EPSILON {
                self.pending.swap_remove(i);
                if self.current.is_none_or(|(ce, ci)| e > ce || (e == ce && idx > ci)) {
                    self.current = Some((e, idx));
                }
            } else {
                i += 1;
            }
        }
        self.current.map(|(_, idx)| idx)
    }
}

/// Replays a log record by record. Camera frames captured while standing
/// still are never applied, so the previous frame stays in effect.
pub fn run_replay(
    network: &Network,
    log: &[SensorLogRecord],
    config: &ReplayConfig,
) -> Result<PosteriorTimeSeries, ReplayError> {
    let targets = [names::PAVEMENT, names::WEATHER, names::FRICTION];
    let mut memo: HashMap<Evidence, [Distribution; 3]> = HashMap::new();
    let mut queue = CameraQueue::default();
    let mut entries = Vec::with_capacity(log.len());
    for (i, record) in log.iter().enumerate() {
        if i > 0 && record.t < log[i - 1].t {
            return Err(ReplayError::TimeNotMonotonic { index: i });
        }
        if record.camera_scores.is_some() {
            match camera_delay(config.camera_distance, record.speed) {
                Ok(d) => queue.push(record.t + d, i),
                Err(ReplayError::ZeroOrNegativeSpeed(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let frame = queue.applied(record.t);
        let camera_scores = frame.and_then(|j| log[j].camera_scores);
        let camera_class = camera_scores.map(|s| crate::metrics::argmax(&s));
        let evidence = assemble_evidence(record, config, camera_class)?;
        let posts = match memo.get(&evidence) {
            Some(p) => p.clone(),
            None => {
                let p = [
                    posterior_ve(network, targets[0], &evidence)?,
                    posterior_ve(network, targets[1], &evidence)?,
                    posterior_ve(network, targets[2], &evidence)?,
                ];
                memo.insert(evidence.clone(), p.clone());
                p
            }
        };
        let flags = names::SENSORS.map(|s| evidence.contains(s));
        let [pavement, weather, friction] = posts;
        entries.push(PosteriorEntry { t: record.t, pavement, weather, friction, flags, camera_scores });
    }
    Ok(PosteriorTimeSeries { entries })
}

/// Posterior CSV: `t,R_1..R_3,W_1..W_3,mu_1..mu_8,evidence_flags`, six
/// decimals. Flags are one `0`/`1` per sensor in the order
/// `S_C,S_T,S_RCS1,S_RCS2,S_FO`.
pub fn render_posteriors(series: &PosteriorTimeSeries) -> String {
    let mut out = String::from("t");
    for (prefix, n) in [("R", 3), ("W", 3), ("mu", 8)] {
        for k in 1..=n {
            write!(out, ",{prefix}_{k}").unwrap();
        }
    }
    out.push_str(",evidence_flags\n");
    for e in &series.entries {
        write!(out, "{:.6}", e.t).unwrap();
        for p in e.pavement.probabilities().iter().chain(e.weather.probabilities()).chain(e.friction.probabilities()) {
            write!(out, ",{p:.6}").unwrap();
        }
        writeln!(out, ",{}", e.flag_string()).unwrap();
    }
    out
}

pub fn write_posteriors(series: &PosteriorTimeSeries, path: &Path) -> Result<(), ReplayError> {
    write_text(path, &render_posteriors(series))
}

/// Pavement and weather accuracy and mean Hellinger distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreQuartet {
    pub accuracy_pavement: f64,
    pub accuracy_weather: f64,
    pub hellinger_pavement: f64,
    pub hellinger_weather: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplayReport {
    pub camera: ScoreQuartet,
    pub network: ScoreQuartet,
    /// Records scored for pavement (snow-labelled frames excluded).
    pub pavement_samples: usize,
    /// Records scored for weather.
    pub weather_samples: usize,
}

/// Scores the network against the standalone camera. Only records with a
/// camera frame in effect are compared, so both sources see the same
/// samples. Frames whose top class is snow carry no pavement label and are
/// left out of the pavement scores for both sources.
pub fn replay_report(
    series: &PosteriorTimeSeries,
    truth: &[GroundTruthRecord],
) -> Result<ReplayReport, ReplayError> {
    if series.len() != truth.len() {
        return Err(MetricError::LengthMismatch(series.len(), truth.len()).into());
    }
    let point = |name: &str, card: usize, idx: usize| Distribution::point_mass(name, Scale::Nominal, card, idx);

    let mut cam_p_pred = Vec::new();
    let mut bn_p_pred = Vec::new();
    let mut p_truth = Vec::new();
    let mut cam_w_pred = Vec::new();
    let mut bn_w_pred = Vec::new();
    let mut w_truth = Vec::new();
    let (mut cam_hp, mut bn_hp, mut cam_hw, mut bn_hw) =
        (NeumaierSum::default(), NeumaierSum::default(), NeumaierSum::default(), NeumaierSum::default());

    for (entry, gt) in series.entries.iter().zip(truth) {
        let Some(scores) = entry.camera_scores else { continue };
        let cam = camera_scores_to_marginals(&scores)?;
        let tw = point(names::WEATHER, 3, gt.weather);
        cam_w_pred.push(Some(cam.weather_label));
        bn_w_pred.push(Some(entry.weather.argmax()));
        w_truth.push(gt.weather);
        cam_hw.add(hellinger(&tw, &cam.weather)?);
        bn_hw.add(hellinger(&tw, &entry.weather)?);
        if cam.pavement_label.is_some() {
            let tp = point(names::PAVEMENT, 3, gt.pavement);
            cam_p_pred.push(cam.pavement_label);
            bn_p_pred.push(Some(entry.pavement.argmax()));
            p_truth.push(gt.pavement);
            cam_hp.add(hellinger(&tp, &cam.pavement)?);
            bn_hp.add(hellinger(&tp, &entry.pavement)?);
        }
    }
    if w_truth.is_empty() || p_truth.is_empty() {
        return Err(MetricError::EmptyAfterExclusion.into());
    }
    let (np, nw) = (p_truth.len() as f64, w_truth.len() as f64);
    Ok(ReplayReport {
        camera: ScoreQuartet {
            accuracy_pavement: accuracy(&cam_p_pred, &p_truth, true)?,
            accuracy_weather: accuracy(&cam_w_pred, &w_truth, true)?,
            hellinger_pavement: cam_hp.value() / np,
            hellinger_weather: cam_hw.value() / nw,
        },
        network: ScoreQuartet {
            accuracy_pavement: accuracy(&bn_p_pred, &p_truth, true)?,
            accuracy_weather: accuracy(&bn_w_pred, &w_truth, true)?,
            hellinger_pavement: bn_hp.value() / np,
            hellinger_weather: bn_hw.value() / nw,
        },
        pavement_samples: p_truth.len(),
        weather_samples: w_truth.len(),
    })
}

/// Report CSV with one row per source.
pub fn render_report(report: &ReplayReport) -> String {
    let mut out = String::from("source,acc_R,acc_W,hellinger_R,hellinger_W,n_R,n_W\n");
    for (name, q) in [("camera", &report.camera), ("network", &report.network)] {
        writeln!(
            out,
            "{name},{:.6},{:.6},{:.6},{:.6},{},{}",
            q.accuracy_pavement,
            q.accuracy_weather,
            q.hellinger_pavement,
            q.hellinger_weather,
            report.pavement_samples,
            report.weather_samples
        )
        .unwrap();
    }
    out
}

pub fn write_report(report: &ReplayReport, path: &Path) -> Result<(), ReplayError> {
    write_text(path, &render_report(report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadnet::RoadModel;

    #[test]
    fn delay_examples() {
        assert!((camera_delay(6.3, 12.6).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(camera_delay(6.3, 6.3).unwrap(), 1.0);
        assert!(matches!(camera_delay(6.3, 0.0), Err(ReplayError::ZeroOrNegativeSpeed(_))));
        assert!(matches!(camera_delay(0.0, 1.0), Err(ReplayError::InvalidCameraDistance(_))));
    }

    #[test]
    fn sensitivity_examples() {
        assert_eq!(observer_sensitivity(3000.0, 4000.0).unwrap(), 0.75);
        assert_eq!(observer_sensitivity(0.0, 4000.0).unwrap(), 0.0);
        assert_eq!(observer_sensitivity(4000.0, 4000.0).unwrap(), 1.0);
        assert!(matches!(observer_sensitivity(1.0, 0.0), Err(ReplayError::NonPositiveLoad(_))));
    }

    fn forces(s: f64) -> ObserverForces {
        ObserverForces { dfx: [s * 4000.0; 4], dfy: [s * 4000.0; 4], fz: [4000.0; 4] }
    }

    #[test]
    fn gate_examples() {
        let gate = ObserverGate::default();
        let mut r = SensorLogRecord::new(0.0, 10.0);
        r.observer_mu = Some(0.9);
        r.forces = Some(forces(0.01));
        assert_eq!(gate_observer(&r, &gate).unwrap(), None);
        let mut f = forces(0.01);
        f.dfy[2] = 3000.0;
        r.forces = Some(f);
        assert_eq!(gate_observer(&r, &gate).unwrap(), Some(6));
        r.observer_mu = None;
        assert_eq!(gate_observer(&r, &gate).unwrap(), None);
        assert!(ObserverGate::new(0.0).is_err());
    }

    #[test]
    fn evidence_assembly() {
        let config = ReplayConfig::default();
        let mut r = SensorLogRecord::new(0.0, 10.0);
        r.air_temp = Some(10.0);
        assert_eq!(assemble_evidence(&r, &config, None).unwrap(), Evidence::new().with("S_T", 0));
        r.rcs1 = Some(20000);
        r.rcs2 = Some(500);
        r.observer_mu = Some(0.4);
        r.forces = Some(forces(0.5));
        let ev = assemble_evidence(&r, &config, Some(3)).unwrap();
        assert_eq!(ev.len(), 5);
        assert_eq!(ev.get("S_RCS1"), Some(2));
        assert_eq!(ev.get("S_RCS2"), Some(0));
        assert_eq!(ev.get("S_FO"), Some(2));
        r.forces = Some(forces(0.01));
        assert!(!assemble_evidence(&r, &config, None).unwrap().contains("S_FO"));
    }

    #[test]
    fn log_round_trip_and_header_errors() {
        let mut a = SensorLogRecord::new(0.5, 12.0);
        a.air_temp = Some(-3.25);
        a.camera_scores = Some([0.82, 0.03, 0.03, 0.03, 0.03, 0.03, 0.03]);
        a.rcs1 = Some(65535);
        a.observer_mu = Some(0.525);
        a.forces = Some(forces(0.5));
        let b = SensorLogRecord::new(1.0, 0.0);
        let text = render_log(&[a.clone(), b.clone()]);
        assert_eq!(parse_log(&text).unwrap(), vec![a, b]);

        let bad = text.replacen("cam_s3", "cam3", 1);
        let err = parse_log(&bad).unwrap_err().to_string();
        assert!(err.contains("cam_s3"), "{err}");
        let short = "t,v,T_air\n";
        assert!(parse_log(short).unwrap_err().to_string().contains("cam_s1"));
        let bad_value = text.replacen("65535", "70000", 1);
        assert!(parse_log(&bad_value).unwrap_err().to_string().contains("rcs1"));
    }

    #[test]
    fn camera_queue_holds_latest_arrival() {
        let mut q = CameraQueue::default();
        q.push(1.0, 0);
        q.push(0.5, 1);
        assert_eq!(q.applied(0.4), None);
        assert_eq!(q.applied(0.6), Some(1));
        assert_eq!(q.applied(1.0), Some(0));
        q.push(0.9, 2);
        // an older effective time never replaces a newer one
        assert_eq!(q.applied(1.1), Some(0));
    }

    #[test]
    fn empty_log_gives_empty_series() {
        let model = RoadModel::bundled();
        let s = run_replay(&model.network, &[], &ReplayConfig::default()).unwrap();
        assert!(s.is_empty());
        assert!(matches!(
            replay_report(&s, &[GroundTruthRecord { t: 0.0, pavement: 0, weather: 0, mu_class: 0 }]),
            Err(ReplayError::Metric(MetricError::LengthMismatch(0, 1)))
        ));
        assert!(matches!(replay_report(&s, &[]), Err(ReplayError::Metric(MetricError::EmptyAfterExclusion))));
    }

    #[test]
    fn truth_round_trip() {
        let truth = vec![
            GroundTruthRecord { t: 0.0, pavement: 2, weather: 1, mu_class: 3 },
            GroundTruthRecord { t: 0.1, pavement: 0, weather: 0, mu_class: 7 },
        ];
        assert_eq!(parse_truth(&render_truth(&truth)).unwrap(), truth);
        assert!(parse_truth("t,R,W,mu_class\n0,Gravel,Dry,1\n").unwrap_err().to_string().contains("`R`"));
    }
}
