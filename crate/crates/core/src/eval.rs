//! Exhaustive evaluation of a network over its whole domain.
//!
//! Every complete assignment with nonzero joint probability is one sample.
//! For each subset of sensor nodes, the sample's sensor readings restricted
//! to that subset become the evidence, the posterior of each target
//! variable is computed, and its distance to the point mass at the true
//! state is averaged with equal weight per sample.
//!
//! Posteriors depend only on the projected evidence, so the sweep first
//! counts samples per (sensor readings, target states) cell and then runs
//! one inference per distinct evidence key.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::bn::{posterior_ve, Assignment, BnError, Distribution, Evidence, Network};
use crate::metrics::{hellinger_slices, wasserstein1_slices, MetricKind, NeumaierSum};
use crate::roadnet::names;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Network(#[from] BnError),
    #[error("no sensor subsets requested")]
    NoSubsets,
    #[error("subset mask {0:#b} names sensors outside the sensor list")]
    SubsetOutOfRange(u32),
    #[error("unknown sensor `{0}`")]
    UnknownSensor(String),
    #[error("the domain contains no assignment with positive probability")]
    EmptyDomain,
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed report: {0}")]
    Report(String),
}

/// One complete assignment and its joint probability.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainCombination {
    pub assignment: Assignment,
    pub probability: f64,
}

/// Depth-first walk over complete assignments in topological order,
/// skipping any branch whose partial product is zero.
pub struct DomainIter<'a> {
    network: &'a Network,
    order: Vec<usize>,
    fixed: Vec<Option<usize>>,
    states: Vec<usize>,
    cursor: Vec<Option<usize>>,
    prefix: Vec<f64>,
    depth: usize,
    done: bool,
}

/// Every assignment of `network` with joint probability > 0.
pub fn enumerate_domain(network: &Network) -> DomainIter<'_> {
    DomainIter::new(network, vec![None; network.len()])
}

/// As [`enumerate_domain`], restricted to assignments agreeing with `clamp`.
pub fn enumerate_domain_clamped<'a>(network: &'a Network, clamp: &Evidence) -> Result<DomainIter<'a>, BnError> {
    Ok(DomainIter::new(network, clamp.resolve(network)?))
}

impl<'a> DomainIter<'a> {
    fn new(network: &'a Network, fixed: Vec<Option<usize>>) -> Self {
        let n = network.len();
        let mut prefix = vec![0.0; n + 1];
        prefix[0] = 1.0;
        DomainIter {
            network,
            order: network.topological_order().to_vec(),
            fixed,
            states: vec![0; n],
            cursor: vec![None; n],
            prefix,
            depth: 0,
            done: n == 0,
        }
    }
}

impl Iterator for DomainIter<'_> {
    type Item = DomainCombination;

    fn next(&mut self) -> Option<DomainCombination> {
        let n = self.order.len();
        if self.done {
            return None;
        }
        loop {
            if self.depth == n {
                self.depth -= 1;
            }
            let d = self.depth;
            let var = self.order[d];
            let card = self.network.variable(var).cardinality();
            let (mut s, last) = match (self.fixed[var], self.cursor[d]) {
                (Some(f), None) => (f, f),
                (Some(_), Some(_)) => (card, card),
                (None, None) => (0, card - 1),
                (None, Some(c)) => (c + 1, card - 1),
            };
            let cpt = self.network.cpt(var);
            let mut found = None;
            while s <= last && s < card {
                self.states[var] = s;
                let f = cpt.probability_in(&self.states);
                if f > 0.0 {
                    found = Some(f);
                    break;
                }
                s += 1;
            }
            match found {
                Some(f) => {
                    self.cursor[d] = Some(s);
                    self.prefix[d + 1] = self.prefix[d] * f;
                    self.depth = d + 1;
                    if self.depth == n {
                        return Some(DomainCombination {
                            assignment: Assignment::new(self.states.clone()),
                            probability: self.prefix[n],
                        });
                    }
                    self.cursor[self.depth] = None;
                }
                None => {
                    self.cursor[d] = None;
                    if d == 0 {
                        self.done = true;
                        return None;
                    }
                    self.depth = d - 1;
                }
            }
        }
    }
}

/// A subset of the sensor list, as a bit mask (bit i = sensor i).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SensorSubset(pub u32);

impl SensorSubset {
    pub fn empty() -> Self {
        SensorSubset(0)
    }

    /// All 2^n subsets of `n` sensors in mask order.
    pub fn power_set(n: usize) -> Vec<SensorSubset> {
        (0..1u32 << n).map(SensorSubset).collect()
    }

    pub fn contains(&self, sensor: usize) -> bool {
        self.0 & (1 << sensor) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn members<'s>(&self, sensors: &'s [String]) -> Vec<&'s str> {
        sensors.iter().enumerate().filter(|(i, _)| self.contains(*i)).map(|(_, s)| s.as_str()).collect()
    }

    /// Sensor names joined by `;`; empty for the empty subset.
    pub fn label(&self, sensors: &[String]) -> String {
        self.members(sensors).join(";")
    }

    /// Parses `;`, `+` or `,` separated sensor names. `""` and `none` give
    /// the empty subset.
    pub fn parse(text: &str, sensors: &[String]) -> Result<Self, EvalError> {
        let text = text.trim();
        if text.is_empty() || text.eq_ignore_ascii_case("none") {
            return Ok(SensorSubset::empty());
        }
        let mut mask = 0u32;
        for name in text.split([';', '+', ',']).map(str::trim).filter(|s| !s.is_empty()) {
            let i = sensors
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| EvalError::UnknownSensor(name.to_string()))?;
            mask |= 1 << i;
        }
        Ok(SensorSubset(mask))
    }
}

/// Which nodes are sensors and which are estimated.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalSpec {
    pub sensors: Vec<String>,
    pub targets: Vec<String>,
}

impl EvalSpec {
    /// Five sensors and the three road-condition targets.
    pub fn road() -> Self {
        EvalSpec {
            sensors: names::SENSORS.iter().map(|s| s.to_string()).collect(),
            targets: names::TARGETS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalOptions {
    /// Reuse one inference per distinct projected evidence.
    pub memoize: bool,
    /// Also compute probability-weighted means.
    pub weighted: bool,
    /// Restrict the domain to assignments agreeing with this evidence.
    pub clamp: Evidence,
}

impl EvalOptions {
    pub fn memoized() -> Self {
        EvalOptions { memoize: true, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub subset: SensorSubset,
    pub variable: String,
    pub metric: MetricKind,
    pub mean: f64,
    pub weighted_mean: Option<f64>,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub sensors: Vec<String>,
    /// Subsets in mask order, targets in spec order within each subset.
    pub rows: Vec<EvalRow>,
}

impl EvalResult {
    pub fn get(&self, subset: SensorSubset, variable: &str) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.subset == subset && r.variable == variable)
    }

    pub fn subset(&self, label: &str) -> Result<SensorSubset, EvalError> {
        SensorSubset::parse(label, &self.sensors)
    }
}

struct Resolved {
    sensor_ids: Vec<usize>,
    sensor_cards: Vec<usize>,
    target_ids: Vec<usize>,
    target_cards: Vec<usize>,
    metrics: Vec<MetricKind>,
}

fn resolve(network: &Network, spec: &EvalSpec) -> Result<Resolved, EvalError> {
    let ids = |names: &[String]| names.iter().map(|n| network.var_id(n)).collect::<Result<Vec<_>, _>>();
    let sensor_ids = ids(&spec.sensors)?;
    let target_ids = ids(&spec.targets)?;
    Ok(Resolved {
        sensor_cards: sensor_ids.iter().map(|&i| network.variable(i).cardinality()).collect(),
        target_cards: target_ids.iter().map(|&i| network.variable(i).cardinality()).collect(),
        metrics: target_ids.iter().map(|&i| MetricKind::for_scale(network.variable(i).scale())).collect(),
        sensor_ids,
        target_ids,
    })
}

fn point_distance(metric: MetricKind, truth: usize, estimate: &[f64]) -> f64 {
    let mut delta = vec![0.0; estimate.len()];
    delta[truth] = 1.0;
    match metric {
        MetricKind::Hellinger => hellinger_slices(&delta, estimate),
        MetricKind::Wasserstein1 => wasserstein1_slices(&delta, estimate),
    }
}

fn posteriors(network: &Network, targets: &[String], evidence: &Evidence) -> Result<Vec<Distribution>, BnError> {
    targets.iter().map(|t| posterior_ve(network, t, evidence)).collect()
}

/// Runs the sweep for each requested subset. Rows come out in mask order.
pub fn evaluate_subsets(
    network: &Network,
    spec: &EvalSpec,
    subsets: &[SensorSubset],
    options: &EvalOptions,
) -> Result<EvalResult, EvalError> {
    if subsets.is_empty() {
        return Err(EvalError::NoSubsets);
    }
    let limit = 1u32.checked_shl(spec.sensors.len() as u32).unwrap_or(0);
    if let Some(bad) = subsets.iter().find(|s| s.0 >= limit) {
        return Err(EvalError::SubsetOutOfRange(bad.0));
    }
    let mut subsets = subsets.to_vec();
    subsets.sort();
    subsets.dedup();
    let resolved = resolve(network, spec)?;
    let rows = if options.memoize {
        sweep_memoized(network, spec, &resolved, &subsets, options)?
    } else {
        sweep_direct(network, spec, &resolved, &subsets, options)?
    };
    Ok(EvalResult { sensors: spec.sensors.clone(), rows })
}

fn sweep_memoized(
    network: &Network,
    spec: &EvalSpec,
    r: &Resolved,
    subsets: &[SensorSubset],
    options: &EvalOptions,
) -> Result<Vec<EvalRow>, EvalError> {
    let target_space: usize = r.target_cards.iter().product();
    let sensor_space: usize = r.sensor_cards.iter().product();
    let mut counts = vec![0u64; sensor_space * target_space];
    let mut mass = vec![NeumaierSum::default(); if options.weighted { counts.len() } else { 0 }];
    let mut total_mass = NeumaierSum::default();
    let mut n = 0u64;
    for combo in enumerate_domain_clamped(network, &options.clamp)? {
        let s = combo.assignment.states();
        let sensor_idx = r.sensor_ids.iter().zip(&r.sensor_cards).fold(0, |a, (&v, &c)| a * c + s[v]);
        let target_idx = r.target_ids.iter().zip(&r.target_cards).fold(0, |a, (&v, &c)| a * c + s[v]);
        let cell = sensor_idx * target_space + target_idx;
        counts[cell] += 1;
        if options.weighted {
            mass[cell].add(combo.probability);
            total_mass.add(combo.probability);
        }
        n += 1;
    }
    if n == 0 {
        return Err(EvalError::EmptyDomain);
    }

    let decode = |mut idx: usize, cards: &[usize]| {
        let mut out = vec![0; cards.len()];
        for (slot, &c) in out.iter_mut().zip(cards).rev() {
            *slot = idx % c;
            idx /= c;
        }
        out
    };

    let mut rows = Vec::with_capacity(subsets.len() * spec.targets.len());
    for &subset in subsets {
        // projected evidence key of every occupied sensor cell
        let mut key_of_cell: HashMap<usize, usize> = HashMap::new();
        let mut keys: Vec<Evidence> = Vec::new();
        let mut key_index: HashMap<Evidence, usize> = HashMap::new();
        for sensor_idx in 0..sensor_space {
            let occupied = counts[sensor_idx * target_space..(sensor_idx + 1) * target_space].iter().any(|&c| c > 0);
            if !occupied {
                continue;
            }
            let readings = decode(sensor_idx, &r.sensor_cards);
            let ev: Evidence = (0..spec.sensors.len())
                .filter(|&i| subset.contains(i))
                .map(|i| (spec.sensors[i].clone(), readings[i]))
                .collect();
            let next = keys.len();
            let k = *key_index.entry(ev.clone()).or_insert_with(|| {
                keys.push(ev);
                next
            });
            key_of_cell.insert(sensor_idx, k);
        }

        let memo: Vec<Vec<Distribution>> = keys
            .par_iter()
            .map(|ev| posteriors(network, &spec.targets, ev))
            .collect::<Result<_, _>>()?;

        for (j, target) in spec.targets.iter().enumerate() {
            // distance of each memoized posterior to each possible truth
            let table: Vec<Vec<f64>> = memo
                .iter()
                .map(|post| {
                    (0..r.target_cards[j]).map(|t| point_distance(r.metrics[j], t, post[j].probabilities())).collect()
                })
                .collect();
            let mut sum = NeumaierSum::default();
            let mut wsum = NeumaierSum::default();
            for (cell, &count) in counts.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let (sensor_idx, target_idx) = (cell / target_space, cell % target_space);
                let truth = decode(target_idx, &r.target_cards)[j];
                let d = table[key_of_cell[&sensor_idx]][truth];
                sum.add(count as f64 * d);
                if options.weighted {
                    wsum.add(mass[cell].value() * d);
                }
            }
            rows.push(EvalRow {
                subset,
                variable: target.clone(),
                metric: r.metrics[j],
                mean: sum.value() / n as f64,
                weighted_mean: options.weighted.then(|| wsum.value() / total_mass.value()),
                n,
            });
        }
    }
    Ok(rows)
}

/// Reference path: one fresh inference per sample and subset.
fn sweep_direct(
    network: &Network,
    spec: &EvalSpec,
    r: &Resolved,
    subsets: &[SensorSubset],
    options: &EvalOptions,
) -> Result<Vec<EvalRow>, EvalError> {
    let combos: Vec<DomainCombination> = enumerate_domain_clamped(network, &options.clamp)?.collect();
    if combos.is_empty() {
        return Err(EvalError::EmptyDomain);
    }
    let per_combo: Vec<Vec<f64>> = combos
        .par_iter()
        .map(|combo| {
            let s = combo.assignment.states();
            let mut out = Vec::with_capacity(subsets.len() * spec.targets.len());
            for subset in subsets {
                let ev: Evidence = (0..spec.sensors.len())
                    .filter(|&i| subset.contains(i))
                    .map(|i| (spec.sensors[i].clone(), s[r.sensor_ids[i]]))
                    .collect();
                for (j, post) in posteriors(network, &spec.targets, &ev)?.iter().enumerate() {
                    out.push(point_distance(r.metrics[j], s[r.target_ids[j]], post.probabilities()));
                }
            }
            Ok(out)
        })
        .collect::<Result<_, BnError>>()?;

    let n = combos.len() as u64;
    let mut total_mass = NeumaierSum::default();
    for c in &combos {
        total_mass.add(c.probability);
    }
    let mut rows = Vec::new();
    for (si, &subset) in subsets.iter().enumerate() {
        for (j, target) in spec.targets.iter().enumerate() {
            let col = si * spec.targets.len() + j;
            let mut sum = NeumaierSum::default();
            let mut wsum = NeumaierSum::default();
            for (combo, d) in combos.iter().zip(&per_combo) {
                sum.add(d[col]);
                wsum.add(combo.probability * d[col]);
            }
            rows.push(EvalRow {
                subset,
                variable: target.clone(),
                metric: r.metrics[j],
                mean: sum.value() / n as f64,
                weighted_mean: options.weighted.then(|| wsum.value() / total_mass.value()),
                n,
            });
        }
    }
    Ok(rows)
}

/// Renders the result as CSV:
/// `subset,variable,metric,mean,n[,weighted_mean]`.
///
/// Means are written in shortest round-trip form so the file reloads to an
/// identical result.
pub fn render_report(result: &EvalResult) -> String {
    let weighted = result.rows.iter().any(|r| r.weighted_mean.is_some());
    let mut out = String::from("subset,variable,metric,mean,n");
    if weighted {
        out.push_str(",weighted_mean");
    }
    out.push('\n');
    for row in &result.rows {
        write!(out, "{},{},{},{},{}", row.subset.label(&result.sensors), row.variable, row.metric, row.mean, row.n)
            .unwrap();
        if weighted {
            match row.weighted_mean {
                Some(w) => write!(out, ",{w}").unwrap(),
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

pub fn emit_report(result: &EvalResult, path: &Path) -> Result<(), EvalError> {
    std::fs::write(path, render_report(result))
        .map_err(|source| EvalError::Io { path: path.display().to_string(), source })
}

/// Parses a report written by [`emit_report`].
pub fn parse_report(text: &str, sensors: &[String]) -> Result<EvalResult, EvalError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| EvalError::Report(e.to_string()))?.clone();
    let weighted = match headers.iter().collect::<Vec<_>>().as_slice() {
        ["subset", "variable", "metric", "mean", "n"] => false,
        ["subset", "variable", "metric", "mean", "n", "weighted_mean"] => true,
        other => return Err(EvalError::Report(format!("unexpected header {other:?}"))),
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| EvalError::Report(e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let num = |i: usize| field(i).parse::<f64>().map_err(|e| EvalError::Report(format!("{}: {e}", field(i))));
        rows.push(EvalRow {
            subset: SensorSubset::parse(field(0), sensors)?,
            variable: field(1).to_string(),
            metric: MetricKind::from_label(field(2))
                .ok_or_else(|| EvalError::Report(format!("unknown metric `{}`", field(2))))?,
            mean: num(3)?,
            n: field(4).parse().map_err(|e| EvalError::Report(format!("{}: {e}", field(4))))?,
            weighted_mean: if weighted && !field(5).is_empty() { Some(num(5)?) } else { None },
        });
    }
    Ok(EvalResult { sensors: sensors.to_vec(), rows })
}

pub fn read_report(path: &Path, sensors: &[String]) -> Result<EvalResult, EvalError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| EvalError::Io { path: path.display().to_string(), source })?;
    parse_report(&text, sensors)
}

/// Reference mean Hellinger distance of the weather posterior when a
/// single road condition sensor is the only evidence.
pub const REFERENCE_RCS_WEATHER_HELLINGER: f64 = 0.635;
pub const REFERENCE_RCS_TOLERANCE: f64 = 0.05;

/// Comparison of the single-RCS weather distance against its reference.
#[derive(Debug, Clone, PartialEq)]
pub struct RcsDiscrepancy {
    pub single_rcs: f64,
    pub within_tolerance: bool,
    /// Human-readable table; present when outside tolerance.
    pub report: Option<String>,
}

/// Checks the `{S_RCS1}` weather distance of a road-network result. When
/// it misses the reference, builds a report contrasting equal-weight and
/// probability-weighted means for single and dual RCS subsets.
pub fn rcs_discrepancy(result: &EvalResult) -> Result<RcsDiscrepancy, EvalError> {
    let single = result.subset(names::RCS1)?;
    let row = result
        .get(single, names::WEATHER)
        .ok_or_else(|| EvalError::Report("result lacks the S_RCS1 weather row".into()))?;
    let within = (row.mean - REFERENCE_RCS_WEATHER_HELLINGER).abs() <= REFERENCE_RCS_TOLERANCE;
    let report = (!within).then(|| {
        let mut out = String::new();
        writeln!(
            out,
            "single-RCS weather Hellinger {:.6} is outside {:.3} ± {:.3}",
            row.mean, REFERENCE_RCS_WEATHER_HELLINGER, REFERENCE_RCS_TOLERANCE
        )
        .unwrap();
        writeln!(out, "subset,variable,equal_weight,probability_weighted").unwrap();
        for label in [names::RCS1, names::RCS2, "S_RCS1;S_RCS2"] {
            for var in [names::PAVEMENT, names::WEATHER] {
                let Ok(subset) = result.subset(label) else { continue };
                if let Some(r) = result.get(subset, var) {
                    let w = r.weighted_mean.map(|w| format!("{w:.6}")).unwrap_or_else(|| "n/a".into());
                    writeln!(out, "{label},{var},{:.6},{w}", r.mean).unwrap();
                }
            }
        }
        out
    });
    Ok(RcsDiscrepancy { single_rcs: row.mean, within_tolerance: within, report })
}

/// Runs the single and dual RCS subsets with probability weighting and
/// compares the single-RCS weather distance to its reference.
pub fn check_rcs_reference(network: &Network) -> Result<RcsDiscrepancy, EvalError> {
    let spec = EvalSpec::road();
    let subsets = [names::RCS1, names::RCS2, "S_RCS1;S_RCS2"]
        .iter()
        .map(|s| SensorSubset::parse(s, &spec.sensors))
        .collect::<Result<Vec<_>, _>>()?;
    let options = EvalOptions { memoize: true, weighted: true, ..Default::default() };
    rcs_discrepancy(&evaluate_subsets(network, &spec, &subsets, &options)?)
}
