//! Distances between posteriors and ground truth, and label accuracy.
//!
//! Nominal variables (pavement, weather) are compared with the Hellinger
//! distance; ordinal ones (friction class) with the discrete Wasserstein-1
//! distance, which sums absolute CDF differences with unit spacing between
//! adjacent classes.

use std::fmt;

use thiserror::Error;

use crate::bn::{Distribution, Scale};
use crate::roadnet::{names, CAMERA_CLASSES, SNOW_CLASS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("distributions have {0} and {1} states")]
    DimensionMismatch(usize, usize),
    #[error("Wasserstein distance needs ordinal variables, `{0}` is nominal")]
    NonOrdinalVariable(String),
    #[error("no samples to average")]
    EmptySampleSet,
    #[error("{0} predictions but {1} truths")]
    LengthMismatch(usize, usize),
    #[error("no samples left after excluding Nan labels")]
    EmptyAfterExclusion,
    #[error("camera scores must be nonnegative and sum to 1 (sum {0})")]
    UnnormalizedScores(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Wasserstein1,
    Hellinger,
}

impl MetricKind {
    /// Hellinger for nominal variables, Wasserstein-1 for ordinal ones.
    pub fn for_scale(scale: Scale) -> Self {
        match scale {
            Scale::Nominal => MetricKind::Hellinger,
            Scale::Ordinal => MetricKind::Wasserstein1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MetricKind::Wasserstein1 => "wasserstein1",
            MetricKind::Hellinger => "hellinger",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "wasserstein1" => Some(MetricKind::Wasserstein1),
            "hellinger" => Some(MetricKind::Hellinger),
            _ => None,
        }
    }

    pub fn distance(self, p: &Distribution, q: &Distribution) -> Result<f64, MetricError> {
        match self {
            MetricKind::Wasserstein1 => wasserstein1(p, q),
            MetricKind::Hellinger => hellinger(p, q),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Discrete Wasserstein-1 distance with unit spacing between classes.
pub fn wasserstein1(p: &Distribution, q: &Distribution) -> Result<f64, MetricError> {
    for d in [p, q] {
        if d.scale() != Scale::Ordinal {
            return Err(MetricError::NonOrdinalVariable(d.variable().to_string()));
        }
    }
    check_dims(p, q)?;
    Ok(wasserstein1_slices(p.probabilities(), q.probabilities()))
}

pub(crate) fn wasserstein1_slices(p: &[f64], q: &[f64]) -> f64 {
    let (mut fp, mut fq, mut total) = (0.0, 0.0, 0.0);
    for (a, b) in p.iter().zip(q) {
        fp += a;
        fq += b;
        total += (fp - fq).abs();
    }
    total
}

/// Hellinger distance, bounded by 1.
pub fn hellinger(p: &Distribution, q: &Distribution) -> Result<f64, MetricError> {
    check_dims(p, q)?;
    Ok(hellinger_slices(p.probabilities(), q.probabilities()))
}

pub(crate) fn hellinger_slices(p: &[f64], q: &[f64]) -> f64 {
    let sq: f64 = p.iter().zip(q).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).sum();
    (0.5 * sq).sqrt().min(1.0)
}

fn check_dims(p: &Distribution, q: &Distribution) -> Result<(), MetricError> {
    if p.len() != q.len() {
        return Err(MetricError::DimensionMismatch(p.len(), q.len()));
    }
    Ok(())
}

/// A point mass at the true state of a variable.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    distribution: Distribution,
    index: usize,
}

impl GroundTruth {
    pub fn new(variable: impl Into<String>, scale: Scale, cardinality: usize, index: usize) -> Self {
        GroundTruth { distribution: Distribution::point_mass(variable, scale, cardinality, index), index }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn distribution(&self) -> &Distribution {
        &self.distribution
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub variable: String,
    pub kind: MetricKind,
    pub mean: f64,
    pub n: usize,
}

/// Equal-weight mean distance between each truth and its estimate.
pub fn mean_distance(samples: &[(GroundTruth, Distribution)], kind: MetricKind) -> Result<MetricReport, MetricError> {
    let Some((first, _)) = samples.first() else {
        return Err(MetricError::EmptySampleSet);
    };
    let mut sum = NeumaierSum::default();
    for (truth, estimate) in samples {
        sum.add(kind.distance(truth.distribution(), estimate)?);
    }
    Ok(MetricReport {
        variable: first.distribution().variable().to_string(),
        kind,
        mean: sum.value() / samples.len() as f64,
        n: samples.len(),
    })
}

/// Fraction of predictions equal to the truth. `None` predictions are Nan
/// labels: dropped from both counts when `exclude_nan`, otherwise wrong.
pub fn accuracy<T: PartialEq>(predictions: &[Option<T>], truths: &[T], exclude_nan: bool) -> Result<f64, MetricError> {
    if predictions.len() != truths.len() {
        return Err(MetricError::LengthMismatch(predictions.len(), truths.len()));
    }
    let (mut correct, mut total) = (0usize, 0usize);
    for (pred, truth) in predictions.iter().zip(truths) {
        match pred {
            None if exclude_nan => continue,
            None => total += 1,
            Some(p) => {
                total += 1;
                if p == truth {
                    correct += 1;
                }
            }
        }
    }
    if total == 0 {
        return Err(MetricError::EmptyAfterExclusion);
    }
    Ok(correct as f64 / total as f64)
}

/// Camera classifier output split into pavement and weather marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraMarginals {
    pub pavement: Distribution,
    pub weather: Distribution,
    /// Pavement of the top class; `None` (Nan) when the top class is snow.
    pub pavement_label: Option<usize>,
    pub weather_label: usize,
}

/// Folds the 7 camera scores into pavement and weather distributions. The
/// snow score carries no pavement information and is spread evenly over
/// the three pavements.
pub fn camera_scores_to_marginals(scores: &[f64; 7]) -> Result<CameraMarginals, MetricError> {
    let sum: f64 = scores.iter().sum();
    if scores.iter().any(|s| !s.is_finite() || *s < 0.0) || (sum - 1.0).abs() > 1e-6 {
        return Err(MetricError::UnnormalizedScores(sum));
    }
    let snow = scores[SNOW_CLASS];
    let mut pavement = [snow / 3.0; 3];
    let mut weather = [0.0, 0.0, snow];
    for (class, &s) in scores.iter().enumerate().take(SNOW_CLASS) {
        pavement[class / 2] += s;
        weather[class % 2] += s;
    }
    let top = argmax(scores);
    let (pavement_label, weather_label) = crate::roadnet::camera_class_parts(top);
    debug_assert_eq!(CAMERA_CLASSES.len(), scores.len());
    Ok(CameraMarginals {
        pavement: renormalized(names::PAVEMENT, &pavement),
        weather: renormalized(names::WEATHER, &weather),
        pavement_label,
        weather_label,
    })
}

/// Index of the largest entry; first wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn renormalized(variable: &str, weights: &[f64]) -> Distribution {
    // scores are already within 1e-6 of unit mass
    Distribution::from_weights(variable, Scale::Nominal, weights.to_vec()).expect("positive camera mass")
}

/// Compensated (Neumaier) summation; the result does not depend on the
/// grouping of the terms to within a few ulps.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
