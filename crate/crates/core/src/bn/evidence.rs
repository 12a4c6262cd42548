use std::collections::btree_map;
use std::collections::BTreeMap;

use super::{BnError, Network, Scale};

/// Tolerance on the total mass of a [`Distribution`].
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Hard evidence: observed variables mapped to state indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Evidence(BTreeMap<String, usize>);

impl Evidence {
    pub fn new() -> Self {
        Evidence(BTreeMap::new())
    }

    /// Builder-style insert.
    pub fn with(mut self, variable: impl Into<String>, state: usize) -> Self {
        self.0.insert(variable.into(), state);
        self
    }

    /// Observes `variable`, replacing any previous observation.
    pub fn insert(&mut self, variable: impl Into<String>, state: usize) -> Option<usize> {
        self.0.insert(variable.into(), state)
    }

    pub fn remove(&mut self, variable: &str) -> Option<usize> {
        self.0.remove(variable)
    }

    pub fn get(&self, variable: &str) -> Option<usize> {
        self.0.get(variable).copied()
    }

    pub fn contains(&self, variable: &str) -> bool {
        self.0.contains_key(variable)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Builds evidence from `(variable, state label)` pairs.
    pub fn from_labels<'a>(
        network: &Network,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, BnError> {
        let mut ev = Evidence::new();
        for (var, label) in pairs {
            ev.insert(var, network.state_index(var, label)?);
        }
        Ok(ev)
    }

    /// Per-variable observed state, indexed by variable id.
    pub fn resolve(&self, network: &Network) -> Result<Vec<Option<usize>>, BnError> {
        let mut out = vec![None; network.len()];
        for (name, state) in self.iter() {
            let id = network.var_id(name)?;
            let card = network.variable(id).cardinality();
            if state >= card {
                return Err(BnError::StateOutOfRange { variable: name.to_string(), index: state, cardinality: card });
            }
            out[id] = Some(state);
        }
        Ok(out)
    }
}

impl FromIterator<(String, usize)> for Evidence {
    fn from_iter<T: IntoIterator<Item = (String, usize)>>(iter: T) -> Self {
        Evidence(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Evidence {
    type Item = (&'a String, &'a usize);
    type IntoIter = btree_map::Iter<'a, String, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A complete assignment: one state per network variable, indexed by id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(Vec<usize>);

impl Assignment {
    pub fn new(states: Vec<usize>) -> Self {
        Assignment(states)
    }

    /// Builds a complete assignment from a name map, rejecting gaps.
    pub fn from_named(network: &Network, named: &BTreeMap<String, usize>) -> Result<Self, BnError> {
        let mut states = vec![usize::MAX; network.len()];
        for (name, &s) in named {
            states[network.var_id(name)?] = s;
        }
        let found = states.iter().filter(|&&s| s != usize::MAX).count();
        if found != network.len() {
            return Err(BnError::IncompleteAssignment { expected: network.len(), found });
        }
        Ok(Assignment(states))
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, id: usize) -> usize {
        self.0[id]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Projects the assignment onto the given variable names.
    pub fn project(&self, network: &Network, names: &[&str]) -> Result<Evidence, BnError> {
        let mut ev = Evidence::new();
        for &n in names {
            ev.insert(n, self.0[network.var_id(n)?]);
        }
        Ok(ev)
    }
}

/// A normalized probability vector over one variable's states.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    variable: String,
    scale: Scale,
    probabilities: Vec<f64>,
}

impl Distribution {
    /// Validates nonnegativity and unit mass (within [`DISTRIBUTION_TOLERANCE`]).
    pub fn new(variable: impl Into<String>, scale: Scale, probabilities: Vec<f64>) -> Result<Self, BnError> {
        let variable = variable.into();
        if probabilities.len() < 2 {
            return Err(BnError::InvalidDistribution { variable, reason: "fewer than 2 states".into() });
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(BnError::InvalidDistribution { variable, reason: "negative or non-finite entry".into() });
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE {
            return Err(BnError::InvalidDistribution { variable, reason: format!("mass {sum}") });
        }
        Ok(Distribution { variable, scale, probabilities })
    }

    /// Normalizes nonnegative weights. Zero total mass means the
    /// conditioning event is impossible.
    pub fn from_weights(variable: impl Into<String>, scale: Scale, weights: Vec<f64>) -> Result<Self, BnError> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(BnError::ZeroProbabilityEvidence);
        }
        Distribution::new(variable, scale, weights.into_iter().map(|w| w / total).collect())
    }

    /// Delta distribution at `index`.
    pub fn point_mass(variable: impl Into<String>, scale: Scale, cardinality: usize, index: usize) -> Self {
        assert!(index < cardinality, "point mass index out of range");
        let mut probabilities = vec![0.0; cardinality];
        probabilities[index] = 1.0;
        Distribution { variable: variable.into(), scale, probabilities }
    }

    pub fn uniform(variable: impl Into<String>, scale: Scale, cardinality: usize) -> Self {
        Distribution { variable: variable.into(), scale, probabilities: vec![1.0 / cardinality as f64; cardinality] }
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Most probable state; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            if p > self.probabilities[best] {
                best = i;
            }
        }
        best
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self.probabilities.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
    }
}
