use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::BnError;

/// Tolerance used when checking that a CPT row sums to one.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Measurement scale of a variable's states.
///
/// Ordinal variables have a meaningful ordering of their states (friction
/// classes, temperature bands); nominal ones do not (pavement type).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Nominal,
    Ordinal,
}

/// A discrete random variable with named states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    name: String,
    states: Vec<String>,
    scale: Scale,
}

impl Variable {
    pub fn new<N, S, I>(name: N, states: I) -> Result<Self, BnError>
    where
        N: Into<String>,
        S: Into<String>,
        I: IntoIterator<Item = S>,
    {
        let name = name.into();
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        if states.len() < 2 {
            return Err(BnError::TooFewStates { variable: name, count: states.len() });
        }
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(BnError::DuplicateState { variable: name, state: s.clone() });
            }
        }
        Ok(Variable { name, states, scale: Scale::Nominal })
    }

    /// Marks the variable as ordinal (or nominal).
    pub fn with_scale(mut self, scale: Scale) -> Self {
        self.scale = scale;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// Name-based CPT definition, the input to [`Network::build`].
///
/// `rows` is row-major over the parent list: the last parent varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CptDef {
    pub child: String,
    pub parents: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CptDef {
    pub fn new<C: Into<String>>(child: C, parents: &[&str], rows: Vec<Vec<f64>>) -> Self {
        CptDef {
            child: child.into(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            rows,
        }
    }

    /// A parentless prior.
    pub fn prior<C: Into<String>>(child: C, probabilities: Vec<f64>) -> Self {
        CptDef { child: child.into(), parents: Vec::new(), rows: vec![probabilities] }
    }
}

/// A validated conditional probability table, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    child: usize,
    parents: Vec<usize>,
    parent_cards: Vec<usize>,
    child_card: usize,
    table: Vec<f64>,
}

impl Cpt {
    pub fn child(&self) -> usize {
        self.child
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn parent_cardinalities(&self) -> &[usize] {
        &self.parent_cards
    }

    pub fn child_cardinality(&self) -> usize {
        self.child_card
    }

    pub fn row_count(&self) -> usize {
        self.parent_cards.iter().product()
    }

    /// Row-major index of a parent-state combination.
    pub fn row_index(&self, parent_states: &[usize]) -> usize {
        debug_assert_eq!(parent_states.len(), self.parents.len());
        parent_states
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&s, &c)| acc * c + s)
    }

    /// Row index for the parent states found in a full state vector.
    pub fn row_index_in(&self, states: &[usize]) -> usize {
        self.parents
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&p, &c)| acc * c + states[p])
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.table[row * self.child_card..(row + 1) * self.child_card]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks(self.child_card)
    }

    /// P(child = state | parents) read from a full state vector.
    pub fn probability_in(&self, states: &[usize]) -> f64 {
        self.row(self.row_index_in(states))[states[self.child]]
    }

    /// Decodes a row index into the parent states it stands for.
    pub fn parent_states_of_row(&self, mut row: usize) -> Vec<usize> {
        let mut out = vec![0; self.parent_cards.len()];
        for (slot, &c) in out.iter_mut().zip(&self.parent_cards).rev() {
            *slot = row % c;
            row /= c;
        }
        out
    }
}

/// An immutable, validated discrete Bayesian network.
#[derive(Debug, Clone)]
pub struct Network {
    variables: Vec<Variable>,
    cpts: Vec<Cpt>,
    index: HashMap<String, usize>,
    topo: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables && self.cpts == other.cpts
    }
}

/// Builds and validates a network. See [`Network::build`].
pub fn build_network(variables: Vec<Variable>, cpts: Vec<CptDef>) -> Result<Network, BnError> {
    Network::build(variables, cpts)
}

impl Network {
    /// Validates variables and CPTs and caches a topological order.
    pub fn build(variables: Vec<Variable>, cpts: Vec<CptDef>) -> Result<Network, BnError> {
        if variables.is_empty() {
            return Err(BnError::EmptyNetwork);
        }
        let mut index = HashMap::with_capacity(variables.len());
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(BnError::DuplicateVariable(v.name.clone()));
            }
        }

        let mut slots: Vec<Option<Cpt>> = vec![None; variables.len()];
        for def in cpts {
            let child = *index
                .get(&def.child)
                .ok_or_else(|| BnError::UnknownVariable(def.child.clone()))?;
            if slots[child].is_some() {
                return Err(BnError::DuplicateCpt(def.child));
            }
            let mut parents = Vec::with_capacity(def.parents.len());
            for p in &def.parents {
                let id = *index.get(p).ok_or_else(|| BnError::UnknownParent {
                    child: def.child.clone(),
                    parent: p.clone(),
                })?;
                if parents.contains(&id) || id == child {
                    return Err(BnError::UnknownParent { child: def.child.clone(), parent: p.clone() });
                }
                parents.push(id);
            }
            let parent_cards: Vec<usize> = parents.iter().map(|&p| variables[p].cardinality()).collect();
            let child_card = variables[child].cardinality();
            let expected_rows: usize = parent_cards.iter().product();
            if def.rows.len() != expected_rows {
                return Err(BnError::RowLengthMismatch {
                    child: def.child,
                    expected: expected_rows,
                    found: def.rows.len(),
                    what: "rows",
                });
            }
            let mut table = Vec::with_capacity(expected_rows * child_card);
            for (r, row) in def.rows.iter().enumerate() {
                if row.len() != child_card {
                    return Err(BnError::RowLengthMismatch {
                        child: def.child,
                        expected: child_card,
                        found: row.len(),
                        what: "entries in a row",
                    });
                }
                if let Some(&bad) = row.iter().find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0) {
                    return Err(BnError::InvalidProbability { child: def.child, row: r, value: bad });
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(BnError::UnnormalizedRow { child: def.child, row: r, sum });
                }
                table.extend_from_slice(row);
            }
            slots[child] = Some(Cpt { child, parents, parent_cards, child_card, table });
        }

        let mut cpts = Vec::with_capacity(slots.len());
        for (i, slot) in slots.into_iter().enumerate() {
            cpts.push(slot.ok_or_else(|| BnError::MissingCpt(variables[i].name.clone()))?);
        }

        let mut children = vec![Vec::new(); variables.len()];
        for cpt in &cpts {
            for &p in &cpt.parents {
                children[p].push(cpt.child);
            }
        }
        let topo = topological_order(&cpts, &children).map_err(|stuck| BnError::CycleDetected {
            variables: stuck.iter().map(|&i| variables[i].name.clone()).collect(),
        })?;

        Ok(Network { variables, cpts, index, topo, children })
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: usize) -> &Variable {
        &self.variables[id]
    }

    pub fn var_id(&self, name: &str) -> Result<usize, BnError> {
        self.index.get(name).copied().ok_or_else(|| BnError::UnknownVariable(name.to_string()))
    }

    pub fn variable_by_name(&self, name: &str) -> Result<&Variable, BnError> {
        Ok(&self.variables[self.var_id(name)?])
    }

    /// Resolves a state label of a named variable to its index.
    pub fn state_index(&self, variable: &str, label: &str) -> Result<usize, BnError> {
        self.variable_by_name(variable)?
            .state_index(label)
            .ok_or_else(|| BnError::UnknownState { variable: variable.to_string(), state: label.to_string() })
    }

    pub fn cpt(&self, id: usize) -> &Cpt {
        &self.cpts[id]
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn parents(&self, id: usize) -> &[usize] {
        &self.cpts[id].parents
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.children[id]
    }

    /// Parents before children; ties broken by declaration order.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn edge_count(&self) -> usize {
        self.cpts.iter().map(|c| c.parents.len()).sum()
    }

    /// The set of variables that are ancestors of (or equal to) any seed.
    pub fn ancestral_closure(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut keep = vec![false; self.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(v) = stack.pop() {
            if keep[v] {
                continue;
            }
            keep[v] = true;
            stack.extend(self.cpts[v].parents.iter().copied());
        }
        keep
    }

    /// Converts the network back into name-based definitions.
    pub fn to_definitions(&self) -> (Vec<Variable>, Vec<CptDef>) {
        let defs = self
            .cpts
            .iter()
            .map(|c| CptDef {
                child: self.variables[c.child].name.clone(),
                parents: c.parents.iter().map(|&p| self.variables[p].name.clone()).collect(),
                rows: c.rows().map(<[f64]>::to_vec).collect(),
            })
            .collect();
        (self.variables.clone(), defs)
    }

    /// Sub-network over the variables flagged in `keep`. The caller must
    /// pass an ancestrally closed set.
    pub(crate) fn restrict(&self, keep: &[bool]) -> Network {
        let mut remap = vec![usize::MAX; self.len()];
        let mut variables = Vec::new();
        for (old, v) in self.variables.iter().enumerate() {
            if keep[old] {
                remap[old] = variables.len();
                variables.push(v.clone());
            }
        }
        let cpts: Vec<Cpt> = self
            .cpts
            .iter()
            .filter(|c| keep[c.child])
            .map(|c| Cpt {
                child: remap[c.child],
                parents: c.parents.iter().map(|&p| remap[p]).collect(),
                parent_cards: c.parent_cards.clone(),
                child_card: c.child_card,
                table: c.table.clone(),
            })
            .collect();
        let mut children = vec![Vec::new(); variables.len()];
        for cpt in &cpts {
            for &p in &cpt.parents {
                children[p].push(cpt.child);
            }
        }
        let topo = self.topo.iter().filter(|&&v| keep[v]).map(|&v| remap[v]).collect();
        let index = variables.iter().enumerate().map(|(i, v)| (v.name.clone(), i)).collect();
        Network { variables, cpts, index, topo, children }
    }
}

/// Kahn's algorithm. On failure returns the variables left on a cycle.
fn topological_order(cpts: &[Cpt], children: &[Vec<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    let n = cpts.len();
    let mut indegree: Vec<usize> = cpts.iter().map(|c| c.parents.len()).collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).filter(|&i| indegree[i] > 0).collect())
    }
}
