use std::collections::BTreeSet;

use super::factor::Factor;
use super::{Assignment, BnError, Distribution, Evidence, Network};

/// Strategy for choosing the order in which hidden variables are summed out.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum EliminationOrder {
    /// Greedily eliminate the variable with the fewest neighbours in the
    /// current interaction graph; the lowest id wins ties.
    #[default]
    MinDegree,
    /// A fixed order. Must name every unobserved, non-query variable exactly once.
    Explicit(Vec<String>),
}

/// Product of every node's conditional probability under a complete assignment.
pub fn joint_probability(network: &Network, assignment: &Assignment) -> Result<f64, BnError> {
    if assignment.len() != network.len() {
        return Err(BnError::IncompleteAssignment { expected: network.len(), found: assignment.len() });
    }
    let states = assignment.states();
    for (id, &s) in states.iter().enumerate() {
        let card = network.variable(id).cardinality();
        if s >= card {
            return Err(BnError::StateOutOfRange {
                variable: network.variable(id).name().to_string(),
                index: s,
                cardinality: card,
            });
        }
    }
    let mut p = 1.0;
    for cpt in network.cpts() {
        p *= cpt.probability_in(states);
        if p == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(p)
}

fn query_setup(network: &Network, query: &str, evidence: &Evidence) -> Result<(usize, Vec<Option<usize>>), BnError> {
    let q = network.var_id(query)?;
    let observed = evidence.resolve(network)?;
    if observed[q].is_some() {
        return Err(BnError::QueryIsEvidence(query.to_string()));
    }
    Ok((q, observed))
}

/// Posterior of `query` by summing the joint over every completion of the
/// evidence. Exponential in the number of hidden variables; this is the
/// reference the other engines are checked against.
pub fn posterior_enumeration(network: &Network, query: &str, evidence: &Evidence) -> Result<Distribution, BnError> {
    let (q, observed) = query_setup(network, query, evidence)?;
    let free: Vec<usize> = (0..network.len()).filter(|&v| observed[v].is_none()).collect();
    let cards: Vec<usize> = free.iter().map(|&v| network.variable(v).cardinality()).collect();
    let mut states: Vec<usize> = observed.iter().map(|o| o.unwrap_or(0)).collect();
    let mut counter = vec![0usize; free.len()];
    let total: usize = cards.iter().product();
    let qvar = network.variable(q);
    let mut weights = vec![0.0; qvar.cardinality()];
    for _ in 0..total {
        for (&v, &s) in free.iter().zip(&counter) {
            states[v] = s;
        }
        let mut p = 1.0;
        for cpt in network.cpts() {
            p *= cpt.probability_in(&states);
            if p == 0.0 {
                break;
            }
        }
        weights[states[q]] += p;
        for k in (0..counter.len()).rev() {
            counter[k] += 1;
            if counter[k] < cards[k] {
                break;
            }
            counter[k] = 0;
        }
    }
    Distribution::from_weights(qvar.name(), qvar.scale(), weights)
}

/// Posterior of `query` by variable elimination with the min-degree order.
pub fn posterior_ve(network: &Network, query: &str, evidence: &Evidence) -> Result<Distribution, BnError> {
    posterior_ve_with_order(network, query, evidence, &EliminationOrder::MinDegree)
}

/// Posterior of `query` by variable elimination with a chosen order.
///
/// Only the ancestral closure of the query and evidence enters the
/// computation; everything else is barren and sums to one.
pub fn posterior_ve_with_order(
    network: &Network,
    query: &str,
    evidence: &Evidence,
    order: &EliminationOrder,
) -> Result<Distribution, BnError> {
    let (q, observed) = query_setup(network, query, evidence)?;
    let relevant = network.ancestral_closure(
        std::iter::once(q).chain((0..network.len()).filter(|&v| observed[v].is_some())),
    );

    let mut factors: Vec<Factor> = (0..network.len())
        .filter(|&v| relevant[v])
        .map(|v| Factor::from_cpt(network.cpt(v), &observed))
        .collect();

    let hidden: Vec<usize> = match order {
        EliminationOrder::MinDegree => Vec::new(),
        EliminationOrder::Explicit(names) => explicit_order(network, q, &observed, names)?
            .into_iter()
            .filter(|&v| relevant[v])
            .collect(),
    };

    match order {
        EliminationOrder::MinDegree => {
            let mut remaining: BTreeSet<usize> =
                (0..network.len()).filter(|&v| relevant[v] && v != q && observed[v].is_none()).collect();
            while !remaining.is_empty() {
                let next = *remaining
                    .iter()
                    .min_by_key(|&&v| (neighbour_count(&factors, v), v))
                    .expect("non-empty");
                remaining.remove(&next);
                eliminate(&mut factors, next);
            }
        }
        EliminationOrder::Explicit(_) => {
            for v in hidden {
                eliminate(&mut factors, v);
            }
        }
    }

    let result = factors.iter().fold(Factor::scalar(1.0), |acc, f| acc.product(f));
    debug_assert_eq!(result.vars, vec![q]);
    let qvar = network.variable(q);
    Distribution::from_weights(qvar.name(), qvar.scale(), result.values)
}

fn explicit_order(
    network: &Network,
    q: usize,
    observed: &[Option<usize>],
    names: &[String],
) -> Result<Vec<usize>, BnError> {
    let mut seen = vec![false; network.len()];
    let mut ids = Vec::with_capacity(names.len());
    for name in names {
        let id = network.var_id(name)?;
        if id == q || observed[id].is_some() {
            return Err(BnError::InvalidEliminationOrder(format!("`{name}` is the query or observed")));
        }
        if seen[id] {
            return Err(BnError::InvalidEliminationOrder(format!("`{name}` listed twice")));
        }
        seen[id] = true;
        ids.push(id);
    }
    if let Some(missing) = (0..network.len()).find(|&v| v != q && observed[v].is_none() && !seen[v]) {
        return Err(BnError::InvalidEliminationOrder(format!(
            "hidden variable `{}` not listed",
            network.variable(missing).name()
        )));
    }
    Ok(ids)
}

fn neighbour_count(factors: &[Factor], var: usize) -> usize {
    let mut nb = BTreeSet::new();
    for f in factors.iter().filter(|f| f.contains(var)) {
        nb.extend(f.vars.iter().copied().filter(|&v| v != var));
    }
    nb.len()
}

fn eliminate(factors: &mut Vec<Factor>, var: usize) {
    let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.drain(..).partition(|f| f.contains(var));
    *factors = rest;
    if touching.is_empty() {
        return;
    }
    let product = touching.iter().skip(1).fold(touching[0].clone(), |acc, f| acc.product(f));
    factors.push(product.sum_out(var));
}
