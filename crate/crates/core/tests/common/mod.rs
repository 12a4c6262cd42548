//! Helpers shared by the integration tests.
#![allow(dead_code)]

use frictionnet::bn::{build_network, joint_probability, Assignment, CptDef, Evidence, Network, Variable};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random DAG with up to `max_nodes` nodes of 2..=`max_states` states.
/// Nodes only take parents among earlier nodes (at most three), and about a
/// tenth of the CPT entries are zero.
pub fn random_network<R: Rng>(rng: &mut R, max_nodes: usize, max_states: usize) -> Network {
    let n = rng.gen_range(1..=max_nodes);
    let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=max_states)).collect();
    let names: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
    let variables =
        (0..n).map(|i| Variable::new(names[i].clone(), (0..cards[i]).map(|s| format!("s{s}"))).unwrap()).collect();
    let mut cpts = Vec::new();
    for i in 0..n {
        let mut candidates: Vec<usize> = (0..i).collect();
        candidates.shuffle(rng);
        let k = rng.gen_range(0..=i.min(3));
        let mut parents = candidates[..k].to_vec();
        parents.sort_unstable();
        let rows: usize = parents.iter().map(|&p| cards[p]).product();
        let table = (0..rows)
            .map(|_| {
                let mut w: Vec<f64> =
                    (0..cards[i]).map(|_| if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.01..1.0) }).collect();
                if w.iter().all(|&x| x == 0.0) {
                    w[0] = 1.0;
                }
                let s: f64 = w.iter().sum();
                w.iter().map(|x| x / s).collect()
            })
            .collect();
        let parent_names: Vec<&str> = parents.iter().map(|&p| names[p].as_str()).collect();
        cpts.push(CptDef::new(names[i].clone(), &parent_names, table));
    }
    build_network(variables, cpts).unwrap()
}

/// A query variable and evidence on a random subset of the other variables.
pub fn random_query<R: Rng>(rng: &mut R, net: &Network) -> (String, Evidence) {
    let q = rng.gen_range(0..net.len());
    let mut ev = Evidence::new();
    for (i, v) in net.variables().iter().enumerate() {
        if i != q && rng.gen_bool(0.4) {
            ev.insert(v.name(), rng.gen_range(0..v.cardinality()));
        }
    }
    (net.variable(q).name().to_string(), ev)
}

/// Posterior by summing the joint over every complete assignment; `None`
/// when the evidence has zero probability.
pub fn brute_force_posterior(net: &Network, query: &str, evidence: &Evidence) -> Option<Vec<f64>> {
    let cards: Vec<usize> = net.variables().iter().map(|v| v.cardinality()).collect();
    let fixed = evidence.resolve(net).unwrap();
    let q = net.var_id(query).unwrap();
    let mut weights = vec![0.0; cards[q]];
    let mut states = vec![0; cards.len()];
    loop {
        if states.iter().zip(&fixed).all(|(s, f)| f.is_none_or(|f| f == *s)) {
            weights[states[q]] += joint_probability(net, &Assignment::new(states.clone())).unwrap();
        }
        let mut i = 0;
        loop {
            if i == cards.len() {
                let total: f64 = weights.iter().sum();
                return (total > 0.0).then(|| weights.iter().map(|w| w / total).collect());
            }
            states[i] += 1;
            if states[i] < cards[i] {
                break;
            }
            states[i] = 0;
            i += 1;
        }
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
