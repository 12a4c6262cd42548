use super::{Evidence, Network};

/// Removes barren nodes: variables that are neither the query, observed,
/// nor an ancestor of either. Iteratively deleting unobserved non-query
/// leaves ends at exactly this ancestral set.
///
/// Names that do not exist in the network are ignored.
pub fn prune_barren(network: &Network, query: &str, evidence: &Evidence) -> Network {
    let seeds = std::iter::once(query)
        .chain(evidence.iter().map(|(name, _)| name))
        .filter_map(|name| network.var_id(name).ok());
    let keep = network.ancestral_closure(seeds);
    if keep.iter().all(|&k| k) {
        return network.clone();
    }
    network.restrict(&keep)
}
