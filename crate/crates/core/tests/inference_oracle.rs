mod common;

use common::{brute_force_posterior, max_abs_diff, random_network, random_query};
use frictionnet::bn::{
    posterior_enumeration, posterior_ve, posterior_ve_with_order, prune_barren, BnError, EliminationOrder,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ve_agrees_with_enumeration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, 8, 4);
        let (q, ev) = random_query(&mut rng, &net);
        match (posterior_ve(&net, &q, &ev), posterior_enumeration(&net, &q, &ev)) {
            (Ok(a), Ok(b)) => {
                prop_assert!(max_abs_diff(a.probabilities(), b.probabilities()) < 1e-9);
                let total: f64 = a.probabilities().iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-9);
            }
            (Err(BnError::ZeroProbabilityEvidence), Err(BnError::ZeroProbabilityEvidence)) => {}
            (a, b) => prop_assert!(false, "disagreement: {:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn enumeration_matches_brute_force_joint(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, 6, 3);
        let (q, ev) = random_query(&mut rng, &net);
        match (posterior_enumeration(&net, &q, &ev), brute_force_posterior(&net, &q, &ev)) {
            (Ok(a), Some(b)) => prop_assert!(max_abs_diff(a.probabilities(), &b) < 1e-12),
            (Err(BnError::ZeroProbabilityEvidence), None) => {}
            (a, b) => prop_assert!(false, "disagreement: {:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn elimination_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, 7, 3);
        let (q, ev) = random_query(&mut rng, &net);
        let mut hidden: Vec<String> = net
            .variables()
            .iter()
            .map(|v| v.name().to_string())
            .filter(|n| *n != q && !ev.contains(n))
            .collect();
        let default = posterior_ve(&net, &q, &ev);
        for _ in 0..3 {
            hidden.shuffle(&mut rng);
            let other = posterior_ve_with_order(&net, &q, &ev, &EliminationOrder::Explicit(hidden.clone()));
            match (&default, other) {
                (Ok(a), Ok(b)) => prop_assert!(max_abs_diff(a.probabilities(), b.probabilities()) < 1e-12),
                (Err(a), Err(b)) => prop_assert_eq!(a, &b),
                (a, b) => prop_assert!(false, "disagreement: {:?} vs {:?}", a, b),
            }
        }
    }

    #[test]
    fn pruning_barren_nodes_keeps_the_posterior(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, 8, 3);
        let (q, ev) = random_query(&mut rng, &net);
        let pruned = prune_barren(&net, &q, &ev);
        prop_assert!(pruned.len() <= net.len());
        match (posterior_enumeration(&net, &q, &ev), posterior_enumeration(&pruned, &q, &ev)) {
            (Ok(a), Ok(b)) => prop_assert!(max_abs_diff(a.probabilities(), b.probabilities()) < 1e-12),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "disagreement: {:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn posterior_is_invariant_to_irrelevant_evidence_order(seed in any::<u64>()) {
        // evidence is a map; building it in another order changes nothing
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, 6, 3);
        let (q, ev) = random_query(&mut rng, &net);
        let mut pairs: Vec<(String, usize)> = ev.iter().map(|(k, v)| (k.to_string(), v)).collect();
        pairs.reverse();
        let rebuilt = pairs.into_iter().collect();
        prop_assert_eq!(posterior_ve(&net, &q, &ev), posterior_ve(&net, &q, &rebuilt));
    }
}
