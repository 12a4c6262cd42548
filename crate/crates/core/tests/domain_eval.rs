use std::sync::OnceLock;

use frictionnet::bn::{joint_probability, posterior_enumeration, posterior_ve, Assignment, Evidence, Network};
use frictionnet::eval::{
    enumerate_domain, enumerate_domain_clamped, evaluate_subsets, parse_report, render_report, EvalOptions,
    EvalResult, EvalSpec, SensorSubset,
};
use frictionnet::metrics::{hellinger, wasserstein1, GroundTruth};
use frictionnet::roadnet::{names, RoadModel};

fn network() -> &'static Network {
    static NET: OnceLock<Network> = OnceLock::new();
    NET.get_or_init(|| RoadModel::bundled().network)
}

fn full_sweep() -> &'static EvalResult {
    static RESULT: OnceLock<EvalResult> = OnceLock::new();
    RESULT.get_or_init(|| {
        let options = EvalOptions { memoize: true, weighted: true, ..Default::default() };
        evaluate_subsets(network(), &EvalSpec::road(), &SensorSubset::power_set(5), &options).unwrap()
    })
}

fn subset(label: &str) -> SensorSubset {
    SensorSubset::parse(label, &EvalSpec::road().sensors).unwrap()
}

#[test]
fn positive_combinations_match_a_full_grid_scan() {
    let net = network();
    let cards: Vec<usize> = net.variables().iter().map(|v| v.cardinality()).collect();
    let mut states = vec![0; cards.len()];
    let mut scanned = 0usize;
    'grid: loop {
        if joint_probability(net, &Assignment::new(states.clone())).unwrap() > 0.0 {
            scanned += 1;
        }
        for i in 0..cards.len() {
            states[i] += 1;
            if states[i] < cards[i] {
                continue 'grid;
            }
            states[i] = 0;
        }
        break;
    }
    assert_eq!(enumerate_domain(net).count(), scanned);
}

#[test]
fn yielded_combinations_are_exact_and_positive() {
    let net = network();
    let (r, w, mu) = (net.var_id("R").unwrap(), net.var_id("W").unwrap(), net.var_id("mu_max").unwrap());
    let mut mass = 0.0;
    for c in enumerate_domain(net) {
        let p = joint_probability(net, &c.assignment).unwrap();
        assert!(p > 0.0);
        assert!((p - c.probability).abs() <= 1e-15 * p.max(1e-300) + 1e-300);
        let s = c.assignment.states();
        assert!(!(s[r] == 0 && s[w] == 0 && s[mu] == 0), "Asphalt/Dry/mu1 has zero probability");
        mass += c.probability;
    }
    assert!((mass - 1.0).abs() < 1e-9);
}

#[test]
fn memoized_and_direct_sweeps_agree_on_asphalt() {
    let clamp = Evidence::from_labels(network(), [("R", "Asphalt")]).unwrap();
    let subsets = [subset(""), subset("S_RCS1"), subset("S_C;S_FO"), subset("S_C;S_T;S_RCS1;S_RCS2;S_FO")];
    let spec = EvalSpec::road();
    let memo = EvalOptions { memoize: true, weighted: true, clamp: clamp.clone() };
    let direct = EvalOptions { memoize: false, weighted: true, clamp };
    let a = evaluate_subsets(network(), &spec, &subsets, &memo).unwrap();
    let b = evaluate_subsets(network(), &spec, &subsets, &direct).unwrap();
    assert_eq!(a.rows.len(), 12);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!((x.subset, &x.variable, x.n), (y.subset, &y.variable, y.n));
        assert!((x.mean - y.mean).abs() < 1e-12, "{x:?} vs {y:?}");
        assert!((x.weighted_mean.unwrap() - y.weighted_mean.unwrap()).abs() < 1e-12);
    }
}

/// Mean over only the variables that matter for `{S_RCS1}` and `W`, each
/// partial assignment weighted by how many full assignments extend it.
#[test]
fn barren_dimensions_collapse() {
    let net = network();
    let id = |n: &str| net.var_id(n).unwrap();
    let cpt_nonzero = |var: &str, parents: &[usize]| {
        let cpt = net.cpt(id(var));
        cpt.row(cpt.row_index(parents)).iter().filter(|&&p| p > 0.0).count()
    };
    // pavement fixed to asphalt keeps the loop small
    let r = 0;
    let mut sum = 0.0;
    let mut count = 0usize;
    for st in 0..4 {
        for t in 0..4 {
            for p in 0..2 {
                for w in 0..3 {
                    for rcs in 0..3 {
                        let partial = [(id("S_T"), st), (id("T"), t), (id("P"), p), (id("W"), w), (id("S_RCS1"), rcs)];
                        let mut states = vec![0; net.len()];
                        states[id("R")] = r;
                        for (v, s) in partial {
                            states[v] = s;
                        }
                        let positive = ["T", "W", "S_RCS1"].iter().all(|v| net.cpt(id(v)).probability_in(&states) > 0.0);
                        if !positive {
                            continue;
                        }
                        let mu_row = net.cpt(id("mu_max"));
                        let fo_completions: usize = (0..8)
                            .filter(|&m| mu_row.row(mu_row.row_index(&[r, w]))[m] > 0.0)
                            .map(|m| cpt_nonzero("S_FO", &[m]))
                            .sum();
                        let dup = fo_completions * cpt_nonzero("S_C", &[r, w]) * cpt_nonzero("S_RCS2", &[r, w]);
                        let ev = Evidence::new().with("S_RCS1", rcs);
                        let post = posterior_enumeration(net, "W", &ev).unwrap();
                        let truth = GroundTruth::new("W", post.scale(), 3, w);
                        sum += dup as f64 * hellinger(truth.distribution(), &post).unwrap();
                        count += dup;
                    }
                }
            }
        }
    }
    let clamp = Evidence::new().with("R", 0);
    // clamping only restricts which combinations are scored; the pavement
    // is not part of the evidence
    let opts = EvalOptions { memoize: true, weighted: false, clamp };
    let result = evaluate_subsets(net, &EvalSpec::road(), &[subset("S_RCS1")], &opts).unwrap();
    let row = result.get(subset("S_RCS1"), "W").unwrap();
    assert_eq!(row.n as usize, count);
    assert!((row.mean - sum / count as f64).abs() < 1e-12);
}

#[test]
fn empty_subset_is_the_prior_baseline() {
    let net = network();
    let result = full_sweep();
    let empty = SensorSubset::empty();
    let mut per_r = [0usize; 3];
    let mut per_mu = [0usize; 8];
    let (r, mu) = (net.var_id("R").unwrap(), net.var_id("mu_max").unwrap());
    for c in enumerate_domain(net) {
        per_r[c.assignment.get(r)] += 1;
        per_mu[c.assignment.get(mu)] += 1;
    }
    let n: usize = per_r.iter().sum();
    let prior_r = posterior_ve(net, "R", &Evidence::new()).unwrap();
    let prior_mu = posterior_ve(net, "mu_max", &Evidence::new()).unwrap();
    let expect_r: f64 = (0..3)
        .map(|k| per_r[k] as f64 * hellinger(GroundTruth::new("R", prior_r.scale(), 3, k).distribution(), &prior_r).unwrap())
        .sum::<f64>()
        / n as f64;
    let expect_mu: f64 = (0..8)
        .map(|k| {
            per_mu[k] as f64
                * wasserstein1(GroundTruth::new("mu_max", prior_mu.scale(), 8, k).distribution(), &prior_mu).unwrap()
        })
        .sum::<f64>()
        / n as f64;
    assert!((result.get(empty, "R").unwrap().mean - expect_r).abs() < 1e-12);
    assert!((result.get(empty, "mu_max").unwrap().mean - expect_mu).abs() < 1e-12);
    // a uniform prior over three states is sqrt(1 - sqrt(1/3)) from any point mass
    assert!((expect_r - (1.0 - (1.0f64 / 3.0).sqrt()).sqrt()).abs() < 1e-12);
}

#[test]
fn report_shape_and_round_trip() {
    let result = full_sweep();
    assert_eq!(result.rows.len(), 96);
    let n = result.rows[0].n;
    assert!(result.rows.iter().all(|r| r.n == n));
    let order: Vec<(u32, &str)> = result.rows.iter().map(|r| (r.subset.0, r.variable.as_str())).collect();
    for (i, (mask, var)) in order.iter().enumerate() {
        assert_eq!(*mask, (i / 3) as u32);
        assert_eq!(*var, names::TARGETS[i % 3]);
    }
    let text = render_report(result);
    assert_eq!(text.lines().count(), 97);
    assert!(text.starts_with("subset,variable,metric,mean,n,weighted_mean\n,R,hellinger,"));
    let back = parse_report(&text, &EvalSpec::road().sensors).unwrap();
    assert_eq!(&back, result);
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let subsets = SensorSubset::power_set(5);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = single
        .install(|| evaluate_subsets(network(), &EvalSpec::road(), &subsets, &EvalOptions::memoized()))
        .unwrap();
    let parallel = evaluate_subsets(network(), &EvalSpec::road(), &subsets, &EvalOptions::memoized()).unwrap();
    assert_eq!(render_report(&serial), render_report(&parallel));
}

#[test]
fn second_rcs_does_not_hurt_weather_much() {
    let r = full_sweep();
    let single = r.get(subset("S_RCS1"), "W").unwrap().mean;
    let dual = r.get(subset("S_RCS1;S_RCS2"), "W").unwrap().mean;
    assert!(dual <= single + 0.05, "{dual} vs {single}");
    // the two units share a CPT, so either alone scores the same
    assert_eq!(single, r.get(subset("S_RCS2"), "W").unwrap().mean);
}

#[test]
fn clamped_enumeration_only_yields_the_clamp() {
    let clamp = Evidence::from_labels(network(), [("R", "Cobblestone"), ("P", "false")]).unwrap();
    let (r, p) = (network().var_id("R").unwrap(), network().var_id("P").unwrap());
    let mut n = 0;
    for c in enumerate_domain_clamped(network(), &clamp).unwrap() {
        assert_eq!((c.assignment.get(r), c.assignment.get(p)), (2, 1));
        n += 1;
    }
    assert!(n > 0);
}
