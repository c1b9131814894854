//! Goodness of fit of the samplers against their exact laws.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use splitgrow::growth::{replica_rng, GrowthEngine, OrderedTree, SplitLaw, UrnState};
use splitgrow::sampler::Fenwick;
use splitgrow::weights::{SplittingWeights, WeightModel};

const DRAWS: usize = 1_000_000;
const SIGNIFICANCE: f64 = 1e-3;

/// Pearson test of `counts` against `probs`; cells with zero probability must be empty.
fn assert_fits(label: &str, counts: &[u64], probs: &[f64]) {
    let n: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        if p == 0.0 {
            assert_eq!(c, 0, "{label}: draw from a zero-probability cell");
            continue;
        }
        let e = p * n as f64;
        stat += (c as f64 - e).powi(2) / e;
        cells += 1;
    }
    assert!(cells >= 2, "{label}: degenerate law");
    let p_value = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
    assert!(p_value > SIGNIFICANCE, "{label}: χ² = {stat:.2} on {} dof, p = {p_value:.2e}", cells - 1);
}

#[test]
fn fenwick_draws_follow_weights() {
    let weights = [0.5, 0.0, 3.0, 1.25, 0.0, 7.0, 0.01, 2.0];
    let f = Fenwick::from_weights(&weights);
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mut counts = vec![0u64; weights.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..DRAWS {
        counts[f.sample(&mut rng).unwrap()] += 1;
    }
    assert_fits("fenwick", &counts, &probs);
}

#[test]
fn tree_vertex_draws_follow_splitting_weights() {
    let m = WeightModel::preferential(SplittingWeights::new(1.0, 0.5)).unwrap();
    let mut tree = OrderedTree::single_edge(&m).unwrap();
    let mut rng = replica_rng(12, 0);
    for _ in 0..40 {
        tree.step(&mut rng).unwrap();
    }
    let degrees = tree.degrees();
    let probs: Vec<f64> = degrees.iter().map(|&d| m.split_weight(d) / tree.total_weight()).collect();
    let mut counts = vec![0u64; degrees.len()];
    for _ in 0..DRAWS {
        counts[tree.sample_vertex(&mut rng).unwrap() as usize] += 1;
    }
    assert_fits("tree vertices", &counts, &probs);
}

#[test]
fn urn_degree_draws_follow_class_weights() {
    let m = WeightModel::uniform(0.0).unwrap();
    let mut urn = UrnState::single_edge(&m).unwrap();
    let mut rng = replica_rng(13, 0);
    for _ in 0..200 {
        urn.step(&mut rng).unwrap();
    }
    let census = urn.census().to_vec();
    let probs: Vec<f64> =
        census.iter().enumerate().map(|(k, &n)| m.split_weight(k) * n as f64 / urn.total_weight()).collect();
    let mut counts = vec![0u64; census.len()];
    for _ in 0..DRAWS {
        counts[urn.sample_vertex(&mut rng).unwrap()] += 1;
    }
    assert_fits("urn classes", &counts, &probs);
}

#[test]
fn split_sizes_follow_partition_weights() {
    let cases = [
        (WeightModel::uniform(0.7).unwrap(), 6),
        (WeightModel::grafting(0.4, 0.6).unwrap(), 5),
        (WeightModel::preferential(SplittingWeights::new(1.0, 0.0)).unwrap(), 4),
        (common::hand_table(), 3),
    ];
    for (m, i) in cases {
        let mut law = SplitLaw::new();
        // independent reference: w_{k,i+2-k} normalized
        let raw: Vec<f64> = (1..=i + 1).map(|k| m.partition(k, i + 2 - k)).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|w| w / total).collect();
        for (p, q) in probs.iter().zip(law.probabilities(&m, i)) {
            assert!((p - q).abs() < 1e-14);
        }
        let mut counts = vec![0u64; i + 1];
        let mut rng = ChaCha8Rng::seed_from_u64(14 + i as u64);
        for _ in 0..DRAWS {
            counts[law.sample(&m, i, &mut rng).unwrap() - 1] += 1;
        }
        assert_fits(&format!("{:?} degree {i}", m.family()), &counts, &probs);
    }
}
