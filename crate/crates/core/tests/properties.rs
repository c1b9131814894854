mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use splitgrow::growth::{census_identities_hold, expected_total_weight, replica_rng, GrowthEngine, OrderedTree, UrnState};
use splitgrow::sampler::Fenwick;
use splitgrow::solver::{fixed_point_densities, residuals, solve_finite, FixedPointSystem, SolverOptions, TailClosure};
use splitgrow::twocolour::{solve_two_colour, TwoColourModel};
use splitgrow::weights::{Condition, ConditionStatus, SplittingWeights, WeightModel};

fn family() -> impl Strategy<Value = WeightModel> {
    prop_oneof![
        (0.1..3.0f64, 0.0..1.0f64).prop_map(|(a, t)| {
            // b ∈ (-a, 3): keeps w_1 ≥ 0 and w_2 > 0
            let b = -a + t * (a + 3.0);
            WeightModel::preferential(SplittingWeights::new(a, b)).unwrap()
        }),
        (-0.9..3.0f64).prop_map(|x| WeightModel::uniform(x).unwrap()),
        (0.0..0.9f64, 0.0..=1.0f64).prop_map(|(a, u)| {
            // γ ∈ [max(α/2, 0.1), 1]
            let lo = (a / 2.0).max(0.1);
            WeightModel::grafting(a, lo + u * (1.0 - lo)).unwrap()
        }),
        (any::<u64>(), 3usize..9).prop_map(|(seed, d)| common::random_table(&mut ChaCha8Rng::seed_from_u64(seed), d)),
    ]
}

fn random_table() -> impl Strategy<Value = WeightModel> {
    (any::<u64>(), 3usize..10).prop_map(|(seed, d)| common::random_table(&mut ChaCha8Rng::seed_from_u64(seed), d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_weights_are_symmetric(m in family()) {
        let top = m.d_max().unwrap_or(40);
        for i in 1..=top {
            for j in 1..=i + 1 {
                prop_assert_eq!(m.partition(j, i + 2 - j), m.partition(i + 2 - j, j));
                prop_assert!(m.partition(j, i + 2 - j) >= 0.0);
            }
        }
    }

    #[test]
    fn derived_weights_are_linear(m in family()) {
        let n = m.d_max().unwrap_or(60);
        let derived = m.derived_splitting_weights(n);
        let sw = m.splitting();
        for (idx, w) in derived.iter().enumerate() {
            let expect = sw.weight(idx + 1);
            prop_assert!((w - expect).abs() <= 1e-10 * expect.abs().max(1.0), "i = {}: {} vs {}", idx + 1, w, expect);
        }
        prop_assert_eq!(m.validate(1e-9).status(Condition::A1), ConditionStatus::Pass);
    }

    #[test]
    fn iterates_increase_and_stay_bounded(m in random_table()) {
        let sys = FixedPointSystem::new(&m, &SolverOptions::new(3, 1e-14, 100_000)).unwrap();
        let mut prev = vec![0.0; sys.truncation()];
        for next in sys.iterates().take(5_000) {
            for (p, n) in prev.iter().zip(&next) {
                prop_assert!(*n >= p - 1e-15);
            }
            let s0: f64 = next.iter().sum();
            let s1: f64 = next.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
            prop_assert!(s0 <= 1.0 + 1e-12 && s1 <= 2.0 + 1e-12);
            prev = next;
        }
    }

    #[test]
    fn finite_solve_agrees_with_iteration(m in random_table()) {
        let d = m.d_max().unwrap();
        let lin = solve_finite(&m, 1e-12).unwrap();
        let fp = fixed_point_densities(&m, &SolverOptions::new(d, 1e-14, 1_000_000)).unwrap();
        for k in 1..=d {
            prop_assert!((lin.density(k) - fp.density(k)).abs() <= 1e-10, "k = {}", k);
        }
        prop_assert!((lin.sum - 1.0).abs() <= 1e-10);
        prop_assert!((lin.first_moment - 2.0).abs() <= 1e-10);
    }

    #[test]
    fn fenwick_total_tracks_weights(ops in prop::collection::vec((0usize..64, 0.0..10.0f64, any::<bool>()), 1..200)) {
        let mut f = Fenwick::new();
        let mut shadow: Vec<f64> = Vec::new();
        for (idx, w, push) in ops {
            if push || shadow.is_empty() {
                f.push(w);
                shadow.push(w);
            } else {
                let idx = idx % shadow.len();
                f.set(idx, w);
                shadow[idx] = w;
            }
            let total: f64 = shadow.iter().sum();
            prop_assert!((f.total() - total).abs() <= 1e-9 * total.max(1.0));
            for n in 0..=shadow.len() {
                let p: f64 = shadow[..n].iter().sum();
                prop_assert!((f.prefix(n) - p).abs() <= 1e-9 * total.max(1.0));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn census_identities_hold_along_trajectories(m in family(), seed in any::<u64>(), urn in any::<bool>()) {
        let mut engine: Box<dyn GrowthEngine> = if urn {
            Box::new(UrnState::single_edge(&m).unwrap())
        } else {
            Box::new(OrderedTree::single_edge(&m).unwrap())
        };
        let mut rng = replica_rng(seed, 0);
        for _ in 0..2_000 {
            engine.step(&mut rng).unwrap();
            let t = engine.t();
            prop_assert!(census_identities_hold(engine.census(), t));
            let expect = expected_total_weight(&m, t);
            prop_assert!((engine.total_weight() - expect).abs() <= 1e-9 * expect);
        }
    }

    #[test]
    fn unbounded_solutions_are_stable_under_doubling(m in family().prop_filter("unbounded", |m| m.d_max().is_none())) {
        let coarse = fixed_point_densities(&m, &SolverOptions::new(256, 1e-13, 1_000_000)).unwrap();
        let fine = fixed_point_densities(&m, &SolverOptions::new(512, 1e-13, 1_000_000)).unwrap();
        for k in 1..=20 {
            prop_assert!((coarse.density(k) - fine.density(k)).abs() <= 1e-8, "k = {}", k);
        }
    }

    #[test]
    fn converged_residuals_are_small(m in family()) {
        let k = m.d_max().unwrap_or(512);
        let sol = fixed_point_densities(&m, &SolverOptions::new(k, 1e-14, 1_000_000)).unwrap();
        let report = residuals(&m, &sol.densities, TailClosure::Moments);
        prop_assert!(report.max_abs <= 1e-10, "max residual {}", report.max_abs);
    }

    #[test]
    fn two_colour_residuals_are_small(a in 0.3..2.0f64, t in 0.0..0.6f64) {
        let b = t * a;
        let white = WeightModel::uniform_weights(SplittingWeights::new(a - 1.5 * b, a)).unwrap();
        let model = TwoColourModel::new(a, b, white).unwrap();
        let sol = solve_two_colour(&model, &SolverOptions::default()).unwrap();
        prop_assert!(sol.max_residual <= 1e-8, "residual {}", sol.max_residual);
        prop_assert!((sol.size_sum - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn two_colour_residuals_for_grafting_whites() {
    for (alpha, a, b) in [(0.0, 1.0, 2.0 / 3.0), (0.5, 0.5, 1.0 / 6.0)] {
        let white = WeightModel::grafting(alpha, 1.0).unwrap();
        let model = TwoColourModel::new(a, b, white).unwrap();
        let sol = solve_two_colour(&model, &SolverOptions::default()).unwrap();
        assert!(sol.max_residual <= 1e-8, "α = {alpha}: residual {}", sol.max_residual);
    }
}
