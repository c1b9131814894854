mod common;

use splitgrow::growth::{replica_rng, GrowthEngine, OrderedTree, UrnState};
use splitgrow::weights::{SplittingWeights, WeightModel};

fn models() -> Vec<WeightModel> {
    vec![
        WeightModel::preferential(SplittingWeights::new(1.0, 0.0)).unwrap(),
        WeightModel::uniform(0.5).unwrap(),
        WeightModel::grafting(0.3, 0.7).unwrap(),
        common::hand_table(),
    ]
}

#[test]
fn urn_replays_tree_census() {
    for (n, m) in models().iter().enumerate() {
        for seed in 0..10 {
            let mut tree = OrderedTree::single_edge(m).unwrap();
            let mut urn = UrnState::single_edge(m).unwrap();
            let mut decisions = replica_rng(seed, n as u64);
            let mut arrangement = replica_rng(seed, 100 + n as u64);
            for _ in 0..5_000 {
                let ev = tree.step_with(&mut decisions, &mut arrangement).unwrap();
                urn.apply_split(ev.parent_degree, ev.k).unwrap();
                assert_eq!(tree.census(), urn.census());
                assert_eq!(tree.t(), urn.t());
                assert!((tree.total_weight() - urn.total_weight()).abs() <= 1e-9 * tree.total_weight());
            }
            tree.check_structure().unwrap();
        }
    }
}

#[test]
fn arrangement_does_not_affect_degrees() {
    for m in models() {
        for seed in 0..10 {
            let mut a = OrderedTree::single_edge(&m).unwrap();
            let mut b = OrderedTree::single_edge(&m).unwrap();
            let (mut da, mut db) = (replica_rng(seed, 0), replica_rng(seed, 0));
            let (mut ra, mut rb) = (replica_rng(seed, 1), replica_rng(seed, 2));
            for _ in 0..3_000 {
                a.step_with(&mut da, &mut ra).unwrap();
                b.step_with(&mut db, &mut rb).unwrap();
            }
            assert_eq!(a.degrees(), b.degrees());
            a.check_structure().unwrap();
            b.check_structure().unwrap();
        }
    }
}

#[test]
fn urn_from_census_continues_consistently() {
    let m = WeightModel::uniform(0.0).unwrap();
    let mut tree = OrderedTree::single_edge(&m).unwrap();
    let mut rng = replica_rng(3, 0);
    for _ in 0..500 {
        tree.step(&mut rng).unwrap();
    }
    let counts: Vec<u64> = tree.census()[1..].to_vec();
    let mut urn = UrnState::from_census(&m, &counts).unwrap();
    assert_eq!(urn.t(), tree.t());
    assert_eq!(urn.census(), tree.census());
    for _ in 0..500 {
        urn.step(&mut rng).unwrap();
    }
    assert_eq!(urn.t(), 1_002);
}
