#![allow(dead_code)]

use rand::Rng;
use splitgrow::weights::{SplittingWeights, WeightModel};

/// A bounded table satisfying linearity, leaf positivity below `d` and a
/// non-leaf split at `d`. For each parent degree `p` the mass `2 w_p / p` is
/// spread at random over the admissible symmetric pairs.
pub fn random_table<R: Rng>(rng: &mut R, d: usize) -> WeightModel {
    assert!(d >= 3);
    let a: f64 = rng.gen_range(0.2..2.0);
    let b: f64 = rng.gen_range(-0.9 * a..2.0);
    let sw = SplittingWeights::new(a, b);
    let mut entries = Vec::new();
    for p in 1..=d {
        // unordered pairs {j, p + 2 - j}, j ≤ p + 2 - j, both ≤ d
        let pairs: Vec<usize> = (1..=(p + 2) / 2).filter(|&j| p + 2 - j <= d).collect();
        let mut u: Vec<f64> = pairs
            .iter()
            .map(|&j| {
                let required = j == 1 || (p == d && j == pairs[0]);
                if required || rng.gen_bool(0.7) {
                    rng.gen_range(0.05..1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let ordered: f64 = pairs
            .iter()
            .zip(&u)
            .map(|(&j, &x)| if 2 * j == p + 2 { x } else { 2.0 * x })
            .sum();
        let scale = 2.0 * sw.weight(p) / p as f64 / ordered;
        for x in &mut u {
            *x *= scale;
        }
        for (&j, &x) in pairs.iter().zip(&u) {
            if x > 0.0 {
                entries.push((j, p + 2 - j, x));
            }
        }
    }
    WeightModel::table(d, &entries).expect("generated table is consistent")
}

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// The hand-solved bounded example with stationary densities (1/4, 1/2, 1/4).
pub fn hand_table() -> WeightModel {
    WeightModel::table(3, &[(1, 2, 1.0), (1, 3, 0.5), (2, 2, 1.0), (2, 3, 1.0)]).unwrap()
}
