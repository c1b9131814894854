//! Exact limiting densities for the named families, with tail sums and
//! asymptotes. Gamma ratios are evaluated through `ln Γ`.
//!
//! Arguments outside a formula's domain yield `NaN`.

use std::f64::consts::{E, PI};

use crate::weights::{Family, SplittingWeights, WeightModel};

#[inline]
fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Modified Bessel function of the first kind, `I_ν(z)` for `ν > -1`, `z ≥ 0`,
/// summed from its power series.
pub fn bessel_i(nu: f64, z: f64) -> f64 {
    if !(nu > -1.0) || !(z >= 0.0) {
        return f64::NAN;
    }
    if z == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let q = 0.25 * z * z;
    let mut term = (nu * (0.5 * z).ln() - lgamma(nu + 1.0)).exp();
    let mut sum = term;
    let mut m = 0.0;
    loop {
        term *= q / ((m + 1.0) * (m + nu + 1.0));
        sum += term;
        m += 1.0;
        if term < 1e-18 * sum || m > 10_000.0 {
            return sum;
        }
    }
}

/// `a_1..a_n` for preferential attachment with any linear weights:
/// `a_k = (w_2 / w_k) Π_{i ≤ k} w_i / (w_i + w_2)`.
pub fn preferential_densities(sw: SplittingWeights, n: usize) -> Vec<f64> {
    let w2 = sw.weight(2);
    let mut log_prod = 0.0;
    (1..=n)
        .map(|k| {
            let wk = sw.weight(k);
            if wk <= 0.0 {
                log_prod = f64::NEG_INFINITY;
                return 0.0;
            }
            log_prod += wk.ln() - (wk + w2).ln();
            (w2 / wk) * log_prod.exp()
        })
        .collect()
}

/// Preferential attachment with `w_i = i + x`, `x > -1`:
/// `a_k = (2+x) Γ(2x+3) Γ(k+x+1) / ((k+x) Γ(x+1) Γ(k+2x+3))`.
pub fn preferential_gamma(x: f64, k: usize) -> f64 {
    if !(x > -1.0) || k == 0 {
        return f64::NAN;
    }
    let k = k as f64;
    let log = lgamma(2.0 * x + 3.0) + lgamma(k + x + 1.0) - lgamma(x + 1.0) - lgamma(k + 2.0 * x + 3.0);
    (2.0 + x) / (k + x) * log.exp()
}

/// Leading asymptote `(2+x) Γ(2x+3) / Γ(x+1) · k^{-3-x}`.
pub fn preferential_asymptote(x: f64, k: f64) -> f64 {
    if !(x > -1.0) {
        return f64::NAN;
    }
    (2.0 + x) * (lgamma(2.0 * x + 3.0) - lgamma(x + 1.0)).exp() * k.powf(-3.0 - x)
}

/// `Σ_{k > n} a_k = Γ(2x+3) Γ(n+1+x) / (Γ(x+1) Γ(n+2x+3))`.
pub fn preferential_tail(x: f64, n: usize) -> f64 {
    if !(x > -1.0) {
        return f64::NAN;
    }
    let n = n as f64;
    (lgamma(2.0 * x + 3.0) + lgamma(n + 1.0 + x) - lgamma(x + 1.0) - lgamma(n + 2.0 * x + 3.0)).exp()
}

/// Normalizing constant of the uniform family,
/// `C(x) = e √π 2^{-3/2-x} I_{1/2+x}(1) / (2+x)`.
pub fn uniform_constant(x: f64) -> f64 {
    if !(x > -1.0) {
        return f64::NAN;
    }
    E * PI.sqrt() * 2f64.powf(-1.5 - x) * bessel_i(0.5 + x, 1.0) / (2.0 + x)
}

/// Uniform partitioning with `w_i = i + x`:
/// `a_k = 2^{k-1} Γ(k+x) (k+1+2x) / (C(x) Γ(k) Γ(k+3+2x))`.
pub fn uniform_density(x: f64, k: usize) -> f64 {
    if !(x > -1.0) || k == 0 {
        return f64::NAN;
    }
    uniform_density_with(x, k, uniform_constant(x))
}

fn uniform_density_with(x: f64, k: usize, c: f64) -> f64 {
    let kf = k as f64;
    let log = (kf - 1.0) * 2f64.ln() + lgamma(kf + x) - lgamma(kf) - lgamma(kf + 3.0 + 2.0 * x);
    log.exp() * (kf + 1.0 + 2.0 * x) / c
}

pub fn uniform_densities(x: f64, n: usize) -> Vec<f64> {
    let c = uniform_constant(x);
    (1..=n).map(|k| uniform_density_with(x, k, c)).collect()
}

/// Upper bound on `Σ_{k > n} a_k` for the uniform family, from
/// `a_{k+1} / a_k ≤ 2/k`. Needs `n ≥ 2`.
pub fn uniform_tail_bound(x: f64, n: usize) -> f64 {
    if n < 2 {
        return 1.0;
    }
    uniform_density(x, n + 1) / (1.0 - 2.0 / (n + 1) as f64)
}

/// Constant splitting weights with uniform partitioning: `a_k = e^{-1} / (k-1)!`.
/// This model lies outside the almost-sure convergence theorem.
pub fn constant_uniform_density(k: usize) -> f64 {
    if k == 0 {
        return f64::NAN;
    }
    (-1.0 - lgamma(k as f64)).exp()
}

/// Attachment-and-grafting densities for `α ∈ [0,1)`, `γ ∈ (0,1]`, `γ ≥ α/2`.
pub fn grafting_density(alpha: f64, gamma: f64, k: usize) -> f64 {
    if !(0.0..1.0).contains(&alpha) || !(gamma > 0.0 && gamma <= 1.0) || k == 0 {
        return f64::NAN;
    }
    if gamma == 1.0 {
        let a1 = (1.0 - alpha) / (2.0 - alpha);
        return if k == 1 { a1 } else { a1.powi(k as i32 - 2) / (2.0 - alpha).powi(2) };
    }
    if k == 1 {
        return (1.0 - alpha) / (1.0 + gamma - alpha);
    }
    let (p, q) = grafting_pq(alpha, gamma);
    let kf = k as f64;
    let log = lgamma((3.0 - alpha - gamma) / (1.0 - gamma)) + lgamma(kf - 2.0 + p)
        - lgamma(p)
        - lgamma(kf - 1.0 + q);
    gamma * log.exp() / ((1.0 + gamma - alpha) * (2.0 - alpha))
}

fn grafting_pq(alpha: f64, gamma: f64) -> (f64, f64) {
    ((1.0 - alpha) / (1.0 - gamma), (2.0 - alpha) / (1.0 - gamma))
}

/// `Σ_{k > n} a_k` for the grafting family, `n ≥ 1`.
pub fn grafting_tail(alpha: f64, gamma: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if gamma == 1.0 {
        let r = (1.0 - alpha) / (2.0 - alpha);
        return r.powi(n as i32 - 1) / (2.0 - alpha);
    }
    // Σ_{j≥m} Γ(j+p)/Γ(j+q+1) = Γ(m+p) / ((q-p) Γ(m+q)) with m = n - 1.
    let (p, q) = grafting_pq(alpha, gamma);
    let m = (n - 1) as f64;
    let head = gamma / ((1.0 + gamma - alpha) * (2.0 - alpha));
    let log = lgamma((3.0 - alpha - gamma) / (1.0 - gamma)) - lgamma(p) + lgamma(m + p) - lgamma(m + q);
    head * log.exp() / (q - p)
}

/// Power-law exponent `-(2-γ)/(1-γ)` of the grafting densities, `γ < 1`.
pub fn grafting_exponent(gamma: f64) -> f64 {
    -(2.0 - gamma) / (1.0 - gamma)
}

/// Geometric rate `(1-α)/(2-α)` of the grafting densities at `γ = 1`.
pub fn grafting_rate(alpha: f64) -> f64 {
    (1.0 - alpha) / (2.0 - alpha)
}

/// Two-colour model with weights `a = 1, b = 0`: white density `e°_k = 2^k k / (e² (k+2)!)`.
pub fn rna_white(k: usize) -> f64 {
    let kf = k as f64;
    (kf * 2f64.ln() + kf.ln() - 2.0 - lgamma(kf + 3.0)).exp()
}

/// Two-colour model with weights `a = 1, b = 0`: black density `e•_k = 2^k / (e² (k+1)!)`.
pub fn rna_black(k: usize) -> f64 {
    let kf = k as f64;
    (kf * 2f64.ln() - 2.0 - lgamma(kf + 2.0)).exp()
}

/// Exact `a_1..a_n` when the model belongs to a family with a known solution.
pub fn closed_form_densities(model: &WeightModel, n: usize) -> Option<Vec<f64>> {
    let sw = model.splitting();
    match model.family() {
        Family::Preferential => Some(preferential_densities(sw, n)),
        Family::Uniform => match sw.offset() {
            Some(x) if sw.a > 0.0 => Some(uniform_densities(x, n)),
            _ => Some((1..=n).map(constant_uniform_density).collect()),
        },
        Family::Grafting { alpha, gamma } if gamma > 0.0 => {
            Some((1..=n).map(|k| grafting_density(alpha, gamma, k)).collect())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_half_order_is_elementary() {
        for z in [0.1, 1.0, 2.5] {
            let exact = (2.0 / (PI * z)).sqrt() * f64::sinh(z);
            assert!((bessel_i(0.5, z) - exact).abs() < 1e-14 * exact);
        }
        assert!((bessel_i(0.0, 1.0) - 1.266_065_877_752_008_4).abs() < 1e-15);
    }

    #[test]
    fn uniform_constant_at_zero() {
        assert!((uniform_constant(0.0) - (E * E - 1.0) / 8.0).abs() < 1e-14);
    }

    #[test]
    fn preferential_forms_agree() {
        for x in [-0.5, 0.0, 0.7, 3.0] {
            let prod = preferential_densities(SplittingWeights::shifted(x), 60);
            for k in 1..=60 {
                let g = preferential_gamma(x, k);
                assert!((prod[k - 1] - g).abs() < 1e-13 * g.max(1e-300) + 1e-16, "x={x} k={k}");
            }
        }
        assert!((preferential_gamma(0.0, 3) - 1.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn preferential_tail_sums_to_one() {
        for x in [-0.5, 0.0, 2.0] {
            assert!((preferential_tail(x, 0) - 1.0).abs() < 1e-13);
            let head: f64 = (1..=10).map(|k| preferential_gamma(x, k)).sum();
            assert!((head + preferential_tail(x, 10) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn uniform_x0_matches_factorial_form() {
        for k in 1..=30 {
            let kf = k as f64;
            let exact = (((kf + 2.0) * 2f64.ln() + (kf + 1.0).ln() - lgamma(kf + 3.0)).exp()) / (E * E - 1.0);
            assert!((uniform_density(0.0, k) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_sums_and_tail_bound() {
        for x in [-0.5, 0.0, 1.5] {
            let a = uniform_densities(x, 80);
            assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12, "x={x}");
            let moment: f64 = a.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
            assert!((moment - 2.0).abs() < 1e-12);
            let n = 5;
            let tail: f64 = a[n..].iter().sum();
            assert!(tail <= uniform_tail_bound(x, n));
        }
    }

    #[test]
    fn constant_weights_sum_rules() {
        let s0: f64 = (1..60).map(constant_uniform_density).sum();
        let s1: f64 = (1..60).map(|k| k as f64 * constant_uniform_density(k)).sum();
        assert!((s0 - 1.0).abs() < 1e-14 && (s1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn grafting_random_recursive() {
        for k in 1..=40 {
            assert!((grafting_density(0.0, 1.0, k) - 0.5f64.powi(k as i32)).abs() < 1e-16);
        }
    }

    #[test]
    fn grafting_tails_close() {
        for (alpha, gamma) in [(0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (0.3, 0.8)] {
            for n in [1, 2, 7] {
                let head: f64 = (1..=n).map(|k| grafting_density(alpha, gamma, k)).sum();
                let total = head + grafting_tail(alpha, gamma, n);
                assert!((total - 1.0).abs() < 1e-12, "({alpha},{gamma}) n={n}: {total}");
            }
        }
    }

    #[test]
    fn grafting_power_law() {
        let (alpha, gamma) = (0.5, 0.5);
        let k = 1e6 as usize;
        let slope = (grafting_density(alpha, gamma, 2 * k) / grafting_density(alpha, gamma, k)).ln() / 2f64.ln();
        assert!((slope - grafting_exponent(gamma)).abs() < 1e-5);
    }

    #[test]
    fn rna_forms_sum_rule() {
        let total: f64 = (1..60).map(|k| 3.0 * rna_white(k) + 2.0 * rna_black(k)).sum();
        assert!((total - 1.0).abs() < 1e-14, "{total}");
    }
}
