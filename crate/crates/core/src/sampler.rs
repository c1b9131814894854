//! Growable Fenwick tree for weighted sampling with point updates.

use rand::Rng;

#[derive(Debug, Clone, Default)]
pub struct Fenwick {
    weights: Vec<f64>,
    tree: Vec<f64>,
}

#[inline]
fn lsb(i: usize) -> usize {
    i & i.wrapping_neg()
}

impl Fenwick {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_weights(weights: &[f64]) -> Self {
        let mut f = Self::with_capacity(weights.len());
        for &w in weights {
            f.push(w);
        }
        f
    }

    pub fn with_capacity(n: usize) -> Self {
        Self { weights: Vec::with_capacity(n), tree: Vec::with_capacity(n) }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, idx: usize) -> f64 {
        self.weights[idx]
    }

    /// Sum of weights with index `< n`.
    pub fn prefix(&self, n: usize) -> f64 {
        let mut i = n;
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i - 1];
            i -= lsb(i);
        }
        s
    }

    pub fn total(&self) -> f64 {
        self.prefix(self.len())
    }

    pub fn push(&mut self, w: f64) {
        debug_assert!(w >= 0.0 && w.is_finite());
        let i = self.len() + 1;
        let node = w + self.prefix(i - 1) - self.prefix(i - lsb(i));
        self.weights.push(w);
        self.tree.push(node);
    }

    pub fn set(&mut self, idx: usize, w: f64) {
        debug_assert!(w >= 0.0 && w.is_finite());
        let delta = w - self.weights[idx];
        self.weights[idx] = w;
        let mut i = idx + 1;
        while i <= self.tree.len() {
            self.tree[i - 1] += delta;
            i += lsb(i);
        }
    }

    /// Recomputes internal nodes from the stored weights, discarding drift.
    pub fn rebuild(&mut self) {
        let w = std::mem::take(&mut self.weights);
        *self = Self::from_weights(&w);
    }

    /// Smallest index whose inclusive prefix sum exceeds `u`.
    pub fn find(&self, mut u: f64) -> usize {
        let n = self.tree.len();
        let mut pos = 0;
        let mut step = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next - 1] <= u {
                pos = next;
                u -= self.tree[next - 1];
            }
            step >>= 1;
        }
        pos.min(n.saturating_sub(1))
    }

    /// Draws an index with probability proportional to its weight.
    /// Returns `None` when the total weight is not positive.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let total = self.total();
        if !(total > 0.0) {
            return None;
        }
        // Rounding can land on a zero-weight slot; redraw.
        for _ in 0..64 {
            let idx = self.find(rng.gen::<f64>() * total);
            if self.weights[idx] > 0.0 {
                return Some(idx);
            }
        }
        self.weights.iter().rposition(|&w| w > 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prefix_matches_naive() {
        let w: Vec<f64> = (0..37).map(|i| ((i * 7) % 5) as f64).collect();
        let mut f = Fenwick::from_weights(&w);
        for n in 0..=w.len() {
            assert_eq!(f.prefix(n), w[..n].iter().sum::<f64>());
        }
        f.set(10, 3.5);
        let mut w2 = w.clone();
        w2[10] = 3.5;
        for n in 0..=w2.len() {
            assert!((f.prefix(n) - w2[..n].iter().sum::<f64>()).abs() < 1e-12);
        }
    }

    #[test]
    fn find_skips_zero_weights() {
        let f = Fenwick::from_weights(&[0.0, 1.0, 0.0, 0.0, 2.0]);
        assert_eq!(f.find(0.0), 1);
        assert_eq!(f.find(0.999), 1);
        assert_eq!(f.find(1.0), 4);
        assert_eq!(f.find(2.9), 4);
    }

    #[test]
    fn empty_or_zero_returns_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(Fenwick::new().sample(&mut rng), None);
        assert_eq!(Fenwick::from_weights(&[0.0, 0.0]).sample(&mut rng), None);
    }
}
