//! Growth by vertex splitting.
//!
//! Each step picks a vertex `v` of degree `i` with probability
//! `w_i / W_t`, picks an ordered child-degree pair `(k, i+2-k)` with
//! probability `(i/2) w_{k,i+2-k} / w_i`, and replaces `v` by an edge
//! `v'v''` where `v'` takes a contiguous arc of `k-1` of `v`'s edges.
//!
//! [`OrderedTree`] keeps the full planar tree; [`UrnState`] keeps only the
//! degree census. Both evolve the census identically.

use std::io::{self, Read, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampler::Fenwick;
use crate::weights::WeightModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("total weight {0} is not positive")]
    Degeneracy(f64),
    #[error("no split of a degree-{0} vertex has positive weight")]
    InvalidDegree(usize),
    #[error("degree {degree} exceeds d_max = {d_max}")]
    BoundViolation { degree: usize, d_max: usize },
    #[error("invalid initial state: {0}")]
    InvalidInitial(String),
}

/// Independent stream `replica` of generator `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitEvent {
    pub parent_degree: usize,
    /// Degree of `v'`; `v''` gets `parent_degree + 2 - k`.
    pub k: usize,
    /// Start of the arc of `v`'s edges handed to `v'`.
    pub arrangement: usize,
    /// Vertex count after the split.
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusSnapshot {
    pub t: u64,
    /// `n_{t,k}` at index `k - 1`.
    pub counts: Vec<u64>,
    pub total_weight: f64,
}

impl CensusSnapshot {
    pub fn n(&self, k: usize) -> u64 {
        if k == 0 {
            return 0;
        }
        self.counts.get(k - 1).copied().unwrap_or(0)
    }
}

/// Per-degree cumulative split tables, built on first use.
#[derive(Debug, Clone, Default)]
pub struct SplitLaw {
    /// For degree `i`: `(k, cumulative weight)` over the nonzero `w_{k,i+2-k}`.
    tables: Vec<Option<Vec<(usize, f64)>>>,
}

impl SplitLaw {
    pub fn new() -> Self {
        Self::default()
    }

    fn table(&mut self, model: &WeightModel, i: usize) -> &[(usize, f64)] {
        if self.tables.len() <= i {
            self.tables.resize(i + 1, None);
        }
        self.tables[i].get_or_insert_with(|| {
            let mut acc = 0.0;
            (1..=i + 1)
                .filter_map(|k| {
                    let w = model.partition(k, i + 2 - k);
                    (w > 0.0).then(|| {
                        acc += w;
                        (k, acc)
                    })
                })
                .collect()
        })
    }

    /// Draws `k` with probability `w_{k,i+2-k} / Σ_j w_{j,i+2-j}`.
    pub fn sample<R: Rng + ?Sized>(
        &mut self,
        model: &WeightModel,
        i: usize,
        rng: &mut R,
    ) -> Result<usize, GrowthError> {
        let table = self.table(model, i);
        let total = match table.last() {
            Some(&(_, t)) => t,
            None => return Err(GrowthError::InvalidDegree(i)),
        };
        let u = rng.gen::<f64>() * total;
        let idx = table.partition_point(|&(_, c)| c <= u).min(table.len() - 1);
        Ok(table[idx].0)
    }

    /// Exact probabilities of `k = 1..=i+1`.
    pub fn probabilities(&mut self, model: &WeightModel, i: usize) -> Vec<f64> {
        let table = self.table(model, i).to_vec();
        let total = table.last().map_or(0.0, |&(_, t)| t);
        let mut p = vec![0.0; i + 1];
        let mut prev = 0.0;
        for (k, c) in table {
            p[k - 1] = (c - prev) / total;
            prev = c;
        }
        p
    }
}

/// Uncached draw of the child degree `k` for a degree-`i` split.
pub fn sample_split_sizes<R: Rng + ?Sized>(
    i: usize,
    model: &WeightModel,
    rng: &mut R,
) -> Result<usize, GrowthError> {
    SplitLaw::new().sample(model, i, rng)
}

fn add_count(census: &mut Vec<u64>, k: usize, delta: i64) {
    if census.len() <= k {
        census.resize(k + 1, 0);
    }
    census[k] = census[k].checked_add_signed(delta).expect("census count underflow");
}

fn snapshot_of(t: u64, census: &[u64], total_weight: f64) -> CensusSnapshot {
    let last = census.iter().rposition(|&n| n > 0).unwrap_or(0);
    CensusSnapshot { t, counts: census[1..=last.max(1).min(census.len() - 1)].to_vec(), total_weight }
}

/// A process that can be stepped and observed through its degree census.
pub trait GrowthEngine {
    fn t(&self) -> u64;
    /// `n_k` at index `k` (index 0 unused).
    fn census(&self) -> &[u64];
    fn total_weight(&self) -> f64;
    fn step(&mut self, rng: &mut ChaCha8Rng) -> Result<SplitEvent, GrowthError>;

    fn snapshot(&self) -> CensusSnapshot {
        snapshot_of(self.t(), self.census(), self.total_weight())
    }
}

/// Planar tree with a cyclic neighbour order at every vertex.
#[derive(Debug, Clone)]
pub struct OrderedTree {
    model: WeightModel,
    law: SplitLaw,
    adj: Vec<Vec<u32>>,
    census: Vec<u64>,
    sampler: Fenwick,
    total_weight: f64,
}

impl OrderedTree {
    /// Two vertices joined by one edge (`t = 2`).
    pub fn single_edge(model: &WeightModel) -> Result<Self, GrowthError> {
        Self::from_adjacency(model, vec![vec![1], vec![0]])
    }

    /// A tree from cyclically ordered neighbour lists.
    pub fn from_adjacency(model: &WeightModel, adj: Vec<Vec<u32>>) -> Result<Self, GrowthError> {
        let mut census = vec![0u64; 2];
        let mut sampler = Fenwick::with_capacity(adj.len());
        let mut total_weight = 0.0;
        for nbrs in &adj {
            let d = nbrs.len();
            if let Some(dm) = model.d_max() {
                if d > dm {
                    return Err(GrowthError::BoundViolation { degree: d, d_max: dm });
                }
            }
            add_count(&mut census, d, 1);
            let w = model.split_weight(d);
            sampler.push(w);
            total_weight += w;
        }
        let tree = Self { model: model.clone(), law: SplitLaw::new(), adj, census, sampler, total_weight };
        tree.check_structure().map_err(GrowthError::InvalidInitial)?;
        Ok(tree)
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn neighbours(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn model(&self) -> &WeightModel {
        &self.model
    }

    pub fn sampler_total(&self) -> f64 {
        self.sampler.total()
    }

    /// Vertex chosen with probability `w_{deg v} / W_t`.
    pub fn sample_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u32, GrowthError> {
        self.sampler
            .sample(rng)
            .map(|v| v as u32)
            .ok_or(GrowthError::Degeneracy(self.total_weight))
    }

    pub fn sample_split<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) -> Result<usize, GrowthError> {
        self.law.sample(&self.model, i, rng)
    }

    /// Splits `v` into `v'` (degree `k`) and `v''`; the arc start is drawn
    /// uniformly from `rng`. The child keeping more old edges keeps `v`'s id.
    pub fn apply_split<R: Rng + ?Sized>(
        &mut self,
        v: u32,
        k: usize,
        rng: &mut R,
    ) -> Result<SplitEvent, GrowthError> {
        let i = self.degree(v);
        let p = rng.gen_range(0..i);
        self.apply_split_at(v, k, p)
    }

    /// Deterministic split with arc start `p`.
    pub fn apply_split_at(&mut self, v: u32, k: usize, p: usize) -> Result<SplitEvent, GrowthError> {
        let i = self.degree(v);
        assert!((1..=i + 1).contains(&k) && p < i, "split ({i}, {k}) at {p} out of range");
        let other = i + 2 - k;
        if let Some(dm) = self.model.d_max() {
            if k.max(other) > dm {
                return Err(GrowthError::BoundViolation { degree: k.max(other), d_max: dm });
            }
        }
        let old = std::mem::take(&mut self.adj[v as usize]);
        let e1: Vec<u32> = (0..k - 1).map(|j| old[(p + j) % i]).collect();
        let e2: Vec<u32> = (k - 1..i).map(|j| old[(p + j) % i]).collect();
        let fresh = self.adj.len() as u32;
        // v keeps the larger arc so fewer neighbours need relabelling.
        let (keep, moved, keep_deg, moved_deg) =
            if e1.len() >= e2.len() { (e1, e2, k, other) } else { (e2, e1, other, k) };
        for &u in &moved {
            for x in self.adj[u as usize].iter_mut() {
                if *x == v {
                    *x = fresh;
                }
            }
        }
        let mut keep = keep;
        keep.push(fresh);
        let mut moved = moved;
        moved.push(v);
        self.adj[v as usize] = keep;
        self.adj.push(moved);

        add_count(&mut self.census, i, -1);
        add_count(&mut self.census, keep_deg, 1);
        add_count(&mut self.census, moved_deg, 1);
        let (wi, wk, wo) = (self.model.split_weight(i), self.model.split_weight(keep_deg), self.model.split_weight(moved_deg));
        self.total_weight += wk + wo - wi;
        self.sampler.set(v as usize, wk);
        self.sampler.push(wo);
        Ok(SplitEvent { parent_degree: i, k, arrangement: p, t: self.adj.len() as u64 })
    }

    /// One step with separate streams for the degree decisions and the arc choice.
    pub fn step_with<R1: Rng + ?Sized, R2: Rng + ?Sized>(
        &mut self,
        decisions: &mut R1,
        arrangement: &mut R2,
    ) -> Result<SplitEvent, GrowthError> {
        let v = self.sample_vertex(decisions)?;
        let k = self.sample_split(self.degree(v), decisions)?;
        self.apply_split(v, k, arrangement)
    }

    /// Connected, acyclic and with symmetric adjacency.
    pub fn check_structure(&self) -> Result<(), String> {
        let n = self.adj.len();
        if n == 0 {
            return Err("empty tree".into());
        }
        let mut ends = 0usize;
        for (v, nbrs) in self.adj.iter().enumerate() {
            for &u in nbrs {
                if u as usize >= n {
                    return Err(format!("edge {v}-{u} points outside the tree"));
                }
                if !self.adj[u as usize].contains(&(v as u32)) {
                    return Err(format!("edge {v}-{u} is not symmetric"));
                }
                ends += 1;
            }
        }
        if ends != 2 * (n - 1) {
            return Err(format!("{} edges on {n} vertices", ends / 2));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v as usize] {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    reached += 1;
                    stack.push(u);
                }
            }
        }
        if reached != n {
            return Err(format!("only {reached} of {n} vertices reachable"));
        }
        Ok(())
    }
}

impl GrowthEngine for OrderedTree {
    fn t(&self) -> u64 {
        self.adj.len() as u64
    }

    fn census(&self) -> &[u64] {
        &self.census
    }

    fn total_weight(&self) -> f64 {
        self.total_weight
    }

    fn step(&mut self, rng: &mut ChaCha8Rng) -> Result<SplitEvent, GrowthError> {
        let v = self.sample_vertex(rng)?;
        let k = self.sample_split(self.degree(v), rng)?;
        self.apply_split(v, k, rng)
    }
}

/// Degree census only: one urn per degree, drawn with weight `w_k n_k`.
#[derive(Debug, Clone)]
pub struct UrnState {
    model: WeightModel,
    law: SplitLaw,
    t: u64,
    census: Vec<u64>,
    /// Slot `k - 1` carries `w_k n_k`.
    sampler: Fenwick,
    total_weight: f64,
}

impl UrnState {
    /// The census of a single edge: `n_1 = 2`, `t = 2`.
    pub fn single_edge(model: &WeightModel) -> Result<Self, GrowthError> {
        Self::from_census(model, &[2])
    }

    /// From counts `n_k` at index `k - 1`.
    pub fn from_census(model: &WeightModel, counts: &[u64]) -> Result<Self, GrowthError> {
        let t: u64 = counts.iter().sum();
        let ends: u64 = counts.iter().enumerate().map(|(i, &n)| (i as u64 + 1) * n).sum();
        if t < 2 || ends != 2 * t - 2 {
            return Err(GrowthError::InvalidInitial(format!(
                "census with Σn = {t}, Σkn = {ends} is not a tree"
            )));
        }
        if let (Some(dm), Some(top)) = (model.d_max(), counts.iter().rposition(|&n| n > 0)) {
            if top + 1 > dm {
                return Err(GrowthError::BoundViolation { degree: top + 1, d_max: dm });
            }
        }
        let mut census = vec![0u64];
        census.extend_from_slice(counts);
        let mut urn = Self {
            model: model.clone(),
            law: SplitLaw::new(),
            t,
            sampler: Fenwick::new(),
            census,
            total_weight: 0.0,
        };
        for k in 1..urn.census.len() {
            let w = urn.class_weight(k);
            urn.sampler.push(w);
            urn.total_weight += w;
        }
        Ok(urn)
    }

    fn class_weight(&self, k: usize) -> f64 {
        self.model.split_weight(k) * self.census.get(k).copied().unwrap_or(0) as f64
    }

    fn refresh(&mut self, k: usize) {
        while self.sampler.len() < k {
            self.sampler.push(0.0);
        }
        let w = self.class_weight(k);
        self.total_weight += w - self.sampler.weight(k - 1);
        self.sampler.set(k - 1, w);
    }

    pub fn model(&self) -> &WeightModel {
        &self.model
    }

    /// Degree class `i` with probability `w_i n_i / W_t`.
    pub fn sample_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize, GrowthError> {
        self.sampler
            .sample(rng)
            .map(|idx| idx + 1)
            .ok_or(GrowthError::Degeneracy(self.total_weight))
    }

    pub fn sample_split<R: Rng + ?Sized>(&mut self, i: usize, rng: &mut R) -> Result<usize, GrowthError> {
        self.law.sample(&self.model, i, rng)
    }

    /// `n_i -= 1`, `n_k += 1`, `n_{i+2-k} += 1`, `t += 1`.
    pub fn apply_split(&mut self, i: usize, k: usize) -> Result<(), GrowthError> {
        assert!((1..=i + 1).contains(&k), "split ({i}, {k}) out of range");
        if self.census.get(i).copied().unwrap_or(0) == 0 {
            return Err(GrowthError::InvalidDegree(i));
        }
        let other = i + 2 - k;
        if let Some(dm) = self.model.d_max() {
            if k.max(other) > dm {
                return Err(GrowthError::BoundViolation { degree: k.max(other), d_max: dm });
            }
        }
        add_count(&mut self.census, i, -1);
        add_count(&mut self.census, k, 1);
        add_count(&mut self.census, other, 1);
        self.t += 1;
        for d in [i, k, other] {
            self.refresh(d);
        }
        Ok(())
    }
}

impl GrowthEngine for UrnState {
    fn t(&self) -> u64 {
        self.t
    }

    fn census(&self) -> &[u64] {
        &self.census
    }

    fn total_weight(&self) -> f64 {
        self.total_weight
    }

    fn step(&mut self, rng: &mut ChaCha8Rng) -> Result<SplitEvent, GrowthError> {
        let i = self.sample_vertex(rng)?;
        let k = self.sample_split(i, rng)?;
        self.apply_split(i, k)?;
        Ok(SplitEvent { parent_degree: i, k, arrangement: 0, t: self.t })
    }
}

/// Grows `engine` to `t_final`, recording the initial state, every time
/// divisible by `thin` (when `thin > 0`) and the final state.
pub fn run<E: GrowthEngine + ?Sized>(
    engine: &mut E,
    t_final: u64,
    thin: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CensusSnapshot>, GrowthError> {
    if t_final < engine.t() {
        return Err(GrowthError::InvalidInitial(format!(
            "t_final = {t_final} is below the initial t = {}",
            engine.t()
        )));
    }
    let mut out = vec![engine.snapshot()];
    while engine.t() < t_final {
        engine.step(rng)?;
        let t = engine.t();
        if t == t_final || (thin > 0 && t % thin == 0) {
            out.push(engine.snapshot());
        }
    }
    Ok(out)
}

/// Σn_k = t and Σk n_k = 2t - 2.
pub fn census_identities_hold(census: &[u64], t: u64) -> bool {
    let n: u64 = census.iter().sum();
    let ends: u64 = census.iter().enumerate().map(|(k, &c)| k as u64 * c).sum();
    n == t && ends == 2 * t - 2
}

/// `W_t = w_2 t - 2a` for linear weights.
pub fn expected_total_weight(model: &WeightModel, t: u64) -> f64 {
    let sw = model.splitting();
    sw.weight(2) * t as f64 - 2.0 * sw.a
}

/// Rows `t,k,n` (or `replica,t,k,n` when `replica` is set), zero counts omitted.
pub fn write_census_csv<W: Write>(
    w: &mut W,
    replica: Option<usize>,
    snapshots: &[CensusSnapshot],
) -> io::Result<()> {
    for s in snapshots {
        for (idx, &n) in s.counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            match replica {
                Some(r) => writeln!(w, "{r},{},{},{n}", s.t, idx + 1)?,
                None => writeln!(w, "{},{},{n}", s.t, idx + 1)?,
            }
        }
    }
    Ok(())
}

/// Little-endian record: `u64 t`, `u32 K`, then `K` × `u64` counts for `k = 1..=K`.
pub fn write_census_bin<W: Write>(w: &mut W, snapshot: &CensusSnapshot) -> io::Result<()> {
    w.write_all(&snapshot.t.to_le_bytes())?;
    let k = u32::try_from(snapshot.counts.len())
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "too many degree classes"))?;
    w.write_all(&k.to_le_bytes())?;
    for &n in &snapshot.counts {
        w.write_all(&n.to_le_bytes())?;
    }
    Ok(())
}

/// Reads one record written by [`write_census_bin`]; `Ok(None)` at a clean end.
pub fn read_census_bin<R: Read>(r: &mut R) -> io::Result<Option<(u64, Vec<u64>)>> {
    let mut b8 = [0u8; 8];
    match r.read_exact(&mut b8) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    let t = u64::from_le_bytes(b8);
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let k = u32::from_le_bytes(b4) as usize;
    let mut counts = Vec::with_capacity(k);
    for _ in 0..k {
        r.read_exact(&mut b8)?;
        counts.push(u64::from_le_bytes(b8));
    }
    Ok(Some((t, counts)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::SplittingWeights;

    fn pa() -> WeightModel {
        WeightModel::preferential(SplittingWeights::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn first_step_from_single_edge_is_forced() {
        let mut tree = OrderedTree::single_edge(&pa()).unwrap();
        let mut rng = replica_rng(7, 0);
        tree.step(&mut rng).unwrap();
        assert_eq!(tree.snapshot().counts, vec![2, 1]);
        assert_eq!(tree.total_weight(), 4.0);
    }

    #[test]
    fn leaf_split_with_k1_adds_a_leaf() {
        let m = WeightModel::uniform(0.0).unwrap();
        let mut tree = OrderedTree::single_edge(&m).unwrap();
        tree.apply_split_at(0, 1, 0).unwrap();
        assert_eq!(tree.snapshot().counts, vec![2, 1]);
        assert_eq!(tree.degrees(), vec![2, 1, 1]);
        assert!(tree.check_structure().is_ok());
    }

    #[test]
    fn figure_split_five_into_three_and_four() {
        let m = WeightModel::uniform(0.0).unwrap();
        let star: Vec<Vec<u32>> = std::iter::once(vec![1, 2, 3, 4, 5])
            .chain((0..5).map(|_| vec![0]))
            .collect();
        let mut tree = OrderedTree::from_adjacency(&m, star).unwrap();
        let ev = tree.apply_split_at(0, 3, 3).unwrap();
        assert_eq!((ev.parent_degree, ev.k, ev.t), (5, 3, 7));
        // v' holds arc {4, 5}, v'' holds {1, 2, 3} and keeps id 0
        assert_eq!(tree.neighbours(0), &[1, 2, 3, 6]);
        assert_eq!(tree.neighbours(6), &[4, 5, 0]);
        assert_eq!(tree.neighbours(4), &[6]);
        assert!(tree.check_structure().is_ok());
    }

    #[test]
    fn urn_split_middle_pair() {
        let m = WeightModel::uniform(0.0).unwrap();
        let mut urn = UrnState::from_census(&m, &[4, 0, 0, 1]).unwrap();
        urn.apply_split(4, 3).unwrap();
        assert_eq!(urn.snapshot().counts, vec![4, 0, 2]);
        assert_eq!(urn.t(), 6);
    }

    #[test]
    fn urn_class_probability() {
        let urn = UrnState::from_census(&pa(), &[2, 1]).unwrap();
        assert_eq!(urn.total_weight(), 4.0);
        assert_eq!(urn.sampler.weight(1) / urn.total_weight(), 0.5);
    }

    #[test]
    fn split_probabilities() {
        let m = WeightModel::uniform(0.0).unwrap();
        let mut law = SplitLaw::new();
        for p in law.probabilities(&m, 5) {
            assert!((p - 1.0 / 6.0).abs() < 1e-15);
        }
        assert!((law.probabilities(&m, 4)[2] - 0.2).abs() < 1e-15);
        let p = law.probabilities(&pa(), 6);
        assert_eq!(p[0], 0.5);
        assert_eq!(p[6], 0.5);
    }

    #[test]
    fn run_keeps_invariants() {
        let m = pa();
        let mut tree = OrderedTree::single_edge(&m).unwrap();
        let mut rng = replica_rng(1, 0);
        let snaps = run(&mut tree, 2000, 100, &mut rng).unwrap();
        assert_eq!(snaps.first().unwrap().t, 2);
        assert_eq!(snaps.last().unwrap().t, 2000);
        for s in &snaps {
            let mut census = vec![0];
            census.extend_from_slice(&s.counts);
            assert!(census_identities_hold(&census, s.t));
            assert_eq!(s.total_weight, 2.0 * s.t as f64 - 2.0);
        }
        assert!(tree.check_structure().is_ok());
    }

    #[test]
    fn bounded_model_never_exceeds_dmax() {
        let m = WeightModel::table(3, &[(1, 2, 1.0), (1, 3, 0.5), (2, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let mut tree = OrderedTree::single_edge(&m).unwrap();
        let mut rng = replica_rng(3, 0);
        run(&mut tree, 5000, 0, &mut rng).unwrap();
        assert!(tree.degrees().iter().all(|&d| d <= 3));
    }

    #[test]
    fn binary_round_trip() {
        let s = CensusSnapshot { t: 9, counts: vec![5, 2, 0, 2], total_weight: 0.0 };
        let mut buf = Vec::new();
        write_census_bin(&mut buf, &s).unwrap();
        assert_eq!(buf.len(), 8 + 4 + 4 * 8);
        assert_eq!(&buf[..8], &9u64.to_le_bytes());
        let mut r = buf.as_slice();
        assert_eq!(read_census_bin(&mut r).unwrap(), Some((9, vec![5, 2, 0, 2])));
        assert_eq!(read_census_bin(&mut r).unwrap(), None);
    }

    #[test]
    fn csv_rows() {
        let s = CensusSnapshot { t: 3, counts: vec![2, 1], total_weight: 4.0 };
        let mut buf = Vec::new();
        write_census_csv(&mut buf, Some(0), &[s]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0,3,1,2\n0,3,2,1\n");
    }
}
