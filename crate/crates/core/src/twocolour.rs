//! Two-colour splitting.
//!
//! A selected black vertex turns white; a selected white vertex splits into
//! two black children. Selection weights are
//! `w°_k = (a - 3b/2)k + a` (white) and `w•_k = (a - 3b/2)k + b` (black),
//! and white splits follow the partition weights of a one-colour model whose
//! splitting weights are `w°`.
//!
//! `t` counts selection events, so a recolouring advances `t` without adding
//! a vertex; with this clock `Σ(3n° + 2n•) = t + 2` and the total weight is
//! `(a - b)t + b`.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::growth::{GrowthError, SplitLaw};
use crate::sampler::Fenwick;
use crate::solver::{fixed_point_densities, DensitySolution, SolverError, SolverOptions};
use crate::weights::{Regime, SplittingWeights, WeightModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoColourError {
    #[error("invalid two-colour model: {0}")]
    InvalidModel(String),
    #[error("reduced one-colour model is invalid: {0}")]
    ReductionInvalid(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error("least-squares solve failed: {0}")]
    Direct(String),
}

#[derive(Debug, Clone)]
pub struct TwoColourModel {
    a: f64,
    b: f64,
    white: WeightModel,
}

impl TwoColourModel {
    /// `white` must have splitting weights `w°_k = (a - 3b/2)k + a`.
    pub fn new(a: f64, b: f64, white: WeightModel) -> Result<Self, TwoColourError> {
        if !(a - b > 0.0) {
            return Err(TwoColourError::InvalidModel(format!("need a - b > 0, got a = {a}, b = {b}")));
        }
        let expect = SplittingWeights::new(a - 1.5 * b, a);
        let got = white.splitting();
        if (got.a - expect.a).abs() > 1e-12 || (got.b - expect.b).abs() > 1e-12 {
            return Err(TwoColourError::InvalidModel(format!(
                "white partition has {got}, expected {expect}"
            )));
        }
        let m = Self { a, b, white };
        let top = m.white.d_max().unwrap_or(1000);
        for k in 1..=top {
            if m.white_weight(k) < 0.0 || m.black_weight(k) < 0.0 {
                return Err(TwoColourError::InvalidModel(format!("negative weight at degree {k}")));
            }
        }
        Ok(m)
    }

    /// `a = 1, b = 0` with uniform white splits: `w°_k = k + 1`, `w•_k = k`.
    pub fn rna() -> Self {
        let white = WeightModel::uniform_weights(SplittingWeights::new(1.0, 1.0))
            .expect("uniform weights k + 1 are valid");
        Self::new(1.0, 0.0, white).expect("RNA parameters are valid")
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn white(&self) -> &WeightModel {
        &self.white
    }

    pub fn black_splitting(&self) -> SplittingWeights {
        SplittingWeights::new(self.a - 1.5 * self.b, self.b)
    }

    pub fn white_weight(&self, k: usize) -> f64 {
        self.white.split_weight(k)
    }

    pub fn black_weight(&self, k: usize) -> f64 {
        match self.white.d_max() {
            Some(d) if k > d => 0.0,
            _ => self.black_splitting().weight(k),
        }
    }

    /// One-colour model with `w_i = w•_i` and `w_{j,i+2-j} = (w•_i / w°_i) w°_{j,i+2-j}`.
    pub fn reduce_to_one_colour(&self) -> Result<WeightModel, TwoColourError> {
        self.white
            .with_splitting_weights(self.black_splitting())
            .map_err(|e| TwoColourError::ReductionInvalid(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoColourSolution {
    /// `e°_k` at index `k - 1`.
    pub white: Vec<f64>,
    /// `e•_k` at index `k - 1`.
    pub black: Vec<f64>,
    pub rho_white: Vec<f64>,
    pub rho_black: Vec<f64>,
    /// The one-colour solve behind the reduction, when that method was used.
    pub reduced: Option<DensitySolution>,
    /// `(w•_k + w•_2/2) e•_k - Σ_i i w°_{k,i-k+2} e°_i`.
    pub residual_black: Vec<f64>,
    /// `(w°_k + w°_2/3) e°_k - w•_k e•_k`.
    pub residual_white: Vec<f64>,
    pub max_residual: f64,
    /// `Σ(3e° + 2e•)`, which should be 1.
    pub size_sum: f64,
    /// `Σ(w° e° + w• e•)`, which should be `w•_2 / 2`.
    pub weight_sum: f64,
}

/// `(ρ°, ρ•)`: both colours normalized by `Σ(e° + e•)`.
pub fn densities_from_e(white: &[f64], black: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let total: f64 = white.iter().chain(black).sum();
    (
        white.iter().map(|e| e / total).collect(),
        black.iter().map(|e| e / total).collect(),
    )
}

fn finish_solution(
    model: &TwoColourModel,
    white: Vec<f64>,
    black: Vec<f64>,
    reduced: Option<DensitySolution>,
) -> TwoColourSolution {
    let k_max = white.len();
    let w = &model.white;
    let wb2 = model.black_weight(2);
    let ww2 = model.white_weight(2);
    let residual_black: Vec<f64> = (1..=k_max)
        .map(|k| {
            let gain: f64 = (k.saturating_sub(1).max(1)..=k_max)
                .filter(|&i| i + 2 > k)
                .map(|i| i as f64 * w.partition(k, i + 2 - k) * white[i - 1])
                .sum();
            (model.black_weight(k) + wb2 / 2.0) * black[k - 1] - gain
        })
        .collect();
    let residual_white: Vec<f64> = (1..=k_max)
        .map(|k| (model.white_weight(k) + ww2 / 3.0) * white[k - 1] - model.black_weight(k) * black[k - 1])
        .collect();
    let max_residual = residual_black.iter().chain(&residual_white).fold(0.0, |m, r| f64::max(m, r.abs()));
    let size_sum = white.iter().zip(&black).map(|(o, b)| 3.0 * o + 2.0 * b).sum();
    let weight_sum = (1..=k_max)
        .map(|k| model.white_weight(k) * white[k - 1] + model.black_weight(k) * black[k - 1])
        .sum();
    let (rho_white, rho_black) = densities_from_e(&white, &black);
    TwoColourSolution {
        white,
        black,
        rho_white,
        rho_black,
        reduced,
        residual_black,
        residual_white,
        max_residual,
        size_sum,
        weight_sum,
    }
}

/// Solves through the one-colour reduction: `a_k` of the reduced model is
/// split by `e°_k / e•_k = w•_k / (w°_k + w°_2/3)` and scaled so that
/// `Σ(3e° + 2e•) = 1`.
pub fn solve_two_colour(
    model: &TwoColourModel,
    opts: &SolverOptions,
) -> Result<TwoColourSolution, TwoColourError> {
    match model.white.classify_regime() {
        Ok((Regime::CaseIII, _)) => {}
        Ok((Regime::CaseI, s)) if model.white.d_max().is_some() && s > 0.0 => {}
        _ if opts.force_unsupported => {}
        Ok((regime, s)) => return Err(SolverError::Regime { regime, s }.into()),
        Err(e) => return Err(SolverError::from(e).into()),
    }
    let reduced = model.reduce_to_one_colour()?;
    let report = reduced.validate(1e-9);
    if !report.ok() {
        return Err(TwoColourError::ReductionInvalid(report.to_string()));
    }
    let sol = fixed_point_densities(&reduced, opts)?;
    let ww2 = model.white_weight(2);
    let (mut white, mut black): (Vec<f64>, Vec<f64>) = sol
        .densities
        .iter()
        .enumerate()
        .map(|(idx, &a)| {
            let k = idx + 1;
            let r = model.black_weight(k) / (model.white_weight(k) + ww2 / 3.0);
            (a * r / (1.0 + r), a / (1.0 + r))
        })
        .unzip();
    let c = 1.0 / white.iter().zip(&black).map(|(o, b)| 3.0 * o + 2.0 * b).sum::<f64>();
    white.iter_mut().for_each(|e| *e *= c);
    black.iter_mut().for_each(|e| *e *= c);
    Ok(finish_solution(model, white, black, Some(sol)))
}

/// Least-squares solve of both equation families, truncated at `k_max`,
/// with the row `Σ(3e° + 2e•) = 1` appended.
pub fn solve_two_colour_direct(
    model: &TwoColourModel,
    k_max: usize,
) -> Result<TwoColourSolution, TwoColourError> {
    let k_max = model.white.d_max().unwrap_or(k_max);
    let n = 2 * k_max;
    let mut m = DMatrix::zeros(n + 1, n);
    let wb2 = model.black_weight(2);
    let ww2 = model.white_weight(2);
    for k in 1..=k_max {
        // black rows, unknown e•_k at column k_max + k - 1
        let r = k - 1;
        m[(r, k_max + k - 1)] = model.black_weight(k) + wb2 / 2.0;
        for i in k.saturating_sub(1).max(1)..=k_max {
            if i + 2 > k {
                m[(r, i - 1)] -= i as f64 * model.white.partition(k, i + 2 - k);
            }
        }
        // white rows
        let r = k_max + k - 1;
        m[(r, k - 1)] = model.white_weight(k) + ww2 / 3.0;
        m[(r, k_max + k - 1)] = -model.black_weight(k);
    }
    for k in 0..k_max {
        m[(n, k)] = 3.0;
        m[(n, k_max + k)] = 2.0;
    }
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = 1.0;
    let x = m
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| TwoColourError::Direct(e.to_string()))?;
    let white = x.rows(0, k_max).iter().copied().collect();
    let black = x.rows(k_max, k_max).iter().copied().collect();
    Ok(finish_solution(model, white, black, None))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoColourSnapshot {
    pub t: u64,
    /// `n°_k` at index `k - 1`.
    pub white: Vec<u64>,
    /// `n•_k` at index `k - 1`.
    pub black: Vec<u64>,
    pub total_weight: f64,
}

/// Colour × degree census. Sampler slot `2(k-1)` is white, `2(k-1)+1` black.
#[derive(Debug, Clone)]
pub struct TwoColourState {
    model: TwoColourModel,
    law: SplitLaw,
    t: u64,
    white: Vec<u64>,
    black: Vec<u64>,
    sampler: Fenwick,
    total_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoColourEvent {
    Recolour { degree: usize },
    Split { degree: usize, k: usize },
}

impl TwoColourState {
    /// A single edge with both endpoints black, `t = 2`.
    pub fn new(model: &TwoColourModel) -> Self {
        let mut s = Self {
            model: model.clone(),
            law: SplitLaw::new(),
            t: 2,
            white: vec![0; 2],
            black: vec![0; 2],
            sampler: Fenwick::new(),
            total_weight: 0.0,
        };
        s.black[1] = 2;
        s.refresh(1);
        s
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// `n°_k` at index `k` (index 0 unused).
    pub fn white_census(&self) -> &[u64] {
        &self.white
    }

    pub fn black_census(&self) -> &[u64] {
        &self.black
    }

    fn refresh(&mut self, k: usize) {
        while self.sampler.len() < 2 * k {
            self.sampler.push(0.0);
        }
        for (slot, w) in [
            (2 * (k - 1), self.model.white_weight(k) * self.white[k] as f64),
            (2 * (k - 1) + 1, self.model.black_weight(k) * self.black[k] as f64),
        ] {
            self.total_weight += w - self.sampler.weight(slot);
            self.sampler.set(slot, w);
        }
    }

    fn bump(&mut self, white: bool, k: usize, delta: i64) {
        let v = if white { &mut self.white } else { &mut self.black };
        if v.len() <= k {
            self.white.resize(k + 1, 0);
            self.black.resize(k + 1, 0);
        }
        let v = if white { &mut self.white } else { &mut self.black };
        v[k] = v[k].checked_add_signed(delta).expect("census count underflow");
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<TwoColourEvent, TwoColourError> {
        let slot = self
            .sampler
            .sample(rng)
            .ok_or(GrowthError::Degeneracy(self.total_weight))?;
        let degree = slot / 2 + 1;
        self.t += 1;
        if slot % 2 == 1 {
            self.bump(false, degree, -1);
            self.bump(true, degree, 1);
            self.refresh(degree);
            return Ok(TwoColourEvent::Recolour { degree });
        }
        let k = self.law.sample(&self.model.white, degree, rng)?;
        let other = degree + 2 - k;
        if let Some(dm) = self.model.white.d_max() {
            if k.max(other) > dm {
                return Err(GrowthError::BoundViolation { degree: k.max(other), d_max: dm }.into());
            }
        }
        self.bump(true, degree, -1);
        self.bump(false, k, 1);
        self.bump(false, other, 1);
        for d in [degree, k, other] {
            self.refresh(d);
        }
        Ok(TwoColourEvent::Split { degree, k })
    }

    pub fn snapshot(&self) -> TwoColourSnapshot {
        let last = (1..self.white.len())
            .rev()
            .find(|&k| self.white[k] + self.black[k] > 0)
            .unwrap_or(1);
        TwoColourSnapshot {
            t: self.t,
            white: self.white[1..=last].to_vec(),
            black: self.black[1..=last].to_vec(),
            total_weight: self.total_weight,
        }
    }

    /// `Σ(3n° + 2n•) = t + 2`.
    pub fn size_identity_holds(&self) -> bool {
        let s: u64 = self.white.iter().zip(&self.black).map(|(o, b)| 3 * o + 2 * b).sum();
        s == self.t + 2
    }

    /// `(a - b)t + b`.
    pub fn expected_total_weight(&self) -> f64 {
        (self.model.a - self.model.b) * self.t as f64 + self.model.b
    }
}

/// Runs from the two-black-leaves start to `t_final`, snapshotting like
/// [`crate::growth::run`].
pub fn run_two_colour(
    model: &TwoColourModel,
    t_final: u64,
    thin: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<TwoColourSnapshot>, TwoColourError> {
    let mut state = TwoColourState::new(model);
    let mut out = vec![state.snapshot()];
    while state.t() < t_final {
        state.step(rng)?;
        let t = state.t();
        if t == t_final || (thin > 0 && t % thin == 0) {
            out.push(state.snapshot());
        }
    }
    Ok(out)
}

/// Rows `replica,t,k,n_white,n_black`, skipping degrees with no vertices.
pub fn write_two_colour_csv<W: Write>(
    w: &mut W,
    replica: usize,
    snapshots: &[TwoColourSnapshot],
) -> io::Result<()> {
    for s in snapshots {
        for (idx, (o, b)) in s.white.iter().zip(&s.black).enumerate() {
            if o + b > 0 {
                writeln!(w, "{replica},{},{},{o},{b}", s.t, idx + 1)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::{rna_black, rna_white, uniform_density};
    use crate::growth::replica_rng;
    use std::f64::consts::E;

    #[test]
    fn rna_reduces_to_uniform() {
        let red = TwoColourModel::rna().reduce_to_one_colour().unwrap();
        let uni = WeightModel::uniform(0.0).unwrap();
        for i in 1..25 {
            for j in 1..25 {
                assert!((red.partition(i, j) - uni.partition(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rna_solution_matches_closed_forms() {
        let sol = solve_two_colour(&TwoColourModel::rna(), &SolverOptions::default()).unwrap();
        assert!((sol.black[0] - 1.0 / (E * E)).abs() < 1e-12);
        assert!((sol.white[0] - 1.0 / (3.0 * E * E)).abs() < 1e-12);
        for k in 1..=20 {
            assert!((sol.white[k - 1] - rna_white(k)).abs() < 1e-12);
            assert!((sol.black[k - 1] - rna_black(k)).abs() < 1e-12);
            let rho = sol.rho_white[k - 1] + sol.rho_black[k - 1];
            assert!((rho - uniform_density(0.0, k)).abs() < 1e-12);
        }
        assert!((sol.rho_black[0] - 2.0 / (E * E - 1.0)).abs() < 1e-12);
        assert!(sol.max_residual < 1e-12);
        assert!((sol.size_sum - 1.0).abs() < 1e-12);
        assert!((sol.weight_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn direct_solve_agrees() {
        let m = TwoColourModel::rna();
        let d = solve_two_colour_direct(&m, 60).unwrap();
        for k in 1..=20 {
            assert!((d.white[k - 1] - rna_white(k)).abs() < 1e-10);
            assert!((d.black[k - 1] - rna_black(k)).abs() < 1e-10);
        }
    }

    #[test]
    fn first_step_recolours() {
        let m = TwoColourModel::rna();
        let mut s = TwoColourState::new(&m);
        assert_eq!(s.total_weight(), 2.0);
        assert!(s.size_identity_holds());
        let ev = s.step(&mut replica_rng(5, 0)).unwrap();
        assert_eq!(ev, TwoColourEvent::Recolour { degree: 1 });
        let snap = s.snapshot();
        assert_eq!((snap.t, snap.white.clone(), snap.black.clone()), (3, vec![1], vec![1]));
    }

    #[test]
    fn identities_hold_along_a_run() {
        let m = TwoColourModel::rna();
        let mut s = TwoColourState::new(&m);
        let mut rng = replica_rng(11, 0);
        for _ in 0..5000 {
            s.step(&mut rng).unwrap();
            assert!(s.size_identity_holds());
            assert!((s.total_weight() - s.expected_total_weight()).abs() < 1e-9 * s.t() as f64);
        }
    }

    #[test]
    fn rejects_mismatched_white_weights() {
        let white = WeightModel::uniform(0.0).unwrap();
        assert!(TwoColourModel::new(1.0, 0.0, white).is_err());
        let white = WeightModel::uniform_weights(SplittingWeights::new(1.0, 1.0)).unwrap();
        assert!(TwoColourModel::new(1.0, 1.0, white).is_err());
    }
}
