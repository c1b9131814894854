//! Limiting degree densities.
//!
//! Two methods: the monotone fixed-point iteration started from zero
//! ([`fixed_point_densities`]) and, for bounded degrees, a direct linear solve
//! of the stationary system with the normalization `Σρ = 1` ([`solve_finite`]).
//!
//! The stationary system, for `k ≥ 1`, is
//!
//! ```text
//! a_k (w_2 + w_k) = Σ_{i ≥ k-1} c_{k,i} a_i,     c_{k,i} = i · w_{k, i-k+2}
//! ```
//!
//! together with `Σ a_k = 1` and `Σ k a_k = 2`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::weights::{Condition, ConditionStatus, Regime, WeightError, WeightModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("regime {regime:?} (s = {s}) is outside the convergence theorem; pass force_unsupported to override")]
    Regime { regime: Regime, s: f64 },
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("no convergence after {iterations} iterations (last step {step:.3e})")]
    NoConvergence { iterations: usize, step: f64 },
    #[error("stationary system has rank {rank} < d_max - 1 = {}", d_max - 1)]
    RankDeficient { rank: usize, d_max: usize },
    #[error("density ρ_{k} = {value:.3e} is negative")]
    NonPositive { k: usize, value: f64 },
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
    #[error("degenerate model: {0}")]
    Degenerate(String),
}

/// How rows see the mass beyond the truncation `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClosure {
    /// `a_i = 0` for `i > K`.
    Truncate,
    /// Rows whose coefficients grow linearly in `i` get the tail
    /// `Σ_{i>K} (β i + δ) a_i = β m1 + δ m0`, where `m0 = 1 - Σ_{i≤K} a_i`
    /// and `m1 = 2 - Σ_{i≤K} i a_i` are read off the sum identities.
    #[default]
    Moments,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Truncation `K`; ignored for bounded models, which use `K = d_max`.
    pub truncation: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub closure: TailClosure,
    pub force_unsupported: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            truncation: 512,
            tol: 1e-13,
            max_iter: 1_000_000,
            closure: TailClosure::Moments,
            force_unsupported: false,
        }
    }
}

impl SolverOptions {
    pub fn new(truncation: usize, tol: f64, max_iter: usize) -> Self {
        Self { truncation, tol, max_iter, ..Self::default() }
    }

    pub fn with_closure(mut self, closure: TailClosure) -> Self {
        self.closure = closure;
        self
    }

    pub fn forced(mut self, force: bool) -> Self {
        self.force_unsupported = force;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `r_k` for `k = 1..=K`.
    pub residuals: Vec<f64>,
    pub max_abs: f64,
    pub mass_defect: f64,
    pub first_moment_defect: f64,
    /// `max(0, 1 - Σ_{k≤K} a_k)`.
    pub tail_mass: f64,
}

/// Per-run facts about the iterate sequence.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IterationDiagnostics {
    /// Largest `a_k^{(j)} - a_k^{(j+1)}` seen; nonpositive for monotone runs.
    pub max_decrease: f64,
    pub max_sum: f64,
    pub max_first_moment: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    FixedPoint,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySolution {
    pub method: SolveMethod,
    pub truncation: usize,
    /// `a_1..a_K`, stored at index `k - 1`.
    pub densities: Vec<f64>,
    pub iterations: usize,
    pub last_step: f64,
    pub sum: f64,
    pub first_moment: f64,
    pub regime: Option<Regime>,
    pub s: f64,
    pub residuals: ResidualReport,
    pub diagnostics: IterationDiagnostics,
    /// Set when the regime is outside the theorem and the caller forced a run.
    pub unsupported: bool,
    pub warnings: Vec<String>,
}

impl DensitySolution {
    /// `a_k` (1-based); zero beyond the truncation.
    pub fn density(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.densities.get(k - 1).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
struct Row {
    constant: f64,
    /// `(i, coefficient)` with `i` 1-based.
    terms: Vec<(usize, f64)>,
    /// `(β, δ)` applied to `(m1, m0)`.
    tail: Option<(f64, f64)>,
    denom: f64,
}

/// The truncated Jacobi map `a ↦ F(a)`.
#[derive(Debug, Clone)]
pub struct FixedPointSystem {
    rows: Vec<Row>,
    s: f64,
    regime: Option<Regime>,
    unsupported: bool,
}

fn coefficient(model: &WeightModel, k: usize, i: usize) -> f64 {
    if i + 2 <= k {
        return 0.0;
    }
    i as f64 * model.partition(k, i + 2 - k)
}

impl FixedPointSystem {
    pub fn new(model: &WeightModel, opts: &SolverOptions) -> Result<Self, SolverError> {
        let k_max = match model.d_max() {
            Some(d) => d,
            None => opts.truncation,
        };
        if k_max < 2 {
            return Err(SolverError::InvalidTruncation(format!("K = {k_max} < 2")));
        }
        let leaf_min = (1..k_max)
            .map(|i| coefficient(model, 1, i))
            .fold(f64::INFINITY, f64::min);

        let (regime, s, unsupported) = match model.classify_regime() {
            Ok((regime, s)) => {
                let supported = match regime {
                    Regime::CaseIII => true,
                    Regime::CaseI => model.d_max().is_some() && s > 0.0,
                    Regime::CaseII => false,
                };
                if supported {
                    (Some(regime), s, false)
                } else if opts.force_unsupported {
                    (Some(regime), leaf_min.max(0.0), true)
                } else {
                    return Err(SolverError::Regime { regime, s });
                }
            }
            Err(e) if !opts.force_unsupported => return Err(e.into()),
            // Any s no larger than the truncated leaf weights keeps the map monotone.
            Err(_) => (None, leaf_min.max(0.0), true),
        };

        let w2 = model.split_weight(2);
        let closing: Vec<usize> = match (opts.closure, model.d_max()) {
            (TailClosure::Moments, None) => model.growing_rows(),
            _ => Vec::new(),
        };
        // Mixing in Σ(i-1)a_i = 1 keeps every leaf-row coefficient nonnegative
        // when the last degree cannot produce a leaf.
        let mu = match model.d_max() {
            Some(d) if d >= 3 => 1.0 / (d - 1) as f64,
            _ => 0.0,
        };

        let mut rows = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let tail = closing.contains(&k).then(|| {
                let c1 = coefficient(model, k, k_max + 1);
                let c2 = coefficient(model, k, k_max + 2);
                let beta = c2 - c1;
                let delta = c1 - beta * (k_max + 1) as f64;
                if k == 1 {
                    (beta, delta - s)
                } else {
                    (beta, delta)
                }
            });
            let row = if k == 1 {
                let terms = (2..=k_max)
                    .map(|i| (i, coefficient(model, 1, i) - s * (1.0 - mu * (i - 1) as f64)))
                    .filter(|&(_, c)| c != 0.0)
                    .collect();
                Row { constant: s * (1.0 - mu), terms, tail, denom: w2 + s }
            } else {
                let terms = (k - 1..=k_max)
                    .map(|i| (i, coefficient(model, k, i)))
                    .filter(|&(_, c)| c != 0.0)
                    .collect();
                Row { constant: 0.0, terms, tail, denom: w2 + model.split_weight(k) }
            };
            if !(row.denom > 0.0) {
                return Err(SolverError::Degenerate(format!(
                    "row {k} has nonpositive diagonal {}",
                    row.denom
                )));
            }
            rows.push(row);
        }
        Ok(Self { rows, s, regime, unsupported })
    }

    pub fn truncation(&self) -> usize {
        self.rows.len()
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// One Jacobi step: `out = F(a)`.
    pub fn apply(&self, a: &[f64], out: &mut [f64]) {
        let (m0, m1) = tail_moments(a);
        for (row, o) in self.rows.iter().zip(out.iter_mut()) {
            let mut acc = Neumaier::new(row.constant);
            for &(i, c) in &row.terms {
                acc.add(c * a[i - 1]);
            }
            if let Some((beta, delta)) = row.tail {
                acc.add(beta * m1);
                acc.add(delta * m0);
            }
            *o = acc.total() / row.denom;
        }
    }

    /// Iterates `a^{(1)}, a^{(2)}, …` from `a^{(0)} = 0`.
    pub fn iterates(&self) -> Iterates<'_> {
        Iterates { system: self, current: vec![0.0; self.truncation()] }
    }
}

fn tail_moments(a: &[f64]) -> (f64, f64) {
    let (mut m0, mut m1) = (Neumaier::new(1.0), Neumaier::new(2.0));
    for (idx, &v) in a.iter().enumerate() {
        m0.add(-v);
        m1.add(-((idx + 1) as f64 * v));
    }
    (m0.total().max(0.0), m1.total().max(0.0))
}

fn sums(a: &[f64]) -> (f64, f64) {
    let (mut s0, mut s1) = (Neumaier::new(0.0), Neumaier::new(0.0));
    for (idx, &v) in a.iter().enumerate() {
        s0.add(v);
        s1.add((idx + 1) as f64 * v);
    }
    (s0.total(), s1.total())
}

/// Compensated summation; the tail closure subtracts sums that are close to
/// their limits, so plain accumulation leaks rounding into the iterates.
#[derive(Debug, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn new(x: f64) -> Self {
        Self { sum: x, comp: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(self) -> f64 {
        self.sum + self.comp
    }
}

pub struct Iterates<'a> {
    system: &'a FixedPointSystem,
    current: Vec<f64>,
}

impl Iterator for Iterates<'_> {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let mut next = vec![0.0; self.current.len()];
        self.system.apply(&self.current, &mut next);
        self.current.clone_from(&next);
        Some(next)
    }
}

/// Monotone fixed-point iteration from zero, stopped when the sup-norm step
/// drops below `tol`.
pub fn fixed_point_densities(
    model: &WeightModel,
    opts: &SolverOptions,
) -> Result<DensitySolution, SolverError> {
    let system = FixedPointSystem::new(model, opts)?;
    let k_max = system.truncation();
    let mut a = vec![0.0; k_max];
    let mut next = vec![0.0; k_max];
    let mut diag = IterationDiagnostics { max_decrease: f64::NEG_INFINITY, ..Default::default() };
    let mut step = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        system.apply(&a, &mut next);
        iterations += 1;
        step = 0.0;
        for (old, new) in a.iter().zip(&next) {
            step = f64::max(step, (new - old).abs());
            diag.max_decrease = diag.max_decrease.max(old - new);
        }
        let (s0, s1) = sums(&next);
        diag.max_sum = diag.max_sum.max(s0);
        diag.max_first_moment = diag.max_first_moment.max(s1);
        std::mem::swap(&mut a, &mut next);
        if step < opts.tol {
            break;
        }
    }
    if !(step < opts.tol) {
        return Err(SolverError::NoConvergence { iterations, step });
    }
    let mut warnings = Vec::new();
    if system.unsupported {
        warnings.push("unsupported regime: no almost-sure convergence guarantee".into());
    }
    let residuals = residuals(model, &a, opts.closure);
    let (sum, first_moment) = sums(&a);
    Ok(DensitySolution {
        method: SolveMethod::FixedPoint,
        truncation: k_max,
        densities: a,
        iterations,
        last_step: step,
        sum,
        first_moment,
        regime: system.regime,
        s: system.s,
        residuals,
        diagnostics: diag,
        unsupported: system.unsupported,
        warnings,
    })
}

/// Doubles the truncation until the entries `k ≤ K/2` move by less than
/// `tol` between consecutive truncations, or `k_limit` is reached.
pub fn fixed_point_adaptive(
    model: &WeightModel,
    opts: &SolverOptions,
    k_limit: usize,
) -> Result<DensitySolution, SolverError> {
    let mut sol = fixed_point_densities(model, opts)?;
    if model.d_max().is_some() {
        return Ok(sol);
    }
    let mut k = opts.truncation;
    while 2 * k <= k_limit {
        let finer = fixed_point_densities(model, &SolverOptions { truncation: 2 * k, ..*opts })?;
        let moved = sol.densities[..k / 2]
            .iter()
            .zip(&finer.densities)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        sol = finer;
        k *= 2;
        if moved < opts.tol {
            return Ok(sol);
        }
    }
    sol.warnings.push(format!("truncation limit {k_limit} reached before entries settled"));
    Ok(sol)
}

/// Residuals of the truncated stationary system. With [`TailClosure::Moments`]
/// the rows that the solver closes get the same tail term.
pub fn residuals(model: &WeightModel, a: &[f64], closure: TailClosure) -> ResidualReport {
    let k_max = a.len();
    let w2 = model.split_weight(2);
    let closing = match (closure, model.d_max()) {
        (TailClosure::Moments, None) => model.growing_rows(),
        _ => Vec::new(),
    };
    let (m0, m1) = tail_moments(a);
    let res: Vec<f64> = (1..=k_max)
        .map(|k| {
            let mut rhs: f64 = (k.saturating_sub(1).max(1)..=k_max)
                .map(|i| coefficient(model, k, i) * a[i - 1])
                .sum();
            if closing.contains(&k) {
                let c1 = coefficient(model, k, k_max + 1);
                let c2 = coefficient(model, k, k_max + 2);
                let beta = c2 - c1;
                rhs += beta * m1 + (c1 - beta * (k_max + 1) as f64) * m0;
            }
            a[k - 1] * (w2 + model.split_weight(k)) - rhs
        })
        .collect();
    let (s0, s1) = sums(a);
    ResidualReport {
        max_abs: res.iter().fold(0.0, |m, r| f64::max(m, r.abs())),
        residuals: res,
        mass_defect: (s0 - 1.0).abs(),
        first_moment_defect: (s1 - 2.0).abs(),
        tail_mass: (1.0 - s0).max(0.0),
    }
}

/// Direct solve of the bounded stationary system with one equation replaced
/// by `Σρ = 1`. `tol` bounds the allowed negativity of the result.
pub fn solve_finite(model: &WeightModel, tol: f64) -> Result<DensitySolution, SolverError> {
    let d = model
        .d_max()
        .ok_or_else(|| SolverError::InvalidTruncation("solve_finite needs a finite d_max".into()))?;
    let w2 = model.split_weight(2);
    let m = DMatrix::from_fn(d, d, |r, c| {
        let (k, i) = (r + 1, c + 1);
        let diag = if k == i { w2 + model.split_weight(k) } else { 0.0 };
        coefficient(model, k, i) - diag
    });
    let sv = m.clone().svd(false, false).singular_values;
    let scale = sv.max().max(1.0);
    let rank = sv.iter().filter(|&&x| x > 1e-10 * scale).count();
    if rank + 1 < d {
        return Err(SolverError::RankDeficient { rank, d_max: d });
    }

    let mut rhs = DVector::zeros(d);
    let mut rho = None;
    for replaced in (0..d).rev() {
        let mut sys = m.clone();
        sys.row_mut(replaced).fill(1.0);
        rhs.fill(0.0);
        rhs[replaced] = 1.0;
        if let Some(x) = sys.lu().solve(&rhs) {
            if x.iter().all(|v| v.is_finite()) && (&m * &x).iter().all(|r| r.abs() < 1e-9 * scale) {
                rho = Some(x);
                break;
            }
        }
    }
    let rho = rho.ok_or(SolverError::RankDeficient { rank, d_max: d })?;
    if let Some((idx, &v)) = rho.iter().enumerate().find(|(_, &v)| v <= -tol) {
        return Err(SolverError::NonPositive { k: idx + 1, value: v });
    }
    let densities: Vec<f64> = rho.iter().copied().collect();

    let mut warnings = Vec::new();
    let (sum, first_moment) = sums(&densities);
    if (first_moment - 2.0).abs() > 1e-8 {
        warnings.push(format!("Σkρ = {first_moment} differs from 2"));
    }
    let report = model.validate(1e-9);
    for c in [Condition::A2, Condition::A3] {
        if report.status(c) == ConditionStatus::Fail {
            warnings.push(format!("condition {c:?} fails; the solution may not be the almost-sure limit"));
        }
    }
    let (regime, s) = model.classify_regime()?;
    Ok(DensitySolution {
        method: SolveMethod::Linear,
        truncation: d,
        residuals: residuals(model, &densities, TailClosure::Truncate),
        densities,
        iterations: 0,
        last_step: 0.0,
        sum,
        first_moment,
        regime: Some(regime),
        s,
        diagnostics: IterationDiagnostics::default(),
        unsupported: false,
        warnings,
    })
}
