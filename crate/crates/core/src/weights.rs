//! Splitting and partitioning weights.
//!
//! A [`WeightModel`] pairs symmetric partitioning weights `w_{i,j}` with the
//! linear splitting weights `w_i = a·i + b` they induce through
//!
//! ```text
//! w_i = (i/2) · Σ_{j=1}^{i+1} w_{j, i+2-j}
//! ```
//!
//! Unbounded families are exposed as total functions of `(i, j)`; only
//! user tables are stored, and a table always has a finite maximal degree.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest index scanned numerically when computing `inf i·w_{1,i+1}`.
pub const LEAF_SCAN: usize = 10_000;

/// Number of derived splitting weights checked for unbounded families.
pub const LINEARITY_CHECK_LEN: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot determine inf i·w(1,i+1): unbounded model without a tail limit")]
    UnknownTail,
}

/// Linear splitting weights `w_i = a·i + b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingWeights {
    pub a: f64,
    pub b: f64,
}

impl SplittingWeights {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// `w_i = i + x`.
    pub const fn shifted(x: f64) -> Self {
        Self { a: 1.0, b: x }
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.a * i as f64 + self.b
    }

    /// The normalized offset `x = b/a`; `None` for constant weights.
    pub fn offset(&self) -> Option<f64> {
        (self.a != 0.0).then(|| self.b / self.a)
    }
}

impl fmt::Display for SplittingWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.b.is_sign_negative() { '-' } else { '+' };
        write!(f, "w_i = {}·i {sign} {}", self.a, self.b.abs())
    }
}

/// Convergence regime of a model, keyed on the leaf-split weights `w_{1,i+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Some `w_{1,i+1}` vanishes; every finite-`d_max` model is here.
    CaseI,
    /// All `w_{1,i+1} > 0` but `inf i·w_{1,i+1} = 0`.
    CaseII,
    /// `inf i·w_{1,i+1} > 0`.
    CaseIII,
}

/// Which family a model was built from. Closed-form oracles key on this.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Preferential,
    Uniform,
    AlphaClass,
    Grafting { alpha: f64, gamma: f64 },
    Table,
}

/// Dense symmetric table of partitioning weights with a degree bound.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionTable {
    d_max: usize,
    w: Vec<f64>,
}

impl PartitionTable {
    /// Builds a table from `(i, j, weight)` entries; `(j, i)` is filled in.
    pub fn new(d_max: usize, entries: &[(usize, usize, f64)]) -> Result<Self, WeightError> {
        if d_max < 1 {
            return Err(WeightError::InvalidParameter("d_max must be ≥ 1".into()));
        }
        let n = d_max + 1;
        let mut w = vec![0.0; n * n];
        let mut seen = vec![false; n * n];
        for &(i, j, v) in entries {
            if i == 0 || j == 0 || i > d_max || j > d_max {
                return Err(WeightError::InvalidParameter(format!(
                    "entry ({i},{j}) outside 1..={d_max}"
                )));
            }
            if i + j - 2 > d_max {
                return Err(WeightError::InvalidParameter(format!(
                    "entry ({i},{j}) splits a vertex of degree {} > d_max",
                    i + j - 2
                )));
            }
            if !v.is_finite() || v < 0.0 {
                return Err(WeightError::InvalidParameter(format!(
                    "entry ({i},{j}) = {v} is not a finite nonnegative weight"
                )));
            }
            for (p, q) in [(i, j), (j, i)] {
                let idx = p * n + q;
                if seen[idx] && w[idx] != v {
                    return Err(WeightError::InvalidParameter(format!(
                        "conflicting values for ({p},{q})"
                    )));
                }
                seen[idx] = true;
                w[idx] = v;
            }
        }
        Ok(Self { d_max, w })
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i > self.d_max || j > self.d_max {
            return 0.0;
        }
        self.w[i * (self.d_max + 1) + j]
    }

    fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 1..=self.d_max {
            for j in i..=self.d_max {
                let v = self.get(i, j);
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// Large-`i` behaviour of an alpha sequence: `α_i ≈ (n1·i + n0) / (d1·i + d0)`.
///
/// A plain limit `l` is `(0, l) / (0, 1)`. The rational form is what makes
/// the leaf-split limit computable after the splitting weights are rescaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaTail {
    pub num: (f64, f64),
    pub den: (f64, f64),
}

impl AlphaTail {
    pub fn limit(l: f64) -> Self {
        Self { num: (0.0, l), den: (0.0, 1.0) }
    }

    /// `lim_{i→∞} α_i · (a·i + b)`, all coefficients assumed nonnegative.
    fn leaf_limit(&self, sw: SplittingWeights) -> f64 {
        let (n1, n0) = self.num;
        let (d1, d0) = self.den;
        let quad = n1 * sw.a;
        let lin = n1 * sw.b + n0 * sw.a;
        let cst = n0 * sw.b;
        if d1 > 0.0 {
            if quad > 0.0 {
                f64::INFINITY
            } else {
                lin / d1
            }
        } else if quad > 0.0 || lin > 0.0 {
            f64::INFINITY
        } else {
            cst / d0
        }
    }
}

/// The sequence `(α_i)` of an alpha-class model.
#[derive(Clone)]
pub struct AlphaSequence {
    f: Arc<dyn Fn(usize) -> f64 + Send + Sync>,
    tail: Option<AlphaTail>,
}

impl AlphaSequence {
    pub fn new(f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), tail: None }
    }

    pub fn with_limit(mut self, limit: f64) -> Self {
        self.tail = Some(AlphaTail::limit(limit));
        self
    }

    pub fn with_tail(mut self, tail: AlphaTail) -> Self {
        self.tail = Some(tail);
        self
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        (self.f)(i)
    }
}

impl fmt::Debug for AlphaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlphaSequence").field("tail", &self.tail).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
enum Partition {
    Preferential,
    Uniform,
    Alpha { alpha: AlphaSequence, m: usize, head: PartitionTable },
    Table(PartitionTable),
}

/// Splitting weights, partitioning weights and their regime.
#[derive(Debug, Clone)]
pub struct WeightModel {
    family: Family,
    partition: Partition,
    splitting: SplittingWeights,
    d_max: Option<usize>,
    /// `lim_{i→∞} i·w_{1,i+1}` for unbounded models, when known.
    leaf_limit: Option<f64>,
    regime: Option<(Regime, f64)>,
}

impl WeightModel {
    /// Preferential attachment: only `w_{1,i+1} = w_{i+1,1} = w_i / i` are nonzero.
    pub fn preferential(sw: SplittingWeights) -> Result<Self, WeightError> {
        if sw.a < 0.0 || sw.weight(1) < 0.0 || sw.weight(2) <= 0.0 {
            return Err(WeightError::InvalidParameter(format!(
                "preferential attachment needs w_i ≥ 0 for all i and w_2 > 0, got {sw}"
            )));
        }
        let leaf_limit = if sw.a > 0.0 { f64::INFINITY } else { sw.b };
        Self::finish(Family::Preferential, Partition::Preferential, sw, None, Some(leaf_limit))
    }

    /// Uniform partitioning with `w_i = i + x`.
    pub fn uniform(x: f64) -> Result<Self, WeightError> {
        if !(x > -1.0) || !x.is_finite() {
            return Err(WeightError::InvalidParameter(format!("uniform family needs x > -1, got {x}")));
        }
        Self::uniform_weights(SplittingWeights::shifted(x))
    }

    /// Uniform partitioning `w_{i,k+2-i} = 2w_k / (k(k+1))` for arbitrary linear weights.
    pub fn uniform_weights(sw: SplittingWeights) -> Result<Self, WeightError> {
        if sw.a < 0.0 || sw.weight(1) <= 0.0 {
            return Err(WeightError::InvalidParameter(format!(
                "uniform family needs w_i > 0 for all i, got {sw}"
            )));
        }
        Self::finish(Family::Uniform, Partition::Uniform, sw, None, Some(2.0 * sw.a))
    }

    /// The alpha class: for parent degree `i ≥ m`, `i·w_{1,i+1} = α_i w_i` and
    /// `i·w_{2,i} = (1-α_i) w_i` (with `w_{2,2} = (1-α_2) w_2` when `m = 2`).
    /// `head` supplies every split of a vertex of degree `< m`.
    pub fn alpha_class(
        sw: SplittingWeights,
        alpha: AlphaSequence,
        m: usize,
        head: PartitionTable,
    ) -> Result<Self, WeightError> {
        if m < 2 {
            return Err(WeightError::InvalidParameter("alpha class needs M ≥ 2".into()));
        }
        if sw.a < 0.0 || sw.weight(1) < 0.0 || sw.weight(2) <= 0.0 {
            return Err(WeightError::InvalidParameter(format!(
                "alpha class needs w_i ≥ 0 for all i and w_2 > 0, got {sw}"
            )));
        }
        for i in m..m + LINEARITY_CHECK_LEN {
            let a = alpha.at(i);
            if !(a > 0.0 && a <= 1.0) {
                return Err(WeightError::InvalidParameter(format!("α_{i} = {a} outside (0, 1]")));
            }
        }
        let leaf_limit = alpha.tail.map(|t| t.leaf_limit(sw));
        Self::finish(
            Family::AlphaClass,
            Partition::Alpha { alpha, m, head },
            sw,
            None,
            leaf_limit,
        )
    }

    /// Attachment-and-grafting weights: `w_i = (α/2 + 1 - γ)i + 2γ - α - 1`,
    /// `M = 2`, `α_i = 1 - α·i / (2 w_i)`.
    pub fn grafting(alpha: f64, gamma: f64) -> Result<Self, WeightError> {
        if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&gamma) {
            return Err(WeightError::InvalidParameter(format!(
                "grafting needs α, γ ∈ [0, 1], got ({alpha}, {gamma})"
            )));
        }
        let sw = SplittingWeights::new(alpha / 2.0 + 1.0 - gamma, 2.0 * gamma - alpha - 1.0);
        if sw.weight(1) < 0.0 {
            return Err(WeightError::InvalidParameter(format!(
                "grafting needs γ ≥ α/2 so that w_1 ≥ 0, got ({alpha}, {gamma})"
            )));
        }
        if alpha >= 1.0 {
            return Err(WeightError::InvalidParameter(
                "grafting with α = 1 has α_i = 0 at i = 2".into(),
            ));
        }
        let head = PartitionTable::new(2, &[(1, 2, sw.weight(1))])?;
        // α_i w_i = (1-γ)i + 2γ - α - 1 for i ≥ 2.
        let tail = AlphaTail {
            num: (1.0 - gamma, 2.0 * gamma - alpha - 1.0),
            den: (sw.a, sw.b),
        };
        let alpha_seq = AlphaSequence::new(move |i| 1.0 - alpha * i as f64 / (2.0 * sw.weight(i)))
            .with_tail(tail);
        let mut model = Self::alpha_class(sw, alpha_seq, 2, head)?;
        model.family = Family::Grafting { alpha, gamma };
        Ok(model)
    }

    /// A finite table of partitioning weights. Splitting weights are fitted
    /// from the derived `w_1, w_2` and must be linear up to `d_max`.
    pub fn table(d_max: usize, entries: &[(usize, usize, f64)]) -> Result<Self, WeightError> {
        if d_max < 2 {
            return Err(WeightError::InvalidParameter("table needs d_max ≥ 2".into()));
        }
        let table = PartitionTable::new(d_max, entries)?;
        let derived = derive_splitting_weights(&|i, j| table.get(i, j), d_max);
        let sw = SplittingWeights::new(derived[1] - derived[0], 2.0 * derived[0] - derived[1]);
        let scale = derived.iter().fold(1.0_f64, |m, w| m.max(w.abs()));
        for (idx, w) in derived.iter().enumerate() {
            let i = idx + 1;
            if (w - sw.weight(i)).abs() > 1e-9 * scale {
                return Err(WeightError::InvalidParameter(format!(
                    "derived splitting weights are not linear: w_{i} = {w}, fit gives {}",
                    sw.weight(i)
                )));
            }
        }
        if (2..d_max).any(|i| sw.weight(i) <= 0.0) {
            return Err(WeightError::InvalidParameter(
                "table needs w_i > 0 for 2 ≤ i ≤ d_max - 1".into(),
            ));
        }
        Self::finish(Family::Table, Partition::Table(table), sw, Some(d_max), None)
    }

    fn finish(
        family: Family,
        partition: Partition,
        splitting: SplittingWeights,
        d_max: Option<usize>,
        leaf_limit: Option<f64>,
    ) -> Result<Self, WeightError> {
        let mut model = Self { family, partition, splitting, d_max, leaf_limit, regime: None };
        if d_max.is_none() {
            let derived = model.derived_splitting_weights(LINEARITY_CHECK_LEN);
            for (idx, w) in derived.iter().enumerate() {
                let expect = splitting.weight(idx + 1);
                if (w - expect).abs() > 1e-9 * expect.abs().max(1.0) {
                    return Err(WeightError::InvalidParameter(format!(
                        "partition weights give w_{} = {w}, expected {expect}",
                        idx + 1
                    )));
                }
            }
        }
        model.regime = model.compute_regime();
        Ok(model)
    }

    /// Supplies `lim i·w_{1,i+1}` for an unbounded model whose tail is not known.
    pub fn with_leaf_limit_hint(mut self, limit: f64) -> Self {
        if self.d_max.is_none() {
            self.leaf_limit = Some(limit);
            self.regime = self.compute_regime();
        }
        self
    }

    /// Same split law, new splitting weights: `w'_{j,i+2-j} = (w'_i / w_i) w_{j,i+2-j}`.
    pub fn with_splitting_weights(&self, sw: SplittingWeights) -> Result<Self, WeightError> {
        match &self.partition {
            Partition::Preferential => Self::preferential(sw),
            Partition::Uniform => Self::uniform_weights(sw),
            Partition::Alpha { alpha, m, head } => {
                let old = self.splitting;
                let entries: Vec<_> = head
                    .entries()
                    .into_iter()
                    .map(|(i, j, v)| rescale_entry(i, j, v, old, sw))
                    .collect::<Result<_, _>>()?;
                let head = PartitionTable::new(head.d_max(), &entries)?;
                let alpha = alpha.clone();
                let leaf = alpha.tail.map(|t| t.leaf_limit(sw));
                let mut model = Self::alpha_class(sw, alpha, *m, head)?;
                model.leaf_limit = leaf;
                model.regime = model.compute_regime();
                Ok(model)
            }
            Partition::Table(t) => {
                let entries: Vec<_> = t
                    .entries()
                    .into_iter()
                    .map(|(i, j, v)| rescale_entry(i, j, v, self.splitting, sw))
                    .collect::<Result<_, _>>()?;
                Self::table(t.d_max(), &entries)
            }
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn splitting(&self) -> SplittingWeights {
        self.splitting
    }

    pub fn d_max(&self) -> Option<usize> {
        self.d_max
    }

    /// Splitting weight of a degree-`i` vertex; zero beyond `d_max`.
    #[inline]
    pub fn split_weight(&self, i: usize) -> f64 {
        match self.d_max {
            Some(d) if i > d => 0.0,
            _ => self.splitting.weight(i),
        }
    }

    /// Partitioning weight `w_{i,j}`.
    pub fn partition(&self, i: usize, j: usize) -> f64 {
        if i == 0 || j == 0 {
            return 0.0;
        }
        if let Some(d) = self.d_max {
            if i > d || j > d {
                return 0.0;
            }
        }
        let p = i + j - 2;
        if p == 0 {
            return 0.0;
        }
        let w = |k: usize| self.splitting.weight(k);
        match &self.partition {
            Partition::Preferential => {
                if i == 1 || j == 1 {
                    w(p) / p as f64
                } else {
                    0.0
                }
            }
            Partition::Uniform => 2.0 * w(p) / (p * (p + 1)) as f64,
            Partition::Alpha { alpha, m, head } => {
                if p < *m {
                    return head.get(i, j);
                }
                match i.min(j) {
                    1 => alpha.at(p) * w(p) / p as f64,
                    2 if p == 2 => (1.0 - alpha.at(2)) * w(2),
                    2 => (1.0 - alpha.at(p)) * w(p) / p as f64,
                    _ => 0.0,
                }
            }
            Partition::Table(t) => t.get(i, j),
        }
    }

    /// Rows `k` of the stationary system whose coefficients `i·w_{k,i-k+2}`
    /// grow without bound in `i`. Truncating these rows loses first-moment
    /// tail mass, so the solver closes them with the sum identities.
    pub fn growing_rows(&self) -> Vec<usize> {
        if self.d_max.is_some() || self.splitting.a <= 0.0 {
            return Vec::new();
        }
        match self.partition {
            Partition::Preferential => vec![1],
            Partition::Alpha { .. } => vec![1, 2],
            Partition::Uniform | Partition::Table(_) => Vec::new(),
        }
    }

    /// `w_1..w_{i_max}` derived from the partitioning weights.
    pub fn derived_splitting_weights(&self, i_max: usize) -> Vec<f64> {
        derive_splitting_weights(&|i, j| self.partition(i, j), i_max)
    }

    /// Regime and `s = inf{ i·w_{1,i+1} : 1 ≤ i < d_max }`.
    pub fn classify_regime(&self) -> Result<(Regime, f64), WeightError> {
        self.regime.ok_or(WeightError::UnknownTail)
    }

    fn compute_regime(&self) -> Option<(Regime, f64)> {
        let leaf = |i: usize| i as f64 * self.partition(1, i + 1);
        match self.d_max {
            Some(d) => {
                let s = (1..d).map(leaf).fold(f64::INFINITY, f64::min);
                Some((Regime::CaseI, if s.is_finite() { s } else { 0.0 }))
            }
            None => {
                let scan = (1..=LEAF_SCAN).map(leaf).fold(f64::INFINITY, f64::min);
                if scan <= 0.0 {
                    return Some((Regime::CaseI, 0.0));
                }
                let s = scan.min(self.leaf_limit?);
                Some(if s > 0.0 { (Regime::CaseIII, s) } else { (Regime::CaseII, 0.0) })
            }
        }
    }

    /// Checks conditions (A1)–(A4).
    pub fn validate(&self, tol: f64) -> ValidationReport {
        validate_model(self, tol)
    }
}

fn rescale_entry(
    i: usize,
    j: usize,
    v: f64,
    old: SplittingWeights,
    new: SplittingWeights,
) -> Result<(usize, usize, f64), WeightError> {
    let p = i + j - 2;
    let w_old = old.weight(p);
    if v == 0.0 {
        return Ok((i, j, 0.0));
    }
    if w_old == 0.0 {
        return Err(WeightError::InvalidParameter(format!(
            "cannot rescale split of degree {p}: old splitting weight is zero"
        )));
    }
    Ok((i, j, v * new.weight(p) / w_old))
}

/// `w_i = (i/2) Σ_{j=1}^{i+1} w_{j,i+2-j}` for `i = 1..=i_max`.
pub fn derive_splitting_weights(partition: &dyn Fn(usize, usize) -> f64, i_max: usize) -> Vec<f64> {
    (1..=i_max)
        .map(|i| {
            let sum: f64 = (1..=i + 1).map(|j| partition(j, i + 2 - j)).sum();
            0.5 * i as f64 * sum
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    A1,
    A2,
    A3,
    A4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionStatus {
    Pass,
    Fail,
    NotApplicable,
    NotChecked,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub status: ConditionStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<ConditionCheck>,
    /// `(a, b)` fitted to the first two derived splitting weights.
    pub fitted: SplittingWeights,
    pub max_linearity_residual: f64,
}

impl ValidationReport {
    pub fn status(&self, c: Condition) -> ConditionStatus {
        self.checks
            .iter()
            .find(|chk| chk.condition == c)
            .map(|chk| chk.status)
            .unwrap_or(ConditionStatus::NotChecked)
    }

    /// No condition failed.
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.status != ConditionStatus::Fail)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:?}: {:?} ({})", c.condition, c.status, c.detail)?;
        }
        Ok(())
    }
}

/// Reports (A1)–(A3) and marks (A4) as not checked. Never aborts.
pub fn validate_model(m: &WeightModel, tol: f64) -> ValidationReport {
    let n = m.d_max.unwrap_or(LINEARITY_CHECK_LEN).max(2);
    let derived = m.derived_splitting_weights(n);
    let fitted = SplittingWeights::new(derived[1] - derived[0], 2.0 * derived[0] - derived[1]);
    let max_res = derived
        .iter()
        .enumerate()
        .map(|(idx, w)| (w - fitted.weight(idx + 1)).abs())
        .fold(0.0, f64::max);
    let nonneg = derived.iter().all(|&w| w >= -tol);
    let a1 = ConditionCheck {
        condition: Condition::A1,
        status: if max_res <= tol && nonneg { ConditionStatus::Pass } else { ConditionStatus::Fail },
        detail: format!(
            "fit a = {}, b = {}, max residual {max_res:.3e} over i ≤ {n}",
            fitted.a, fitted.b
        ),
    };

    let (a2, a3) = match m.d_max {
        None => (
            ConditionCheck {
                condition: Condition::A2,
                status: ConditionStatus::NotApplicable,
                detail: "unbounded degrees".into(),
            },
            ConditionCheck {
                condition: Condition::A3,
                status: ConditionStatus::NotApplicable,
                detail: "unbounded degrees".into(),
            },
        ),
        Some(d) => {
            let missing: Vec<usize> = (2..=d).filter(|&k| !(m.partition(1, k) > 0.0)).collect();
            let a2 = ConditionCheck {
                condition: Condition::A2,
                status: if missing.is_empty() { ConditionStatus::Pass } else { ConditionStatus::Fail },
                detail: if missing.is_empty() {
                    format!("w(1,k) > 0 for 2 ≤ k ≤ {d}")
                } else {
                    format!("w(1,k) = 0 for k in {missing:?}")
                },
            };
            let witness = (2..d).find(|&i| m.partition(i, d + 2 - i) > 0.0);
            let a3 = ConditionCheck {
                condition: Condition::A3,
                status: if witness.is_some() { ConditionStatus::Pass } else { ConditionStatus::Fail },
                detail: match witness {
                    Some(i) => format!("w({i},{}) > 0", d + 2 - i),
                    None => format!("no w(i,{}-i) > 0 with 2 ≤ i ≤ {}", d + 2, d - 1),
                },
            };
            (a2, a3)
        }
    };
    let a4 = ConditionCheck {
        condition: Condition::A4,
        status: ConditionStatus::NotChecked,
        detail: "diagonalizability is not needed for almost-sure convergence".into(),
    };
    ValidationReport { checks: vec![a1, a2, a3, a4], fitted, max_linearity_residual: max_res }
}
