//! Replicated experiments: configuration, parallel simulation with one RNG
//! stream per replica, comparison against analytic densities, and the files
//! written for each run.
//!
//! Every output is a pure function of the configuration (including the
//! seed); wall-clock time is never written to disk.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::closed_forms::closed_form_densities;
use crate::growth::{
    census_identities_hold, expected_total_weight, replica_rng, run, write_census_bin,
    write_census_csv, CensusSnapshot, GrowthEngine, GrowthError, OrderedTree, UrnState,
};
use crate::solver::{fixed_point_densities, solve_finite, DensitySolution, SolverError, SolverOptions};
use crate::twocolour::{
    run_two_colour, solve_two_colour, write_two_colour_csv, TwoColourError, TwoColourModel,
    TwoColourSnapshot, TwoColourSolution,
};
use crate::weights::{SplittingWeights, WeightError, WeightModel};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SPLITGROW_THREADS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    TwoColour(#[from] TwoColourError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A weight model as written in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Preferential attachment with `w_i = a·i + b`.
    Preferential {
        #[serde(default = "one")]
        a: f64,
        #[serde(default)]
        b: f64,
    },
    /// Uniform partitioning with `w_i = i + x`, or `w_i = a·i + b` when `x` is absent.
    Uniform {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
    },
    Grafting { alpha: f64, gamma: f64 },
    /// Entries `[i, j, w_{i,j}]`; the mirror entry is implied.
    Table { d_max: usize, entries: Vec<(usize, usize, f64)> },
    /// White vertices split with the partition weights of `white`.
    TwoColour { a: f64, b: f64, white: Box<ModelSpec> },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone)]
pub enum BuiltModel {
    One(WeightModel),
    Two(TwoColourModel),
}

impl ModelSpec {
    pub fn build(&self) -> Result<BuiltModel, ExperimentError> {
        Ok(match self {
            ModelSpec::TwoColour { a, b, white } => match white.build()? {
                BuiltModel::One(w) => BuiltModel::Two(TwoColourModel::new(*a, *b, w)?),
                BuiltModel::Two(_) => {
                    return Err(ExperimentError::Config("white model must be one-colour".into()))
                }
            },
            _ => BuiltModel::One(self.build_one()?),
        })
    }

    fn build_one(&self) -> Result<WeightModel, ExperimentError> {
        Ok(match *self {
            ModelSpec::Preferential { a, b } => WeightModel::preferential(SplittingWeights::new(a, b))?,
            ModelSpec::Uniform { x: Some(x), a: None, b: None } => WeightModel::uniform(x)?,
            ModelSpec::Uniform { x: None, a, b } => {
                WeightModel::uniform_weights(SplittingWeights::new(a.unwrap_or(1.0), b.unwrap_or(0.0)))?
            }
            ModelSpec::Uniform { .. } => {
                return Err(ExperimentError::Config("uniform takes either x or (a, b)".into()))
            }
            ModelSpec::Grafting { alpha, gamma } => WeightModel::grafting(alpha, gamma)?,
            ModelSpec::Table { d_max, ref entries } => WeightModel::table(d_max, entries)?,
            ModelSpec::TwoColour { .. } => unreachable!("handled by build"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Tree,
    Urn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(rename = "K", default = "default_truncation")]
    pub truncation: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_truncation() -> usize {
    512
}
fn default_tol() -> f64 {
    1e-13
}
fn default_max_iter() -> usize {
    1_000_000
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { truncation: default_truncation(), tol: default_tol(), max_iter: default_max_iter() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    /// Analytic side of `compare`; defaults to `model`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ModelSpec>,
    #[serde(default = "default_t_final")]
    pub t_final: u64,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    /// Snapshot every `thin` steps; 0 keeps only the initial and final census.
    #[serde(default)]
    pub thin: u64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub force_unsupported: bool,
    #[serde(default = "default_z_crit")]
    pub z_crit: f64,
    #[serde(default = "default_k_check")]
    pub k_check: usize,
    #[serde(default)]
    pub engine: Engine,
}

fn default_t_final() -> u64 {
    100_000
}
fn default_replicas() -> usize {
    32
}
fn default_z_crit() -> f64 {
    5.0
}
fn default_k_check() -> usize {
    8
}

impl ExperimentConfig {
    pub fn new(model: ModelSpec) -> Self {
        Self {
            model,
            reference: None,
            t_final: default_t_final(),
            replicas: default_replicas(),
            thin: 0,
            solver: SolverConfig::default(),
            seed: 0,
            out: None,
            force_unsupported: false,
            z_crit: default_z_crit(),
            k_check: default_k_check(),
            engine: Engine::Tree,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), ExperimentError> {
        if self.replicas == 0 {
            return Err(ExperimentError::Config("replicas must be ≥ 1".into()));
        }
        if self.t_final <= 2 {
            return Err(ExperimentError::Config("t_final must exceed the initial t = 2".into()));
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions::new(self.solver.truncation, self.solver.tol, self.solver.max_iter)
            .forced(self.force_unsupported)
    }

    /// SHA-256 of the canonical JSON form, excluding the output directory.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Runs `f` on a pool capped by `SPLITGROW_THREADS` when set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok());
    match cap {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|_| panic!("cannot build a pool of {n} threads")),
        _ => f(),
    }
}

/// Analytic densities with their provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolveOutput {
    One {
        method: String,
        solution: DensitySolution,
        /// Exact densities when the family has a known solution.
        #[serde(skip_serializing_if = "Option::is_none")]
        closed_form: Option<Vec<f64>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        max_closed_form_deviation: Option<f64>,
    },
    Two { solution: TwoColourSolution },
}

impl SolveOutput {
    pub fn unsupported(&self) -> bool {
        match self {
            SolveOutput::One { solution, .. } => solution.unsupported,
            SolveOutput::Two { solution } => solution.reduced.as_ref().is_some_and(|r| r.unsupported),
        }
    }
}

pub fn solve_model(model: &BuiltModel, opts: &SolverOptions) -> Result<SolveOutput, ExperimentError> {
    match model {
        BuiltModel::One(m) => {
            let (method, solution) = match m.d_max() {
                Some(_) => ("linear", solve_finite(m, 1e-10)?),
                None => ("fixed_point", fixed_point_densities(m, opts)?),
            };
            let closed_form = closed_form_densities(m, solution.densities.len());
            let max_closed_form_deviation = closed_form.as_ref().map(|cf| {
                cf.iter().zip(&solution.densities).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            });
            Ok(SolveOutput::One {
                method: method.into(),
                solution,
                closed_form,
                max_closed_form_deviation,
            })
        }
        BuiltModel::Two(m) => Ok(SolveOutput::Two { solution: solve_two_colour(m, opts)? }),
    }
}

pub fn solve(config: &ExperimentConfig) -> Result<SolveOutput, ExperimentError> {
    solve_model(&config.model.build()?, &config.solver_options())
}

/// Snapshots of one replica.
#[derive(Debug, Clone, PartialEq)]
pub enum ReplicaCensus {
    One(Vec<CensusSnapshot>),
    Two(Vec<TwoColourSnapshot>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub replicas: Vec<ReplicaCensus>,
    /// Snapshots violating the exact census identities.
    pub identity_violations: usize,
    /// Largest `|W_t - expected| / expected` over all snapshots.
    pub max_weight_deviation: f64,
}

fn simulate_one(
    model: &WeightModel,
    engine: Engine,
    seed: u64,
    replica: usize,
    t_final: u64,
    thin: u64,
) -> Result<Vec<CensusSnapshot>, GrowthError> {
    let mut rng = replica_rng(seed, replica as u64);
    let mut e: Box<dyn GrowthEngine> = match engine {
        Engine::Tree => Box::new(OrderedTree::single_edge(model)?),
        Engine::Urn => Box::new(UrnState::single_edge(model)?),
    };
    run(e.as_mut(), t_final, thin, &mut rng)
}

fn relative(x: f64, expect: f64) -> f64 {
    (x - expect).abs() / expect.abs().max(1.0)
}

pub fn simulate_model(model: &BuiltModel, config: &ExperimentConfig) -> Result<SimulationOutput, ExperimentError> {
    config.check()?;
    let (seed, t_final, thin) = (config.seed, config.t_final, config.thin);
    let replicas: Vec<ReplicaCensus> = with_thread_cap(|| {
        (0..config.replicas)
            .into_par_iter()
            .map(|r| -> Result<ReplicaCensus, ExperimentError> {
                Ok(match model {
                    BuiltModel::One(m) => ReplicaCensus::One(simulate_one(m, config.engine, seed, r, t_final, thin)?),
                    BuiltModel::Two(m) => {
                        let mut rng = replica_rng(seed, r as u64);
                        ReplicaCensus::Two(run_two_colour(m, t_final, thin, &mut rng)?)
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut identity_violations = 0;
    let mut max_weight_deviation: f64 = 0.0;
    for rep in &replicas {
        match (rep, model) {
            (ReplicaCensus::One(snaps), BuiltModel::One(m)) => {
                for s in snaps {
                    let mut census = vec![0];
                    census.extend_from_slice(&s.counts);
                    identity_violations += usize::from(!census_identities_hold(&census, s.t));
                    max_weight_deviation =
                        max_weight_deviation.max(relative(s.total_weight, expected_total_weight(m, s.t)));
                }
            }
            (ReplicaCensus::Two(snaps), BuiltModel::Two(m)) => {
                for s in snaps {
                    let size: u64 = s.white.iter().zip(&s.black).map(|(o, b)| 3 * o + 2 * b).sum();
                    identity_violations += usize::from(size != s.t + 2);
                    let expect = (m.a() - m.b()) * s.t as f64 + m.b();
                    max_weight_deviation = max_weight_deviation.max(relative(s.total_weight, expect));
                }
            }
            _ => unreachable!("replica kind follows the model"),
        }
    }
    Ok(SimulationOutput { replicas, identity_violations, max_weight_deviation })
}

pub fn simulate(config: &ExperimentConfig) -> Result<SimulationOutput, ExperimentError> {
    simulate_model(&config.model.build()?, config)
}

/// Mean and standard error (sample standard deviation over `√R`).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `(empirical - analytic) / stderr`, with a zero error giving 0 or ±∞.
pub fn z_score(empirical: f64, analytic: f64, stderr: f64) -> f64 {
    let d = empirical - analytic;
    if stderr > 0.0 {
        d / stderr
    } else if d == 0.0 {
        0.0
    } else {
        d.signum() * f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportRow {
    pub quantity: String,
    pub k: Option<usize>,
    pub analytic: Option<f64>,
    pub method: Option<String>,
    pub empirical: Option<f64>,
    pub stderr: Option<f64>,
    pub z: Option<f64>,
}

impl ReportRow {
    fn global(quantity: &str, value: f64) -> Self {
        Self { quantity: quantity.into(), empirical: Some(value), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub seed: u64,
    pub config_digest: String,
    pub unsupported: bool,
    /// Human-readable reasons the comparison failed; empty on success.
    pub failures: Vec<String>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn row(&self, quantity: &str, k: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.quantity == quantity && r.k == Some(k))
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(T::to_string).unwrap_or_default()
        }
        writeln!(w, "quantity,k,analytic,method,empirical,stderr,z")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.quantity,
                opt(&r.k),
                opt(&r.analytic),
                opt(&r.method),
                opt(&r.empirical),
                opt(&r.stderr),
                opt(&r.z)
            )?;
        }
        Ok(())
    }
}

/// Final-snapshot fractions `n_k / t` per replica, for `k = 1..=k_max`.
fn final_fractions(snaps: &[CensusSnapshot], k_max: usize) -> Vec<f64> {
    let s = snaps.last().expect("a run records at least one snapshot");
    (1..=k_max).map(|k| s.n(k) as f64 / s.t as f64).collect()
}

fn density_rows(
    quantity: &str,
    per_replica: &[Vec<f64>],
    analytic: &[f64],
    method: &str,
) -> Vec<ReportRow> {
    (0..analytic.len())
        .map(|idx| {
            let xs: Vec<f64> = per_replica.iter().map(|v| v[idx]).collect();
            let (mean, se) = mean_stderr(&xs);
            ReportRow {
                quantity: quantity.into(),
                k: Some(idx + 1),
                analytic: Some(analytic[idx]),
                method: Some(method.into()),
                empirical: Some(mean),
                stderr: Some(se),
                z: Some(z_score(mean, analytic[idx], se)),
            }
        })
        .collect()
}

/// Number of degree classes reported per quantity.
const REPORT_DEGREES: usize = 20;

/// Analytic one-colour densities with a method tag.
fn analytic_one(m: &WeightModel, opts: &SolverOptions, n: usize) -> Result<(Vec<f64>, String), ExperimentError> {
    if let Some(cf) = closed_form_densities(m, n) {
        return Ok((cf, "closed_form".into()));
    }
    let (sol, method) = match m.d_max() {
        Some(_) => (solve_finite(m, 1e-10)?, "linear"),
        None => (fixed_point_densities(m, opts)?, "fixed_point"),
    };
    Ok(((1..=n).map(|k| sol.density(k)).collect(), method.into()))
}

/// Simulates, solves and joins the two into a report.
pub fn compare(config: &ExperimentConfig) -> Result<(ExperimentReport, SimulationOutput), ExperimentError> {
    let model = config.model.build()?;
    let reference = match &config.reference {
        Some(spec) => spec.build()?,
        None => model.clone(),
    };
    let opts = config.solver_options();
    let sim = simulate_model(&model, config)?;
    let mut rows = Vec::new();
    let mut unsupported = false;
    let mut checked = Vec::new();

    match (&reference, &sim.replicas[0]) {
        (BuiltModel::One(m), ReplicaCensus::One(_)) => {
            let n = m.d_max().map_or(REPORT_DEGREES, |d| d.min(REPORT_DEGREES));
            let (analytic, method) = analytic_one(m, &opts, n)?;
            if let Ok((regime, s)) = m.classify_regime() {
                unsupported = !matches!(regime, crate::weights::Regime::CaseIII)
                    && !(m.d_max().is_some() && s > 0.0);
            }
            let per: Vec<Vec<f64>> = sim
                .replicas
                .iter()
                .map(|r| match r {
                    ReplicaCensus::One(s) => final_fractions(s, n),
                    ReplicaCensus::Two(_) => unreachable!(),
                })
                .collect();
            rows.extend(density_rows("density", &per, &analytic, &method));
            checked.push("density");
        }
        (BuiltModel::Two(m), ReplicaCensus::Two(_)) => {
            let sol = solve_two_colour(m, &opts)?;
            unsupported = sol.reduced.as_ref().is_some_and(|r| r.unsupported);
            let n = sol.white.len().min(REPORT_DEGREES);
            let (mut pw, mut pb) = (Vec::new(), Vec::new());
            for r in &sim.replicas {
                let ReplicaCensus::Two(snaps) = r else { unreachable!() };
                let s = snaps.last().expect("nonempty run");
                let frac = |v: &Vec<u64>, k: usize| v.get(k - 1).copied().unwrap_or(0) as f64 / s.t as f64;
                pw.push((1..=n).map(|k| frac(&s.white, k)).collect::<Vec<_>>());
                pb.push((1..=n).map(|k| frac(&s.black, k)).collect::<Vec<_>>());
            }
            rows.extend(density_rows("white", &pw, &sol.white[..n], "reduction"));
            rows.extend(density_rows("black", &pb, &sol.black[..n], "reduction"));
            checked.extend(["white", "black"]);
            // ρ° + ρ• against the reduced one-colour densities
            if let Some(red) = &sol.reduced {
                for k in 1..=n {
                    rows.push(ReportRow {
                        quantity: "rho_sum_vs_reduced".into(),
                        k: Some(k),
                        analytic: Some(red.density(k)),
                        method: Some("fixed_point".into()),
                        empirical: Some(sol.rho_white[k - 1] + sol.rho_black[k - 1]),
                        ..Default::default()
                    });
                }
            }
            rows.push(ReportRow::global("max_equation_residual", sol.max_residual));
        }
        _ => {
            return Err(ExperimentError::Config(
                "reference model must have the same number of colours as the model".into(),
            ))
        }
    }

    rows.push(ReportRow::global("identity_violations", sim.identity_violations as f64));
    rows.push(ReportRow::global("max_weight_deviation", sim.max_weight_deviation));
    rows.push(ReportRow::global("replicas", config.replicas as f64));
    rows.push(ReportRow::global("t_final", config.t_final as f64));
    if unsupported {
        rows.push(ReportRow::global("unsupported", 1.0));
    }

    let mut failures = Vec::new();
    for r in &rows {
        if let (true, Some(k), Some(z)) = (checked.contains(&r.quantity.as_str()), r.k, r.z) {
            if k <= config.k_check && !(z.abs() <= config.z_crit) {
                failures.push(format!("{} k = {k}: |z| = {:.2} > {}", r.quantity, z.abs(), config.z_crit));
            }
        }
    }
    if sim.identity_violations > 0 {
        failures.push(format!("{} census identity violations", sim.identity_violations));
    }
    if sim.max_weight_deviation > 1e-9 {
        failures.push(format!("total weight off by {:.3e} (relative)", sim.max_weight_deviation));
    }
    let report = ExperimentReport {
        rows,
        seed: config.seed,
        config_digest: config.digest(),
        unsupported,
        failures,
    };
    Ok((report, sim))
}

/// Summary of a simulation alone: empirical means, errors and identity checks.
pub fn simulation_summary(config: &ExperimentConfig, sim: &SimulationOutput) -> ExperimentReport {
    let mut rows = Vec::new();
    let summarize = |quantity: &str, per: &[Vec<f64>], rows: &mut Vec<ReportRow>| {
        let n = per.iter().map(Vec::len).max().unwrap_or(0);
        for idx in 0..n {
            let xs: Vec<f64> = per.iter().map(|v| v.get(idx).copied().unwrap_or(0.0)).collect();
            let (mean, se) = mean_stderr(&xs);
            rows.push(ReportRow {
                quantity: quantity.into(),
                k: Some(idx + 1),
                empirical: Some(mean),
                stderr: Some(se),
                ..Default::default()
            });
        }
    };
    match &sim.replicas[0] {
        ReplicaCensus::One(_) => {
            let per: Vec<Vec<f64>> = sim
                .replicas
                .iter()
                .map(|r| match r {
                    ReplicaCensus::One(s) => {
                        let last = s.last().expect("nonempty run");
                        final_fractions(s, last.counts.len().min(REPORT_DEGREES))
                    }
                    ReplicaCensus::Two(_) => unreachable!(),
                })
                .collect();
            summarize("density", &per, &mut rows);
        }
        ReplicaCensus::Two(_) => {
            let (mut pw, mut pb) = (Vec::new(), Vec::new());
            for r in &sim.replicas {
                let ReplicaCensus::Two(snaps) = r else { unreachable!() };
                let s = snaps.last().expect("nonempty run");
                let n = s.white.len().min(REPORT_DEGREES);
                pw.push(s.white[..n].iter().map(|&c| c as f64 / s.t as f64).collect());
                pb.push(s.black[..n].iter().map(|&c| c as f64 / s.t as f64).collect());
            }
            summarize("white", &pw, &mut rows);
            summarize("black", &pb, &mut rows);
        }
    }
    rows.push(ReportRow::global("identity_violations", sim.identity_violations as f64));
    rows.push(ReportRow::global("max_weight_deviation", sim.max_weight_deviation));
    rows.push(ReportRow::global("replicas", config.replicas as f64));
    rows.push(ReportRow::global("t_final", config.t_final as f64));
    let mut failures = Vec::new();
    if sim.identity_violations > 0 {
        failures.push(format!("{} census identity violations", sim.identity_violations));
    }
    ExperimentReport {
        rows,
        seed: config.seed,
        config_digest: config.digest(),
        unsupported: false,
        failures,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub seed: u64,
    pub config_digest: String,
    pub version: String,
    pub unsupported: bool,
    pub files: Vec<String>,
    pub config: ExperimentConfig,
}

pub fn manifest(config: &ExperimentConfig, command: &str, unsupported: bool, files: &[&str]) -> Manifest {
    let mut cfg = config.clone();
    cfg.out = None;
    Manifest {
        command: command.into(),
        seed: config.seed,
        config_digest: config.digest(),
        version: env!("CARGO_PKG_VERSION").into(),
        unsupported,
        files: files.iter().map(|s| s.to_string()).collect(),
        config: cfg,
    }
}

fn create(dir: &Path, name: &str) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// `census.csv` and `census.bin` for every replica, in replica order.
pub fn write_census_files(dir: &Path, sim: &SimulationOutput) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    let mut csv = create(dir, "census.csv")?;
    let mut bin = create(dir, "census.bin")?;
    match &sim.replicas[0] {
        ReplicaCensus::One(_) => writeln!(csv, "replica,t,k,n")?,
        ReplicaCensus::Two(_) => writeln!(csv, "replica,t,k,n_white,n_black")?,
    }
    for (r, rep) in sim.replicas.iter().enumerate() {
        match rep {
            ReplicaCensus::One(snaps) => {
                write_census_csv(&mut csv, Some(r), snaps)?;
                for s in snaps {
                    write_census_bin(&mut bin, s)?;
                }
            }
            ReplicaCensus::Two(snaps) => {
                write_two_colour_csv(&mut csv, r, snaps)?;
                // white and black censuses as consecutive records
                for s in snaps {
                    for counts in [&s.white, &s.black] {
                        let snap = CensusSnapshot { t: s.t, counts: counts.clone(), total_weight: s.total_weight };
                        write_census_bin(&mut bin, &snap)?;
                    }
                }
            }
        }
    }
    csv.flush()?;
    bin.flush()?;
    Ok(())
}

pub fn write_report(dir: &Path, report: &ExperimentReport) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    let mut w = create(dir, "report.csv")?;
    report.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"model": {"family": "preferential"}, "seed": 4}"#).unwrap();
        assert_eq!(cfg.model, ModelSpec::Preferential { a: 1.0, b: 0.0 });
        assert_eq!(cfg.replicas, 32);
        assert_eq!(cfg.solver.truncation, 512);
        let again: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.digest(), cfg.digest());
    }

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(ExperimentConfig::from_json(r#"{"model": {"family": "uniform", "y": 1}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"model": {"family": "preferential"}, "replica": 3}"#).is_err());
    }

    #[test]
    fn two_colour_spec_builds() {
        let spec: ModelSpec = serde_json::from_str(
            r#"{"family": "two_colour", "a": 1, "b": 0, "white": {"family": "uniform", "a": 1, "b": 1}}"#,
        )
        .unwrap();
        assert!(matches!(spec.build().unwrap(), BuiltModel::Two(_)));
    }

    #[test]
    fn digest_ignores_output_dir() {
        let mut cfg = ExperimentConfig::new(ModelSpec::Grafting { alpha: 0.0, gamma: 1.0 });
        let d = cfg.digest();
        cfg.out = Some("/tmp/x".into());
        assert_eq!(cfg.digest(), d);
        cfg.seed = 1;
        assert_ne!(cfg.digest(), d);
    }

    #[test]
    fn stats() {
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(z_score(1.0, 1.0, 0.0), 0.0);
        assert_eq!(z_score(2.0, 1.0, 0.0), f64::INFINITY);
    }

    #[test]
    fn small_compare_passes() {
        let mut cfg = ExperimentConfig::new(ModelSpec::Preferential { a: 1.0, b: 0.0 });
        cfg.t_final = 5000;
        cfg.replicas = 8;
        cfg.k_check = 3;
        let (report, _) = compare(&cfg).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(report.row("density", 1).unwrap().method.as_deref(), Some("closed_form"));
    }
}
