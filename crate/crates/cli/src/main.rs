//! `splitgrow`: solve, simulate and compare vertex-splitting tree models.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use splitgrow::experiment::{
    self, BuiltModel, Engine, ExperimentConfig, ModelSpec, SolveOutput,
};

/// `println!` that ignores a closed stdout (e.g. piping into `head`).
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "splitgrow", version, about = "Random trees grown by vertex splitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Limiting degree densities of a model.
    Solve(Opts),
    /// Replicated growth simulations.
    Simulate(Opts),
    /// Simulate and compare against the analytic densities; exits 1 on mismatch.
    Compare(Opts),
    /// Check the model conditions and report its regime; exits 1 if a condition fails.
    Validate(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Preferential,
    Uniform,
    Grafting,
    Table,
    TwoColour,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Tree,
    Urn,
}

#[derive(Args)]
struct Opts {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Slope of the splitting weights (two-colour: the `a` parameter).
    #[arg(long)]
    a: Option<f64>,
    /// Intercept of the splitting weights (two-colour: the `b` parameter).
    #[arg(long)]
    b: Option<f64>,
    /// Offset in `w_i = i + x`.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Splitting weights as a linear expression in i, e.g. "i" or "2i+1".
    #[arg(long = "w", value_name = "EXPR")]
    w: Option<String>,
    /// Finite partition table: a `dmax N` line, then `i j w` lines.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long = "t-final")]
    t_final: Option<u64>,
    #[arg(long)]
    thin: Option<u64>,
    /// Truncation of the density solver.
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    #[arg(long = "z-crit")]
    z_crit: Option<f64>,
    #[arg(long = "k-check")]
    k_check: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run models outside the convergence theorem; outputs are marked unsupported.
    #[arg(long = "force-unsupported")]
    force_unsupported: bool,
}

/// Parses `c1·i + c0` written as e.g. `i`, `2i+1`, `0.5*i - 1`, `3`.
fn parse_linear(expr: &str) -> Result<(f64, f64)> {
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        bail!("empty weight expression");
    }
    let (mut a, mut b) = (0.0, 0.0);
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let sign = match rest.as_bytes()[0] {
            b'+' => { rest = &rest[1..]; 1.0 }
            b'-' => { rest = &rest[1..]; -1.0 }
            _ => 1.0,
        };
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let term = &rest[..end];
        rest = &rest[end..];
        if let Some(coef) = term.strip_suffix('i') {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c: f64 = if coef.is_empty() {
                1.0
            } else {
                coef.parse().with_context(|| format!("bad coefficient {coef:?} in {expr:?}"))?
            };
            a += sign * c;
        } else {
            let c: f64 = term.parse().with_context(|| format!("bad term {term:?} in {expr:?}"))?;
            b += sign * c;
        }
    }
    Ok((a, b))
}

fn parse_table(path: &Path) -> Result<ModelSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut d_max = None;
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || anyhow!("{}:{}: cannot parse {line:?}", path.display(), n + 1);
        match fields.as_slice() {
            ["dmax", d] => d_max = Some(d.parse().map_err(|_| bad())?),
            [i, j, w] => entries.push((
                i.parse().map_err(|_| bad())?,
                j.parse().map_err(|_| bad())?,
                w.parse().map_err(|_| bad())?,
            )),
            _ => return Err(bad()),
        }
    }
    let d_max = d_max.ok_or_else(|| anyhow!("{}: missing `dmax N` line", path.display()))?;
    Ok(ModelSpec::Table { d_max, entries })
}

fn model_from_flags(o: &Opts) -> Result<Option<ModelSpec>> {
    let family = match (o.family, &o.table) {
        (None, None) => return Ok(None),
        (None, Some(_)) | (Some(FamilyArg::Table), _) => FamilyArg::Table,
        (Some(f), _) => f,
    };
    let (wa, wb) = match &o.w {
        Some(e) => {
            let (a, b) = parse_linear(e)?;
            (Some(a), Some(b))
        }
        None => (o.a, o.b),
    };
    Ok(Some(match family {
        FamilyArg::Preferential => ModelSpec::Preferential { a: wa.unwrap_or(1.0), b: wb.unwrap_or(0.0) },
        FamilyArg::Uniform => match (o.x, wa, wb) {
            (Some(x), None, None) => ModelSpec::Uniform { x: Some(x), a: None, b: None },
            (None, None, None) => ModelSpec::Uniform { x: Some(0.0), a: None, b: None },
            (None, a, b) => ModelSpec::Uniform { x: None, a: a.or(Some(1.0)), b: b.or(Some(0.0)) },
            _ => bail!("uniform takes either --x or --a/--b/--w"),
        },
        FamilyArg::Grafting => ModelSpec::Grafting {
            alpha: o.alpha.ok_or_else(|| anyhow!("grafting needs --alpha"))?,
            gamma: o.gamma.ok_or_else(|| anyhow!("grafting needs --gamma"))?,
        },
        FamilyArg::Table => {
            parse_table(o.table.as_deref().ok_or_else(|| anyhow!("table family needs --table FILE"))?)?
        }
        FamilyArg::TwoColour => {
            let (a, b) = (o.a.unwrap_or(1.0), o.b.unwrap_or(0.0));
            ModelSpec::TwoColour {
                a,
                b,
                white: Box::new(ModelSpec::Uniform { x: None, a: Some(a - 1.5 * b), b: Some(a) }),
            }
        }
    }))
}

fn load_config(o: &Opts) -> Result<ExperimentConfig> {
    let flags_model = model_from_flags(o)?;
    let mut cfg = match (&o.config, flags_model) {
        (Some(path), m) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut cfg = ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
            if let Some(m) = m {
                cfg.model = m;
            }
            cfg
        }
        (None, Some(m)) => ExperimentConfig::new(m),
        (None, None) => bail!("give --config FILE or a model via --family/--table"),
    };
    macro_rules! set {
        ($($field:expr => $value:expr),*) => { $(if let Some(v) = $value { $field = v; })* };
    }
    set!(cfg.seed => o.seed, cfg.replicas => o.replicas, cfg.t_final => o.t_final, cfg.thin => o.thin,
         cfg.solver.truncation => o.k, cfg.solver.tol => o.tol, cfg.solver.max_iter => o.max_iter,
         cfg.z_crit => o.z_crit, cfg.k_check => o.k_check);
    if let Some(e) = o.engine {
        cfg.engine = match e {
            EngineArg::Tree => Engine::Tree,
            EngineArg::Urn => Engine::Urn,
        };
    }
    if o.out.is_some() {
        cfg.out = o.out.clone();
    }
    cfg.force_unsupported |= o.force_unsupported;
    cfg.check()?;
    Ok(cfg)
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("splitgrow_out"))
}

fn print_densities(label: &str, values: &[f64]) {
    for (idx, v) in values.iter().take(10).enumerate() {
        say!("{label}{:>4}  {v:.12}", idx + 1);
    }
}

fn cmd_solve(cfg: &ExperimentConfig) -> Result<bool> {
    let out = experiment::solve(cfg)?;
    let unsupported = out.unsupported();
    match &out {
        SolveOutput::One { method, solution, max_closed_form_deviation, .. } => {
            say!("# method {method}, K = {}, iterations {}", solution.truncation, solution.iterations);
            if let Some(dev) = max_closed_form_deviation {
                say!("# max deviation from closed form {dev:.3e}");
            }
            print_densities("a", &solution.densities);
        }
        SolveOutput::Two { solution } => {
            say!("# max equation residual {:.3e}", solution.max_residual);
            print_densities("white", &solution.white);
            print_densities("black", &solution.black);
        }
    }
    if let Some(dir) = &cfg.out {
        experiment::write_json(dir, "solution.json", &out)?;
        let m = experiment::manifest(cfg, "solve", unsupported, &["solution.json", "manifest.json"]);
        experiment::write_json(dir, "manifest.json", &m)?;
    }
    Ok(true)
}

fn cmd_simulate(cfg: &ExperimentConfig) -> Result<bool> {
    let sim = experiment::simulate(cfg)?;
    let report = experiment::simulation_summary(cfg, &sim);
    let dir = out_dir(cfg);
    experiment::write_census_files(&dir, &sim)?;
    experiment::write_report(&dir, &report)?;
    let files = ["census.csv", "census.bin", "report.csv", "manifest.json"];
    experiment::write_json(&dir, "manifest.json", &experiment::manifest(cfg, "simulate", false, &files))?;
    say!("# {} replicas to t = {}, written to {}", cfg.replicas, cfg.t_final, dir.display());
    for r in report.rows.iter().filter(|r| r.k.is_some_and(|k| k <= 6)) {
        say!("{}{:>4}  {:.6} ± {:.6}", r.quantity, r.k.unwrap_or(0), r.empirical.unwrap_or(f64::NAN), r.stderr.unwrap_or(f64::NAN));
    }
    Ok(report.passed())
}

fn cmd_compare(cfg: &ExperimentConfig) -> Result<bool> {
    let (report, sim) = experiment::compare(cfg)?;
    let dir = out_dir(cfg);
    experiment::write_census_files(&dir, &sim)?;
    experiment::write_report(&dir, &report)?;
    let solution = experiment::solve_model(
        &cfg.reference.as_ref().unwrap_or(&cfg.model).build()?,
        &cfg.solver_options(),
    )?;
    experiment::write_json(&dir, "solution.json", &solution)?;
    let files = ["solution.json", "census.csv", "census.bin", "report.csv", "manifest.json"];
    let m = experiment::manifest(cfg, "compare", report.unsupported, &files);
    experiment::write_json(&dir, "manifest.json", &m)?;
    for r in report.rows.iter().filter(|r| r.z.is_some() && r.k.is_some_and(|k| k <= cfg.k_check)) {
        say!(
            "{}{:>4}  analytic {:.6}  empirical {:.6}  z {:+.2}",
            r.quantity,
            r.k.unwrap_or(0),
            r.analytic.unwrap_or(f64::NAN),
            r.empirical.unwrap_or(f64::NAN),
            r.z.unwrap_or(f64::NAN)
        );
    }
    for f in &report.failures {
        say!("FAIL {f}");
    }
    say!("{}", if report.passed() { "PASS" } else { "FAIL" });
    Ok(report.passed())
}

fn cmd_validate(cfg: &ExperimentConfig) -> Result<bool> {
    let models = match cfg.model.build()? {
        BuiltModel::One(m) => vec![("model", m)],
        BuiltModel::Two(m) => vec![("white", m.white().clone()), ("reduced", m.reduce_to_one_colour()?)],
    };
    let mut ok = true;
    for (name, m) in models {
        let report = m.validate(1e-9);
        say!("# {name}: {}", report.fitted);
        say!("{report}");
        match m.classify_regime() {
            Ok((regime, s)) => say!("regime {regime:?}, s = {s}"),
            Err(e) => say!("regime unknown: {e}"),
        }
        ok &= report.ok();
        if let Some(dir) = &cfg.out {
            experiment::write_json(dir, &format!("validation_{name}.json"), &report)?;
        }
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (opts, run): (&Opts, fn(&ExperimentConfig) -> Result<bool>) = match &cli.command {
        Command::Solve(o) => (o, cmd_solve),
        Command::Simulate(o) => (o, cmd_simulate),
        Command::Compare(o) => (o, cmd_compare),
        Command::Validate(o) => (o, cmd_validate),
    };
    let result = load_config(opts).and_then(|cfg| {
        if cfg.force_unsupported {
            eprintln!("warning: --force-unsupported set; results outside the convergence theorem are marked unsupported");
        }
        run(&cfg)
    });
    eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
