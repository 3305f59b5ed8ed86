//! `nef-bandit` command line.
//!
//! Exit status: 0 when every check holds and no run aborted, 1 on a violation or
//! an aborted run, 2 on any error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::config::{load_config, ExperimentConfig};
use super::report::{rounds_csv, run_replicates, summarize, write_json, write_text};
use super::suite::{tails_suite, verify_suite, Grid};
use crate::error::{Error, Result};
use crate::glm::{fit_mle, Dataset, Design, FitResult};
use crate::nef::{BaseDistribution, DistSpec, NefFamily};

pub const OUT_ENV: &str = "NEF_BANDIT_OUT";

#[derive(Debug, Parser)]
#[command(name = "nef-bandit", version, about = "Self-concordance certificates and optimistic GLM bandits")]
pub struct Cli {
    /// Worker threads for grid checks and replicates (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the stretch bound against the exact ratio on a grid.
    Verify(GridArgs),
    /// Check the tail and MGF lemmas on a grid.
    Tails(GridArgs),
    /// Fit the regularized MLE to rows `x1,...,xd,y`.
    Fit(FitArgs),
    #[command(subcommand)]
    Bandit(BanditCommand),
    /// Monte-Carlo coverage of the confidence sets.
    Coverage(RunArgs),
    /// Print the three regret bound terms.
    Bound(ConfigArgs),
}

#[derive(Debug, Subcommand)]
pub enum BanditCommand {
    /// Simulate replicates and write rounds.csv and summary.json.
    Run(RunArgs),
    /// Print the three regret bound terms.
    Bound(ConfigArgs),
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Distribution as inline JSON or a path.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub dist: Option<String>,
    /// Experiment config; the grid defaults to its `[S2, S1]`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, requires = "grid_hi")]
    pub grid_lo: Option<f64>,
    #[arg(long, requires = "grid_lo")]
    pub grid_hi: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub grid_n: usize,
    /// Where to write the JSON report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Multiply the stretch bound by this factor (fault injection).
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub inflate_bound: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub dist: String,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; overrides the config's `out`.
    #[arg(long, env = OUT_ENV)]
    pub out: Option<PathBuf>,
    /// Overrides the config replicate count.
    #[arg(long)]
    pub replicates: Option<usize>,
}

/// Parse `std::env::args`, run, and return the exit status.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Run a parsed command; `Ok(false)` means a check failed or a run aborted.
pub fn run(cli: Cli) -> Result<bool> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli.command))
}

fn print_json(value: &impl Serialize) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn grid_source(args: &GridArgs) -> Result<(BaseDistribution<f64>, Option<(f64, f64)>, Option<Grid>)> {
    let explicit = args.grid_lo.zip(args.grid_hi).map(|(lo, hi)| Grid { lo, hi, n: args.grid_n });
    if let Some(g) = explicit {
        if !(g.lo <= g.hi) || g.n == 0 {
            return Err(Error::invalid(format!("grid needs lo <= hi and n >= 1, got {g:?}")));
        }
    }
    match (&args.dist, &args.config) {
        (Some(d), _) => Ok((DistSpec::from_arg(d)?.build()?, None, explicit)),
        (None, Some(path)) => {
            let cfg = load_config(path)?;
            let inst = cfg.instance::<f64>()?;
            let grid = explicit
                .or(cfg.grid.map(|g| Grid { lo: g.lo, hi: g.hi, n: g.n }))
                .unwrap_or(Grid { lo: inst.s2, hi: inst.s1, n: args.grid_n });
            Ok((inst.family.base, Some((inst.c1, inst.c2)), Some(grid)))
        }
        (None, None) => Err(Error::invalid("either --dist or --config is required")),
    }
}

fn emit(report: &impl Serialize, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => write_json(p, report),
        None => {
            print_json(report);
            Ok(())
        }
    }
}

fn out_dir(args: &RunArgs, cfg: &ExperimentConfig) -> PathBuf {
    args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

#[derive(Serialize)]
struct FitReport {
    lambda: f64,
    rows: usize,
    #[serde(flatten)]
    fit: FitResult<f64>,
}

fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Verify(args) => {
            let (base, rates, grid) = grid_source(&args)?;
            let report = verify_suite(&base, rates, grid, args.grid_n, args.inflate_bound)?;
            emit(&report, args.report.as_deref())?;
            if let Some(p) = report.first_violation {
                eprintln!("violation at u = {}: ratio {} > bound {}", p.u, p.ratio, p.bound);
            }
            eprintln!("verify: {} points, {} violations", report.points.len(), report.violations);
            Ok(report.ok)
        }
        Command::Tails(args) => {
            let (base, rates, grid) = grid_source(&args)?;
            let report = tails_suite(&base, rates, grid, args.grid_n)?;
            emit(&report, args.report.as_deref())?;
            for l in &report.lemmas {
                eprintln!("{}: {} checks, min slack {:e}, {}", l.lemma, l.checks, l.min_slack, if l.ok { "ok" } else { "VIOLATED" });
            }
            Ok(report.ok)
        }
        Command::Fit(args) => {
            let base = DistSpec::from_arg(&args.dist)?.build::<f64>()?;
            let text = std::fs::read_to_string(&args.data).map_err(|e| Error::io(args.data.display().to_string(), e))?;
            let data = Dataset::from_csv(&text)?;
            let family = NefFamily::at_origin(base)?;
            let fit = fit_mle(&family, &data, args.lambda, &vec![0.0; Design::<f64>::dim(&data)], args.max_iters)?;
            let converged = fit.converged;
            let report = FitReport { lambda: args.lambda, rows: data.len(), fit };
            emit(&report, args.report.as_deref())?;
            Ok(converged)
        }
        Command::Bandit(BanditCommand::Run(args)) => bandit_run(&args, "summary.json", true),
        Command::Coverage(args) => bandit_run(&args, "coverage.json", false),
        Command::Bandit(BanditCommand::Bound(args)) | Command::Bound(args) => {
            let cfg = load_config(&args.config)?;
            let inst = cfg.instance::<f64>()?;
            print_json(&crate::bandit::theoretical_regret_bound(&inst, cfg.horizon, cfg.delta));
            Ok(true)
        }
    }
}

fn bandit_run(args: &RunArgs, summary_name: &str, write_rounds: bool) -> Result<bool> {
    let mut cfg = load_config(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.replicates {
        if r == 0 {
            return Err(Error::Config("replicates must be positive".into()));
        }
        cfg.replicates = r;
    }
    let inst = cfg.instance::<f64>()?;
    let outs = run_replicates(&inst, cfg.horizon, cfg.delta, cfg.seed, cfg.replicates)?;
    let dir = out_dir(args, &cfg);
    if write_rounds {
        write_text(&dir.join("rounds.csv"), &rounds_csv(&outs))?;
    }
    let summary = summarize(&inst, &outs, cfg.horizon, cfg.delta, cfg.seed);
    write_json(&dir.join(summary_name), &summary)?;
    for a in &summary.aborted {
        eprintln!("aborted: {a}");
    }
    eprintln!(
        "{} replicates, coverage {:.4}, bound violations {}, output in {}",
        summary.replicates,
        summary.coverage_rate,
        summary.bound_violations,
        dir.display()
    );
    Ok(summary.ok)
}
