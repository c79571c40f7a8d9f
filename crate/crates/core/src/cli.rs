//! Command-line front end.
//!
//! Precedence for run settings: command-line flags, then the run-config file
//! (`--config` or `$MVSEL_CONFIG`), then built-in defaults.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::encoding::Chromosome;
use crate::engine::{
    evolve, exhaustive_oracle, greedy_baseline, random_baseline, RunConfig, EXHAUSTIVE_MAX_VIEWS,
};
use crate::error::{Error, Result};
use crate::fitness::{shaped_terms, Evaluator, SigmoidOrientation};
use crate::operators::EpsilonMode;
use crate::report::{comparison_csv, write_run_outputs, MethodResult, ReportDocument};
use crate::workload::{generate_workload, load_workload, save_workload, GeneratorSpec, Workload};

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_INFEASIBLE: u8 = 4;

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::Parse(_)
        | Error::InvalidWorkload(_)
        | Error::InvalidParameter(_)
        | Error::LengthMismatch { .. } => EXIT_VALIDATION,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mvsel",
    version,
    about = "Genetic-algorithm materialized view selection"
)]
pub struct Cli {
    /// Print progress to stderr.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic workload document.
    Generate(GenerateArgs),
    /// Run the genetic search and write a report and trajectory.
    Run(RunArgs),
    /// Enumerate every configuration (at most 24 views).
    Exhaustive(SolveArgs),
    /// Greedy add-one-view baseline.
    Greedy(SolveArgs),
    /// Run every method and emit a comparison table.
    Compare(CompareArgs),
    /// Evaluate one configuration given as a bitstring.
    Explain(ExplainArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub queries: usize,
    #[arg(long)]
    pub views: usize,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Storage budget as a fraction of total candidate storage.
    #[arg(long, default_value_t = 0.4)]
    pub budget_fraction: f64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Default)]
pub struct ConfigArgs {
    /// Run-config file (TOML).
    #[arg(short, long, env = "MVSEL_CONFIG")]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub overrides: RunOverrides,
}

/// Per-field overrides of the run config.
#[derive(Debug, Args, Default)]
pub struct RunOverrides {
    #[arg(long)]
    pub population_size: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub pilot_samples: Option<usize>,
    #[arg(long)]
    pub pilot_view_min: Option<usize>,
    #[arg(long)]
    pub pilot_view_max: Option<usize>,
    #[arg(long)]
    pub seed_fraction: Option<f64>,
    #[arg(long)]
    pub elitism: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub w1: Option<f64>,
    #[arg(long)]
    pub w2: Option<f64>,
    #[arg(long)]
    pub w3: Option<f64>,
    #[arg(long)]
    pub max_response_time_norm: Option<f64>,
    #[arg(long)]
    pub max_maintenance_cost_norm: Option<f64>,
    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub sigmoid_scale: Option<f64>,
    #[arg(long)]
    pub penalty: Option<f64>,
    /// Use the decreasing sigmoid orientation.
    #[arg(long)]
    pub literal_sigmoid: bool,
    #[arg(long, value_parser = parse_epsilon_mode)]
    pub epsilon_mode: Option<EpsilonMode>,
    #[arg(long)]
    pub target_survivors: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub num_parents: Option<usize>,
    #[arg(long)]
    pub rate_min: Option<f64>,
    #[arg(long)]
    pub rate_max: Option<f64>,
}

fn parse_epsilon_mode(s: &str) -> std::result::Result<EpsilonMode, String> {
    match s {
        "exact" => Ok(EpsilonMode::Exact),
        "mad" => Ok(EpsilonMode::Mad),
        other => Err(format!(
            "unknown epsilon mode {other:?} (expected exact or mad)"
        )),
    }
}

impl RunOverrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        fn set<T: Copy>(dst: &mut T, src: Option<T>) {
            if let Some(v) = src {
                *dst = v;
            }
        }
        fn set_opt<T: Copy>(dst: &mut Option<T>, src: Option<T>) {
            if src.is_some() {
                *dst = src;
            }
        }
        set(&mut cfg.population_size, self.population_size);
        set(&mut cfg.generations, self.generations);
        set(&mut cfg.pilot_samples, self.pilot_samples);
        set(&mut cfg.pilot_view_min, self.pilot_view_min);
        set(&mut cfg.pilot_view_max, self.pilot_view_max);
        set(&mut cfg.seed_fraction, self.seed_fraction);
        set(&mut cfg.elitism_count, self.elitism);
        set(&mut cfg.rng_seed, self.seed);
        let f = &mut cfg.fitness;
        set_opt(&mut f.w1, self.w1);
        set_opt(&mut f.w2, self.w2);
        set_opt(&mut f.w3, self.w3);
        set_opt(&mut f.max_response_time_norm, self.max_response_time_norm);
        set_opt(
            &mut f.max_maintenance_cost_norm,
            self.max_maintenance_cost_norm,
        );
        set_opt(&mut f.x0, self.x0);
        set_opt(&mut f.sigmoid_scale, self.sigmoid_scale);
        set_opt(&mut f.penalty_coefficient, self.penalty);
        if self.literal_sigmoid {
            f.sigmoid_orientation = Some(SigmoidOrientation::Literal);
        }
        set(&mut cfg.lexicase.epsilon_mode, self.epsilon_mode);
        set(&mut cfg.lexicase.target_survivors, self.target_survivors);
        set(&mut cfg.crossover.alpha, self.alpha);
        set(&mut cfg.crossover.num_parents, self.num_parents);
        set(&mut cfg.mutation.rate_min, self.rate_min);
        set(&mut cfg.mutation.rate_max, self.rate_max);
    }
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_run_config(path)?,
            None => RunConfig::default(),
        };
        self.overrides.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn load_run_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Parse(format!("run config: {e}")))
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(short, long)]
    pub workload: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Report document (JSON).
    #[arg(long, default_value = "report.json")]
    pub report: PathBuf,
    /// Per-generation trajectory (CSV).
    #[arg(long, default_value = "trajectory.csv")]
    pub trajectory: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(short, long)]
    pub workload: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(short, long)]
    pub workload: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value_t = 1000)]
    pub random_samples: usize,
    /// Write the table here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(short, long)]
    pub workload: PathBuf,
    /// Configuration bitstring, first character is view 0.
    #[arg(long)]
    pub bits: String,
    #[command(flatten)]
    pub config: ConfigArgs,
}

/// Parses `std::env::args` and runs; the binary entry point.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Runs a parsed invocation and returns what it would print on stdout.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Run(a) => cmd_run(a, cli.verbose),
        Command::Exhaustive(a) => cmd_solve(a, "exhaustive"),
        Command::Greedy(a) => cmd_solve(a, "greedy"),
        Command::Compare(a) => cmd_compare(a),
        Command::Explain(a) => cmd_explain(a),
    }
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<String> {
    let mut spec = GeneratorSpec::new(a.queries, a.views, a.density, a.seed);
    spec.budget_fraction = a.budget_fraction;
    let w = generate_workload(&spec)?;
    save_workload(&w, &a.output)?;
    Ok(format!(
        "wrote {}: {} queries, {} views, storage budget {}\n",
        a.output.display(),
        w.num_queries(),
        w.num_views(),
        w.constraints.storage_budget
    ))
}

pub fn cmd_run(a: &RunArgs, verbose: u8) -> Result<String> {
    let w = load_workload(&a.workload)?;
    let cfg = a.config.resolve()?;
    let run = evolve(&w, &cfg)?;
    if verbose > 0 {
        for r in &run.trajectory {
            eprintln!(
                "gen {:>5}  best {:.6}  mean {:.6}  sim {:.3}  rate {:.4}",
                r.generation,
                r.best_fitness,
                r.mean_fitness,
                r.population_similarity,
                r.mutation_rate_used
            );
        }
    }
    write_run_outputs(&run, &a.report, &a.trajectory)?;
    let doc = ReportDocument::from_run(&run);
    Ok(format!(
        "best {} fitness {} total_cost {} ({} evaluations, {:.3}s)\n",
        doc.best_bitstring, doc.fitness, doc.total_cost, doc.evaluations, doc.wall_time_seconds
    ))
}

fn cmd_solve(a: &SolveArgs, method: &str) -> Result<String> {
    let w = load_workload(&a.workload)?;
    let cfg = a.config.resolve()?;
    let params = cfg.fitness.resolve(&w)?;
    let best = match method {
        "exhaustive" => exhaustive_oracle(&w, &params)?,
        _ => greedy_baseline(&w, &params)?,
    };
    Ok(format!(
        "{method}: {} fitness {} feasible {} total_cost {}\n",
        best.chromosome,
        best.fitness,
        best.feasible,
        best.objectives.total_cost()
    ))
}

/// Runs the GA and all baselines applicable to `w`.
pub fn compare_methods(
    w: &Workload,
    cfg: &RunConfig,
    random_samples: usize,
) -> Result<Vec<MethodResult>> {
    let params = cfg.fitness.resolve(w)?;
    let mut rows = Vec::new();

    let run = evolve(w, cfg)?;
    rows.push(MethodResult {
        method: "ga".into(),
        best: run.best,
        wall_time_seconds: run.wall_time_seconds,
    });

    let t = Instant::now();
    let best = greedy_baseline(w, &params)?;
    rows.push(MethodResult {
        method: "greedy".into(),
        best,
        wall_time_seconds: t.elapsed().as_secs_f64(),
    });

    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let best = random_baseline(w, &params, random_samples, &mut rng)?;
    rows.push(MethodResult {
        method: "random".into(),
        best,
        wall_time_seconds: t.elapsed().as_secs_f64(),
    });

    if w.num_views() <= EXHAUSTIVE_MAX_VIEWS {
        let t = Instant::now();
        let best = exhaustive_oracle(w, &params)?;
        rows.push(MethodResult {
            method: "exhaustive".into(),
            best,
            wall_time_seconds: t.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

pub fn cmd_compare(a: &CompareArgs) -> Result<String> {
    let w = load_workload(&a.workload)?;
    let cfg = a.config.resolve()?;
    let table = comparison_csv(&compare_methods(&w, &cfg, a.random_samples)?);
    match &a.output {
        Some(path) => {
            fs::write(path, &table)?;
            Ok(String::new())
        }
        None => Ok(table),
    }
}

pub fn cmd_explain(a: &ExplainArgs) -> Result<String> {
    let w = load_workload(&a.workload)?;
    let cfg = a.config.resolve()?;
    let c: Chromosome = a.bits.parse()?;
    if c.len() != w.num_views() {
        return Err(Error::LengthMismatch {
            expected: w.num_views(),
            actual: c.len(),
        });
    }
    let ev = Evaluator::new(&w, cfg.fitness.resolve(&w)?)?;
    let ind = ev.evaluate(&c)?;
    let (f1, f2, f3) = shaped_terms(&ind.objectives, ev.params());
    let o = &ind.objectives;

    let mut out = String::new();
    let _ = writeln!(out, "views: {:?}", c.decode());
    for (q, cost) in ind.per_query_costs.iter().enumerate() {
        let _ = writeln!(out, "query {q}: {cost}");
    }
    let _ = writeln!(out, "response_time: {}", o.response_time);
    let _ = writeln!(out, "maintenance_cost: {}", o.maintenance_cost);
    let _ = writeln!(out, "memory_usage: {}", o.memory_usage);
    let _ = writeln!(out, "total_cost: {}", o.total_cost());
    let _ = writeln!(out, "f1: {f1}");
    let _ = writeln!(out, "f2: {f2}");
    let _ = writeln!(out, "f3: {f3}");
    let _ = writeln!(out, "fitness: {}", ind.fitness);
    let _ = writeln!(out, "feasible: {}", ind.feasible);
    Ok(out)
}
