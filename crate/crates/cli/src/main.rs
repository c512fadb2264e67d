use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use autov_core::autov::{
    autov_search, published_operator, OperatorMatrix, ParentSetKind, WeightSampling,
};
use autov_core::harness::{
    compare, export_all, export_records, render_comparison, run_single, sci, with_threads,
    ConfigFile, ProblemSpec, RunSpec,
};
use autov_core::invariance::{classify, ClassifyConfig};
use autov_core::numerics::RandomStream;
use autov_core::operators::OperatorRegistry;
use autov_core::VERSION;

#[derive(Parser, Debug)]
#[command(name = "autov", version = VERSION, about = "Invariance audits, operator search and benchmark comparisons")]
#[command(arg_required_else_help = true, propagate_version = true)]
struct Cli {
    /// Key = value configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify translation, scale and rotation invariance of an operator.
    Check(CheckArgs),
    /// One algorithm on one problem.
    Run(RunArgs),
    /// Algorithms x problems x runs with rank-sum markers.
    Compare(CompareArgs),
    /// Search for an operator matrix.
    Search(SearchArgs),
    /// Print an operator matrix in piecewise form.
    ShowOperator(ShowArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    operator: String,
    #[arg(long, default_value_t = 10)]
    dim: usize,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = autov_core::invariance::DEFAULT_TOLERANCE)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Matrix JSON for the `autov` operator.
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
    /// Print only the JSON document.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    algorithm: String,
    /// `Name:dim[:key=value]...`, e.g. `Rastrigin:30:rotate_seed=5`.
    #[arg(long)]
    problem: String,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory CSV destination.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Print the run record as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Comma-separated algorithm names.
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<String>,
    /// Repeatable; same form as `run --problem`.
    #[arg(long)]
    problem: Vec<String>,
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Directory for trajectories.csv, comparison.csv and comparison.json.
    #[arg(long, value_name = "DIR")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    kind: Option<ParentSetKind>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    sampling: Option<WeightSampling>,
    #[arg(long)]
    meta_population: Option<usize>,
    #[arg(long)]
    meta_generations: Option<usize>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    max_run: Option<usize>,
    /// Design problem, e.g. `Rastrigin:10`.
    #[arg(long)]
    problem: Option<String>,
    /// Where to write the best matrix as JSON.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ShowSource {
    /// The embedded published operator.
    #[arg(long)]
    published: bool,
    /// A matrix JSON file.
    #[arg(long, value_name = "FILE")]
    matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ShowArgs {
    #[command(flatten)]
    source: ShowSource,
    /// Print the JSON document instead of the piecewise form.
    #[arg(long)]
    json: bool,
}

fn banner(seed: u64) {
    eprintln!("autov {VERSION} | master seed {seed}");
}

fn load_config(path: &Option<PathBuf>) -> Result<ConfigFile> {
    match path {
        Some(p) => ConfigFile::load(p).with_context(|| format!("reading {}", p.display())),
        None => Ok(ConfigFile::default()),
    }
}

fn load_matrix(path: &PathBuf) -> Result<OperatorMatrix> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(OperatorMatrix::from_json(&text)?)
}

fn check(args: CheckArgs, file: ConfigFile) -> Result<()> {
    banner(args.seed);
    let mut ops = file.experiment.algorithm_config.operators;
    if let Some(path) = &args.matrix {
        ops.matrix = Some(load_matrix(path)?);
    }
    let op = OperatorRegistry::with_builtins().create(&args.operator, &ops)?;
    let mut cfg = ClassifyConfig::new(args.dim, args.trials);
    cfg.tolerance = args.tol;
    let report = classify(op.as_ref(), &cfg, &RandomStream::new(args.seed))?;
    if !args.json {
        println!("{report}");
    }
    println!("{}", report.to_json()?);
    Ok(())
}

fn run(args: RunArgs, file: ConfigFile) -> Result<()> {
    let e = file.experiment;
    let spec = RunSpec {
        algorithm: args.algorithm,
        problem: args.problem.parse()?,
        population: args.population.unwrap_or(e.population),
        budget: args.budget.unwrap_or(e.budget),
        seed: args.seed.unwrap_or(e.seed),
        config: e.algorithm_config,
    };
    if spec.budget < spec.population as u64 {
        bail!(
            "budget {} is smaller than the population {}",
            spec.budget,
            spec.population
        );
    }
    banner(spec.seed);
    let record = run_single(&spec)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&record)?);
    } else {
        println!("algorithm    {}", record.algorithm);
        println!("problem      {}", record.problem);
        println!("seed         {}", record.seed);
        println!("evaluations  {}", record.evaluations);
        println!("generations  {}", record.generations());
        println!("final best   {}", sci(record.final_best));
    }
    if let Some(path) = &args.output {
        export_records(std::slice::from_ref(&record), path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn compare_cmd(args: CompareArgs, file: ConfigFile, threads: Option<usize>) -> Result<()> {
    let mut cfg = file.experiment;
    if !args.algorithms.is_empty() {
        cfg.algorithms = args.algorithms;
    }
    if !args.problem.is_empty() {
        cfg.problems = args
            .problem
            .iter()
            .map(|p| p.parse())
            .collect::<autov_core::Result<Vec<ProblemSpec>>>()?;
    }
    cfg.reference = args.reference.or(cfg.reference);
    cfg.population = args.population.unwrap_or(cfg.population);
    cfg.budget = args.budget.unwrap_or(cfg.budget);
    cfg.runs = args.runs.unwrap_or(cfg.runs);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.alpha = args.alpha.unwrap_or(cfg.alpha);
    cfg.threads = threads.or(cfg.threads);
    cfg.output = args.output.or(cfg.output);
    banner(cfg.seed);
    let table = compare(&cfg)?;
    print!("{}", render_comparison(&table));
    if let Some(dir) = &cfg.output {
        for path in export_all(&table, dir)? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn search(args: SearchArgs, file: ConfigFile) -> Result<()> {
    let mut s = file.search;
    s.seed = args.seed.unwrap_or(s.seed);
    s.kind = args.kind.unwrap_or(s.kind);
    s.k = args.k.unwrap_or(s.k);
    s.sampling = args.sampling.unwrap_or(s.sampling);
    s.meta_population = args.meta_population.unwrap_or(s.meta_population);
    s.meta_generations = args.meta_generations.unwrap_or(s.meta_generations);
    s.population = args.population.unwrap_or(s.population);
    s.generations = args.generations.unwrap_or(s.generations);
    s.max_run = args.max_run.unwrap_or(s.max_run);
    if let Some(p) = &args.problem {
        s.problem = p.parse()?;
    }
    let cfg = s.to_meta_config()?;
    banner(s.seed);
    let out = autov_search(&cfg, &RandomStream::new(s.seed))?;
    println!("design problem  {}", cfg.eval.problem.label());
    println!("initial best    {}", sci(out.initial_best()));
    println!("final best      {}", sci(out.best_fitness));
    println!();
    print!("{}", out.best.render());
    if let Some(path) = &args.output {
        std::fs::write(path, out.best.to_json()? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn show(args: ShowArgs) -> Result<()> {
    let m = match &args.source.matrix {
        Some(path) => load_matrix(path)?,
        None => published_operator(),
    };
    if args.json {
        println!("{}", m.to_json()?);
    } else {
        print!("{}", m.render());
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let file = load_config(&cli.config)?;
    let threads = cli.threads.or(file.experiment.threads);
    if threads == Some(0) {
        bail!("--threads must be at least 1");
    }
    match cli.command {
        Command::Compare(args) => compare_cmd(args, file, threads),
        command => with_threads(threads, move || match command {
            Command::Check(args) => check(args, file),
            Command::Run(args) => run(args, file),
            Command::Search(args) => search(args, file),
            Command::ShowOperator(args) => show(args),
            Command::Compare(_) => unreachable!(),
        })?,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
