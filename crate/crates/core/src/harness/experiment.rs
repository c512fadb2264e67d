use rayon::prelude::*;
use serde::Serialize;

use super::{AlgorithmConfig, OptimizerRegistry, RunRecord, RunSetup};
use crate::numerics::{mean, random_orthogonal, rank_sum_test, std_dev, RandomStream, Verdict};
use crate::problems::{
    make_benchmark, rotate_problem_seeded, scale_problem, scale_problem_rescaling_bounds,
    translate_problem, Problem,
};
use crate::{Error, Result};

/// A cataloged problem plus optional domain override and transforms.
/// Transforms are stacked in the order translate, scale, rotate.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub dim: usize,
    pub domain: Option<(f64, f64)>,
    pub translate: Option<f64>,
    pub scale: Option<f64>,
    pub rescale_bounds: bool,
    pub rotate_seed: Option<u64>,
}

impl ProblemSpec {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Self {
            name: name.into(),
            dim,
            domain: None,
            translate: None,
            scale: None,
            rescale_bounds: false,
            rotate_seed: None,
        }
    }

    pub fn domain(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }

    pub fn translated(mut self, b: f64) -> Self {
        self.translate = Some(b);
        self
    }

    pub fn scaled(mut self, a: f64) -> Self {
        self.scale = Some(a);
        self
    }

    pub fn rotated(mut self, seed: u64) -> Self {
        self.rotate_seed = Some(seed);
        self
    }

    pub fn build(&self) -> Result<Problem> {
        let mut p = make_benchmark(&self.name, self.dim)?;
        if let Some((lo, hi)) = self.domain {
            p = p.with_uniform_bounds(lo, hi)?;
        }
        if let Some(b) = self.translate {
            p = translate_problem(&p, &vec![b; self.dim])?;
        }
        if let Some(a) = self.scale {
            p = if self.rescale_bounds {
                scale_problem_rescaling_bounds(&p, a)?
            } else {
                scale_problem(&p, a)?
            };
        }
        if let Some(seed) = self.rotate_seed {
            let m = random_orthogonal(self.dim, &mut RandomStream::new(seed).split("rotation"))?;
            p = rotate_problem_seeded(&p, &m, Some(seed))?;
        }
        Ok(p)
    }
}

/// One algorithm on one problem with one seed.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub algorithm: String,
    pub problem: ProblemSpec,
    pub population: usize,
    pub budget: u64,
    pub seed: u64,
    pub config: AlgorithmConfig,
}

pub fn run_single(spec: &RunSpec) -> Result<RunRecord> {
    let problem = spec.problem.build()?;
    run_on(
        &spec.algorithm,
        &problem,
        spec.population,
        spec.budget,
        spec.seed,
        &spec.config,
    )
}

fn run_on(
    algorithm: &str,
    problem: &Problem,
    population: usize,
    budget: u64,
    seed: u64,
    config: &AlgorithmConfig,
) -> Result<RunRecord> {
    let opt = OptimizerRegistry::with_builtins().create(algorithm, config)?;
    let setup = RunSetup::new(population, budget);
    opt.run(problem, &setup, &mut RandomStream::new(seed))
}

/// Seed of run `index` under `master`; every algorithm gets the same seed
/// for the same run index.
pub fn run_seed(master: u64, index: usize) -> u64 {
    RandomStream::new(master)
        .split("run")
        .split(index)
        .next_u64()
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global
/// pool when `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub problems: Vec<ProblemSpec>,
    pub algorithms: Vec<String>,
    /// Column the markers are computed against; the first algorithm when
    /// absent.
    pub reference: Option<String>,
    pub population: usize,
    pub budget: u64,
    pub runs: usize,
    pub seed: u64,
    pub alpha: f64,
    pub threads: Option<usize>,
    pub output: Option<std::path::PathBuf>,
    pub algorithm_config: AlgorithmConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problems: Vec::new(),
            algorithms: Vec::new(),
            reference: None,
            population: 100,
            budget: 10_000,
            runs: 30,
            seed: 1,
            alpha: 0.05,
            threads: None,
            output: None,
            algorithm_config: AlgorithmConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.budget < self.population as u64 {
            return Err(Error::Config(format!(
                "budget {} is smaller than the population {}",
                self.budget, self.population
            )));
        }
        if self.problems.is_empty() {
            return Err(Error::Config("no problems configured".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms configured".into()));
        }
        let registry = OptimizerRegistry::with_builtins();
        for a in &self.algorithms {
            registry.resolve(a)?;
        }
        Ok(())
    }

    /// Canonical algorithm names in configured order.
    pub fn algorithm_names(&self) -> Result<Vec<String>> {
        let registry = OptimizerRegistry::with_builtins();
        self.algorithms
            .iter()
            .map(|a| registry.resolve(a).map(str::to_string))
            .collect()
    }

    pub fn reference_name(&self) -> Result<String> {
        let names = self.algorithm_names()?;
        let reference = match &self.reference {
            Some(r) => OptimizerRegistry::with_builtins().resolve(r)?.to_string(),
            None => names.first().cloned().unwrap_or_default(),
        };
        if !names.contains(&reference) {
            return Err(Error::Config(format!(
                "reference `{reference}` is not among the algorithms"
            )));
        }
        Ok(reference)
    }
}

/// Every (problem, algorithm, run) combination, ordered problem-major,
/// then algorithm, then run.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let names = cfg.algorithm_names()?;
    let problems = cfg
        .problems
        .iter()
        .map(ProblemSpec::build)
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize, usize)> = (0..problems.len())
        .flat_map(|p| (0..names.len()).flat_map(move |a| (0..cfg.runs).map(move |r| (p, a, r))))
        .collect();
    with_threads(cfg.threads, || {
        jobs.par_iter()
            .map(|&(p, a, r)| {
                run_on(
                    &names[a],
                    &problems[p],
                    cfg.population,
                    cfg.budget,
                    run_seed(cfg.seed, r),
                    &cfg.algorithm_config,
                )
            })
            .collect::<Result<Vec<_>>>()
    })?
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonCell {
    pub problem: String,
    pub algorithm: String,
    pub mean: f64,
    pub std: f64,
    /// Rank-sum verdict of this column against the reference; absent for
    /// the reference itself.
    pub marker: Option<Verdict>,
    pub p_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub better: usize,
    pub worse: usize,
    pub similar: usize,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub reference: String,
    pub algorithms: Vec<String>,
    pub problems: Vec<String>,
    pub alpha: f64,
    pub runs: usize,
    pub population: usize,
    pub budget: u64,
    pub seed: u64,
    /// Problem-major cells.
    pub cells: Vec<ComparisonCell>,
    pub summary: Vec<SummaryRow>,
    pub records: Vec<RunRecord>,
}

impl Comparison {
    pub fn cell(&self, problem: usize, algorithm: usize) -> &ComparisonCell {
        &self.cells[problem * self.algorithms.len() + algorithm]
    }
}

/// Runs the grid and tabulates mean, standard deviation and markers
/// against the reference column.
pub fn compare(cfg: &ExperimentConfig) -> Result<Comparison> {
    if cfg.algorithms.len() < 2 {
        return Err(Error::Config(
            "a comparison needs at least two algorithms".into(),
        ));
    }
    let records = run_grid(cfg)?;
    tabulate(cfg, records)
}

pub fn tabulate(cfg: &ExperimentConfig, records: Vec<RunRecord>) -> Result<Comparison> {
    let names = cfg.algorithm_names()?;
    let reference = cfg.reference_name()?;
    let ref_index = names
        .iter()
        .position(|n| *n == reference)
        .expect("reference validated");
    let na = names.len();
    let runs = cfg.runs;
    let finals = |p: usize, a: usize| -> Vec<f64> {
        records[(p * na + a) * runs..(p * na + a + 1) * runs]
            .iter()
            .map(|r| r.final_best)
            .collect()
    };
    let mut problems = Vec::new();
    let mut cells = Vec::new();
    let mut summary: Vec<SummaryRow> = names
        .iter()
        .map(|n| SummaryRow {
            algorithm: n.clone(),
            better: 0,
            worse: 0,
            similar: 0,
        })
        .collect();
    for p in 0..cfg.problems.len() {
        let label = records[p * na * runs].problem.clone();
        let base = finals(p, ref_index);
        for (a, name) in names.iter().enumerate() {
            let v = finals(p, a);
            let (marker, p_value) = if a == ref_index {
                (None, None)
            } else if runs >= 3 {
                let t = rank_sum_test(&v, &base, cfg.alpha)?;
                let row = &mut summary[a];
                match t.decision {
                    Verdict::Better => row.better += 1,
                    Verdict::Worse => row.worse += 1,
                    Verdict::Similar => row.similar += 1,
                }
                (Some(t.decision), Some(t.p_value))
            } else {
                (None, None)
            };
            cells.push(ComparisonCell {
                problem: label.clone(),
                algorithm: name.clone(),
                mean: mean(&v)?,
                std: if v.len() > 1 { std_dev(&v)? } else { 0.0 },
                marker,
                p_value,
            });
        }
        problems.push(label);
    }
    Ok(Comparison {
        reference,
        algorithms: names,
        problems,
        alpha: cfg.alpha,
        runs,
        population: cfg.population,
        budget: cfg.budget,
        seed: cfg.seed,
        cells,
        summary,
        records,
    })
}

/// Scientific notation as printed in result tables: four decimals and a
/// signed exponent, e.g. `4.2269e+1`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.4e}");
    match s.split_once('e') {
        Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
        _ => s,
    }
}

fn sci_short(x: f64) -> String {
    let s = sci(x);
    match s.split_once('e') {
        Some((m, e)) if m.len() > 4 => format!("{}e{e}", &m[..m.len() - 2]),
        _ => s,
    }
}

/// Terminal rendering: `mean (std) marker` per cell, numbers in
/// scientific notation, plus a `+/-/≈` summary row.
pub fn render_comparison(c: &Comparison) -> String {
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut head = vec!["problem".to_string()];
    head.extend(c.algorithms.iter().map(|a| {
        if *a == c.reference {
            format!("{a} (ref)")
        } else {
            a.clone()
        }
    }));
    rows.push(head);
    for (p, label) in c.problems.iter().enumerate() {
        let mut row = vec![label.clone()];
        for a in 0..c.algorithms.len() {
            let cell = c.cell(p, a);
            let mark = cell.marker.map(Verdict::marker).unwrap_or("");
            row.push(
                format!("{} ({}) {mark}", sci(cell.mean), sci_short(cell.std))
                    .trim_end()
                    .to_string(),
            );
        }
        rows.push(row);
    }
    let mut last = vec!["+/-/≈".to_string()];
    for s in &c.summary {
        if s.algorithm == c.reference {
            last.push(String::new());
        } else {
            last.push(format!("{}/{}/{}", s.better, s.worse, s.similar));
        }
    }
    rows.push(last);
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|i| rows.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
