use rayon::prelude::*;

use super::{apply_operator, published_operator, OperatorMatrix};
use crate::harness::RunRecord;
use crate::numerics::{median, RandomStream};
use crate::problems::{make_benchmark, Bounds, Problem};
use crate::{Error, Result};

/// Settings of the inner evaluation loop.
#[derive(Clone, Debug)]
pub struct EvalConfig {
    pub population: usize,
    pub generations: usize,
    pub max_run: usize,
    pub problem: Problem,
    pub seed: u64,
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 || !self.population.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "inner population must be even and at least 2, got {}",
                self.population
            )));
        }
        if self.max_run == 0 {
            return Err(Error::Config("maxRun must be positive".into()));
        }
        Ok(())
    }

    pub fn stream(&self) -> RandomStream {
        RandomStream::new(self.seed)
    }
}

/// Better of two uniformly drawn members; exact ties are broken by a coin
/// flip.
pub fn binary_tournament(fitness: &[f64], stream: &mut RandomStream) -> usize {
    let a = stream.index(fitness.len());
    let b = stream.index(fitness.len());
    match fitness[a].total_cmp(&fitness[b]) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => {
            if stream.uniform() < 0.5 {
                a
            } else {
                b
            }
        }
    }
}

/// Keeps the `n` best of parents followed by offspring. The sort is
/// stable, so parents win ties.
pub fn truncate_best(
    population: Vec<Vec<f64>>,
    fitness: Vec<f64>,
    offspring: Vec<Vec<f64>>,
    offspring_fitness: Vec<f64>,
    n: usize,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut all: Vec<(Vec<f64>, f64)> = population
        .into_iter()
        .zip(fitness)
        .chain(offspring.into_iter().zip(offspring_fitness))
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1));
    all.truncate(n);
    all.into_iter().unzip()
}

fn min_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// The elitist loop driven by an operator matrix. Offspring `i` uses the
/// selected parents `i, i+1, …` (cyclically). Returns the per-generation
/// best and the number of objective calls.
pub fn evolve_with_matrix(
    m: &OperatorMatrix,
    bounds: &Bounds,
    n: usize,
    generations: usize,
    mut objective: impl FnMut(&[f64]) -> Result<f64>,
    stream: &mut RandomStream,
) -> Result<(Vec<f64>, u64)> {
    if n < 2 {
        return Err(Error::Config(format!(
            "population must be at least 2, got {n}"
        )));
    }
    let arity = m.kind().parents();
    let mut pop: Vec<Vec<f64>> = (0..n).map(|_| bounds.sample(stream)).collect();
    let mut fit = pop
        .iter()
        .map(|x| objective(x))
        .collect::<Result<Vec<f64>>>()?;
    let mut evals = n as u64;
    let mut trajectory = vec![min_of(&fit)];
    for _ in 0..generations {
        let chosen: Vec<usize> = (0..n).map(|_| binary_tournament(&fit, stream)).collect();
        let mut offspring = Vec::with_capacity(n);
        for i in 0..n {
            let parents: Vec<&[f64]> = (0..arity)
                .map(|j| pop[chosen[(i + j) % n]].as_slice())
                .collect();
            offspring.push(apply_operator(m, &parents, bounds, stream)?);
        }
        let off_fit = offspring
            .iter()
            .map(|x| objective(x))
            .collect::<Result<Vec<f64>>>()?;
        evals += n as u64;
        (pop, fit) = truncate_best(pop, fit, offspring, off_fit, n);
        trajectory.push(fit[0].min(*trajectory.last().unwrap()));
    }
    Ok((trajectory, evals))
}

/// One run of the inner evolutionary loop on `problem`.
pub fn inner_evolve(
    m: &OperatorMatrix,
    problem: &Problem,
    n: usize,
    generations: usize,
    stream: &mut RandomStream,
) -> Result<RunRecord> {
    let mut noise = stream.split("noise");
    let (trajectory, evals) = evolve_with_matrix(
        m,
        problem.bounds(),
        n,
        generations,
        |x| problem.evaluate(x, &mut noise),
        stream,
    )?;
    Ok(RunRecord::new(
        "autov",
        problem.label(),
        stream.seed(),
        evals,
        trajectory,
    ))
}

/// Final bests of the `maxRun` inner runs, in run order.
pub fn evaluate_operator_runs(
    m: &OperatorMatrix,
    cfg: &EvalConfig,
    stream: &RandomStream,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let runs = stream.split("run");
    (0..cfg.max_run)
        .into_par_iter()
        .map(|r| {
            let mut s = runs.split(r);
            inner_evolve(m, &cfg.problem, cfg.population, cfg.generations, &mut s)
                .map(|rec| rec.final_best)
        })
        .collect()
}

/// Median final best over `maxRun` independent inner runs.
pub fn evaluate_operator(
    m: &OperatorMatrix,
    cfg: &EvalConfig,
    stream: &RandomStream,
) -> Result<f64> {
    median(&evaluate_operator_runs(m, cfg, stream)?)
}

pub const SMOKE_SEEDS: usize = 20;
pub const SMOKE_REQUIRED: usize = 18;
pub const SMOKE_TARGET: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub struct SmokeReport {
    pub finals: Vec<f64>,
    pub successes: usize,
    pub passed: bool,
}

/// Sphere in two dimensions, population 50, 500 generations, 20 seeds:
/// passes when at least 18 runs get below `1e-2`.
pub fn convergence_smoke(m: &OperatorMatrix, stream: &RandomStream) -> Result<SmokeReport> {
    let problem = make_benchmark("Sphere", 2)?;
    let seeds = stream.split("smoke");
    let finals = (0..SMOKE_SEEDS)
        .into_par_iter()
        .map(|i| {
            let mut s = seeds.split(i);
            inner_evolve(m, &problem, 50, 500, &mut s).map(|r| r.final_best)
        })
        .collect::<Result<Vec<f64>>>()?;
    let successes = finals.iter().filter(|f| **f < SMOKE_TARGET).count();
    Ok(SmokeReport {
        finals,
        successes,
        passed: successes >= SMOKE_REQUIRED,
    })
}

/// The default smoke subject.
pub fn published_smoke(stream: &RandomStream) -> Result<SmokeReport> {
    convergence_smoke(&published_operator(), stream)
}
