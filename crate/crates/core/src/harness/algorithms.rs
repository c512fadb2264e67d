use std::fmt;

use super::{BudgetMeter, RunRecord, RunSetup};
use crate::autov::{
    binary_tournament, evolve_with_matrix, published_operator, truncate_best, OperatorMatrix,
};
use crate::numerics::RandomStream;
use crate::operators::{
    cso_step, de_crossover, de_mutate, fep_mutate, polynomial_mutation, pso_step, sbx, sbx_prime,
    CmaesState, FepState, OperatorConfig, SwarmState,
};
use crate::problems::Problem;
use crate::{Error, Result};

/// A complete optimizer run under an evaluation budget.
pub trait Optimizer: Send + Sync {
    fn name(&self) -> &str;

    /// Evaluations one generation costs at population `n`.
    fn evaluations_per_generation(&self, n: usize) -> usize {
        n
    }

    fn run(
        &self,
        problem: &Problem,
        setup: &RunSetup,
        stream: &mut RandomStream,
    ) -> Result<RunRecord>;
}

/// Parameters read by the optimizer factories.
#[derive(Clone, Debug)]
pub struct AlgorithmConfig {
    pub operators: OperatorConfig,
    pub de_cr: f64,
    /// Per-dimension mutation probability; `1/D` when absent.
    pub mutation_probability: Option<f64>,
    pub mutation_eta: f64,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        Self {
            operators: OperatorConfig::default(),
            de_cr: 0.9,
            mutation_probability: None,
            mutation_eta: 20.0,
        }
    }
}

struct Context<'a> {
    meter: BudgetMeter<'a>,
    generations: usize,
    trajectory: Vec<f64>,
}

impl<'a> Context<'a> {
    fn new(
        opt: &dyn Optimizer,
        problem: &'a Problem,
        setup: &RunSetup,
        stream: &RandomStream,
    ) -> Result<Self> {
        let generations = setup.generations(opt.evaluations_per_generation(setup.population))?;
        Ok(Self {
            meter: BudgetMeter::new(problem, setup.budget, stream.split("noise")),
            generations,
            trajectory: Vec::with_capacity(generations + 1),
        })
    }

    fn init(&mut self, n: usize, stream: &mut RandomStream) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let bounds = self.meter.problem().bounds().clone();
        let pop: Vec<Vec<f64>> = (0..n).map(|_| bounds.sample(stream)).collect();
        let fit = self.eval_all(&pop)?;
        self.record(fit.iter().copied().fold(f64::INFINITY, f64::min));
        Ok((pop, fit))
    }

    fn eval_all(&mut self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.iter().map(|x| self.meter.eval(x)).collect()
    }

    fn record(&mut self, best: f64) {
        let prev = self.trajectory.last().copied().unwrap_or(f64::INFINITY);
        self.trajectory.push(prev.min(best));
    }

    fn finish(self, name: &str, stream: &RandomStream) -> RunRecord {
        RunRecord::new(
            name,
            self.meter.problem().label(),
            stream.seed(),
            self.meter.used(),
            self.trajectory,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Crossover {
    Sbx,
    SbxPrime,
}

/// Binary tournament, SBX (or its translation-variant twin), polynomial
/// mutation, and keep the best half of parents plus offspring.
pub struct GeneticAlgorithm {
    name: String,
    crossover: Crossover,
    config: AlgorithmConfig,
}

impl GeneticAlgorithm {
    pub fn new(name: impl Into<String>, crossover: Crossover, config: AlgorithmConfig) -> Self {
        Self {
            name: name.into(),
            crossover,
            config,
        }
    }
}

impl Optimizer for GeneticAlgorithm {
    fn name(&self) -> &str {
        &self.name
    }

    fn run(
        &self,
        problem: &Problem,
        setup: &RunSetup,
        stream: &mut RandomStream,
    ) -> Result<RunRecord> {
        let n = setup.population;
        let mut ctx = Context::new(self, problem, setup, stream)?;
        let bounds = problem.bounds();
        let pm = self
            .config
            .mutation_probability
            .unwrap_or(1.0 / problem.dim() as f64);
        let params = &self.config.operators.sbx;
        let (mut pop, mut fit) = ctx.init(n, stream)?;
        for _ in 0..ctx.generations {
            let chosen: Vec<usize> = (0..n + n % 2)
                .map(|_| binary_tournament(&fit, stream))
                .collect();
            let mut offspring = Vec::with_capacity(n + 1);
            for pair in chosen.chunks(2) {
                let (a, b) = (&pop[pair[0]], &pop[pair[1]]);
                let (o1, o2) = match self.crossover {
                    Crossover::Sbx => sbx(a, b, params, stream)?,
                    Crossover::SbxPrime => sbx_prime(a, b, params, stream)?,
                };
                for mut o in [o1, o2] {
                    bounds.clamp(&mut o);
                    offspring.push(polynomial_mutation(
                        &o,
                        bounds,
                        pm,
                        self.config.mutation_eta,
                        stream,
                    ));
                }
            }
            offspring.truncate(n);
            let off_fit = ctx.eval_all(&offspring)?;
            (pop, fit) = truncate_best(pop, fit, offspring, off_fit, n);
            ctx.record(fit[0]);
        }
        Ok(ctx.finish(&self.name, stream))
    }
}

/// DE/rand/1/bin with one-to-one greedy replacement.
pub struct DifferentialEvolution {
    pub f: f64,
    pub cr: f64,
}

fn distinct_others(n: usize, i: usize, stream: &mut RandomStream) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        loop {
            let r = stream.index(n);
            if r != i && !picked[..k].contains(&r) {
                picked[k] = r;
                break;
            }
        }
    }
    picked
}

impl Optimizer for DifferentialEvolution {
    fn name(&self) -> &str {
        "de"
    }

    fn run(
        &self,
        problem: &Problem,
        setup: &RunSetup,
        stream: &mut RandomStream,
    ) -> Result<RunRecord> {
        let n = setup.population;
        if n < 4 {
            return Err(Error::Config(format!(
                "DE needs a population of at least 4, got {n}"
            )));
        }
        let mut ctx = Context::new(self, problem, setup, stream)?;
        let bounds = problem.bounds();
        let (mut pop, mut fit) = ctx.init(n, stream)?;
        for _ in 0..ctx.generations {
            let mut trials = Vec::with_capacity(n);
            for i in 0..n {
                let [r1, r2, r3] = distinct_others(n, i, stream);
                let mutant = de_mutate(&pop[r1], &pop[r2], &pop[r3], self.f)?;
                let mut t = de_crossover(&pop[i], &mutant, self.cr, stream)?;
                bounds.clamp(&mut t);
                trials.push(t);
            }
            let trial_fit = ctx.eval_all(&trials)?;
            for (i, (t, f)) in trials.into_iter().zip(trial_fit).enumerate() {
                if f <= fit[i] {
                    pop[i] = t;
                    fit[i] = f;
                }
            }
            ctx.record(fit.iter().copied().fold(f64::INFINITY, f64::min));
        }
        Ok(ctx.finish("de", stream))
    }
}

/// Self-adaptive Gaussian mutation with (μ + μ) truncation.
pub struct FastEp {
    pub initial_eta: f64,
}

impl Optimizer for FastEp {
    fn name(&self) -> &str {
        "fep"
    }

    fn run(
        &self,
        problem: &Problem,
        setup: &RunSetup,
        stream: &mut RandomStream,
    ) -> Result<RunRecord> {
        let n = setup.population;
        let mut ctx = Context::new(self, problem, setup, stream)?;
        let bounds = problem.bounds();
        let (pop, fit) = ctx.init(n, stream)?;
        let state = FepState::new(problem.dim(), self.initial_eta)?;
        let mut members: Vec<(Vec<f64>, FepState, f64)> = pop
            .into_iter()
            .zip(fit)
            .map(|(x, f)| (x, state.clone(), f))
            .collect();
        for _ in 0..ctx.generations {
            let mut children = Vec::with_capacity(n);
            for (x, st, _) in &members {
                let (mut o, next) = fep_mutate(x, st, stream)?;
                bounds.clamp(&mut o);
                children.push((o, next));
            }
            let xs: Vec<Vec<f64>> = children.iter().map(|c| c.0.clone()).collect();
            let fs = ctx.eval_all(&xs)?;
            members.extend(children.into_iter().zip(fs).map(|((o, s), f)| (o, s, f)));
            members.sort_by(|a, b| a.2.total_cmp(&b.2));
            members.truncate(n);
            ctx.record(members[0].2);
        }
        Ok(ctx.finish("fep", stream))
    }
}

/// CMA-ES with λ equal to the population size. The mean starts at the best
/// member of a uniform initial population; samples are clamped before
/// evaluation and the clamped points drive the update.
pub struct Cmaes;

impl Optimizer for Cmaes {
    fn name(&self) -> &str {
        "cmaes"
    }

    fn run(
        &self,
        problem: &Problem,
        setup: &RunSetup,
        stream: &mut RandomStream,
    ) -> Result<RunRecord> {
        let n = setup.population;
        let mut ctx = Context::new(self, problem, setup, stream)?;
        let bounds = problem.bounds();
        let (pop, fit) = ctx.init(n, stream)?;
        let best = (0..n)
            .min_by(|&a, &b| fit[a].total_cmp(&fit[b]))
            .unwrap_or(0);
        let mut state = CmaesState::new(pop[best].clone(), bounds, n)?;
        for _ in 0..ctx.generations {
            let mut xs = state.ask(n, stream);
            for x in &mut xs {
                bounds.clamp(x);
            }
            let fs = ctx.eval_all(&xs)?;
            match state.tell(&xs, &fs) {
                Ok(()) | Err(Error::NumericDegeneracy(_)) => {}
                Err(e) => return Err(e),
            }
            ctx.record(fs.iter().copied().fold(f64::INFINITY, f64::min));
        }
        Ok(ctx.finish("cmaes", stream))
    }
}

pub struct ParticleSwarm {
    pub params: crate::operators::PsoParams,
}

impl Optimizer for ParticleSwarm {
    fn name(&self) -> &str {
        "pso"
    }

    fn run(
        &self,
        problem: &Problem,
        setup: &RunSetup,
        stream: &mut RandomStream,
    ) -> Result<RunRecord> {
        let n = setup.population;
        let mut ctx = Context::new(self, problem, setup, stream)?;
        let (pop, fit) = ctx.init(n, stream)?;
        let mut swarm = SwarmState::new(pop, fit)?;
        for _ in 0..ctx.generations {
            let meter = &mut ctx.meter;
            pso_step(
                &mut swarm,
                &self.params,
                problem.bounds(),
                |x| meter.eval(x),
                stream,
            )?;
            ctx.record(swarm.gbest_fitness);
        }
        Ok(ctx.finish("pso", stream))
    }
}

/// Competitive swarm; a generation costs `n / 2` evaluations.
pub struct CompetitiveSwarm {
    pub phi: f64,
}

impl Optimizer for CompetitiveSwarm {
    fn name(&self) -> &str {
        "cso"
    }

    fn evaluations_per_generation(&self, n: usize) -> usize {
        n / 2
    }

    fn run(
        &self,
        problem: &Problem,
        setup: &RunSetup,
        stream: &mut RandomStream,
    ) -> Result<RunRecord> {
        let n = setup.population;
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "CSO needs an even population, got {n}"
            )));
        }
        let mut ctx = Context::new(self, problem, setup, stream)?;
        let (pop, fit) = ctx.init(n, stream)?;
        let mut swarm = SwarmState::new(pop, fit)?;
        for _ in 0..ctx.generations {
            let meter = &mut ctx.meter;
            cso_step(
                &mut swarm,
                self.phi,
                problem.bounds(),
                |x| meter.eval(x),
                stream,
            )?;
            ctx.record(swarm.gbest_fitness);
        }
        Ok(ctx.finish("cso", stream))
    }
}

/// The elitist evaluator loop driven by an operator matrix.
pub struct AutovAlgorithm {
    name: String,
    matrix: OperatorMatrix,
}

impl AutovAlgorithm {
    pub fn new(name: impl Into<String>, matrix: OperatorMatrix) -> Self {
        Self {
            name: name.into(),
            matrix,
        }
    }
}

impl Optimizer for AutovAlgorithm {
    fn name(&self) -> &str {
        &self.name
    }

    fn run(
        &self,
        problem: &Problem,
        setup: &RunSetup,
        stream: &mut RandomStream,
    ) -> Result<RunRecord> {
        let n = setup.population;
        let generations = setup.generations(n)?;
        let mut meter = BudgetMeter::new(problem, setup.budget, stream.split("noise"));
        let (trajectory, _) = evolve_with_matrix(
            &self.matrix,
            problem.bounds(),
            n,
            generations,
            |x| meter.eval(x),
            stream,
        )?;
        Ok(RunRecord::new(
            &self.name,
            problem.label(),
            stream.seed(),
            meter.used(),
            trajectory,
        ))
    }
}

pub type OptimizerFactory = fn(&AlgorithmConfig) -> Result<Box<dyn Optimizer>>;

struct Entry {
    name: &'static str,
    aliases: &'static [&'static str],
    factory: OptimizerFactory,
}

/// Optimizers by name. `ga` is an alias of the SBX genetic algorithm.
pub struct OptimizerRegistry {
    entries: Vec<Entry>,
}

impl fmt::Debug for OptimizerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl Default for OptimizerRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl OptimizerRegistry {
    pub fn with_builtins() -> Self {
        let mut r = Self {
            entries: Vec::new(),
        };
        r.register("sbx", &["ga", "sbx-ga"], |c| {
            Ok(Box::new(GeneticAlgorithm::new(
                "sbx",
                Crossover::Sbx,
                c.clone(),
            )))
        });
        r.register("sbx-prime", &["sbx-prime-ga"], |c| {
            Ok(Box::new(GeneticAlgorithm::new(
                "sbx-prime",
                Crossover::SbxPrime,
                c.clone(),
            )))
        });
        r.register("de", &[], |c| {
            Ok(Box::new(DifferentialEvolution {
                f: c.operators.de_f,
                cr: c.de_cr,
            }))
        });
        r.register("fep", &[], |c| {
            Ok(Box::new(FastEp {
                initial_eta: c.operators.fep_eta,
            }))
        });
        r.register("cmaes", &["cma-es"], |_| Ok(Box::new(Cmaes)));
        r.register("pso", &[], |c| {
            Ok(Box::new(ParticleSwarm {
                params: c.operators.pso.clone(),
            }))
        });
        r.register("cso", &[], |c| {
            Ok(Box::new(CompetitiveSwarm {
                phi: c.operators.cso_phi,
            }))
        });
        r.register("autov", &[], |c| {
            let m = c.operators.matrix.clone().ok_or_else(|| {
                Error::Config("algorithm `autov` needs an operator matrix".into())
            })?;
            Ok(Box::new(AutovAlgorithm::new("autov", m)))
        });
        r.register("autov-published", &[], |_| {
            Ok(Box::new(AutovAlgorithm::new(
                "autov-published",
                published_operator(),
            )))
        });
        r
    }

    pub fn register(
        &mut self,
        name: &'static str,
        aliases: &'static [&'static str],
        factory: OptimizerFactory,
    ) {
        let entry = Entry {
            name,
            aliases,
            factory,
        };
        match self.entries.iter_mut().find(|e| e.name == name) {
            Some(e) => *e = entry,
            None => self.entries.push(entry),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    /// Canonical name for `name` or one of its aliases.
    pub fn resolve(&self, name: &str) -> Result<&'static str> {
        let key = name.trim().to_ascii_lowercase();
        self.entries
            .iter()
            .find(|e| e.name == key || e.aliases.contains(&key.as_str()))
            .map(|e| e.name)
            .ok_or_else(|| Error::UnknownName {
                kind: "algorithm",
                name: name.to_string(),
            })
    }

    pub fn create(&self, name: &str, config: &AlgorithmConfig) -> Result<Box<dyn Optimizer>> {
        let canonical = self.resolve(name)?;
        let entry = self
            .entries
            .iter()
            .find(|e| e.name == canonical)
            .expect("resolved name exists");
        (entry.factory)(config)
    }
}
