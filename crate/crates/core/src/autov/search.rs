use rayon::prelude::*;

use super::evolve::{binary_tournament, truncate_best};
use super::{
    apply_operator, evaluate_operator, EvalConfig, OperatorMatrix, ParentSetKind, WeightSampling,
};
use crate::numerics::RandomStream;
use crate::{Error, Result};

/// Settings of the self-referential outer loop.
#[derive(Clone, Debug)]
pub struct MetaConfig {
    pub population: usize,
    pub generations: usize,
    pub k: usize,
    pub kind: ParentSetKind,
    /// Applies to every candidate and to the leader varying them.
    pub sampling: WeightSampling,
    pub eval: EvalConfig,
}

impl MetaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.population < 2 {
            return Err(Error::Config(format!(
                "meta population must be at least 2, got {}",
                self.population
            )));
        }
        self.eval.validate()
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub best: OperatorMatrix,
    pub best_fitness: f64,
    /// Best fitness after each meta-generation; entry 0 is the initial
    /// population.
    pub history: Vec<f64>,
}

impl SearchOutcome {
    pub fn initial_best(&self) -> f64 {
        self.history[0]
    }
}

/// Fitness of a flattened matrix; a genome whose selection masses are all
/// zero cannot act as an operator and scores `+inf`.
pub fn genome_fitness(
    kind: ParentSetKind,
    sampling: WeightSampling,
    genome: &[f64],
    cfg: &EvalConfig,
    stream: &RandomStream,
) -> Result<f64> {
    match OperatorMatrix::from_genome(kind, genome) {
        Ok(m) => evaluate_operator(&m.with_sampling(sampling), cfg, stream),
        Err(Error::InvalidMatrix(_)) if genome_mass(kind, genome) <= 0.0 => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

fn genome_mass(kind: ParentSetKind, genome: &[f64]) -> f64 {
    let len = OperatorMatrix::row_len(kind);
    genome.chunks(len).map(|c| c[len - 1]).sum()
}

fn evaluate_all(
    kind: ParentSetKind,
    sampling: WeightSampling,
    genomes: &[Vec<f64>],
    cfg: &EvalConfig,
    stream: &RandomStream,
) -> Result<Vec<f64>> {
    let evals = stream.split("eval");
    genomes
        .par_iter()
        .enumerate()
        .map(|(i, g)| genome_fitness(kind, sampling, g, cfg, &evals.split(i)))
        .collect()
}

/// Evolves operator matrices, varying the meta-population with the best
/// matrix found so far.
pub fn autov_search(cfg: &MetaConfig, stream: &RandomStream) -> Result<SearchOutcome> {
    cfg.validate()?;
    let kind = cfg.kind;
    let n = cfg.population;
    let bounds = OperatorMatrix::genome_bounds(kind, cfg.k);
    let arity = kind.parents();

    let gen0 = stream.split("gen").split(0usize);
    let mut init = gen0.split("init");
    let mut pop: Vec<Vec<f64>> = (0..n).map(|_| bounds.sample(&mut init)).collect();
    let mut fit = evaluate_all(kind, cfg.sampling, &pop, &cfg.eval, &gen0)?;
    let (pop_sorted, fit_sorted) = truncate_best(pop, fit, Vec::new(), Vec::new(), n);
    pop = pop_sorted;
    fit = fit_sorted;
    let mut history = vec![fit[0]];

    for g in 1..=cfg.generations {
        let gs = stream.split("gen").split(g);
        // the leader can only be a genome with some selection mass
        let leader = match OperatorMatrix::from_genome(kind, &pop[0]) {
            Ok(m) => m.with_sampling(cfg.sampling),
            Err(_) => {
                return Err(Error::InvalidMatrix(
                    "no usable operator in the meta-population".into(),
                ))
            }
        };
        let mut sel = gs.split("select");
        let chosen: Vec<usize> = (0..n).map(|_| binary_tournament(&fit, &mut sel)).collect();
        let mut vary = gs.split("vary");
        let mut offspring = Vec::with_capacity(n);
        for i in 0..n {
            let parents: Vec<&[f64]> = (0..arity)
                .map(|j| pop[chosen[(i + j) % n]].as_slice())
                .collect();
            offspring.push(apply_operator(&leader, &parents, &bounds, &mut vary)?);
        }
        let off_fit = evaluate_all(kind, cfg.sampling, &offspring, &cfg.eval, &gs)?;
        (pop, fit) = truncate_best(pop, fit, offspring, off_fit, n);
        history.push(fit[0]);
    }

    let best = OperatorMatrix::from_genome(kind, &pop[0])?.with_sampling(cfg.sampling);
    Ok(SearchOutcome {
        best,
        best_fitness: fit[0],
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_benchmark;

    fn tiny(generations: usize, seed: u64) -> MetaConfig {
        MetaConfig {
            population: 6,
            generations,
            k: 2,
            kind: ParentSetKind::H3,
            sampling: WeightSampling::PerOffspring,
            eval: EvalConfig {
                population: 8,
                generations: 5,
                max_run: 3,
                problem: make_benchmark("Rastrigin", 3).unwrap(),
                seed,
            },
        }
    }

    #[test]
    fn zero_generations_returns_initial_best() {
        let c = tiny(0, 1);
        let out = autov_search(&c, &RandomStream::new(1)).unwrap();
        assert_eq!(out.history.len(), 1);
        assert_eq!(out.best_fitness, out.history[0]);
    }

    #[test]
    fn history_non_increasing_and_deterministic() {
        let c = tiny(4, 2);
        let a = autov_search(&c, &RandomStream::new(2)).unwrap();
        let b = autov_search(&c, &RandomStream::new(2)).unwrap();
        assert_eq!(a.history.len(), 5);
        assert!(a.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(a.best, b.best);
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn massless_genome_scores_infinity() {
        let c = tiny(0, 3);
        let g = vec![0.1; 7 * 2]
            .into_iter()
            .enumerate()
            .map(|(i, v)| if i % 7 == 6 { 0.0 } else { v })
            .collect::<Vec<_>>();
        let f = genome_fitness(
            ParentSetKind::H3,
            WeightSampling::PerOffspring,
            &g,
            &c.eval,
            &RandomStream::new(3),
        )
        .unwrap();
        assert_eq!(f, f64::INFINITY);
    }

    #[test]
    fn k_zero_rejected() {
        let mut c = tiny(0, 4);
        c.k = 0;
        assert!(autov_search(&c, &RandomStream::new(4)).is_err());
    }
}
