use crate::numerics::RandomStream;
use crate::problems::Problem;
use crate::{Error, Result};

/// Population size and evaluation budget of one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunSetup {
    pub population: usize,
    pub budget: u64,
}

impl RunSetup {
    pub fn new(population: usize, budget: u64) -> Self {
        Self { population, budget }
    }

    /// Budget for `population` initial evaluations plus `generations`
    /// generations of `population` evaluations each.
    pub fn for_generations(population: usize, generations: usize) -> Self {
        Self::new(population, (population * (generations + 1)) as u64)
    }

    /// Whole generations that fit after initialization when each costs
    /// `per_generation` evaluations.
    pub fn generations(&self, per_generation: usize) -> Result<usize> {
        if self.population == 0 {
            return Err(Error::Config("population must be positive".into()));
        }
        if self.budget < self.population as u64 {
            return Err(Error::Config(format!(
                "budget {} is smaller than the population {}",
                self.budget, self.population
            )));
        }
        Ok(((self.budget - self.population as u64) / per_generation.max(1) as u64) as usize)
    }
}

/// Counts every objective call and refuses calls past the budget. Noisy
/// objectives draw from the meter's own stream.
pub struct BudgetMeter<'a> {
    problem: &'a Problem,
    noise: RandomStream,
    limit: u64,
    used: u64,
}

impl<'a> BudgetMeter<'a> {
    pub fn new(problem: &'a Problem, limit: u64, noise: RandomStream) -> Self {
        Self {
            problem,
            noise,
            limit,
            used: 0,
        }
    }

    pub fn eval(&mut self, x: &[f64]) -> Result<f64> {
        if self.used >= self.limit {
            return Err(Error::BudgetExhausted { limit: self.limit });
        }
        self.used += 1;
        self.problem.evaluate(x, &mut self.noise)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used
    }

    pub fn problem(&self) -> &Problem {
        self.problem
    }
}
