use serde::{Deserialize, Serialize};

/// One run: best-so-far objective per generation (generation 0 is the
/// initial population) and the evaluations spent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub problem: String,
    pub seed: u64,
    pub evaluations: u64,
    pub trajectory: Vec<f64>,
    pub final_best: f64,
}

impl RunRecord {
    pub fn new(
        algorithm: impl Into<String>,
        problem: impl Into<String>,
        seed: u64,
        evaluations: u64,
        trajectory: Vec<f64>,
    ) -> Self {
        let final_best = trajectory.last().copied().unwrap_or(f64::INFINITY);
        Self {
            algorithm: algorithm.into(),
            problem: problem.into(),
            seed,
            evaluations,
            trajectory,
            final_best,
        }
    }

    pub fn generations(&self) -> usize {
        self.trajectory.len().saturating_sub(1)
    }

    pub fn is_monotone(&self) -> bool {
        self.trajectory.windows(2).all(|w| w[1] <= w[0])
    }
}
