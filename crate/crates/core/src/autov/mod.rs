//! Weighted-sum operators parameterized by an operator matrix, the inner
//! evolutionary loop that scores them, and the self-referential search
//! over matrices.

mod evolve;
mod matrix;
mod search;

pub use evolve::{
    binary_tournament, convergence_smoke, evaluate_operator, evaluate_operator_runs,
    evolve_with_matrix, inner_evolve, published_smoke, truncate_best, EvalConfig, SmokeReport,
    SMOKE_REQUIRED, SMOKE_SEEDS, SMOKE_TARGET,
};
pub use matrix::{
    apply_operator, apply_operator_unclamped, published_operator, sample_weights, AutovOperator,
    MatrixRow, OperatorMatrix, ParentSetKind, WeightSampling, PUBLISHED_THRESHOLDS,
};
pub use search::{autov_search, genome_fitness, MetaConfig, SearchOutcome};
