//! Experiment runner: budgeted baselines, comparison tables with rank-sum
//! markers, trajectory export and the config file format.

mod algorithms;
mod budget;
mod config;
mod experiment;
mod export;
mod record;

pub use algorithms::{
    AlgorithmConfig, AutovAlgorithm, Cmaes, CompetitiveSwarm, Crossover, DifferentialEvolution,
    FastEp, GeneticAlgorithm, Optimizer, OptimizerFactory, OptimizerRegistry, ParticleSwarm,
};
pub use budget::{BudgetMeter, RunSetup};
pub use config::{ConfigFile, SearchSettings};
pub use experiment::{
    compare, render_comparison, run_grid, run_seed, run_single, sci, tabulate, with_threads,
    Comparison, ComparisonCell, ExperimentConfig, ProblemSpec, RunSpec, SummaryRow,
};
pub use export::{
    comparison_csv, comparison_json, export_all, export_comparison, export_records,
    trajectories_csv, Format, PROTOCOL_NOTE,
};
pub use record::RunRecord;
