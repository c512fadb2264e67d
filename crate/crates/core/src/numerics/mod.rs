//! Deterministic randomness, orthogonal matrices and the two statistics the
//! harness needs (median and the Wilcoxon rank-sum test).

mod ortho;
mod rng;
mod stats;

pub use ortho::{random_orthogonal, OrthogonalMatrix};
pub use rng::{RandomStream, SplitLabel, StreamSnapshot};
pub use stats::{
    mean, median, rank_sum_test, rank_sum_test_with, std_dev, RankSumMethod, RankSumVerdict,
    Verdict, EXACT_RANK_SUM_LIMIT,
};
