use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::{Error, Result};

/// Largest smaller-sample size for which [`RankSumMethod::Auto`] uses the
/// exact permutation distribution.
pub const EXACT_RANK_SUM_LIMIT: usize = 8;

const MIN_RANK_SUM_SAMPLES: usize = 3;

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("median of an empty list"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

pub fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("mean of an empty list"));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Sample standard deviation (n - 1 denominator); zero for a single value.
pub fn std_dev(values: &[f64]) -> Result<f64> {
    let m = mean(values)?;
    if values.len() < 2 {
        return Ok(0.0);
    }
    let ss: f64 = values.iter().map(|x| (x - m) * (x - m)).sum();
    Ok((ss / (values.len() - 1) as f64).sqrt())
}

/// Outcome of comparing sample `a` against sample `b` for minimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// `a` is significantly smaller.
    Better,
    /// `a` is significantly larger.
    Worse,
    Similar,
}

impl Verdict {
    /// Table marker: `+`, `-` or `≈`.
    pub fn marker(self) -> &'static str {
        match self {
            Verdict::Better => "+",
            Verdict::Worse => "-",
            Verdict::Similar => "≈",
        }
    }

    pub fn flipped(self) -> Verdict {
        match self {
            Verdict::Better => Verdict::Worse,
            Verdict::Worse => Verdict::Better,
            Verdict::Similar => Verdict::Similar,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankSumMethod {
    /// Exact when the smaller sample has at most [`EXACT_RANK_SUM_LIMIT`]
    /// values, normal approximation otherwise.
    Auto,
    Exact,
    Normal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankSumVerdict {
    /// Rank sum of sample `a` in the pooled ranking (midranks for ties).
    pub statistic: f64,
    pub p_value: f64,
    pub decision: Verdict,
    pub method: RankSumMethod,
}

/// Two-sided Wilcoxon rank-sum test of `a` against `b`.
pub fn rank_sum_test(a: &[f64], b: &[f64], alpha: f64) -> Result<RankSumVerdict> {
    rank_sum_test_with(a, b, alpha, RankSumMethod::Auto)
}

pub fn rank_sum_test_with(
    a: &[f64],
    b: &[f64],
    alpha: f64,
    method: RankSumMethod,
) -> Result<RankSumVerdict> {
    let smaller = a.len().min(b.len());
    if smaller < MIN_RANK_SUM_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_RANK_SUM_SAMPLES,
            got: smaller,
        });
    }
    let (n, m) = (a.len(), b.len());

    let doubled = doubled_midranks(a, b);
    let w2_a: u64 = doubled[..n].iter().sum();
    let w2_b: u64 = doubled[n..].iter().sum();

    let method = match method {
        RankSumMethod::Auto if smaller <= EXACT_RANK_SUM_LIMIT => RankSumMethod::Exact,
        RankSumMethod::Auto => RankSumMethod::Normal,
        other => other,
    };

    let p_value = match method {
        RankSumMethod::Exact => exact_p_value(&doubled, n, w2_a),
        _ => normal_p_value(&doubled, n, m, w2_a),
    };
    let p_value = p_value.clamp(0.0, 1.0);

    let decision = if p_value >= alpha {
        Verdict::Similar
    } else {
        let (ma, mb) = (median(a)?, median(b)?);
        if ma < mb {
            Verdict::Better
        } else if ma > mb {
            Verdict::Worse
        } else {
            // Equal medians: fall back to the mean ranks.
            let ra = w2_a as f64 / n as f64;
            let rb = w2_b as f64 / m as f64;
            if ra < rb {
                Verdict::Better
            } else if ra > rb {
                Verdict::Worse
            } else {
                Verdict::Similar
            }
        }
    };

    Ok(RankSumVerdict {
        statistic: w2_a as f64 / 2.0,
        p_value,
        decision,
        method,
    })
}

/// Pooled midranks of `a` followed by `b`, doubled so they are integers.
fn doubled_midranks(a: &[f64], b: &[f64]) -> Vec<u64> {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        // 1-based positions i+1 ..= j+1 share rank (i + j + 2) / 2.
        let r2 = (i + j + 2) as u64;
        for &k in &order[i..=j] {
            ranks[k] = r2;
        }
        i = j + 1;
    }
    ranks
}

/// Exact two-sided p-value under the permutation distribution, conditional
/// on the observed tie pattern. Counts subsets of the smaller group's size
/// by doubled rank sum.
fn exact_p_value(doubled: &[u64], n_a: usize, w2_a: u64) -> f64 {
    let total = doubled.len();
    let (k, observed) = if n_a <= total - n_a {
        (n_a, w2_a)
    } else {
        let sum_all: u64 = doubled.iter().sum();
        (total - n_a, sum_all - w2_a)
    };
    let max_sum: u64 = {
        let mut sorted = doubled.to_vec();
        sorted.sort_unstable();
        sorted.iter().rev().take(k).sum()
    };
    let width = max_sum as usize + 1;
    // counts[j][s]: number of j-subsets of the items seen so far with sum s.
    let mut counts = vec![vec![0u128; width]; k + 1];
    counts[0][0] = 1;
    for &r in doubled {
        let r = r as usize;
        for j in (1..=k).rev() {
            let (lo, hi) = counts.split_at_mut(j);
            let prev = &lo[j - 1];
            let cur = &mut hi[0];
            for s in (r..width).rev() {
                if prev[s - r] != 0 {
                    cur[s] += prev[s - r];
                }
            }
        }
    }
    // Expected doubled rank sum of a k-subset.
    let centre = (k as i128) * (total as i128 + 1);
    let obs_dev = (observed as i128 - centre).abs();
    let mut extreme = 0u128;
    let mut all = 0u128;
    for (s, &c) in counts[k].iter().enumerate() {
        if c == 0 {
            continue;
        }
        all += c;
        if (s as i128 - centre).abs() >= obs_dev {
            extreme += c;
        }
    }
    extreme as f64 / all as f64
}

/// Normal approximation with tie correction and a 0.5 continuity correction.
fn normal_p_value(doubled: &[u64], n: usize, m: usize, w2_a: u64) -> f64 {
    let total = (n + m) as f64;
    let (nf, mf) = (n as f64, m as f64);
    let u = w2_a as f64 / 2.0 - nf * (nf + 1.0) / 2.0;
    let mu = nf * mf / 2.0;

    let mut sorted = doubled.to_vec();
    sorted.sort_unstable();
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = nf * mf / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_examples() {
        assert_eq!(median(&[5.0, 2.0, 9.0]).unwrap(), 5.0);
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(median(&[7.0]).unwrap(), 7.0);
        assert!(matches!(median(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn std_dev_sample() {
        let s = std_dev(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(std_dev(&[3.0]).unwrap(), 0.0);
    }

    #[test]
    fn separated_triples_exact_p() {
        // Rank sums 6 and 15 are the two extremes of C(6,3) = 20 splits.
        let v = rank_sum_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0], 0.05).unwrap();
        assert!((v.p_value - 0.1).abs() < 1e-15);
        assert_eq!(v.decision, Verdict::Similar);
        assert_eq!(v.method, RankSumMethod::Exact);
        assert_eq!(v.statistic, 6.0);
    }

    #[test]
    fn identical_samples_are_similar() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let v = rank_sum_test(&a, &a, 0.05).unwrap();
        assert!((v.p_value - 1.0).abs() < 1e-12);
        assert_eq!(v.decision, Verdict::Similar);
    }

    #[test]
    fn separated_octets_better() {
        let a: Vec<f64> = (1..=8).map(f64::from).collect();
        let b: Vec<f64> = (101..=108).map(f64::from).collect();
        let v = rank_sum_test(&a, &b, 0.05).unwrap();
        // 2 / C(16, 8)
        assert!((v.p_value - 2.0 / 12870.0).abs() < 1e-15);
        assert_eq!(v.decision, Verdict::Better);
        let w = rank_sum_test(&b, &a, 0.05).unwrap();
        assert_eq!(w.decision, Verdict::Worse);
    }

    #[test]
    fn too_small_rejected() {
        assert!(matches!(
            rank_sum_test(&[1.0, 2.0], &[3.0, 4.0, 5.0], 0.05),
            Err(Error::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn all_tied_normal_mode_is_similar() {
        let a = vec![1.0; 30];
        let v = rank_sum_test(&a, &a, 0.05).unwrap();
        assert_eq!(v.method, RankSumMethod::Normal);
        assert_eq!(v.p_value, 1.0);
    }

    #[test]
    fn normal_mode_detects_shift() {
        let a: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| i as f64 + 25.0).collect();
        let v = rank_sum_test(&a, &b, 0.05).unwrap();
        assert_eq!(v.method, RankSumMethod::Normal);
        assert_eq!(v.decision, Verdict::Better);
        assert!(v.p_value < 1e-6);
    }

    #[test]
    fn exact_and_normal_agree_roughly_at_moderate_size() {
        let a: Vec<f64> = (0..8).map(|i| (i * 3) as f64).collect();
        let b: Vec<f64> = (0..8).map(|i| (i * 3 + 4) as f64).collect();
        let e = rank_sum_test_with(&a, &b, 0.05, RankSumMethod::Exact).unwrap();
        let n = rank_sum_test_with(&a, &b, 0.05, RankSumMethod::Normal).unwrap();
        assert!((e.p_value - n.p_value).abs() < 0.05, "{e:?} {n:?}");
    }

    #[test]
    fn p_value_is_symmetric() {
        let a = [0.3, 1.2, 5.5, 2.2, 0.1, 9.0];
        let b = [4.0, 4.1, 6.3, 7.7, 3.3];
        let x = rank_sum_test(&a, &b, 0.05).unwrap();
        let y = rank_sum_test(&b, &a, 0.05).unwrap();
        assert!((x.p_value - y.p_value).abs() < 1e-15);
        assert_eq!(x.decision, y.decision.flipped());
    }
}
