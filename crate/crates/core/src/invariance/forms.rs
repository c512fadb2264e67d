use std::sync::Arc;

use crate::numerics::RandomStream;
use crate::operators::{check_parents, VariationOperator};
use crate::problems::Bounds;
use crate::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Smallest consecutive difference accepted as a ratio denominator.
pub const RATIO_GUARD: f64 = 1e-12;

/// `x1 + ψ(x2 - x1, x3 - x2, …)` per dimension.
pub struct TranslationForm {
    arity: usize,
    psi: ScalarFn,
}

/// `x1 + (x2 - x1) φ((x3 - x2)/(x2 - x1), …)` per dimension.
pub struct TranslationScaleForm {
    arity: usize,
    phi: ScalarFn,
}

/// `Σ r_i x_i` with weights fixed across dimensions.
pub struct WeightedSum {
    weights: Vec<f64>,
}

pub fn make_t_invariant(
    arity: usize,
    psi: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
) -> Result<TranslationForm> {
    if arity == 0 {
        return Err(Error::Config("form needs at least one parent".into()));
    }
    Ok(TranslationForm {
        arity,
        psi: Arc::new(psi),
    })
}

pub fn make_ts_invariant(
    arity: usize,
    phi: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
) -> Result<TranslationScaleForm> {
    if arity < 2 {
        return Err(Error::Config("form needs at least two parents".into()));
    }
    Ok(TranslationScaleForm {
        arity,
        phi: Arc::new(phi),
    })
}

/// Weighted sum whose weights must add up to one within `1e-12`.
pub fn make_tsr_invariant(weights: Vec<f64>) -> Result<WeightedSum> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || (sum - 1.0).abs() >= 1e-12 {
        return Err(Error::InvalidWeights { sum });
    }
    Ok(WeightedSum { weights })
}

/// Weighted sum with arbitrary weights.
pub fn weighted_sum(weights: Vec<f64>) -> Result<WeightedSum> {
    if weights.is_empty() {
        return Err(Error::EmptyInput("weights"));
    }
    Ok(WeightedSum { weights })
}

impl WeightedSum {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl VariationOperator for TranslationForm {
    fn name(&self) -> &str {
        "t-form"
    }

    fn arity(&self) -> usize {
        self.arity
    }

    fn uses_bounds(&self) -> bool {
        false
    }

    fn vary(&self, parents: &[&[f64]], _: &Bounds, _: &mut RandomStream) -> Result<Vec<Vec<f64>>> {
        let dim = check_parents(parents, self.arity)?;
        let mut diffs = vec![0.0; self.arity - 1];
        Ok(vec![(0..dim)
            .map(|d| {
                for (i, v) in diffs.iter_mut().enumerate() {
                    *v = parents[i + 1][d] - parents[i][d];
                }
                parents[0][d] + (self.psi)(&diffs)
            })
            .collect()])
    }
}

impl VariationOperator for TranslationScaleForm {
    fn name(&self) -> &str {
        "ts-form"
    }

    fn arity(&self) -> usize {
        self.arity
    }

    fn uses_bounds(&self) -> bool {
        false
    }

    fn vary(&self, parents: &[&[f64]], _: &Bounds, _: &mut RandomStream) -> Result<Vec<Vec<f64>>> {
        let dim = check_parents(parents, self.arity)?;
        let mut ratios = vec![0.0; self.arity - 2];
        let mut out = Vec::with_capacity(dim);
        for d in 0..dim {
            let diff = |i: usize| parents[i + 1][d] - parents[i][d];
            for i in 0..self.arity - 1 {
                if diff(i).abs() < RATIO_GUARD {
                    return Err(Error::DegenerateInput(format!(
                        "parents {} and {} coincide in dimension {d}",
                        i + 1,
                        i + 2
                    )));
                }
            }
            for (i, r) in ratios.iter_mut().enumerate() {
                *r = diff(i + 1) / diff(i);
            }
            out.push(parents[0][d] + diff(0) * (self.phi)(&ratios));
        }
        Ok(vec![out])
    }
}

impl VariationOperator for WeightedSum {
    fn name(&self) -> &str {
        "weighted-sum"
    }

    fn arity(&self) -> usize {
        self.weights.len()
    }

    fn uses_bounds(&self) -> bool {
        false
    }

    fn vary(&self, parents: &[&[f64]], _: &Bounds, _: &mut RandomStream) -> Result<Vec<Vec<f64>>> {
        let dim = check_parents(parents, self.weights.len())?;
        Ok(vec![(0..dim)
            .map(|d| {
                self.weights
                    .iter()
                    .zip(parents)
                    .map(|(r, x)| r * x[d])
                    .sum()
            })
            .collect()])
    }
}
