//! CMA-ES sampling and update.
//!
//! Sampling follows `x = m + σ · s ∘ (B D z)` where `s = 0.6 (u - l)` is
//! the per-dimension initial step vector, `σ` a global multiplier starting
//! at 1 and `C = B D² Bᵀ`. The step sizes reported by
//! [`CmaesState::step_sizes`] are `σ s`. Updates use the standard
//! cumulative step-size adaptation with rank-one and rank-μ covariance
//! terms, pinned to `c_σ = 0.15`, `d_σ = 1.15`, `c_c = 0.105`, `μ = λ/2`
//! and `w_i ∝ ln(μ + 0.5) - ln i`.

use nalgebra::{DMatrix, DVector};

use super::{check_parents, same_len, VariationOperator};
use crate::numerics::RandomStream;
use crate::problems::Bounds;
use crate::{Error, Result};

pub const INITIAL_STEP_FRACTION: f64 = 0.6;

#[derive(Clone, Debug, PartialEq)]
pub struct CmaesParams {
    pub lambda: usize,
    pub mu: usize,
    pub weights: Vec<f64>,
    pub mueff: f64,
    pub c_sigma: f64,
    pub d_sigma: f64,
    pub c_c: f64,
    pub c_1: f64,
    pub c_mu: f64,
}

impl CmaesParams {
    pub fn new(dim: usize, lambda: usize) -> Result<Self> {
        if lambda < 2 {
            return Err(Error::Config(format!("CMA-ES needs λ ≥ 2, got {lambda}")));
        }
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mu = (lambda / 2).max(1);
        let raw: Vec<f64> = (1..=mu)
            .map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mueff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let n = dim as f64;
        let c_1 = 2.0 / ((n + 1.3).powi(2) + mueff);
        let c_mu = (1.0 - c_1).min(2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0).powi(2) + mueff));
        Ok(Self {
            lambda,
            mu,
            weights,
            mueff,
            c_sigma: 0.15,
            d_sigma: 1.15,
            c_c: 0.105,
            c_1,
            c_mu: c_mu.max(0.0),
        })
    }
}

#[derive(Clone, Debug)]
pub struct CmaesState {
    pub params: CmaesParams,
    pub mean: Vec<f64>,
    /// Per-dimension base step `0.6 (u - l)`.
    pub scale: Vec<f64>,
    pub sigma: f64,
    pub cov: DMatrix<f64>,
    pub path_sigma: DVector<f64>,
    pub path_c: DVector<f64>,
    pub generation: usize,
    basis: DMatrix<f64>,
    axis_lengths: DVector<f64>,
}

impl CmaesState {
    pub fn new(mean: Vec<f64>, bounds: &Bounds, lambda: usize) -> Result<Self> {
        same_len(bounds.dim(), mean.len())?;
        let scale = bounds
            .lower()
            .iter()
            .zip(bounds.upper())
            .map(|(l, u)| INITIAL_STEP_FRACTION * (u - l))
            .collect();
        Self::with_scale(mean, scale, lambda)
    }

    pub fn with_scale(mean: Vec<f64>, scale: Vec<f64>, lambda: usize) -> Result<Self> {
        same_len(mean.len(), scale.len())?;
        let n = mean.len();
        let params = CmaesParams::new(n, lambda)?;
        Ok(Self {
            params,
            mean,
            scale,
            sigma: 1.0,
            cov: DMatrix::identity(n, n),
            path_sigma: DVector::zeros(n),
            path_c: DVector::zeros(n),
            generation: 0,
            basis: DMatrix::identity(n, n),
            axis_lengths: DVector::from_element(n, 1.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Effective per-dimension step sizes `σ s`.
    pub fn step_sizes(&self) -> Vec<f64> {
        self.scale.iter().map(|s| self.sigma * s).collect()
    }

    /// Samples `lambda` offspring. Draws: `lambda × D` Gaussians, offspring
    /// by offspring.
    pub fn ask(&self, lambda: usize, stream: &mut RandomStream) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..lambda)
            .map(|_| {
                let z = DVector::from_iterator(
                    n,
                    (0..n).map(|i| self.axis_lengths[i] * stream.gaussian()),
                );
                let y = &self.basis * z;
                (0..n)
                    .map(|d| self.mean[d] + self.sigma * self.scale[d] * y[d])
                    .collect()
            })
            .collect()
    }

    /// Updates mean, paths, step size and covariance from evaluated samples.
    ///
    /// If the covariance stops being positive definite the state is reset
    /// to `C = I` with zeroed paths and a numeric-degeneracy error is
    /// returned; the state remains usable.
    pub fn tell(&mut self, samples: &[Vec<f64>], fitness: &[f64]) -> Result<()> {
        if samples.len() != fitness.len() || samples.len() < self.params.mu {
            return Err(Error::DimensionMismatch {
                expected: self.params.mu.max(fitness.len()),
                got: samples.len(),
            });
        }
        let n = self.dim();
        let nf = n as f64;
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));

        let ys: Vec<DVector<f64>> = order[..self.params.mu]
            .iter()
            .map(|&k| {
                DVector::from_iterator(
                    n,
                    (0..n).map(|d| (samples[k][d] - self.mean[d]) / (self.sigma * self.scale[d])),
                )
            })
            .collect();
        let mut y_w = DVector::zeros(n);
        for (w, y) in self.params.weights.iter().zip(&ys) {
            y_w += y * *w;
        }
        for d in 0..n {
            self.mean[d] += self.sigma * self.scale[d] * y_w[d];
        }

        let p = &self.params;
        // C^{-1/2} y_w = B D^{-1} Bᵀ y_w
        let mut bt_y = self.basis.transpose() * &y_w;
        for i in 0..n {
            bt_y[i] /= self.axis_lengths[i];
        }
        let c_inv_sqrt_y = &self.basis * bt_y;
        self.path_sigma = &self.path_sigma * (1.0 - p.c_sigma)
            + c_inv_sqrt_y * (p.c_sigma * (2.0 - p.c_sigma) * p.mueff).sqrt();
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        let ps_norm = self.path_sigma.norm();
        self.sigma *= ((p.c_sigma / p.d_sigma) * (ps_norm / chi_n - 1.0)).exp();

        self.generation += 1;
        let denom = (1.0 - (1.0 - p.c_sigma).powi(2 * self.generation as i32)).sqrt();
        let h_sigma = if ps_norm / denom < (1.4 + 2.0 / (nf + 1.0)) * chi_n {
            1.0
        } else {
            0.0
        };
        self.path_c = &self.path_c * (1.0 - p.c_c)
            + &y_w * (h_sigma * (p.c_c * (2.0 - p.c_c) * p.mueff).sqrt());

        let decay = 1.0 - p.c_1 - p.c_mu + (1.0 - h_sigma) * p.c_1 * p.c_c * (2.0 - p.c_c);
        let mut cov = &self.cov * decay + (&self.path_c * self.path_c.transpose()) * p.c_1;
        for (w, y) in p.weights.iter().zip(&ys) {
            cov += (y * y.transpose()) * (p.c_mu * w);
        }
        cov = (&cov + cov.transpose()) * 0.5;
        self.cov = cov;
        self.refresh_eigen()
    }

    fn refresh_eigen(&mut self) -> Result<()> {
        let n = self.dim();
        let healthy =
            self.cov.iter().all(|v| v.is_finite()) && self.sigma.is_finite() && self.sigma > 0.0;
        if healthy {
            let eig = self.cov.clone().symmetric_eigen();
            if eig.eigenvalues.iter().all(|v| *v > 0.0 && v.is_finite()) {
                self.basis = eig.eigenvectors;
                self.axis_lengths = eig.eigenvalues.map(f64::sqrt);
                return Ok(());
            }
        }
        self.cov = DMatrix::identity(n, n);
        self.basis = DMatrix::identity(n, n);
        self.axis_lengths = DVector::from_element(n, 1.0);
        self.path_sigma = DVector::zeros(n);
        self.path_c = DVector::zeros(n);
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            self.sigma = 1.0;
        }
        Err(Error::NumericDegeneracy(
            "covariance lost positive definiteness; reset to identity".into(),
        ))
    }

    /// Ask, evaluate with `objective`, tell. Returns the sampled offspring
    /// and their values; a degeneracy reset is reported as an error only
    /// after the state has been reset.
    pub fn step(
        &mut self,
        lambda: usize,
        mut objective: impl FnMut(&[f64]) -> Result<f64>,
        stream: &mut RandomStream,
    ) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let xs = self.ask(lambda, stream);
        let fs = xs
            .iter()
            .map(|x| objective(x))
            .collect::<Result<Vec<f64>>>()?;
        self.tell(&xs, &fs)?;
        Ok((xs, fs))
    }

    #[cfg(test)]
    pub(crate) fn force_covariance(&mut self, cov: DMatrix<f64>) -> Result<()> {
        self.cov = cov;
        self.refresh_eigen()
    }
}

/// The CMA-ES sampling step as a one-parent, bound-using operator:
/// `o = x_m + 0.6 (u - l) ∘ (A z)` with `C = A Aᵀ` (identity by default).
pub struct CmaesSampler {
    pub factor: Option<DMatrix<f64>>,
}

impl VariationOperator for CmaesSampler {
    fn name(&self) -> &str {
        "cmaes"
    }

    fn arity(&self) -> usize {
        1
    }

    fn uses_bounds(&self) -> bool {
        true
    }

    fn vary(
        &self,
        parents: &[&[f64]],
        bounds: &Bounds,
        stream: &mut RandomStream,
    ) -> Result<Vec<Vec<f64>>> {
        let n = check_parents(parents, 1)?;
        same_len(n, bounds.dim())?;
        let z = DVector::from_iterator(n, (0..n).map(|_| stream.gaussian()));
        let y = match &self.factor {
            Some(a) => {
                if a.nrows() != n || a.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: a.nrows(),
                    });
                }
                a * z
            }
            None => z,
        };
        let x = parents[0];
        Ok(vec![(0..n)
            .map(|d| {
                let step = INITIAL_STEP_FRACTION * (bounds.upper()[d] - bounds.lower()[d]);
                x[d] + step * y[d]
            })
            .collect()])
    }
}
