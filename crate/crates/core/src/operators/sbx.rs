use super::{check_parents, same_len, VariationOperator};
use crate::numerics::RandomStream;
use crate::problems::Bounds;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SbxParams {
    /// Distribution index η_c.
    pub eta: f64,
    pub crossover_probability: f64,
}

impl Default for SbxParams {
    fn default() -> Self {
        Self {
            eta: 20.0,
            crossover_probability: 1.0,
        }
    }
}

impl SbxParams {
    fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) || !(0.0..=1.0).contains(&self.crossover_probability) {
            return Err(Error::Config(format!("invalid SBX parameters {self:?}")));
        }
        Ok(())
    }
}

/// Spread factor β for a uniform draw `u ∈ [0, 1)`.
pub fn spread_factor(u: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(e)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(e)
    }
}

/// Draws the gate uniform and one uniform per dimension; returns `None`
/// when the gate says no crossover.
fn draw_betas(dim: usize, params: &SbxParams, stream: &mut RandomStream) -> Option<Vec<f64>> {
    let gate = stream.uniform();
    let betas: Vec<f64> = (0..dim)
        .map(|_| spread_factor(stream.uniform(), params.eta))
        .collect();
    (gate < params.crossover_probability).then_some(betas)
}

/// Offspring pair for explicit per-dimension spread factors.
pub fn sbx_with_betas(x1: &[f64], x2: &[f64], betas: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    same_len(x1.len(), x2.len())?;
    same_len(x1.len(), betas.len())?;
    let mut o1 = Vec::with_capacity(x1.len());
    let mut o2 = Vec::with_capacity(x1.len());
    for ((a, b), beta) in x1.iter().zip(x2).zip(betas) {
        o1.push(0.5 * ((1.0 + beta) * a + (1.0 - beta) * b));
        o2.push(0.5 * ((1.0 - beta) * a + (1.0 + beta) * b));
    }
    Ok((o1, o2))
}

/// Simulated binary crossover.
///
/// Draws: one gate uniform, then one uniform per dimension (always, even
/// when the gate rejects crossover).
pub fn sbx(
    x1: &[f64],
    x2: &[f64],
    params: &SbxParams,
    stream: &mut RandomStream,
) -> Result<(Vec<f64>, Vec<f64>)> {
    params.validate()?;
    same_len(x1.len(), x2.len())?;
    match draw_betas(x1.len(), params, stream) {
        Some(betas) => sbx_with_betas(x1, x2, &betas),
        None => Ok((x1.to_vec(), x2.to_vec())),
    }
}

/// The translation-variant SBX variant: the leading `x1` term is shrunk to
/// `0.1 x1`, which pulls offspring toward the origin.
pub fn sbx_prime_with_betas(x1: &[f64], x2: &[f64], betas: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    same_len(x1.len(), x2.len())?;
    same_len(x1.len(), betas.len())?;
    let mut o1 = Vec::with_capacity(x1.len());
    let mut o2 = Vec::with_capacity(x1.len());
    for ((a, b), beta) in x1.iter().zip(x2).zip(betas) {
        o1.push(0.1 * a + 0.5 * (1.0 - beta) * (b - a));
        o2.push(0.1 * a + 0.5 * (1.0 + beta) * (b - a));
    }
    Ok((o1, o2))
}

/// Same draw order as [`sbx`]. Without crossover the parents are still
/// passed through the `0.1 x1` map with β = 1, so the operator stays
/// variant in every branch.
pub fn sbx_prime(
    x1: &[f64],
    x2: &[f64],
    params: &SbxParams,
    stream: &mut RandomStream,
) -> Result<(Vec<f64>, Vec<f64>)> {
    params.validate()?;
    same_len(x1.len(), x2.len())?;
    let betas = draw_betas(x1.len(), params, stream).unwrap_or_else(|| vec![1.0; x1.len()]);
    sbx_prime_with_betas(x1, x2, &betas)
}

/// Polynomial mutation, clamped to `bounds`.
///
/// Draws: two uniforms per dimension (gate, then perturbation), always.
pub fn polynomial_mutation(
    x: &[f64],
    bounds: &Bounds,
    probability: f64,
    eta: f64,
    stream: &mut RandomStream,
) -> Vec<f64> {
    let mut out = x.to_vec();
    let pow = 1.0 / (eta + 1.0);
    for (d, v) in out.iter_mut().enumerate() {
        let gate = stream.uniform();
        let u = stream.uniform();
        if gate >= probability {
            continue;
        }
        let (l, h) = (bounds.lower()[d], bounds.upper()[d]);
        let width = h - l;
        let delta_q = if u < 0.5 {
            let xy = 1.0 - (*v - l) / width;
            let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
            val.powf(pow) - 1.0
        } else {
            let xy = 1.0 - (h - *v) / width;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
            1.0 - val.powf(pow)
        };
        *v += delta_q * width;
    }
    bounds.clamp(&mut out);
    out
}

pub struct SbxOperator {
    pub params: SbxParams,
}

impl VariationOperator for SbxOperator {
    fn name(&self) -> &str {
        "sbx"
    }

    fn arity(&self) -> usize {
        2
    }

    fn uses_bounds(&self) -> bool {
        false
    }

    fn vary(
        &self,
        parents: &[&[f64]],
        _: &Bounds,
        stream: &mut RandomStream,
    ) -> Result<Vec<Vec<f64>>> {
        check_parents(parents, 2)?;
        let (o1, o2) = sbx(parents[0], parents[1], &self.params, stream)?;
        Ok(vec![o1, o2])
    }
}

pub struct SbxPrimeOperator {
    pub params: SbxParams,
}

impl VariationOperator for SbxPrimeOperator {
    fn name(&self) -> &str {
        "sbx-prime"
    }

    fn arity(&self) -> usize {
        2
    }

    fn uses_bounds(&self) -> bool {
        false
    }

    fn vary(
        &self,
        parents: &[&[f64]],
        _: &Bounds,
        stream: &mut RandomStream,
    ) -> Result<Vec<Vec<f64>>> {
        check_parents(parents, 2)?;
        let (o1, o2) = sbx_prime(parents[0], parents[1], &self.params, stream)?;
        Ok(vec![o1, o2])
    }
}
