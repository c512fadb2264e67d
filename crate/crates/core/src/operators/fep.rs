use super::{check_parents, VariationOperator};
use crate::numerics::RandomStream;
use crate::problems::Bounds;
use crate::{Error, Result};

pub const FEP_INITIAL_ETA: f64 = 3.0;

/// Self-adaptive per-dimension deviations of one FEP individual.
#[derive(Clone, Debug, PartialEq)]
pub struct FepState {
    pub eta: Vec<f64>,
}

impl FepState {
    pub fn new(dim: usize, initial: f64) -> Result<Self> {
        if !(initial > 0.0) {
            return Err(Error::Config(format!(
                "FEP deviation must be positive, got {initial}"
            )));
        }
        Ok(Self {
            eta: vec![initial; dim],
        })
    }
}

/// Gaussian perturbation `x_d + η_d N(0,1)` followed by lognormal
/// self-adaptation `η'_d = η_d exp(τ' N + τ N_d)` with
/// `τ = 1/√(2√D)` and `τ' = 1/√(2D)`. The offspring uses the old η.
///
/// Draws: D Gaussians for the offspring, one global Gaussian, then D
/// Gaussians for the deviations.
pub fn fep_mutate(
    x: &[f64],
    state: &FepState,
    stream: &mut RandomStream,
) -> Result<(Vec<f64>, FepState)> {
    let dim = x.len();
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    super::same_len(dim, state.eta.len())?;
    if state.eta.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::DegenerateInput(
            "FEP deviations must be positive".into(),
        ));
    }
    let offspring: Vec<f64> = x
        .iter()
        .zip(&state.eta)
        .map(|(v, e)| v + e * stream.gaussian())
        .collect();
    let d = dim as f64;
    let tau = 1.0 / (2.0 * d.sqrt()).sqrt();
    let tau_prime = 1.0 / (2.0 * d).sqrt();
    let global = tau_prime * stream.gaussian();
    let eta = state
        .eta
        .iter()
        .map(|e| (e * (global + tau * stream.gaussian()).exp()).max(f64::MIN_POSITIVE))
        .collect();
    Ok((offspring, FepState { eta }))
}

/// FEP mutation with a fixed deviation vector, viewed as a one-parent
/// operator.
pub struct FepOperator {
    pub initial_eta: f64,
}

impl VariationOperator for FepOperator {
    fn name(&self) -> &str {
        "fep"
    }

    fn arity(&self) -> usize {
        1
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
        let dim = check_parents(parents, 1)?;
        let state = FepState::new(dim, self.initial_eta)?;
        let (o, _) = fep_mutate(parents[0], &state, stream)?;
        Ok(vec![o])
    }
}
