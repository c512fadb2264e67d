//! Reference variation operators behind one trait, plus a name-keyed
//! registry so the invariance lab, the harness and the CLI can treat every
//! operator the same way.
//!
//! Each operator documents its draw order. The invariance lab relies on it:
//! an operator must consume the same number of draws whatever its inputs.

mod cmaes;
mod de;
mod fep;
mod registry;
mod sbx;
mod swarm;

pub use cmaes::{CmaesParams, CmaesSampler, CmaesState};
pub use de::{de_crossover, de_mutate, DeMutation, DeParams};
pub use fep::{fep_mutate, FepOperator, FepState, FEP_INITIAL_ETA};
pub use registry::{OperatorConfig, OperatorFactory, OperatorRegistry};
pub use sbx::{
    polynomial_mutation, sbx, sbx_prime, sbx_prime_with_betas, sbx_with_betas, spread_factor,
    SbxOperator, SbxParams, SbxPrimeOperator,
};
pub use swarm::{cso_step, pso_step, CsoMove, PsoMove, PsoParams, SwarmState, CSO_SOCIAL_FACTOR};

use crate::numerics::RandomStream;
use crate::problems::Bounds;
use crate::{Error, Result};

/// A map from parent vectors (and optionally the box corners) to offspring.
///
/// `vary` is the realized map before any bound repair. Bound-using
/// operators read `bounds.lower()` and `bounds.upper()` as ordinary input
/// vectors, so they may receive transformed, unordered corners.
pub trait VariationOperator: Send + Sync {
    fn name(&self) -> &str;

    /// Number of parent vectors consumed.
    fn arity(&self) -> usize;

    fn uses_bounds(&self) -> bool;

    fn vary(
        &self,
        parents: &[&[f64]],
        bounds: &Bounds,
        stream: &mut RandomStream,
    ) -> Result<Vec<Vec<f64>>>;
}

/// Checks parent count and equal lengths; returns the common dimension.
pub(crate) fn check_parents(parents: &[&[f64]], arity: usize) -> Result<usize> {
    if parents.len() != arity {
        return Err(Error::DimensionMismatch {
            expected: arity,
            got: parents.len(),
        });
    }
    let dim = parents[0].len();
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    for p in &parents[1..] {
        same_len(dim, p.len())?;
    }
    Ok(dim)
}

pub(crate) fn same_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
