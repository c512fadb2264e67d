use std::fmt;

use nalgebra::DMatrix;

use super::{
    CmaesSampler, CsoMove, DeMutation, FepOperator, PsoMove, PsoParams, SbxOperator, SbxParams,
    SbxPrimeOperator, VariationOperator, CSO_SOCIAL_FACTOR, FEP_INITIAL_ETA,
};
use crate::autov::{published_operator, AutovOperator, OperatorMatrix};
use crate::{Error, Result};

/// Parameters shared by every operator factory; each factory reads only
/// the fields it needs.
#[derive(Clone, Debug)]
pub struct OperatorConfig {
    pub sbx: SbxParams,
    pub de_f: f64,
    pub fep_eta: f64,
    /// Covariance factor `A` for the CMA-ES sampler; identity when absent.
    pub cmaes_factor: Option<DMatrix<f64>>,
    pub pso: PsoParams,
    pub cso_phi: f64,
    /// Matrix for the `autov` operator.
    pub matrix: Option<OperatorMatrix>,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            sbx: SbxParams::default(),
            de_f: 0.5,
            fep_eta: FEP_INITIAL_ETA,
            cmaes_factor: None,
            pso: PsoParams::default(),
            cso_phi: CSO_SOCIAL_FACTOR,
            matrix: None,
        }
    }
}

pub type OperatorFactory = fn(&OperatorConfig) -> Result<Box<dyn VariationOperator>>;

struct Entry {
    name: &'static str,
    description: &'static str,
    factory: OperatorFactory,
}

pub struct OperatorRegistry {
    entries: Vec<Entry>,
}

impl fmt::Debug for OperatorRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl Default for OperatorRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl OperatorRegistry {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("sbx", "simulated binary crossover", |c| {
            Ok(Box::new(SbxOperator {
                params: c.sbx,
            }))
        });
        r.register("sbx-prime", "translation-variant SBX counterexample", |c| {
            Ok(Box::new(SbxPrimeOperator {
                params: c.sbx,
            }))
        });
        r.register("de", "DE/rand/1 difference mutation", |c| {
            Ok(Box::new(DeMutation { f: c.de_f }))
        });
        r.register("fep", "self-adaptive Gaussian mutation", |c| {
            Ok(Box::new(FepOperator {
                initial_eta: c.fep_eta,
            }))
        });
        r.register("cmaes", "CMA-ES sampling step", |c| {
            Ok(Box::new(CmaesSampler {
                factor: c.cmaes_factor.clone(),
            }))
        });
        r.register("pso", "particle swarm move", |c| {
            Ok(Box::new(PsoMove {
                params: c.pso.clone(),
            }))
        });
        r.register("cso", "competitive swarm loser move", |c| {
            Ok(Box::new(CsoMove { phi: c.cso_phi }))
        });
        r.register(
            "autov",
            "weighted-sum operator from a supplied matrix",
            |c| {
                let m = c
                    .matrix
                    .clone()
                    .ok_or_else(|| Error::Config("operator `autov` needs a matrix".into()))?;
                Ok(Box::new(AutovOperator::new(m)?))
            },
        );
        r.register(
            "autov-published",
            "the published ten-branch operator",
            |_| {
                Ok(Box::new(AutovOperator::named(
                    "autov-published",
                    published_operator(),
                )))
            },
        );
        r
    }

    /// Adds or replaces an entry.
    pub fn register(
        &mut self,
        name: &'static str,
        description: &'static str,
        factory: OperatorFactory,
    ) {
        let entry = Entry {
            name,
            description,
            factory,
        };
        match self.entries.iter_mut().find(|e| e.name == name) {
            Some(e) => *e = entry,
            None => self.entries.push(entry),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name).collect()
    }

    pub fn describe(&self) -> Vec<(&'static str, &'static str)> {
        self.entries
            .iter()
            .map(|e| (e.name, e.description))
            .collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|e| e.name == name)
    }

    pub fn create(
        &self,
        name: &str,
        config: &OperatorConfig,
    ) -> Result<Box<dyn VariationOperator>> {
        let entry = self
            .entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::UnknownName {
                kind: "operator",
                name: name.to_string(),
            })?;
        (entry.factory)(config)
    }
}
