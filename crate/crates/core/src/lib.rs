//! Workbench for variation operators in continuous black-box optimization.
//!
//! The crate is organised around a small number of registries:
//!
//! - [`operators`] holds the reference variation operators (SBX, DE mutation,
//!   FEP, CMA-ES sampling, PSO and CSO moves) behind the
//!   [`operators::VariationOperator`] trait, addressable by name.
//! - [`invariance`] checks translation, scale and rotation equivariance of any
//!   registered operator with shared random draws, and builds operators of the
//!   generic invariant forms.
//! - [`autov`] implements weighted-sum operators parameterized by an
//!   [`autov::OperatorMatrix`], the elitist evaluator, and the self-referential
//!   meta-search over operator matrices.
//! - [`harness`] runs whole algorithms under an evaluation budget, compares
//!   them with rank-sum markers and exports CSV/JSON.
//!
//! All randomness flows through [`numerics::RandomStream`], a counter-based,
//! splittable stream, so every run is reproducible from a master seed.

// `!(x > 0.0)` style checks are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autov;
pub mod error;
pub mod harness;
pub mod invariance;
pub mod numerics;
pub mod operators;
pub mod problems;

pub use error::{Error, Result};

/// Version string printed in run banners.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
