//! Shared-stream equivariance checks for variation operators.
//!
//! Each check replays the same random draws against original and
//! transformed inputs, so what is tested is the realized map. Operators
//! whose draw count depends on their inputs are rejected.

mod forms;

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

pub use forms::{
    make_t_invariant, make_ts_invariant, make_tsr_invariant, weighted_sum, ScalarFn,
    TranslationForm, TranslationScaleForm, WeightedSum, RATIO_GUARD,
};

use crate::numerics::{random_orthogonal, OrthogonalMatrix, RandomStream};
use crate::operators::VariationOperator;
use crate::problems::Bounds;
use crate::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const PARENT_RANGE: f64 = 10.0;
pub const SHIFT_RANGE: f64 = 100.0;

fn run_pair(
    op: &dyn VariationOperator,
    parents: &[&[f64]],
    bounds: &Bounds,
    moved_parents: &[&[f64]],
    moved_bounds: &Bounds,
    stream: &mut RandomStream,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let snap = stream.snapshot();
    let start = stream.position();
    let plain = op.vary(parents, bounds, stream)?;
    let first = stream.position() - start;
    stream.restore(snap);
    let moved = op.vary(moved_parents, moved_bounds, stream)?;
    let second = stream.position() - start;
    if first != second {
        return Err(Error::NondeterministicDraws {
            operator: op.name().to_string(),
            first,
            second,
        });
    }
    if plain.len() != moved.len() {
        return Err(Error::DimensionMismatch {
            expected: plain.len(),
            got: moved.len(),
        });
    }
    Ok((plain, moved))
}

fn max_residual(
    plain: &[Vec<f64>],
    moved: &[Vec<f64>],
    expected: impl Fn(&[f64]) -> Vec<f64>,
) -> f64 {
    let mut worst: f64 = 0.0;
    for (p, m) in plain.iter().zip(moved) {
        for (e, v) in expected(p).iter().zip(m) {
            let r = (v - e).abs();
            worst = if r.is_nan() {
                f64::INFINITY
            } else {
                worst.max(r)
            };
        }
    }
    worst
}

fn as_slices(v: &[Vec<f64>]) -> Vec<&[f64]> {
    v.iter().map(Vec::as_slice).collect()
}

/// `max |h(x + b) - (h(x) + b)|` with the same draws on both sides.
pub fn check_translation_by(
    op: &dyn VariationOperator,
    parents: &[&[f64]],
    bounds: &Bounds,
    shift: &[f64],
    stream: &mut RandomStream,
) -> Result<f64> {
    let add = |x: &[f64]| -> Vec<f64> { x.iter().zip(shift).map(|(a, b)| a + b).collect() };
    let moved: Vec<Vec<f64>> = parents.iter().map(|p| add(p)).collect();
    let moved_bounds = bounds.map_vectors(add);
    let (plain, out) = run_pair(
        op,
        parents,
        bounds,
        &as_slices(&moved),
        &moved_bounds,
        stream,
    )?;
    Ok(max_residual(&plain, &out, add))
}

/// Translation by the same `b` in every dimension.
pub fn check_translation(
    op: &dyn VariationOperator,
    parents: &[&[f64]],
    bounds: &Bounds,
    b: f64,
    stream: &mut RandomStream,
) -> Result<f64> {
    if !b.is_finite() {
        return Err(Error::DegenerateInput("translation must be finite".into()));
    }
    let shift = vec![b; parents.first().map_or(0, |p| p.len())];
    check_translation_by(op, parents, bounds, &shift, stream)
}

/// `max |h(a x) - a h(x)| / |a|` with the same draws on both sides.
pub fn check_scale(
    op: &dyn VariationOperator,
    parents: &[&[f64]],
    bounds: &Bounds,
    a: f64,
    stream: &mut RandomStream,
) -> Result<f64> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidScale(a));
    }
    let mul = |x: &[f64]| -> Vec<f64> { x.iter().map(|v| a * v).collect() };
    let moved: Vec<Vec<f64>> = parents.iter().map(|p| mul(p)).collect();
    let moved_bounds = bounds.map_vectors(mul);
    let (plain, out) = run_pair(
        op,
        parents,
        bounds,
        &as_slices(&moved),
        &moved_bounds,
        stream,
    )?;
    Ok(max_residual(&plain, &out, mul) / a.abs())
}

/// `max |h(x M) - h(x) M|` with the same draws on both sides.
pub fn check_rotation(
    op: &dyn VariationOperator,
    parents: &[&[f64]],
    bounds: &Bounds,
    m: &OrthogonalMatrix,
    stream: &mut RandomStream,
) -> Result<f64> {
    for p in parents {
        if p.len() != m.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                got: p.len(),
            });
        }
    }
    let rot = |x: &[f64]| m.apply(x);
    let moved: Vec<Vec<f64>> = parents.iter().map(|p| rot(p)).collect();
    let moved_bounds = bounds.map_vectors(rot);
    let (plain, out) = run_pair(
        op,
        parents,
        bounds,
        &as_slices(&moved),
        &moved_bounds,
        stream,
    )?;
    Ok(max_residual(&plain, &out, rot))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PropertyVerdict {
    pub passed: bool,
    pub residual: f64,
}

impl PropertyVerdict {
    pub fn new(residual: f64, tolerance: f64) -> Self {
        Self {
            passed: residual <= tolerance,
            residual,
        }
    }

    pub fn label(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub operator: String,
    pub dim: usize,
    pub trials: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub translation: PropertyVerdict,
    pub scale: PropertyVerdict,
    pub rotation: PropertyVerdict,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    operator: &'a str,
    dim: usize,
    translation: &'static str,
    scale: &'static str,
    rotation: &'static str,
    residuals: Residuals,
    trials: usize,
    tolerance: f64,
    seed: u64,
}

#[derive(Serialize)]
struct Residuals {
    translation: f64,
    scale: f64,
    rotation: f64,
}

impl InvarianceReport {
    /// `[translation, scale, rotation]` pass flags.
    pub fn verdicts(&self) -> [bool; 3] {
        [
            self.translation.passed,
            self.scale.passed,
            self.rotation.passed,
        ]
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ReportDoc {
            operator: &self.operator,
            dim: self.dim,
            translation: self.translation.label(),
            scale: self.scale.label(),
            rotation: self.rotation.label(),
            residuals: Residuals {
                translation: self.translation.residual,
                scale: self.scale.residual,
                rotation: self.rotation.residual,
            },
            trials: self.trials,
            tolerance: self.tolerance,
            seed: self.seed,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "operator {}  D = {}  trials = {}  tol = {:.1e}  seed = {}",
            self.operator, self.dim, self.trials, self.tolerance, self.seed
        )?;
        for (name, v) in [
            ("translation", &self.translation),
            ("scale", &self.scale),
            ("rotation", &self.rotation),
        ] {
            writeln!(
                f,
                "  {name:<12} {:<5} worst residual {:.4e}",
                v.label(),
                v.residual
            )?;
        }
        Ok(())
    }
}

/// Settings for [`classify`].
#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    pub dim: usize,
    pub trials: usize,
    pub tolerance: f64,
}

impl ClassifyConfig {
    pub fn new(dim: usize, trials: usize) -> Self {
        Self {
            dim,
            trials,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

struct TrialResult {
    translation: f64,
    scale: f64,
    rotation: f64,
}

fn run_trial(op: &dyn VariationOperator, dim: usize, stream: &RandomStream) -> Result<TrialResult> {
    let bounds = Bounds::uniform(dim, -PARENT_RANGE, PARENT_RANGE)?;
    let mut inputs = stream.split("inputs");
    let parents: Vec<Vec<f64>> = (0..op.arity())
        .map(|_| bounds.sample(&mut inputs))
        .collect();
    let parents = as_slices(&parents);
    let b = inputs.uniform_in(-SHIFT_RANGE, SHIFT_RANGE);
    let k = inputs.index(5) as i32 - 2;
    let sign = if inputs.uniform() < 0.5 { -1.0 } else { 1.0 };
    let a = sign * 10f64.powi(k);
    let m = random_orthogonal(dim, &mut stream.split("rotation"))?;
    Ok(TrialResult {
        translation: check_translation(op, &parents, &bounds, b, &mut stream.split("op-t"))?,
        scale: check_scale(op, &parents, &bounds, a, &mut stream.split("op-s"))?,
        rotation: check_rotation(op, &parents, &bounds, &m, &mut stream.split("op-r"))?,
    })
}

/// Worst residuals over `trials` random parent sets, shifts in
/// `[-100, 100]`, scales `±10^k` for `k ∈ {-2, …, 2}` and random
/// rotations. Parents are uniform in `[-10, 10]^D`. The result does not
/// depend on how trials are scheduled.
pub fn classify(
    op: &dyn VariationOperator,
    cfg: &ClassifyConfig,
    stream: &RandomStream,
) -> Result<InvarianceReport> {
    if cfg.trials == 0 {
        return Err(Error::Config("classify needs at least one trial".into()));
    }
    if cfg.dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let trials = stream.split("trial");
    let results = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(op, cfg.dim, &trials.split(t)))
        .collect::<Result<Vec<_>>>()?;
    let worst = |f: fn(&TrialResult) -> f64| results.iter().map(f).fold(0.0, f64::max);
    Ok(InvarianceReport {
        operator: op.name().to_string(),
        dim: cfg.dim,
        trials: cfg.trials,
        tolerance: cfg.tolerance,
        seed: stream.seed(),
        translation: PropertyVerdict::new(worst(|r| r.translation), cfg.tolerance),
        scale: PropertyVerdict::new(worst(|r| r.scale), cfg.tolerance),
        rotation: PropertyVerdict::new(worst(|r| r.rotation), cfg.tolerance),
    })
}
