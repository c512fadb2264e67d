//! Random instances of the generic invariant forms, shared by the property
//! suites and the acceptance run.
#![allow(dead_code)]

use autov_core::invariance::{
    check_rotation, check_scale, check_translation, make_t_invariant, make_ts_invariant,
    make_tsr_invariant, weighted_sum, TranslationForm, TranslationScaleForm, WeightedSum,
};
use autov_core::numerics::{random_orthogonal, RandomStream};
use autov_core::operators::VariationOperator;
use autov_core::problems::Bounds;

/// Smooth scalar map built from random sinusoids and a tanh term.
pub fn random_scalar_fn(
    stream: &mut RandomStream,
    arity: usize,
) -> impl Fn(&[f64]) -> f64 + Send + Sync + 'static {
    let terms: Vec<(f64, f64, f64)> = (0..arity)
        .map(|_| {
            (
                stream.uniform_in(-2.0, 2.0),
                stream.uniform_in(-1.0, 1.0),
                stream.uniform_in(-3.0, 3.0),
            )
        })
        .collect();
    let bias = stream.uniform_in(-1.0, 1.0);
    move |v: &[f64]| {
        bias + terms
            .iter()
            .zip(v)
            .map(|((c, w, phase), x)| c * (w * x + phase).sin() + 0.1 * c * (w * x).tanh())
            .sum::<f64>()
    }
}

pub fn random_t_form(stream: &mut RandomStream) -> TranslationForm {
    let arity = 1 + stream.index(4);
    let psi = random_scalar_fn(stream, arity.saturating_sub(1).max(1));
    make_t_invariant(arity, psi).unwrap()
}

pub fn random_ts_form(stream: &mut RandomStream) -> TranslationScaleForm {
    let arity = 2 + stream.index(3);
    let phi = random_scalar_fn(stream, (arity - 2).max(1));
    make_ts_invariant(arity, phi).unwrap()
}

/// Weights summing to one: the last weight absorbs the rest.
pub fn random_affine_weights(stream: &mut RandomStream) -> Vec<f64> {
    let n = 2 + stream.index(5);
    let mut w: Vec<f64> = (0..n - 1).map(|_| stream.uniform_in(-1.5, 1.5)).collect();
    w.push(1.0 - w.iter().sum::<f64>());
    w
}

pub fn random_tsr_form(stream: &mut RandomStream) -> WeightedSum {
    loop {
        if let Ok(op) = make_tsr_invariant(random_affine_weights(stream)) {
            return op;
        }
    }
}

/// Weights whose sum is bounded away from one.
pub fn random_non_affine_sum(stream: &mut RandomStream) -> WeightedSum {
    let mut w = random_affine_weights(stream);
    let off = stream.uniform_in(0.05, 1.0) * if stream.uniform() < 0.5 { -1.0 } else { 1.0 };
    w[0] += off;
    weighted_sum(w).unwrap()
}

pub struct Residuals {
    pub translation: f64,
    pub scale: f64,
    pub rotation: f64,
}

/// Residuals on one random parent set, shift, scale and rotation.
pub fn residuals(op: &dyn VariationOperator, dim: usize, stream: &mut RandomStream) -> Residuals {
    let bounds = Bounds::uniform(dim, -10.0, 10.0).unwrap();
    let parents: Vec<Vec<f64>> = (0..op.arity()).map(|_| bounds.sample(stream)).collect();
    let refs: Vec<&[f64]> = parents.iter().map(Vec::as_slice).collect();
    let b = stream.uniform_in(-100.0, 100.0);
    let a =
        10f64.powi(stream.index(5) as i32 - 2) * if stream.uniform() < 0.5 { -1.0 } else { 1.0 };
    let m = random_orthogonal(dim, stream).unwrap();
    Residuals {
        translation: check_translation(op, &refs, &bounds, b, &mut stream.split("t")).unwrap(),
        scale: check_scale(op, &refs, &bounds, a, &mut stream.split("s")).unwrap(),
        rotation: check_rotation(op, &refs, &bounds, &m, &mut stream.split("r")).unwrap(),
    }
}
