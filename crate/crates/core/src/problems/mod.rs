//! Benchmark objectives over bounded boxes, with translation, scaling and
//! rotation wrappers.
//!
//! Every transform is applied by substitution: wrapping `f` with transform
//! `T` gives `g(x) = f(T(x))`. Wrappers stack, and the most recently added
//! transform is applied to `x` first.

mod bounds;
mod functions;

use std::fmt;
use std::sync::Arc;

pub use bounds::Bounds;
pub use functions::{lookup, Benchmark, SCHWEFEL_226_ARGMIN, SCHWEFEL_226_MIN};

use crate::numerics::{OrthogonalMatrix, RandomStream};
use crate::{Error, Result};

type CustomFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Base objective: a cataloged benchmark or a user closure.
#[derive(Clone)]
pub enum Objective {
    Benchmark(Benchmark),
    Custom(Arc<CustomFn>),
}

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Benchmark(b) => write!(f, "Benchmark({})", b.name()),
            Objective::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Transform {
    /// `x ↦ x + b`
    Translate(Vec<f64>),
    /// `x ↦ a x`
    Scale(f64),
    /// `x ↦ x M`; `seed` records how the matrix was generated, if known.
    Rotate {
        matrix: OrthogonalMatrix,
        seed: Option<u64>,
    },
}

impl Transform {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Transform::Translate(b) => x.iter().zip(b).map(|(v, s)| v + s).collect(),
            Transform::Scale(a) => x.iter().map(|v| a * v).collect(),
            Transform::Rotate { matrix, .. } => matrix.apply(x),
        }
    }

    fn describe(&self) -> String {
        match self {
            Transform::Translate(b) => {
                if b.iter().all(|v| *v == b[0]) {
                    format!("translate(b={})", b[0])
                } else {
                    "translate(b=vector)".to_owned()
                }
            }
            Transform::Scale(a) => format!("scale(a={a})"),
            Transform::Rotate { seed: Some(s), .. } => format!("rotate(seed={s})"),
            Transform::Rotate { seed: None, .. } => "rotate".to_owned(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnownOptimum {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Objective over a box, with optional known optimum and transform stack.
#[derive(Clone, Debug)]
pub struct Problem {
    name: String,
    dim: usize,
    bounds: Bounds,
    objective: Objective,
    known_optimum: Option<KnownOptimum>,
    transforms: Vec<Transform>,
    /// Set once the box no longer is the catalog default.
    box_note: Option<String>,
}

fn describe_box(b: &Bounds) -> String {
    let (lo, hi) = (b.lower()[0], b.upper()[0]);
    if b.lower().iter().all(|v| *v == lo) && b.upper().iter().all(|v| *v == hi) {
        format!("[{lo},{hi}]")
    } else {
        "[custom box]".to_owned()
    }
}

impl Problem {
    pub fn custom(
        name: impl Into<String>,
        bounds: Bounds,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            dim: bounds.dim(),
            bounds,
            objective: Objective::Custom(Arc::new(f)),
            known_optimum: None,
            transforms: Vec::new(),
            box_note: None,
        }
    }

    pub fn with_known_optimum(mut self, x: Vec<f64>, value: f64) -> Self {
        self.known_optimum = Some(KnownOptimum { x, value });
        self
    }

    /// Replaces the box. A known optimum that falls outside the new box is
    /// dropped.
    pub fn with_bounds(mut self, bounds: Bounds) -> Result<Self> {
        if bounds.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: bounds.dim(),
            });
        }
        if let Some(opt) = &self.known_optimum {
            if !bounds.contains(&opt.x) {
                self.known_optimum = None;
            }
        }
        self.box_note = Some(describe_box(&bounds));
        self.bounds = bounds;
        Ok(self)
    }

    /// Replaces the box with `[lo, hi]^D`.
    pub fn with_uniform_bounds(self, lo: f64, hi: f64) -> Result<Self> {
        let b = Bounds::uniform(self.dim, lo, hi)?;
        self.with_bounds(b)
    }

    pub fn base_name(&self) -> &str {
        &self.name
    }

    /// Name with transform descriptors, e.g. `Griewank | translate(b=6)`.
    /// A box other than the catalog default is shown after the name, as in
    /// `Griewank[-10,10]`.
    pub fn label(&self) -> String {
        let mut s = self.name.clone();
        if let Some(note) = &self.box_note {
            s.push_str(note);
        }
        for t in &self.transforms {
            s.push_str(" | ");
            s.push_str(&t.describe());
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn known_optimum(&self) -> Option<&KnownOptimum> {
        self.known_optimum.as_ref()
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    pub fn is_noisy(&self) -> bool {
        matches!(&self.objective, Objective::Benchmark(b) if b.is_noisy())
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn base_point(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for t in self.transforms.iter().rev() {
            y = t.apply(&y);
        }
        y
    }

    fn eval_base(&self, y: &[f64], noise: Option<&mut RandomStream>) -> f64 {
        match &self.objective {
            Objective::Benchmark(b) => b.eval(y, noise),
            Objective::Custom(f) => f(y),
        }
    }

    /// Objective value at `x`. Noisy objectives draw from `stream`; the
    /// others leave it untouched.
    pub fn evaluate(&self, x: &[f64], stream: &mut RandomStream) -> Result<f64> {
        self.check_len(x)?;
        let y = self.base_point(x);
        Ok(self.eval_base(&y, Some(stream)))
    }

    /// Objective value with any noise term omitted.
    pub fn evaluate_noiseless(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let y = self.base_point(x);
        Ok(self.eval_base(&y, None))
    }
}

/// Cataloged problem on its classical domain.
pub fn make_benchmark(name: &str, dim: usize) -> Result<Problem> {
    let bench = lookup(name).ok_or_else(|| Error::UnknownName {
        kind: "benchmark",
        name: name.to_owned(),
    })?;
    benchmark_problem(bench, dim)
}

pub fn benchmark_problem(bench: Benchmark, dim: usize) -> Result<Problem> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let r = bench.classical_range();
    let (x_star, f_star) = bench.optimum(dim);
    Ok(Problem {
        name: bench.name().to_owned(),
        dim,
        bounds: Bounds::uniform(dim, -r, r)?,
        objective: Objective::Benchmark(bench),
        known_optimum: Some(KnownOptimum {
            x: vec![x_star; dim],
            value: f_star,
        }),
        transforms: Vec::new(),
        box_note: None,
    })
}

/// `g(x) = f(x + b)`; the known optimum moves to `x* - b`.
pub fn translate_problem(p: &Problem, b: &[f64]) -> Result<Problem> {
    p.check_len(b)?;
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("translation must be finite".into()));
    }
    let mut q = p.clone();
    q.known_optimum = p.known_optimum.as_ref().map(|o| KnownOptimum {
        x: o.x.iter().zip(b).map(|(x, s)| x - s).collect(),
        value: o.value,
    });
    // Back-to-back shifts fold into one, so translating by b and then by -b
    // gives back the original problem exactly.
    match q.transforms.last_mut() {
        Some(Transform::Translate(c)) => {
            for (ci, bi) in c.iter_mut().zip(b) {
                *ci += bi;
            }
            if c.iter().all(|v| *v == 0.0) {
                q.transforms.pop();
            }
        }
        _ => q.transforms.push(Transform::Translate(b.to_vec())),
    }
    Ok(q)
}

/// `g(x) = f(a x)` on the original box; the known optimum moves to `x* / a`.
pub fn scale_problem(p: &Problem, a: f64) -> Result<Problem> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidScale(a));
    }
    let mut q = p.clone();
    q.known_optimum = p.known_optimum.as_ref().map(|o| KnownOptimum {
        x: o.x.iter().map(|x| x / a).collect(),
        value: o.value,
    });
    q.transforms.push(Transform::Scale(a));
    Ok(q)
}

/// Like [`scale_problem`] but also maps the box to `bounds / a`, so the
/// scaled problem sees the same region of the base function.
pub fn scale_problem_rescaling_bounds(p: &Problem, a: f64) -> Result<Problem> {
    let q = scale_problem(p, a)?;
    let (mut lo, mut hi) = (Vec::with_capacity(p.dim), Vec::with_capacity(p.dim));
    for (l, u) in p.bounds.lower().iter().zip(p.bounds.upper()) {
        let (x, y) = (l / a, u / a);
        lo.push(x.min(y));
        hi.push(x.max(y));
    }
    let mut q = q;
    q.bounds = Bounds::new(lo, hi)?;
    q.box_note = Some(describe_box(&q.bounds));
    Ok(q)
}

/// `g(x) = f(x M)`; the known optimum moves to `x* Mᵀ`.
pub fn rotate_problem(p: &Problem, m: &OrthogonalMatrix) -> Result<Problem> {
    rotate_problem_seeded(p, m, None)
}

pub fn rotate_problem_seeded(
    p: &Problem,
    m: &OrthogonalMatrix,
    seed: Option<u64>,
) -> Result<Problem> {
    if m.dim() != p.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            got: m.dim(),
        });
    }
    let mut q = p.clone();
    q.known_optimum = p.known_optimum.as_ref().map(|o| KnownOptimum {
        x: m.apply_inverse(&o.x),
        value: o.value,
    });
    q.transforms.push(Transform::Rotate {
        matrix: m.clone(),
        seed,
    });
    Ok(q)
}
