use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::numerics::RandomStream;
use crate::operators::{check_parents, same_len, VariationOperator};
use crate::problems::Bounds;
use crate::{Error, Result};

const PUBLISHED_JSON: &str = include_str!("../../assets/published_operator.v1.json");

/// Branch thresholds printed alongside the published operator.
pub const PUBLISHED_THRESHOLDS: [f64; 10] = [
    0.219, 0.436, 0.644, 0.802, 0.960, 0.992, 0.997, 0.998, 0.999, 1.0,
];

/// Which inputs feed the weighted sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParentSetKind {
    /// `(x1, x2)`
    H1,
    /// `(x1, l, u)`
    H2,
    /// `(x1, x2, l, u)`
    H3,
    /// `(x1, x2, x3)`
    H4,
    /// `(x1, x2, x3, l, u)`
    H5,
}

impl ParentSetKind {
    pub const ALL: [ParentSetKind; 5] = [Self::H1, Self::H2, Self::H3, Self::H4, Self::H5];

    /// Number of parent vectors.
    pub fn parents(self) -> usize {
        match self {
            Self::H1 | Self::H3 => 2,
            Self::H2 => 1,
            Self::H4 | Self::H5 => 3,
        }
    }

    pub fn uses_bounds(self) -> bool {
        matches!(self, Self::H2 | Self::H3 | Self::H5)
    }

    /// Total inputs `t`, counting `l` and `u`.
    pub fn inputs(self) -> usize {
        self.parents() + if self.uses_bounds() { 2 } else { 0 }
    }

    pub fn input_names(self) -> Vec<&'static str> {
        let mut v = vec!["x1", "x2", "x3"];
        v.truncate(self.parents());
        if self.uses_bounds() {
            v.extend(["l", "u"]);
        }
        v
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::H1 => "h1",
            Self::H2 => "h2",
            Self::H3 => "h3",
            Self::H4 => "h4",
            Self::H5 => "h5",
        }
    }
}

impl fmt::Display for ParentSetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParentSetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownName {
                kind: "parent-set kind",
                name: s.to_string(),
            })
    }
}

/// One parameter set: Gaussian `(mu, sigma)` for each of `r_2..r_t` and a
/// selection mass `p`. `sigma` is the variance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub p: f64,
}

impl MatrixRow {
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>, p: f64) -> Self {
        Self { mu, sigma, p }
    }

    /// Row with all weights pinned to zero, i.e. a copy of `x1`.
    pub fn identity(kind: ParentSetKind, p: f64) -> Self {
        let w = kind.inputs() - 1;
        Self::new(vec![0.0; w], vec![0.0; w], p)
    }
}

/// How often the row and its weights are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightSampling {
    /// Once per offspring; weights are shared by every coordinate, so the
    /// realized map is a fixed linear combination of its inputs.
    #[default]
    PerOffspring,
    /// A fresh roulette draw and fresh weights for every coordinate.
    PerVariable,
}

impl WeightSampling {
    pub fn as_str(self) -> &'static str {
        match self {
            WeightSampling::PerOffspring => "per-offspring",
            WeightSampling::PerVariable => "per-variable",
        }
    }

    fn is_default(&self) -> bool {
        *self == WeightSampling::PerOffspring
    }
}

impl FromStr for WeightSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-offspring" => Ok(WeightSampling::PerOffspring),
            "per-variable" => Ok(WeightSampling::PerVariable),
            _ => Err(Error::UnknownName {
                kind: "weight sampling",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    kind: ParentSetKind,
    k: usize,
    #[serde(default, skip_serializing_if = "WeightSampling::is_default")]
    sampling: WeightSampling,
    rows: Vec<MatrixRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    kind: ParentSetKind,
    rows: Vec<MatrixRow>,
    sampling: WeightSampling,
}

impl OperatorMatrix {
    /// Validates row shapes and ranges: `mu ∈ [-1, 1]`, `sigma ∈ [0, 1]`,
    /// `p ≥ 0`, `Σp > 0`.
    pub fn new(kind: ParentSetKind, rows: Vec<MatrixRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidMatrix("matrix needs at least one row".into()));
        }
        let w = kind.inputs() - 1;
        let mut mass = 0.0;
        for (j, row) in rows.iter().enumerate() {
            if row.mu.len() != w || row.sigma.len() != w {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has {} means and {} deviations; kind {kind} needs {w}",
                    j + 1,
                    row.mu.len(),
                    row.sigma.len()
                )));
            }
            if row.mu.iter().any(|m| !(-1.0..=1.0).contains(m)) {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has a mean outside [-1, 1]",
                    j + 1
                )));
            }
            if row.sigma.iter().any(|s| !(0.0..=1.0).contains(s)) {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has a variance outside [0, 1]",
                    j + 1
                )));
            }
            if !(row.p >= 0.0 && row.p.is_finite()) {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has probability {}",
                    j + 1,
                    row.p
                )));
            }
            mass += row.p;
        }
        if mass <= 0.0 {
            return Err(Error::InvalidMatrix(
                "all selection probabilities are zero".into(),
            ));
        }
        Ok(Self {
            kind,
            rows,
            sampling: WeightSampling::PerOffspring,
        })
    }

    pub fn with_sampling(mut self, sampling: WeightSampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn sampling(&self) -> WeightSampling {
        self.sampling
    }

    pub fn kind(&self) -> ParentSetKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[MatrixRow] {
        &self.rows
    }

    /// Length of one flattened row: `2 (t - 1) + 1`.
    pub fn row_len(kind: ParentSetKind) -> usize {
        2 * (kind.inputs() - 1) + 1
    }

    /// Flattens row-major as `[mu_2, sigma_2, …, mu_t, sigma_t, p]`.
    pub fn to_genome(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.k() * Self::row_len(self.kind));
        for row in &self.rows {
            for (m, s) in row.mu.iter().zip(&row.sigma) {
                g.push(*m);
                g.push(*s);
            }
            g.push(row.p);
        }
        g
    }

    pub fn from_genome(kind: ParentSetKind, genome: &[f64]) -> Result<Self> {
        let len = Self::row_len(kind);
        if genome.is_empty() || !genome.len().is_multiple_of(len) {
            return Err(Error::InvalidMatrix(format!(
                "genome length {} is not a multiple of {len}",
                genome.len()
            )));
        }
        let rows = genome
            .chunks(len)
            .map(|c| {
                let pairs = &c[..len - 1];
                MatrixRow::new(
                    pairs.iter().step_by(2).copied().collect(),
                    pairs.iter().skip(1).step_by(2).copied().collect(),
                    c[len - 1],
                )
            })
            .collect();
        Self::new(kind, rows)
    }

    /// The box each genome coordinate lives in.
    pub fn genome_bounds(kind: ParentSetKind, k: usize) -> Bounds {
        let w = kind.inputs() - 1;
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for _ in 0..k {
            for _ in 0..w {
                lo.extend([-1.0, 0.0]);
                hi.extend([1.0, 1.0]);
            }
            lo.push(0.0);
            hi.push(1.0);
        }
        Bounds::raw(lo, hi)
    }

    /// Roulette masses normalized to sum to one.
    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.rows.iter().map(|r| r.p).sum();
        self.rows.iter().map(|r| r.p / total).collect()
    }

    /// Upper ends of the roulette intervals.
    pub fn thresholds(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.probabilities()
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }

    /// Picks a row for a roulette draw `u ∈ [0, 1)`.
    pub fn select_row(&self, u: f64) -> usize {
        let total: f64 = self.rows.iter().map(|r| r.p).sum();
        let target = u * total;
        let mut acc = 0.0;
        let mut last = 0;
        for (j, row) in self.rows.iter().enumerate() {
            if row.p > 0.0 {
                acc += row.p;
                last = j;
                if target < acc {
                    return j;
                }
            }
        }
        last
    }

    /// Reinterprets every stored `sigma` as a standard deviation by
    /// squaring it.
    pub fn with_sigma_as_std_dev(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| MatrixRow::new(r.mu.clone(), r.sigma.iter().map(|s| s * s).collect(), r.p))
            .collect();
        Self {
            kind: self.kind,
            rows,
            sampling: self.sampling,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = MatrixDoc {
            kind: self.kind,
            k: self.k(),
            sampling: self.sampling,
            rows: self.rows.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MatrixDoc = serde_json::from_str(text)?;
        if doc.k != doc.rows.len() {
            return Err(Error::InvalidMatrix(format!(
                "k = {} but {} rows given",
                doc.k,
                doc.rows.len()
            )));
        }
        Ok(Self::new(doc.kind, doc.rows)?.with_sampling(doc.sampling))
    }

    /// Piecewise rendering; components with `N(0, 0)` are left out.
    pub fn render(&self) -> String {
        let names = self.kind.input_names();
        let mut out = format!("h({}) =\n", names.join(","));
        let thresholds = self.thresholds();
        let probs = self.probabilities();
        let mut lower = 0.0;
        let mut lines = Vec::new();
        for (j, row) in self.rows.iter().enumerate() {
            let upper = thresholds[j];
            let active: Vec<usize> = (0..row.mu.len())
                .filter(|&i| row.mu[i] != 0.0 || row.sigma[i] != 0.0)
                .collect();
            let mut first = String::from("(1");
            for &i in &active {
                first.push_str(&format!("-r{}", i + 2));
            }
            first.push_str(&format!("){}", names[0]));
            let mut expr = if active.is_empty() {
                names[0].to_string()
            } else {
                first
            };
            for &i in &active {
                expr.push_str(&format!(" + r{}*{}", i + 2, names[i + 1]));
            }
            let dists: Vec<String> = active
                .iter()
                .map(|&i| format!("r{} ~ N({:.4}, {:.4})", i + 2, row.mu[i], row.sigma[i]))
                .collect();
            let cond = if probs[j] == 0.0 {
                "never".to_string()
            } else if j == 0 {
                format!("if p < {upper:.3}")
            } else if j + 1 == self.k() {
                format!("if p >= {lower:.3}")
            } else {
                format!("if {lower:.3} <= p < {upper:.3}")
            };
            lines.push((expr, dists.join(", "), cond));
            lower = upper;
        }
        let w0 = lines.iter().map(|l| l.0.len()).max().unwrap_or(0);
        let w1 = lines.iter().map(|l| l.1.len()).max().unwrap_or(0);
        for (e, d, c) in lines {
            out.push_str(&format!("  {e:<w0$}  {d:<w1$}  {c}\n"));
        }
        out.push_str("where p is uniform in [0, 1]");
        if self.sampling == WeightSampling::PerVariable {
            out.push_str(", drawn anew with the weights for every decision variable");
        }
        out.push('\n');
        out
    }
}

/// The ten-branch `h3` operator found on Rastrigin, as printed.
pub fn published_operator() -> OperatorMatrix {
    OperatorMatrix::from_json(PUBLISHED_JSON).expect("embedded operator asset is valid")
}

/// Draws `r_2..r_t` in index order and sets `r_1 = 1 - Σ r_i`. Always
/// consumes `t - 1` Gaussian draws, whatever the row.
pub fn sample_weights(row: &MatrixRow, stream: &mut RandomStream) -> Vec<f64> {
    let mut r = Vec::with_capacity(row.mu.len() + 1);
    r.push(0.0);
    for (m, s) in row.mu.iter().zip(&row.sigma) {
        let z = stream.gaussian();
        r.push(m + s.sqrt() * z);
    }
    r[0] = 1.0 - r[1..].iter().sum::<f64>();
    r
}

/// The weighted sum before bound repair. Draws one roulette uniform, then
/// the weights for the chosen row; per-variable matrices repeat that for
/// each coordinate in order.
pub fn apply_operator_unclamped(
    m: &OperatorMatrix,
    parents: &[&[f64]],
    bounds: &Bounds,
    stream: &mut RandomStream,
) -> Result<Vec<f64>> {
    let dim = check_parents(parents, m.kind.parents())?;
    if m.kind.uses_bounds() {
        same_len(dim, bounds.dim())?;
    }
    let mut inputs: Vec<&[f64]> = parents.to_vec();
    if m.kind.uses_bounds() {
        inputs.push(bounds.lower());
        inputs.push(bounds.upper());
    }
    let draw =
        |stream: &mut RandomStream| sample_weights(&m.rows[m.select_row(stream.uniform())], stream);
    let combine =
        |r: &[f64], d: usize| -> f64 { r.iter().zip(&inputs).map(|(w, x)| w * x[d]).sum() };
    Ok(match m.sampling {
        WeightSampling::PerOffspring => {
            let r = draw(stream);
            (0..dim).map(|d| combine(&r, d)).collect()
        }
        WeightSampling::PerVariable => (0..dim).map(|d| combine(&draw(stream), d)).collect(),
    })
}

/// One offspring, clamped to `bounds`.
pub fn apply_operator(
    m: &OperatorMatrix,
    parents: &[&[f64]],
    bounds: &Bounds,
    stream: &mut RandomStream,
) -> Result<Vec<f64>> {
    let mut o = apply_operator_unclamped(m, parents, bounds, stream)?;
    bounds.clamp(&mut o);
    Ok(o)
}

/// An operator matrix behind the common operator trait. `vary` is the
/// unclamped map.
pub struct AutovOperator {
    name: String,
    matrix: OperatorMatrix,
}

impl AutovOperator {
    pub fn new(matrix: OperatorMatrix) -> Result<Self> {
        Ok(Self::named("autov", matrix))
    }

    pub fn named(name: impl Into<String>, matrix: OperatorMatrix) -> Self {
        Self {
            name: name.into(),
            matrix,
        }
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.matrix
    }
}

impl VariationOperator for AutovOperator {
    fn name(&self) -> &str {
        &self.name
    }

    fn arity(&self) -> usize {
        self.matrix.kind.parents()
    }

    fn uses_bounds(&self) -> bool {
        self.matrix.kind.uses_bounds()
    }

    fn vary(
        &self,
        parents: &[&[f64]],
        bounds: &Bounds,
        stream: &mut RandomStream,
    ) -> Result<Vec<Vec<f64>>> {
        Ok(vec![apply_operator_unclamped(
            &self.matrix,
            parents,
            bounds,
            stream,
        )?])
    }
}
