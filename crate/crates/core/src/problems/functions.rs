//! Classical benchmark functions (Yao/Liu/Lin suite, f1–f13).

use std::f64::consts::{E, PI, TAU};

use crate::numerics::RandomStream;

/// Identifier of a cataloged benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Sphere,
    Schwefel222,
    Schwefel12,
    Schwefel221,
    Rosenbrock,
    Step,
    QuarticNoise,
    Schwefel226,
    Rastrigin,
    Ackley,
    Griewank,
    Penalized1,
    Penalized2,
}

/// Per-dimension minimizer of Schwefel 2.26.
pub const SCHWEFEL_226_ARGMIN: f64 = 420.968_746_359_982;
/// Per-dimension minimum of Schwefel 2.26.
pub const SCHWEFEL_226_MIN: f64 = -418.982_887_272_433_8;

impl Benchmark {
    pub const ALL: [Benchmark; 13] = [
        Benchmark::Sphere,
        Benchmark::Schwefel222,
        Benchmark::Schwefel12,
        Benchmark::Schwefel221,
        Benchmark::Rosenbrock,
        Benchmark::Step,
        Benchmark::QuarticNoise,
        Benchmark::Schwefel226,
        Benchmark::Rastrigin,
        Benchmark::Ackley,
        Benchmark::Griewank,
        Benchmark::Penalized1,
        Benchmark::Penalized2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Sphere => "Sphere",
            Benchmark::Schwefel222 => "Schwefel 2.22",
            Benchmark::Schwefel12 => "Schwefel 1.2",
            Benchmark::Schwefel221 => "Schwefel 2.21",
            Benchmark::Rosenbrock => "Rosenbrock",
            Benchmark::Step => "Step",
            Benchmark::QuarticNoise => "Quartic-with-noise",
            Benchmark::Schwefel226 => "Schwefel 2.26",
            Benchmark::Rastrigin => "Rastrigin",
            Benchmark::Ackley => "Ackley",
            Benchmark::Griewank => "Griewank",
            Benchmark::Penalized1 => "Penalized-1",
            Benchmark::Penalized2 => "Penalized-2",
        }
    }

    /// Index in the classical suite (f1 … f13).
    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&b| b == self).unwrap() + 1
    }

    /// Classical symmetric domain `[-r, r]`.
    pub fn classical_range(self) -> f64 {
        match self {
            Benchmark::Sphere => 100.0,
            Benchmark::Schwefel222 => 10.0,
            Benchmark::Schwefel12 => 100.0,
            Benchmark::Schwefel221 => 100.0,
            Benchmark::Rosenbrock => 30.0,
            Benchmark::Step => 100.0,
            Benchmark::QuarticNoise => 1.28,
            Benchmark::Schwefel226 => 500.0,
            Benchmark::Rastrigin => 5.12,
            Benchmark::Ackley => 32.0,
            Benchmark::Griewank => 600.0,
            Benchmark::Penalized1 | Benchmark::Penalized2 => 50.0,
        }
    }

    pub fn is_noisy(self) -> bool {
        self == Benchmark::QuarticNoise
    }

    /// Analytic minimizer (per-dimension value) and minimum for dimension `dim`.
    pub fn optimum(self, dim: usize) -> (f64, f64) {
        match self {
            Benchmark::Rosenbrock | Benchmark::Penalized2 => (1.0, 0.0),
            Benchmark::Penalized1 => (-1.0, 0.0),
            Benchmark::Schwefel226 => (SCHWEFEL_226_ARGMIN, SCHWEFEL_226_MIN * dim as f64),
            _ => (0.0, 0.0),
        }
    }

    /// Objective value. Only the noisy quartic touches `noise`, consuming
    /// one uniform draw.
    pub fn eval(self, x: &[f64], noise: Option<&mut RandomStream>) -> f64 {
        match self {
            Benchmark::Sphere => x.iter().map(|v| v * v).sum(),
            Benchmark::Schwefel222 => {
                let s: f64 = x.iter().map(|v| v.abs()).sum();
                let p: f64 = x.iter().map(|v| v.abs()).product();
                s + p
            }
            Benchmark::Schwefel12 => {
                let mut acc = 0.0;
                let mut total = 0.0;
                for v in x {
                    acc += v;
                    total += acc * acc;
                }
                total
            }
            Benchmark::Schwefel221 => x.iter().fold(0.0f64, |m, v| m.max(v.abs())),
            Benchmark::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
                .sum(),
            Benchmark::Step => x.iter().map(|v| (v + 0.5).floor().powi(2)).sum(),
            Benchmark::QuarticNoise => {
                let s: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (i + 1) as f64 * v.powi(4))
                    .sum();
                s + noise.map_or(0.0, |n| n.uniform())
            }
            Benchmark::Schwefel226 => -x.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>(),
            Benchmark::Rastrigin => x
                .iter()
                .map(|v| v * v - 10.0 * (TAU * v).cos() + 10.0)
                .sum(),
            Benchmark::Ackley => {
                let d = x.len() as f64;
                let s1: f64 = x.iter().map(|v| v * v).sum();
                let s2: f64 = x.iter().map(|v| (TAU * v).cos()).sum();
                -20.0 * (-0.2 * (s1 / d).sqrt()).exp() - (s2 / d).exp() + 20.0 + E
            }
            Benchmark::Griewank => {
                let s: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let p: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                s - p + 1.0
            }
            Benchmark::Penalized1 => {
                let d = x.len();
                let y: Vec<f64> = x.iter().map(|v| 1.0 + (v + 1.0) / 4.0).collect();
                let mut s = 10.0 * (PI * y[0]).sin().powi(2);
                for i in 0..d - 1 {
                    s += (y[i] - 1.0).powi(2) * (1.0 + 10.0 * (PI * y[i + 1]).sin().powi(2));
                }
                s += (y[d - 1] - 1.0).powi(2);
                PI / d as f64 * s + x.iter().map(|&v| penalty(v, 10.0, 100.0, 4)).sum::<f64>()
            }
            Benchmark::Penalized2 => {
                let d = x.len();
                let mut s = (3.0 * PI * x[0]).sin().powi(2);
                for i in 0..d - 1 {
                    s += (x[i] - 1.0).powi(2) * (1.0 + (3.0 * PI * x[i + 1]).sin().powi(2));
                }
                s += (x[d - 1] - 1.0).powi(2) * (1.0 + (TAU * x[d - 1]).sin().powi(2));
                0.1 * s + x.iter().map(|&v| penalty(v, 5.0, 100.0, 4)).sum::<f64>()
            }
        }
    }
}

fn penalty(x: f64, a: f64, k: f64, m: i32) -> f64 {
    if x > a {
        k * (x - a).powi(m)
    } else if x < -a {
        k * (-x - a).powi(m)
    } else {
        0.0
    }
}

/// Resolves a catalog name. Matching ignores case, spaces, hyphens and
/// underscores; `f1` … `f13` and a few short forms are accepted.
pub fn lookup(name: &str) -> Option<Benchmark> {
    let key: String = name
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '.')
        .collect::<String>()
        .to_ascii_lowercase();
    let key = key.replace("function", "");
    let key = key.as_str();
    for b in Benchmark::ALL {
        let canon: String = b
            .name()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric() || *c == '.')
            .collect::<String>()
            .to_ascii_lowercase();
        let without_possessive = canon
            .find(|c: char| c.is_ascii_digit())
            .map(|i| format!("{}s{}", &canon[..i], &canon[i..]))
            .unwrap_or_else(|| format!("{canon}s"));
        if key == canon || key == without_possessive || key == format!("f{}", b.number()) {
            return Some(b);
        }
    }
    match key {
        "quartic" | "quarticnoise" => Some(Benchmark::QuarticNoise),
        "penalized" => Some(Benchmark::Penalized1),
        _ => None,
    }
}
