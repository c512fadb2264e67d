//! Line-oriented `key = value` configuration with bracketed sections.
//!
//! ```text
//! [experiment]
//! algorithms = sbx, sbx-prime
//! runs = 30
//!
//! [problem]
//! name = Griewank
//! dim = 30
//! translate = 6
//! ```
//!
//! `[problem]` may repeat; every other section appears at most once.
//! `#` starts a comment. Unknown sections and keys are errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{ExperimentConfig, ProblemSpec};
use crate::autov::{EvalConfig, MetaConfig, OperatorMatrix, ParentSetKind, WeightSampling};
use crate::{Error, Result};

/// Settings for `autov_search`, before the design problem is built.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSettings {
    pub meta_population: usize,
    pub meta_generations: usize,
    pub k: usize,
    pub kind: ParentSetKind,
    pub sampling: WeightSampling,
    pub population: usize,
    pub generations: usize,
    pub max_run: usize,
    pub problem: ProblemSpec,
    pub seed: u64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            meta_population: 20,
            meta_generations: 50,
            k: 10,
            kind: ParentSetKind::H3,
            sampling: WeightSampling::PerOffspring,
            population: 30,
            generations: 30,
            max_run: 3,
            problem: ProblemSpec::new("Rastrigin", 10),
            seed: 1,
        }
    }
}

impl SearchSettings {
    pub fn to_meta_config(&self) -> Result<MetaConfig> {
        let cfg = MetaConfig {
            population: self.meta_population,
            generations: self.meta_generations,
            k: self.k,
            kind: self.kind,
            sampling: self.sampling,
            eval: EvalConfig {
                population: self.population,
                generations: self.generations,
                max_run: self.max_run,
                problem: self.problem.build()?,
                seed: self.seed,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    pub experiment: ExperimentConfig,
    pub search: SearchSettings,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Experiment,
    Problem,
    Operators,
    Search,
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn parse<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| bad(line, format!("cannot parse `{value}` for `{key}`")))
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(
            line,
            format!("`{key}` expects true or false, got `{value}`"),
        )),
    }
}

fn parse_pair(line: usize, key: &str, value: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [lo, hi] => Ok((parse(line, key, lo)?, parse(line, key, hi)?)),
        _ => Err(bad(line, format!("`{key}` expects `lo, hi`"))),
    }
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Applies a problem key; shared by `[problem]`, the design problem keys
/// in `[search]` and the compact command-line form. Returns false when
/// `key` is not a problem key.
fn problem_key(p: &mut ProblemSpec, line: usize, key: &str, value: &str) -> Result<bool> {
    match key {
        "name" | "problem" => p.name = value.to_string(),
        "dim" => p.dim = parse(line, key, value)?,
        "domain" => p.domain = Some(parse_pair(line, key, value)?),
        "translate" => p.translate = Some(parse(line, key, value)?),
        "scale" => p.scale = Some(parse(line, key, value)?),
        "rescale_bounds" => p.rescale_bounds = parse_bool(line, key, value)?,
        "rotate_seed" => p.rotate_seed = Some(parse(line, key, value)?),
        _ => return Ok(false),
    }
    Ok(true)
}

/// `Name:dim[:key=value]...`, e.g. `Griewank:30:domain=-10,10:translate=6`.
impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let relabel = |e: Error| match e {
            Error::Config(m) => Error::Config(format!(
                "problem `{s}`: {}",
                m.trim_start_matches("line 0: ")
            )),
            other => other,
        };
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or("").trim();
        let dim = parts
            .next()
            .ok_or_else(|| Error::Config(format!("problem `{s}` needs the form Name:dim")))?;
        if name.is_empty() {
            return Err(Error::Config(format!("problem `{s}` has no name")));
        }
        let mut p = ProblemSpec::new(name, parse(0, "dim", dim.trim()).map_err(relabel)?);
        for part in parts {
            let (k, v) = part.split_once('=').ok_or_else(|| {
                Error::Config(format!("problem `{s}`: expected key=value, got `{part}`"))
            })?;
            if k.trim() == "name"
                || k.trim() == "problem"
                || !problem_key(&mut p, 0, k.trim(), v.trim()).map_err(relabel)?
            {
                return Err(Error::Config(format!(
                    "problem `{s}`: unknown key `{}`",
                    k.trim()
                )));
            }
        }
        Ok(p)
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_with_base(&text, path.parent())
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_base(text, None)
    }

    /// Relative paths (`output`, `matrix`) resolve against `base`.
    pub fn parse_with_base(text: &str, base: Option<&Path>) -> Result<Self> {
        let resolve = |v: &str| -> PathBuf {
            let p = PathBuf::from(v);
            match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            }
        };
        let mut cfg = ConfigFile::default();
        let mut section = Section::None;
        let mut seen = Vec::new();
        let mut problem: Option<ProblemSpec> = None;
        let flush =
            |problem: &mut Option<ProblemSpec>, cfg: &mut ConfigFile, line: usize| -> Result<()> {
                if let Some(p) = problem.take() {
                    if p.name.is_empty() || p.dim == 0 {
                        return Err(bad(line, "[problem] needs `name` and a positive `dim`"));
                    }
                    cfg.experiment.problems.push(p);
                }
                Ok(())
            };

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| bad(line, format!("malformed section header `{content}`")))?
                    .trim();
                flush(&mut problem, &mut cfg, line)?;
                section = match name {
                    "experiment" => Section::Experiment,
                    "problem" => Section::Problem,
                    "operators" => Section::Operators,
                    "search" => Section::Search,
                    other => return Err(bad(line, format!("unknown section `[{other}]`"))),
                };
                if section == Section::Problem {
                    problem = Some(ProblemSpec::new("", 0));
                } else if seen.contains(&name.to_string()) {
                    return Err(bad(line, format!("section `[{name}]` appears twice")));
                } else {
                    seen.push(name.to_string());
                }
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| bad(line, format!("expected `key = value`, got `{content}`")))?;
            let unknown = || bad(line, format!("unknown key `{key}`"));
            let e = &mut cfg.experiment;
            let ops = &mut e.algorithm_config.operators;
            match section {
                Section::None => return Err(bad(line, "key outside of any section")),
                Section::Experiment => match key {
                    "algorithms" => e.algorithms = list(value),
                    "reference" => e.reference = Some(value.to_string()),
                    "population" => e.population = parse(line, key, value)?,
                    "budget" => e.budget = parse(line, key, value)?,
                    "runs" => e.runs = parse(line, key, value)?,
                    "seed" => e.seed = parse(line, key, value)?,
                    "alpha" => e.alpha = parse(line, key, value)?,
                    "threads" => e.threads = Some(parse(line, key, value)?),
                    "output" => e.output = Some(resolve(value)),
                    _ => return Err(unknown()),
                },
                Section::Problem => {
                    let p = problem.as_mut().expect("set on header");
                    if !problem_key(p, line, key, value)? {
                        return Err(unknown());
                    }
                }
                Section::Operators => match key {
                    "sbx_eta" => ops.sbx.eta = parse(line, key, value)?,
                    "crossover_probability" => {
                        ops.sbx.crossover_probability = parse(line, key, value)?
                    }
                    "de_f" => ops.de_f = parse(line, key, value)?,
                    "de_cr" => e.algorithm_config.de_cr = parse(line, key, value)?,
                    "fep_eta" => ops.fep_eta = parse(line, key, value)?,
                    "pso_inertia" => ops.pso.inertia = parse(line, key, value)?,
                    "pso_cognitive" => ops.pso.cognitive = parse(line, key, value)?,
                    "pso_social" => ops.pso.social = parse(line, key, value)?,
                    "cso_phi" => ops.cso_phi = parse(line, key, value)?,
                    "mutation_probability" => {
                        e.algorithm_config.mutation_probability = Some(parse(line, key, value)?)
                    }
                    "mutation_eta" => e.algorithm_config.mutation_eta = parse(line, key, value)?,
                    "matrix" => {
                        let path = resolve(value);
                        let text = std::fs::read_to_string(&path).map_err(|err| {
                            bad(line, format!("cannot read {}: {err}", path.display()))
                        })?;
                        ops.matrix = Some(OperatorMatrix::from_json(&text)?);
                    }
                    _ => return Err(unknown()),
                },
                Section::Search => {
                    let s = &mut cfg.search;
                    match key {
                        "meta_population" => s.meta_population = parse(line, key, value)?,
                        "meta_generations" => s.meta_generations = parse(line, key, value)?,
                        "k" => s.k = parse(line, key, value)?,
                        "kind" => s.kind = parse(line, key, value)?,
                        "sampling" => s.sampling = parse(line, key, value)?,
                        "population" => s.population = parse(line, key, value)?,
                        "generations" => s.generations = parse(line, key, value)?,
                        "max_run" => s.max_run = parse(line, key, value)?,
                        "seed" => s.seed = parse(line, key, value)?,
                        _ => {
                            if !problem_key(&mut s.problem, line, key, value)? {
                                return Err(unknown());
                            }
                        }
                    }
                }
            }
        }
        flush(&mut problem, &mut cfg, text.lines().count())?;
        Ok(cfg)
    }
}
