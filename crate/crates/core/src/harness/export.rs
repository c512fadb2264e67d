use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{Comparison, ComparisonCell, RunRecord, SummaryRow};
use crate::numerics::Verdict;
use crate::{Error, Result};

/// Attached to every comparison export.
pub const PROTOCOL_NOTE: &str = "evaluation budget counts the initial population; \
generations = (budget - population) / evaluations per generation";

/// Output flavor for comparison tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn num(x: f64) -> String {
    // Shortest representation that round-trips; stable across platforms.
    format!("{x:?}")
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Long-format trajectories: one row per (record, generation).
pub fn trajectories_csv(records: &[RunRecord]) -> Result<Vec<u8>> {
    if records.is_empty() {
        return Err(Error::Config("no records to export".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["generation", "best", "algorithm", "problem", "seed"])?;
    for r in records {
        for (g, best) in r.trajectory.iter().enumerate() {
            w.write_record([
                g.to_string(),
                num(*best),
                r.algorithm.clone(),
                r.problem.clone(),
                r.seed.to_string(),
            ])?;
        }
    }
    finish(w)
}

pub fn comparison_csv(c: &Comparison) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "problem",
        "algorithm",
        "mean",
        "std",
        "marker",
        "p_value",
        "reference",
    ])?;
    for cell in &c.cells {
        w.write_record([
            cell.problem.clone(),
            cell.algorithm.clone(),
            num(cell.mean),
            num(cell.std),
            cell.marker.map(Verdict::marker).unwrap_or("").to_string(),
            cell.p_value.map(num).unwrap_or_default(),
            c.reference.clone(),
        ])?;
    }
    finish(w)
}

#[derive(Serialize)]
struct ComparisonDoc<'a> {
    reference: &'a str,
    algorithms: &'a [String],
    problems: &'a [String],
    alpha: f64,
    runs: usize,
    population: usize,
    budget: u64,
    seed: u64,
    protocol_note: &'static str,
    cells: Vec<CellDoc<'a>>,
    summary: &'a [SummaryRow],
}

#[derive(Serialize)]
struct CellDoc<'a> {
    problem: &'a str,
    algorithm: &'a str,
    mean: f64,
    std: f64,
    marker: Option<&'static str>,
    p_value: Option<f64>,
}

impl<'a> From<&'a ComparisonCell> for CellDoc<'a> {
    fn from(c: &'a ComparisonCell) -> Self {
        Self {
            problem: &c.problem,
            algorithm: &c.algorithm,
            mean: c.mean,
            std: c.std,
            marker: c.marker.map(Verdict::marker),
            p_value: c.p_value,
        }
    }
}

pub fn comparison_json(c: &Comparison) -> Result<String> {
    let doc = ComparisonDoc {
        reference: &c.reference,
        algorithms: &c.algorithms,
        problems: &c.problems,
        alpha: c.alpha,
        runs: c.runs,
        population: c.population,
        budget: c.budget,
        seed: c.seed,
        protocol_note: PROTOCOL_NOTE,
        cells: c.cells.iter().map(CellDoc::from).collect(),
        summary: &c.summary,
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

pub fn export_comparison(c: &Comparison, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => comparison_csv(c),
        Format::Json => comparison_json(c).map(String::into_bytes),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

/// Writes `trajectories.csv`, `comparison.csv` and `comparison.json` into
/// `dir`, creating it if needed. Returns the paths written.
pub fn export_all(c: &Comparison, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = [
        ("trajectories.csv", trajectories_csv(&c.records)?),
        ("comparison.csv", comparison_csv(c)?),
        ("comparison.json", comparison_json(c)?.into_bytes()),
    ];
    let mut out = Vec::new();
    for (name, bytes) in files {
        let path = dir.join(name);
        write_file(&path, &bytes)?;
        out.push(path);
    }
    Ok(out)
}

/// Writes only the trajectory CSV of `records` to `path`.
pub fn export_records(records: &[RunRecord], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_file(path, &trajectories_csv(records)?)
}
