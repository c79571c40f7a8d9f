//! On-disk report formats.
//!
//! * run report: JSON, see [`ReportDocument`]
//! * trajectory: CSV with header `generation,best_fitness,mean_fitness,similarity,mutation_rate`
//! * method comparison: CSV with header
//!   `method,fitness,response_time,maintenance_cost,memory_usage,total_cost,wall_time_seconds`
//!
//! Reals in CSV output carry 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoding::Chromosome;
use crate::engine::{RunConfig, RunReport};
use crate::error::{Error, Result};
use crate::fitness::{EvaluatedIndividual, FitnessParams, Objectives};

pub const REPORT_FORMAT_VERSION: u32 = 1;
pub const TRAJECTORY_FORMAT_VERSION: u32 = 1;

pub const TRAJECTORY_HEADER: &str = "generation,best_fitness,mean_fitness,similarity,mutation_rate";
pub const COMPARISON_HEADER: &str =
    "method,fitness,response_time,maintenance_cost,memory_usage,total_cost,wall_time_seconds";

/// Serialized summary of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format_version: u32,
    pub workload_name: String,
    pub best_bitstring: Chromosome,
    pub view_ids: Vec<usize>,
    pub objectives: Objectives,
    pub fitness: f64,
    pub feasible: bool,
    pub total_cost: f64,
    pub repaired: bool,
    pub generations: usize,
    pub evaluations: usize,
    pub wall_time_seconds: f64,
    pub config: RunConfig,
    pub fitness_params: FitnessParams,
}

impl ReportDocument {
    pub fn from_run(run: &RunReport) -> Self {
        let best = &run.best;
        Self {
            format_version: REPORT_FORMAT_VERSION,
            workload_name: run.workload_name.clone(),
            best_bitstring: best.chromosome.clone(),
            view_ids: best.chromosome.decode(),
            objectives: best.objectives,
            fitness: best.fitness,
            feasible: best.feasible,
            total_cost: best.objectives.total_cost(),
            repaired: run.repaired,
            generations: run.trajectory.len(),
            evaluations: run.evaluations,
            wall_time_seconds: run.wall_time_seconds,
            config: run.config.clone(),
            fitness_params: run.fitness_params.clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(run: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in &run.trajectory {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.generation,
            real(r.best_fitness),
            real(r.mean_fitness),
            real(r.population_similarity),
            real(r.mutation_rate_used)
        );
    }
    out
}

/// One row of a trajectory table as read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub similarity: f64,
    pub mutation_rate: f64,
}

pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == TRAJECTORY_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "trajectory header mismatch: {:?}",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(n, line)| {
            let f: Vec<&str> = line.split(',').collect();
            let err = || Error::Parse(format!("trajectory row {}: {line:?}", n + 1));
            if f.len() != 5 {
                return Err(err());
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| err());
            Ok(TrajectoryRow {
                generation: f[0].trim().parse().map_err(|_| err())?,
                best_fitness: num(f[1])?,
                mean_fitness: num(f[2])?,
                similarity: num(f[3])?,
                mutation_rate: num(f[4])?,
            })
        })
        .collect()
}

/// A row of the method comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: String,
    pub best: EvaluatedIndividual,
    pub wall_time_seconds: f64,
}

pub fn comparison_csv(rows: &[MethodResult]) -> String {
    let mut out = String::new();
    out.push_str(COMPARISON_HEADER);
    out.push('\n');
    for r in rows {
        let o = &r.best.objectives;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.method,
            real(r.best.fitness),
            real(o.response_time),
            real(o.maintenance_cost),
            real(o.memory_usage),
            real(o.total_cost()),
            real(r.wall_time_seconds)
        );
    }
    out
}

pub fn write_run_outputs(
    run: &RunReport,
    report_path: impl AsRef<Path>,
    trajectory_path: impl AsRef<Path>,
) -> Result<()> {
    fs::write(report_path, ReportDocument::from_run(run).to_json_string())?;
    fs::write(trajectory_path, trajectory_csv(run))?;
    Ok(())
}
