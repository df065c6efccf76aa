//! Benchmark harness: run both solvers over instance sets with seeded
//! variations and export the results as CSV.
//!
//! Determinism contract: `runs_csv`, `summary_csv`, and `comparisons_csv`
//! depend only on the configuration (instances, algorithms, variation
//! count, base seed), so two runs with the same inputs produce
//! byte-identical files. Wall-clock measurements are inherently noisy and
//! therefore live in a separate `timings_csv`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::baseline::{solve_ancar, BaselineConfig};
use crate::datagen::{default_catalog, generate_instance, GenError, GenSpec};
use crate::model::{
    brute_force_optimum, validate_solution, Family, Instance, Solution, ValidationReport,
};
use crate::rng::derive_seed;
use crate::scheduler::{solve, SchedulerConfig, SolveError};
use crate::stats::mann_whitney_u;

/// Schema tag written as the first line of every CSV export.
pub const CSV_SCHEMA: &str = "# schema=v1 timing=solver_only";

/// A solver selectable by the harness and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    DoneCpta,
    ANcar,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::DoneCpta, Algorithm::ANcar];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::DoneCpta => "done-cpta",
            Algorithm::ANcar => "a-ncar",
        }
    }

    pub fn parse(s: &str) -> Option<Algorithm> {
        match s.to_ascii_lowercase().as_str() {
            "done-cpta" | "donecpta" | "done" => Some(Algorithm::DoneCpta),
            "a-ncar" | "ancar" => Some(Algorithm::ANcar),
            _ => None,
        }
    }

    /// Run this solver with its default configuration.
    pub fn run(self, instance: &Instance) -> Result<Solution, SolveError> {
        match self {
            Algorithm::DoneCpta => solve(instance, &SchedulerConfig::default()),
            Algorithm::ANcar => solve_ancar(instance, &BaselineConfig::default()),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the harness obtains the instance for each variation.
#[derive(Debug, Clone)]
pub enum ExperimentInstance {
    /// The same fixed instance for every variation; only seeds differ in
    /// the report. Used for instances loaded from files.
    Fixed(Instance),
    /// Regenerate from a base layout for every variation, using the seed
    /// derived from the base seed; every variation is a fresh draw of
    /// fleet, demands, and positions.
    Regenerate { base: Instance, family: Family },
}

/// Harness configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub instances: Vec<ExperimentInstance>,
    pub algorithms: Vec<Algorithm>,
    /// Seeded repetitions per instance.
    pub variations: u32,
    pub base_seed: u64,
    /// Attach the exact optimum to rows of instances small enough for the
    /// brute-force solver.
    pub compute_optimum: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            instances: Vec::new(),
            algorithms: Algorithm::ALL.to_vec(),
            variations: 30,
            base_seed: 1,
            compute_optimum: false,
        }
    }
}

/// One solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub instance: String,
    pub algorithm: &'static str,
    pub variation: u32,
    pub seed: u64,
    pub cost: f64,
    pub used_robots: u32,
    pub depot_visits: u32,
    pub optimum: Option<f64>,
    pub wall_time: f64,
}

/// Aggregates per instance and algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub instance: String,
    pub algorithm: &'static str,
    pub variations: u32,
    pub mean_cost: f64,
    pub min_cost: f64,
    pub max_cost: f64,
    pub mean_used_robots: f64,
    pub mean_depot_visits: f64,
}

/// Mann-Whitney comparison of two algorithms' cost samples on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub instance: String,
    pub algorithm_a: &'static str,
    pub algorithm_b: &'static str,
    pub mean_a: f64,
    pub mean_b: f64,
    pub u: f64,
    pub p_value: f64,
}

/// Full harness output.
#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub runs: Vec<RunRow>,
    pub summaries: Vec<SummaryRow>,
    pub comparisons: Vec<ComparisonRow>,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("no algorithms configured")]
    NoAlgorithms,
    #[error("variation count must be positive")]
    NoVariations,
    #[error("generating variation {variation} of instance {index}: {source}")]
    Generate {
        index: usize,
        variation: u32,
        source: GenError,
    },
    #[error("{algorithm} failed on {instance}: {source}")]
    Solve {
        instance: String,
        algorithm: &'static str,
        source: SolveError,
    },
    #[error("{algorithm} produced an invalid solution on {instance}: {report}")]
    InvalidSolution {
        instance: String,
        algorithm: &'static str,
        report: ValidationReport,
    },
}

/// Run every configured algorithm over every instance variation. Every
/// solution is re-validated before it enters the report; an invalid one
/// aborts the experiment. The returned rows are sorted by instance label,
/// algorithm, then variation.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    if config.algorithms.is_empty() {
        return Err(ExperimentError::NoAlgorithms);
    }
    if config.variations == 0 {
        return Err(ExperimentError::NoVariations);
    }

    let catalog = default_catalog();
    let mut report = ExperimentReport::default();

    for (index, source) in config.instances.iter().enumerate() {
        for variation in 0..config.variations {
            let seed = variation_seed(config.base_seed, index, variation);
            let owned;
            let instance = match source {
                ExperimentInstance::Fixed(instance) => instance,
                ExperimentInstance::Regenerate { base, family } => {
                    let spec = GenSpec::new(base, *family, seed, &catalog);
                    owned =
                        generate_instance(&spec).map_err(|source| ExperimentError::Generate {
                            index,
                            variation,
                            source,
                        })?;
                    &owned
                }
            };

            let optimum = if config.compute_optimum {
                brute_force_optimum(instance).ok().map(|s| s.total_cost)
            } else {
                None
            };

            for &algorithm in &config.algorithms {
                let mut solution =
                    algorithm
                        .run(instance)
                        .map_err(|source| ExperimentError::Solve {
                            instance: instance.name.clone(),
                            algorithm: algorithm.as_str(),
                            source,
                        })?;
                solution.seed = seed;
                let validation = validate_solution(instance, &solution);
                if !validation.is_valid() {
                    return Err(ExperimentError::InvalidSolution {
                        instance: instance.name.clone(),
                        algorithm: algorithm.as_str(),
                        report: validation,
                    });
                }
                report.runs.push(RunRow {
                    instance: instance.name.clone(),
                    algorithm: algorithm.as_str(),
                    variation,
                    seed,
                    cost: solution.total_cost,
                    used_robots: solution.used_robots,
                    depot_visits: solution.depot_visits,
                    optimum,
                    wall_time: solution.wall_time,
                });
            }
        }
    }

    report.runs.sort_by(|a, b| {
        (&a.instance, a.algorithm, a.variation).cmp(&(&b.instance, b.algorithm, b.variation))
    });
    summarize(config, &mut report);
    Ok(report)
}

/// Seed for variation `variation` of the instance at `index`: both are
/// mixed into one index so every (instance, variation) pair draws an
/// independent stream from the base seed.
pub fn variation_seed(base_seed: u64, index: usize, variation: u32) -> u64 {
    derive_seed(base_seed, ((index as u64) << 32) | variation as u64)
}

fn summarize(config: &ExperimentConfig, report: &mut ExperimentReport) {
    // Runs are sorted by (instance, algorithm, variation): each group is a
    // contiguous slice.
    let runs = &report.runs;
    let mut start = 0;
    while start < runs.len() {
        let mut end = start;
        while end < runs.len()
            && runs[end].instance == runs[start].instance
            && runs[end].algorithm == runs[start].algorithm
        {
            end += 1;
        }
        let group = &runs[start..end];
        let n = group.len() as f64;
        report.summaries.push(SummaryRow {
            instance: group[0].instance.clone(),
            algorithm: group[0].algorithm,
            variations: group.len() as u32,
            mean_cost: group.iter().map(|r| r.cost).sum::<f64>() / n,
            min_cost: group.iter().map(|r| r.cost).fold(f64::INFINITY, f64::min),
            max_cost: group
                .iter()
                .map(|r| r.cost)
                .fold(f64::NEG_INFINITY, f64::max),
            mean_used_robots: group.iter().map(|r| f64::from(r.used_robots)).sum::<f64>() / n,
            mean_depot_visits: group.iter().map(|r| f64::from(r.depot_visits)).sum::<f64>() / n,
        });
        start = end;
    }

    // Pairwise cost comparisons per instance, in configured algorithm order.
    let mut instances: Vec<&str> = report
        .summaries
        .iter()
        .map(|s| s.instance.as_str())
        .collect();
    instances.dedup();
    let mut comparisons = Vec::new();
    for instance in instances {
        for (i, &a) in config.algorithms.iter().enumerate() {
            for &b in &config.algorithms[i + 1..] {
                let sample = |algo: Algorithm| -> Vec<f64> {
                    runs.iter()
                        .filter(|r| r.instance == instance && r.algorithm == algo.as_str())
                        .map(|r| r.cost)
                        .collect()
                };
                let costs_a = sample(a);
                let costs_b = sample(b);
                if costs_a.is_empty() || costs_b.is_empty() {
                    continue;
                }
                let test = mann_whitney_u(&costs_a, &costs_b);
                comparisons.push(ComparisonRow {
                    instance: instance.to_string(),
                    algorithm_a: a.as_str(),
                    algorithm_b: b.as_str(),
                    mean_a: costs_a.iter().sum::<f64>() / costs_a.len() as f64,
                    mean_b: costs_b.iter().sum::<f64>() / costs_b.len() as f64,
                    u: test.u,
                    p_value: test.p_value,
                });
            }
        }
    }
    report.comparisons = comparisons;
}

/// Deterministic per-run CSV (no wall times).
pub fn runs_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA);
    out.push('\n');
    out.push_str("instance,algorithm,variation,seed,cost,used_robots,depot_visits,optimum\n");
    for r in &report.runs {
        let optimum = r.optimum.map(|o| o.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.instance,
            r.algorithm,
            r.variation,
            r.seed,
            r.cost,
            r.used_robots,
            r.depot_visits,
            optimum
        );
    }
    out
}

/// Deterministic per-(instance, algorithm) aggregate CSV.
pub fn summary_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA);
    out.push('\n');
    out.push_str(
        "instance,algorithm,variations,mean_cost,min_cost,max_cost,mean_used_robots,mean_depot_visits\n",
    );
    for s in &report.summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.instance,
            s.algorithm,
            s.variations,
            s.mean_cost,
            s.min_cost,
            s.max_cost,
            s.mean_used_robots,
            s.mean_depot_visits
        );
    }
    out
}

/// Deterministic Mann-Whitney comparison CSV.
pub fn comparisons_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA);
    out.push('\n');
    out.push_str("instance,algorithm_a,algorithm_b,mean_a,mean_b,u,p_value\n");
    for c in &report.comparisons {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.instance, c.algorithm_a, c.algorithm_b, c.mean_a, c.mean_b, c.u, c.p_value
        );
    }
    out
}

/// Wall-clock CSV; solver time only, varies between runs by nature.
pub fn timings_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA);
    out.push('\n');
    out.push_str("instance,algorithm,variation,wall_time_seconds\n");
    for r in &report.runs {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.instance, r.algorithm, r.variation, r.wall_time
        );
    }
    out
}
