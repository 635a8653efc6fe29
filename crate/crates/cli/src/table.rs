//! Batch QP comparison: the extrapolated method at 0.98 of the threshold,
//! FISTA (run as a heuristic on these nonconvex instances), and plain
//! proximal gradient, over a set of random instances.

use std::fmt::Write as _;
use std::fs;

use rayon::prelude::*;

use proxgrad::problems::{derive_seed, gen_qp, ProblemInstance};
use proxgrad::solver::{run, BetaSchedule};

use crate::config::{CliError, ExperimentConfig, Family};
use crate::writers::fmt_f64;

const ALGORITHMS: [&str; 3] = ["pg_e", "fista", "pg"];

/// One completed (or failed) run of the batch.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub instance: usize,
    pub seed: u64,
    pub algorithm: &'static str,
    pub iterations: Option<usize>,
    pub final_objective: Option<f64>,
    pub termination: String,
}

/// Per-algorithm aggregate over the completed runs of a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSummary {
    pub algorithm: &'static str,
    pub mean_iterations: f64,
    pub mean_final_objective: f64,
    pub completed: usize,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct BatchSummary {
    pub rows: Vec<TableRow>,
    pub algos: Vec<AlgoSummary>,
}

impl BatchSummary {
    pub fn algo(&self, name: &str) -> &AlgoSummary {
        self.algos
            .iter()
            .find(|a| a.algorithm == name)
            .expect("fixed algorithm set")
    }
}

fn solve_instance(
    config: &ExperimentConfig,
    index: usize,
    seed: u64,
) -> Result<Vec<TableRow>, CliError> {
    let instance = ProblemInstance::SimplexQp(gen_qp(config.n, seed)?);
    let objective = instance.objective()?;
    let threshold = objective.moduli().beta_threshold();
    let rule = config.termination_rule();
    let x0 = instance.default_start();

    let schedules = [
        ("pg_e", BetaSchedule::constant(0.98 * threshold)),
        ("fista", BetaSchedule::fista()),
        ("pg", BetaSchedule::none()),
    ];
    let mut rows = Vec::with_capacity(3);
    for (name, schedule) in schedules {
        let row = match run(&objective, &x0, schedule, &rule, None, None) {
            Ok(result) => TableRow {
                instance: index,
                seed,
                algorithm: name,
                iterations: Some(result.iterations),
                final_objective: Some(result.trace.last().expect("nonempty trace").f_value),
                termination: result.termination_reason.as_str().to_string(),
            },
            Err(e) => TableRow {
                instance: index,
                seed,
                algorithm: name,
                iterations: None,
                final_objective: None,
                termination: format!("failed: {e}"),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Runs the three algorithms on `config.instances` random QP instances
/// (seeds derived from the base seed) and writes `table1.csv` plus
/// `summary.txt`. Instances run on the rayon pool; output order is fixed
/// by instance index, so reruns are byte-identical.
pub fn run_table1(config: &ExperimentConfig) -> Result<BatchSummary, CliError> {
    config.validate()?;
    if config.family != Family::Qp {
        return Err(CliError::Usage(
            "the comparison table is defined for --family qp".into(),
        ));
    }

    let indexed: Vec<(usize, u64)> = (0..config.instances)
        .map(|i| (i, derive_seed(config.seed, i as u64)))
        .collect();
    let mut results: Vec<(usize, Result<Vec<TableRow>, CliError>)> = indexed
        .par_iter()
        .map(|&(i, seed)| (i, solve_instance(config, i, seed)))
        .collect();
    results.sort_by_key(|(i, _)| *i);

    let mut rows = Vec::with_capacity(config.instances * 3);
    for (_, r) in results {
        rows.extend(r?);
    }

    let mut algos = Vec::new();
    for name in ALGORITHMS {
        let mine: Vec<&TableRow> = rows.iter().filter(|r| r.algorithm == name).collect();
        let completed: Vec<&&TableRow> = mine.iter().filter(|r| r.iterations.is_some()).collect();
        let count = completed.len().max(1) as f64;
        algos.push(AlgoSummary {
            algorithm: name,
            mean_iterations: completed
                .iter()
                .map(|r| r.iterations.unwrap() as f64)
                .sum::<f64>()
                / count,
            mean_final_objective: completed
                .iter()
                .map(|r| r.final_objective.unwrap())
                .sum::<f64>()
                / count,
            completed: completed.len(),
            failures: mine.len() - completed.len(),
        });
    }

    fs::create_dir_all(&config.out_dir)?;
    let mut csv = String::from("instance,seed,algorithm,iterations,final_objective,termination\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.instance,
            r.seed,
            r.algorithm,
            r.iterations.map_or(String::new(), |v| v.to_string()),
            r.final_objective.map_or(String::new(), fmt_f64),
            r.termination,
        );
    }
    fs::write(config.out_dir.join("table1.csv"), csv)?;

    let mut summary = String::new();
    let _ = writeln!(summary, "family = qp");
    let _ = writeln!(summary, "n = {}", config.n);
    let _ = writeln!(summary, "instances = {}", config.instances);
    let _ = writeln!(summary, "base_seed = {}", config.seed);
    let _ = writeln!(summary, "tol = {}", fmt_f64(config.tol));
    let _ = writeln!(summary, "max_iter = {}", config.max_iter);
    for a in &algos {
        let _ = writeln!(
            summary,
            "{}_mean_iter = {}",
            a.algorithm,
            fmt_f64(a.mean_iterations)
        );
        let _ = writeln!(
            summary,
            "{}_mean_fval = {}",
            a.algorithm,
            fmt_f64(a.mean_final_objective)
        );
        let _ = writeln!(summary, "{}_completed = {}", a.algorithm, a.completed);
        let _ = writeln!(summary, "{}_failures = {}", a.algorithm, a.failures);
    }
    fs::write(config.out_dir.join("summary.txt"), summary)?;

    Ok(BatchSummary { rows, algos })
}
