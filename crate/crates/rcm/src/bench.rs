//! Batch experiment harness with CSV reports.
//!
//! An [`ExperimentConfig`] names an experiment kind and optionally overrides
//! its preset geometry, solvers, evaluation attack, and `(alpha, fail_size)`
//! sweep. [`run_experiment`] then repeats the experiment `repetitions`
//! times: repetition `i` generates one scenario from `base_seed + i`, every
//! requested solver runs on that same scenario (paired comparison), and each
//! solution is scored by its residual coverage under the evaluation attack.
//!
//! Rows carry a *reference* residual — the exhaustive search for
//! `accuracy_vs_bf`, the two-phase baseline for everything else — and the
//! relative accuracy `100 · residual / reference_residual`. A destroyed
//! reference (residual 0) makes the ratio meaningless; such rows carry the
//! sentinel `NA`.
//!
//! Experiment kinds and their presets:
//!
//! | kind              | geometry                    | sweep (alpha, fail)    | eval    |
//! |-------------------|-----------------------------|------------------------|---------|
//! | `accuracy_vs_bf`  | 6 robots, 60 targets        | (2,2) (3,3) (4,4)      | optimal |
//! | `relative_vs_2pg` | 15 robots, 150 targets      | (3,3) (6,6) (9,9)      | optimal |
//! | `large_a2`        | 64 robots, 1000 targets     | (8,8)                  | a2      |
//! | `runtime`         | robot sweep 100/200/400     | (10,10)                | a2      |
//! | `sensitivity`     | 15 robots, 150 targets      | alpha 6, fail 0..=10   | optimal |
//! | `rpm`             | grid world (see [`RpmConfig`]) | (3,3)               | a2      |
//!
//! `runtime` iterates its robot counts inside each repetition, emitting the
//! rows in sweep order; the count is recoverable from `obg`'s `f_evals`
//! (exactly one per trajectory). `rpm` rows score a whole simulation:
//! `residual` is the mean per-round realized latency reduction over
//! `rounds`, and `f_evals` is not tracked through the simulator (always 0).
//!
//! Repetitions run in parallel; rows are emitted in repetition order, so
//! reports are deterministic apart from the wall-time column — zero that
//! with `record_wall_time: false` when byte-stable output matters.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{residual_coverage, AttackError, AttackModel};
use crate::exact::{solve_bruteforce, ExactError};
use crate::geom::{generate, GeoConfig};
use crate::model::{Scenario, ScenarioError};
use crate::rpm::{FailModel, GridWorld, RpmConfig, RpmError, StepError};
use crate::solver::{solve, SolverSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    AccuracyVsBf,
    // snake_case alone would drop the underscore before the digit
    #[serde(rename = "relative_vs_2pg")]
    RelativeVs2pg,
    LargeA2,
    Runtime,
    Sensitivity,
    Rpm,
}

/// A declarative experiment: a kind plus optional overrides of its presets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Scenario geometry; the kind's preset when omitted. The seed field is
    /// overwritten per repetition.
    #[serde(default)]
    pub geo: Option<GeoConfig>,
    /// Grid world for `rpm` experiments; defaults when omitted.
    #[serde(default)]
    pub rpm: Option<RpmConfig>,
    /// Solver names (`"bf"` is the exhaustive search); preset when empty.
    #[serde(default)]
    pub solvers: Vec<String>,
    /// Attack model scoring the solutions; preset when omitted.
    #[serde(default)]
    pub eval_attack: Option<AttackModel>,
    /// `(alpha, fail_size)` pairs to sweep; preset when empty.
    #[serde(default)]
    pub settings: Vec<(usize, usize)>,
    /// Robot counts for `runtime`; preset `[100, 200, 400]` when empty.
    #[serde(default)]
    pub robot_counts: Vec<usize>,
    /// Rounds per repetition for `rpm`.
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// With `false`, the wall-time column is written as 0 so two runs of the
    /// same config produce byte-identical reports.
    #[serde(default = "default_true")]
    pub record_wall_time: bool,
}

fn default_rounds() -> usize {
    20
}

fn default_repetitions() -> usize {
    100
}

fn default_true() -> bool {
    true
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("bad experiment config: {what}")]
    BadConfig { what: String },
    #[error("exhaustive search failed: {0}")]
    Exact(#[from] ExactError),
    #[error("evaluation attack failed: {0}")]
    Attack(#[from] AttackError),
    #[error("scenario rejected: {0}")]
    Scenario(#[from] ScenarioError),
    #[error("world construction failed: {0}")]
    Rpm(#[from] RpmError),
    #[error("simulation round failed: {0}")]
    Step(#[from] StepError),
}

/// One CSV row: a solver's score on one scenario under one setting.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub seed: u64,
    pub solver: String,
    pub alpha: usize,
    pub fail_size: usize,
    pub residual: f64,
    pub reference_residual: f64,
    /// `None` is written as the `NA` sentinel (reference residual 0).
    pub relative_accuracy_percent: Option<f64>,
    pub f_evals: usize,
    pub wall_time_ms: f64,
}

pub const ROW_HEADER: &str =
    "seed,solver,alpha,fail_size,residual,reference_residual,relative_accuracy_percent,f_evals,wall_time_ms";

pub const AGGREGATE_HEADER: &str = "solver,alpha,fail_size,n,mean_residual,stddev_residual,mean_relative_accuracy_percent,stddev_relative_accuracy_percent,na_rows";

impl Row {
    fn csv(&self) -> String {
        let rel = match self.relative_accuracy_percent {
            Some(v) => v.to_string(),
            None => "NA".to_string(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.solver,
            self.alpha,
            self.fail_size,
            self.residual,
            self.reference_residual,
            rel,
            self.f_evals,
            self.wall_time_ms
        )
    }
}

/// Mean/stddev block for one `(solver, alpha, fail_size)` group. Standard
/// deviations are population deviations (divide by `n`); `NA` rows are
/// excluded from the relative-accuracy statistics and counted in `na_rows`.
#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub solver: String,
    pub alpha: usize,
    pub fail_size: usize,
    pub n: usize,
    pub mean_residual: f64,
    pub stddev_residual: f64,
    pub mean_relative: Option<f64>,
    pub stddev_relative: Option<f64>,
    pub na_rows: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub rows: Vec<Row>,
}

impl ExperimentReport {
    /// The per-row CSV, header line included, LF line endings.
    pub fn rows_csv(&self) -> String {
        let mut out = String::from(ROW_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv());
            out.push('\n');
        }
        out
    }

    /// Aggregates grouped by `(solver, alpha, fail_size)` in first-appearance
    /// order.
    pub fn aggregates(&self) -> Vec<Aggregate> {
        let mut order: Vec<(String, usize, usize)> = Vec::new();
        for row in &self.rows {
            let key = (row.solver.clone(), row.alpha, row.fail_size);
            if !order.contains(&key) {
                order.push(key);
            }
        }
        order
            .into_iter()
            .map(|(solver, alpha, fail_size)| {
                let group: Vec<&Row> = self
                    .rows
                    .iter()
                    .filter(|r| r.solver == solver && r.alpha == alpha && r.fail_size == fail_size)
                    .collect();
                let residuals: Vec<f64> = group.iter().map(|r| r.residual).collect();
                let relatives: Vec<f64> = group
                    .iter()
                    .filter_map(|r| r.relative_accuracy_percent)
                    .collect();
                let (mean_relative, stddev_relative) = if relatives.is_empty() {
                    (None, None)
                } else {
                    (Some(mean(&relatives)), Some(stddev(&relatives)))
                };
                Aggregate {
                    solver,
                    alpha,
                    fail_size,
                    n: group.len(),
                    mean_residual: mean(&residuals),
                    stddev_residual: stddev(&residuals),
                    mean_relative,
                    stddev_relative,
                    na_rows: group.len() - relatives.len(),
                }
            })
            .collect()
    }

    pub fn aggregate_csv(&self) -> String {
        let mut out = String::from(AGGREGATE_HEADER);
        out.push('\n');
        for a in self.aggregates() {
            let fmt = |v: Option<f64>| v.map_or("NA".to_string(), |v| v.to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                a.solver,
                a.alpha,
                a.fail_size,
                a.n,
                a.mean_residual,
                a.stddev_residual,
                fmt(a.mean_relative),
                fmt(a.stddev_relative),
                a.na_rows
            ));
        }
        out
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn stddev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

struct Plan {
    geo: GeoConfig,
    rpm: RpmConfig,
    solvers: Vec<String>,
    eval: AttackModel,
    settings: Vec<(usize, usize)>,
    robot_counts: Vec<usize>,
    reference: &'static str,
}

fn preset_geo(kind: ExperimentKind) -> GeoConfig {
    let (n_robots, n_targets, traj_len_lt, sense_dist_ls, alpha) = match kind {
        ExperimentKind::AccuracyVsBf => (6, 60, 50.0, 15.0, 2),
        ExperimentKind::RelativeVs2pg => (15, 150, 40.0, 10.0, 3),
        ExperimentKind::LargeA2 => (64, 1000, 25.0, 5.0, 8),
        ExperimentKind::Runtime => (100, 150, 40.0, 10.0, 10),
        ExperimentKind::Sensitivity => (15, 150, 40.0, 10.0, 6),
        ExperimentKind::Rpm => (1, 1, 1.0, 1.0, 0), // unused
    };
    GeoConfig {
        region_side: 100.0,
        n_robots,
        n_targets,
        n_traj_per_robot: 7,
        traj_len_lt,
        sense_dist_ls,
        alpha,
        seed: 0,
        fan_half_angle_deg: 60.0,
        arc_samples: 64,
        ellipse_aspect: 0.5,
    }
}

fn resolve(cfg: &ExperimentConfig) -> Result<Plan, BenchError> {
    use ExperimentKind::*;
    if cfg.repetitions == 0 {
        return Err(BenchError::BadConfig { what: "repetitions must be at least 1".into() });
    }
    let solvers = if cfg.solvers.is_empty() {
        match cfg.kind {
            AccuracyVsBf => [
                "bf", "obg", "org-u-i", "org-u-d", "org-m-i", "org-m-d", "org-r", "ls-a1-i1",
                "ls-a1-i2", "ls-a2-i1", "ls-a2-i2", "2pg",
            ]
            .map(String::from)
            .to_vec(),
            RelativeVs2pg => [
                "obg", "org-u-i", "org-u-d", "org-m-i", "org-m-d", "org-r", "ls-a1-i1",
                "ls-a1-i2", "ls-a2-i1", "ls-a2-i2", "2pg",
            ]
            .map(String::from)
            .to_vec(),
            LargeA2 | Runtime | Rpm => {
                ["obg", "org-u-i", "ls-a2-i2", "2pg"].map(String::from).to_vec()
            }
            Sensitivity => ["ls-a2-i2", "org-u-i", "2pg"].map(String::from).to_vec(),
        }
    } else {
        cfg.solvers.clone()
    };
    for name in &solvers {
        if name != "bf" {
            SolverSpec::from_name(name, 0)
                .map_err(|what| BenchError::BadConfig { what })?;
        }
    }
    if cfg.kind == Rpm && solvers.iter().any(|s| s == "bf") {
        return Err(BenchError::BadConfig {
            what: "the exhaustive search cannot drive the simulator".into(),
        });
    }

    let eval = cfg.eval_attack.unwrap_or(match cfg.kind {
        AccuracyVsBf | RelativeVs2pg | Sensitivity => AttackModel::Optimal,
        LargeA2 | Runtime | Rpm => AttackModel::A2,
    });
    if cfg.kind == Rpm && eval == AttackModel::A1 {
        return Err(BenchError::BadConfig {
            what: "the simulator supports only a2 or optimal failures".into(),
        });
    }

    let settings = if cfg.settings.is_empty() {
        match cfg.kind {
            AccuracyVsBf => vec![(2, 2), (3, 3), (4, 4)],
            RelativeVs2pg => vec![(3, 3), (6, 6), (9, 9)],
            LargeA2 => vec![(8, 8)],
            Runtime => vec![(10, 10)],
            Sensitivity => vec![(6, 0), (6, 2), (6, 4), (6, 6), (6, 8), (6, 10)],
            Rpm => vec![(3, 3)],
        }
    } else {
        cfg.settings.clone()
    };

    let robot_counts = if cfg.robot_counts.is_empty() {
        vec![100, 200, 400]
    } else {
        cfg.robot_counts.clone()
    };

    Ok(Plan {
        geo: cfg.geo.clone().unwrap_or_else(|| preset_geo(cfg.kind)),
        rpm: cfg.rpm.clone().unwrap_or_default(),
        solvers,
        eval,
        settings,
        robot_counts,
        reference: if cfg.kind == AccuracyVsBf { "bf" } else { "2pg" },
    })
}

/// Runs the experiment and collects every row, repetitions in parallel but
/// reported in order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, BenchError> {
    let plan = resolve(cfg)?;
    let rows: Vec<Vec<Row>> = (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| run_repetition(cfg, &plan, rep))
        .collect::<Result<_, _>>()?;
    Ok(ExperimentReport { rows: rows.into_iter().flatten().collect() })
}

fn run_repetition(cfg: &ExperimentConfig, plan: &Plan, rep: usize) -> Result<Vec<Row>, BenchError> {
    let seed = cfg.base_seed + rep as u64;
    match cfg.kind {
        ExperimentKind::Rpm => rpm_repetition(cfg, plan, seed),
        ExperimentKind::Runtime => {
            let mut rows = Vec::new();
            for &n_robots in &plan.robot_counts {
                let mut geo = plan.geo.clone();
                geo.seed = seed;
                geo.n_robots = n_robots;
                rows.extend(scenario_rows(cfg, plan, seed, &generate(&geo))?);
            }
            Ok(rows)
        }
        _ => {
            let mut geo = plan.geo.clone();
            geo.seed = seed;
            scenario_rows(cfg, plan, seed, &generate(&geo))
        }
    }
}

/// Scores one solver on one scenario: `(residual, f_evals, wall_ms)`.
fn score(
    s: &Scenario,
    name: &str,
    seed: u64,
    eval: AttackModel,
    fail_size: usize,
    record_wall: bool,
) -> Result<(f64, usize, f64), BenchError> {
    let start = Instant::now();
    let (solution, f_evals) = if name == "bf" {
        let exact = solve_bruteforce(s)?;
        (exact.solution, exact.enumerated as usize)
    } else {
        let spec = SolverSpec::from_name(name, seed).expect("names validated at resolve time");
        let report = solve(s, &spec);
        (report.solution, report.f_evals)
    };
    let wall_ms = if record_wall {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let residual = residual_coverage(s, &solution, eval, fail_size)?.residual;
    Ok((residual, f_evals, wall_ms))
}

fn scenario_rows(
    cfg: &ExperimentConfig,
    plan: &Plan,
    seed: u64,
    base: &Scenario,
) -> Result<Vec<Row>, BenchError> {
    let mut rows = Vec::new();
    for &(alpha, fail_size) in &plan.settings {
        let s = base.with_alpha(alpha)?;
        let mut scored: Vec<(String, f64, usize, f64)> = Vec::new();
        for name in &plan.solvers {
            let (residual, f_evals, wall) =
                score(&s, name, seed, plan.eval, fail_size, cfg.record_wall_time)?;
            scored.push((name.clone(), residual, f_evals, wall));
        }
        let reference_residual = match scored.iter().find(|(n, ..)| n == plan.reference) {
            Some(&(_, r, _, _)) => r,
            None => score(&s, plan.reference, seed, plan.eval, fail_size, false)?.0,
        };
        for (solver, residual, f_evals, wall_time_ms) in scored {
            rows.push(Row {
                seed,
                solver,
                alpha,
                fail_size,
                residual,
                reference_residual,
                relative_accuracy_percent: (reference_residual > 0.0)
                    .then(|| 100.0 * residual / reference_residual),
                f_evals,
                wall_time_ms,
            });
        }
    }
    Ok(rows)
}

fn rpm_repetition(cfg: &ExperimentConfig, plan: &Plan, seed: u64) -> Result<Vec<Row>, BenchError> {
    let fail_model = match plan.eval {
        AttackModel::Optimal => FailModel::Optimal,
        _ => FailModel::A2,
    };
    let mut world_cfg = plan.rpm.clone();
    world_cfg.seed = seed;
    let mut rows = Vec::new();
    for &(alpha, fail_size) in &plan.settings {
        let mut scored: Vec<(String, f64, f64)> = Vec::new();
        for name in &plan.solvers {
            let spec = SolverSpec::from_name(name, seed).expect("names validated at resolve time");
            let mut world = GridWorld::new(&world_cfg)?;
            let start = Instant::now();
            let mut realized_total = 0.0;
            for _ in 0..cfg.rounds {
                realized_total += world.step(&spec, alpha, fail_model, fail_size)?.realized;
            }
            let wall_ms = if cfg.record_wall_time {
                start.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            scored.push((name.clone(), realized_total / cfg.rounds as f64, wall_ms));
        }
        let reference_residual = match scored.iter().find(|(n, ..)| n == plan.reference) {
            Some(&(_, r, _)) => r,
            None => {
                let spec = SolverSpec::from_name(plan.reference, seed).expect("known name");
                let mut world = GridWorld::new(&world_cfg)?;
                let mut total = 0.0;
                for _ in 0..cfg.rounds {
                    total += world.step(&spec, alpha, fail_model, fail_size)?.realized;
                }
                total / cfg.rounds as f64
            }
        };
        for (solver, residual, wall_time_ms) in scored {
            rows.push(Row {
                seed,
                solver,
                alpha,
                fail_size,
                residual,
                reference_residual,
                relative_accuracy_percent: (reference_residual > 0.0)
                    .then(|| 100.0 * residual / reference_residual),
                f_evals: 0,
                wall_time_ms,
            });
        }
    }
    Ok(rows)
}
