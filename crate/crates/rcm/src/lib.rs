//! Resilient coverage maximization for multi-robot teams.
//!
//! A fleet of robots must each commit to one candidate trajectory; an
//! adversary then knocks out up to `alpha` of the chosen trajectories. The
//! goal is to pick the assignment whose coverage *after* the worst such
//! attack is largest:
//!
//! ```text
//! maximize  F(S \ A*(S))   subject to   one trajectory per robot,
//! ```
//!
//! where `F` is the (weighted) number of targets covered and `A*(S)` is the
//! attacker's best response. The problem is NP-hard from both sides — the
//! outer maximization and the inner minimization — so this crate provides,
//! besides an exhaustive solver, a family of greedy and local-search
//! heuristics together with greedy attack models to estimate `A*`.
//!
//! Module map:
//! - [`model`]: scenario documents, validation, solutions.
//! - [`coverage`]: the coverage objective and its incremental counter.
//! - [`attack`]: exhaustive and greedy attack models.
//! - [`solver`]: ObG, OrG, local search, and the two-phase baseline.
//! - [`exact`]: exhaustive search over all assignments.
//! - [`ilp`]: CPLEX-LP export of the max-min program.
//! - [`geom`]: synthetic geometric scenario generation.
//! - [`rpm`]: a grid-world persistent-monitoring simulation.
//! - [`bench`]: batch experiment harness with CSV reports.

pub mod attack;
pub mod bench;
pub mod coverage;
pub mod exact;
pub mod geom;
pub mod ilp;
pub mod model;
pub mod rpm;
pub mod solver;

pub use attack::{
    greedy_attack_a1, greedy_attack_a2, optimal_attack, residual_coverage, AttackModel,
    AttackResult,
};
pub use bench::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport};
pub use coverage::{coverage_value, CoverageCounter};
pub use exact::{solve_bruteforce, ExactResult};
pub use geom::{generate, generate_with_geometry, GeoConfig};
pub use ilp::export_ilp;
pub use rpm::{FailModel, GridWorld, RoundReport, RpmConfig};
pub use model::{validate_solution, FeasibleSolution, Robot, Scenario, Target, Trajectory};
pub use solver::{solve, SolveReport, SolverSpec};
