//! Heuristic solvers: pick one trajectory per robot, resiliently.
//!
//! Four families, all deterministic given their inputs (ties always break
//! toward the lowest id; the randomized ordering is seeded):
//!
//! - **ObG** — oblivious greedy: each robot independently takes its
//!   individually best trajectory. Exactly one coverage evaluation per
//!   candidate trajectory.
//! - **OrG** — ordered greedy: robots are sorted by a per-robot value
//!   (union of covers, best individual trajectory, or a seeded random
//!   order), then each in turn takes the trajectory with the largest
//!   marginal gain over what is already chosen. At most `2P` coverage
//!   evaluations for `P` candidate trajectories.
//! - **LS** — local search: starting from ObG or OrG-U-I, repeatedly apply
//!   the first single-trajectory swap that strictly improves an estimate of
//!   post-attack coverage (the estimate uses a greedy attack; the exhaustive
//!   attack is deliberately not offered here — it would bury the scan in
//!   exponential work).
//! - **2PG** — two-phase greedy baseline: anticipating an attack of size
//!   `alpha`, phase one fixes the `alpha` robots with the strongest
//!   individual trajectories as bait; phase two runs a global greedy over
//!   the remaining robots, measuring gains against phase-two picks only.
//!   `O(P^2)` coverage evaluations.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::attack::{greedy_attack_a1, greedy_attack_a2};
use crate::coverage::CoverageCounter;
use crate::model::{FeasibleSolution, RobotId, Scenario, TrajId};

/// Per-robot value used to order robots in OrG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SortCriteria {
    /// Coverage of the union of all the robot's candidate trajectories.
    Union,
    /// Coverage of the robot's best single trajectory.
    MaxIndividual,
    /// No value: a seeded random permutation.
    Random,
}

/// Direction in which OrG visits the sorted robots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SortOrder {
    Increasing,
    Decreasing,
}

/// Which greedy attack estimates post-attack coverage inside local search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LsAttack {
    A1,
    A2,
}

/// Where local search starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LsInit {
    /// I1: oblivious greedy.
    Obg,
    /// I2: ordered greedy, union criteria, increasing.
    OrgUnionIncreasing,
}

/// A fully specified solver configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverSpec {
    Obg,
    Org { criteria: SortCriteria, order: SortOrder, seed: u64 },
    Ls { attack: LsAttack, init: LsInit },
    TwoPhase,
}

impl SolverSpec {
    /// Parses a solver name (`obg`, `org-u-i`, `org-u-d`, `org-m-i`,
    /// `org-m-d`, `org-r`, `ls-a1-i1`, `ls-a1-i2`, `ls-a2-i1`, `ls-a2-i2`,
    /// `2pg`). `seed` is consulted only by `org-r`.
    pub fn from_name(name: &str, seed: u64) -> Result<Self, String> {
        use LsAttack::*;
        use LsInit::*;
        use SortCriteria::*;
        use SortOrder::*;
        Ok(match name {
            "obg" => SolverSpec::Obg,
            "org-u-i" => SolverSpec::Org { criteria: Union, order: Increasing, seed },
            "org-u-d" => SolverSpec::Org { criteria: Union, order: Decreasing, seed },
            "org-m-i" => SolverSpec::Org { criteria: MaxIndividual, order: Increasing, seed },
            "org-m-d" => SolverSpec::Org { criteria: MaxIndividual, order: Decreasing, seed },
            "org-r" => SolverSpec::Org { criteria: Random, order: Increasing, seed },
            "ls-a1-i1" => SolverSpec::Ls { attack: A1, init: Obg },
            "ls-a1-i2" => SolverSpec::Ls { attack: A1, init: OrgUnionIncreasing },
            "ls-a2-i1" => SolverSpec::Ls { attack: A2, init: Obg },
            "ls-a2-i2" => SolverSpec::Ls { attack: A2, init: OrgUnionIncreasing },
            "2pg" => SolverSpec::TwoPhase,
            other => return Err(format!("unknown solver '{other}'")),
        })
    }

    /// The canonical name this spec parses from.
    pub fn name(&self) -> &'static str {
        use LsAttack::*;
        use LsInit::*;
        use SortCriteria::*;
        use SortOrder::*;
        match self {
            SolverSpec::Obg => "obg",
            SolverSpec::Org { criteria: Union, order: Increasing, .. } => "org-u-i",
            SolverSpec::Org { criteria: Union, order: Decreasing, .. } => "org-u-d",
            SolverSpec::Org { criteria: MaxIndividual, order: Increasing, .. } => "org-m-i",
            SolverSpec::Org { criteria: MaxIndividual, order: Decreasing, .. } => "org-m-d",
            SolverSpec::Org { criteria: Random, .. } => "org-r",
            SolverSpec::Ls { attack: A1, init: Obg } => "ls-a1-i1",
            SolverSpec::Ls { attack: A1, init: OrgUnionIncreasing } => "ls-a1-i2",
            SolverSpec::Ls { attack: A2, init: Obg } => "ls-a2-i1",
            SolverSpec::Ls { attack: A2, init: OrgUnionIncreasing } => "ls-a2-i2",
            SolverSpec::TwoPhase => "2pg",
        }
    }

    /// All eleven named configurations, with `seed` for the random one.
    pub fn all(seed: u64) -> Vec<SolverSpec> {
        ["obg", "org-u-i", "org-u-d", "org-m-i", "org-m-d", "org-r", "ls-a1-i1", "ls-a1-i2",
            "ls-a2-i1", "ls-a2-i2", "2pg"]
        .iter()
        .map(|n| SolverSpec::from_name(n, seed).expect("built-in name"))
        .collect()
    }
}

/// What a solver did and what it cost.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: FeasibleSolution,
    /// Total coverage evaluations (full evaluations and single-trajectory
    /// marginal queries both count as one).
    pub f_evals: usize,
    /// Accepted improving swaps; zero for the non-local-search solvers.
    pub ls_iterations: usize,
    pub wall_time: Duration,
    /// Per-step accepted values, for dispersion analysis: the chosen
    /// trajectory's standalone coverage (ObG), the chosen marginal gain in
    /// visit order (OrG, 2PG phase two), or the accepted post-attack
    /// estimates (LS).
    pub marginals: Vec<f64>,
}

/// Runs the configured solver. Infallible on a validated scenario: every
/// robot has at least one candidate trajectory, so a choice always exists.
pub fn solve(s: &Scenario, spec: &SolverSpec) -> SolveReport {
    match *spec {
        SolverSpec::Obg => solve_obg(s),
        SolverSpec::Org { criteria, order, seed } => solve_org(s, criteria, order, seed),
        SolverSpec::Ls { attack, init } => solve_ls(s, attack, init),
        SolverSpec::TwoPhase => solve_tpg(s),
    }
}

/// Standalone coverage of one trajectory (covers are unique, so a plain
/// weight sum is the full evaluation).
fn individual_value(s: &Scenario, p: TrajId) -> f64 {
    s.trajectory(p).covers.iter().map(|&t| s.weight(t)).sum()
}

/// The per-robot best (value, trajectory), lowest id on ties.
fn best_individual(s: &Scenario, r: RobotId) -> (f64, TrajId) {
    let mut best: Option<(f64, TrajId)> = None;
    for &p in &s.robot(r).trajectories {
        let v = individual_value(s, p);
        if best.map_or(true, |(bv, _)| v > bv) {
            best = Some((v, p));
        }
    }
    best.expect("validated robots have at least one trajectory")
}

/// Oblivious greedy: every robot takes its individually best trajectory.
pub fn solve_obg(s: &Scenario) -> SolveReport {
    let start = Instant::now();
    let mut solution = FeasibleSolution::new();
    let mut marginals = Vec::with_capacity(s.robots().len());
    for r in s.robots() {
        let (v, p) = best_individual(s, r.id);
        solution.insert(r.id, p);
        marginals.push(v);
    }
    SolveReport {
        solution,
        f_evals: s.trajectories().len(),
        ls_iterations: 0,
        wall_time: start.elapsed(),
        marginals,
    }
}

/// The robot-ordering value used by OrG: coverage of the union of the
/// robot's candidate covers, or its best individual trajectory. `Random`
/// consults no value and returns 0.
pub fn sort_value(s: &Scenario, r: RobotId, criteria: SortCriteria) -> f64 {
    match criteria {
        SortCriteria::Union => {
            let mut c = CoverageCounter::new(s);
            for &p in &s.robot(r).trajectories {
                c.add(p).expect("validated trajectory ids");
            }
            c.value()
        }
        SortCriteria::MaxIndividual => best_individual(s, r).0,
        SortCriteria::Random => 0.0,
    }
}

/// Ordered greedy: visit robots in the configured order, each taking the
/// trajectory with the largest marginal gain over the running chosen set.
pub fn solve_org(
    s: &Scenario,
    criteria: SortCriteria,
    order: SortOrder,
    seed: u64,
) -> SolveReport {
    let start = Instant::now();
    let mut robots: Vec<RobotId> = (0..s.robots().len()).collect();
    let mut f_evals = 0;
    match criteria {
        SortCriteria::Random => {
            robots.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        _ => {
            let values: Vec<f64> =
                robots.iter().map(|&r| sort_value(s, r, criteria)).collect();
            // one union evaluation per robot, or one per trajectory
            f_evals += match criteria {
                SortCriteria::Union => s.robots().len(),
                _ => s.trajectories().len(),
            };
            robots.sort_by(|&a, &b| {
                let by_value = match order {
                    SortOrder::Increasing => values[a].partial_cmp(&values[b]),
                    SortOrder::Decreasing => values[b].partial_cmp(&values[a]),
                }
                .expect("weights are finite");
                by_value.then(a.cmp(&b))
            });
        }
    }

    let mut chosen = CoverageCounter::new(s);
    let mut solution = FeasibleSolution::new();
    let mut marginals = Vec::with_capacity(robots.len());
    for r in robots {
        let mut best: Option<(f64, TrajId)> = None;
        for &p in &s.robot(r).trajectories {
            let gain = chosen.marginal_gain(p).expect("validated trajectory ids");
            f_evals += 1;
            if best.map_or(true, |(g, _)| gain > g) {
                best = Some((gain, p));
            }
        }
        let (gain, p) = best.expect("validated robots have at least one trajectory");
        chosen.add(p).expect("validated trajectory ids");
        solution.insert(r, p);
        marginals.push(gain);
    }
    SolveReport { solution, f_evals, ls_iterations: 0, wall_time: start.elapsed(), marginals }
}

/// Post-attack coverage estimate used inside local search.
fn ls_estimate(s: &Scenario, sol: &FeasibleSolution, attack: LsAttack, evals: &mut usize) -> f64 {
    let result = match attack {
        LsAttack::A1 => greedy_attack_a1(s, sol, s.alpha()),
        LsAttack::A2 => greedy_attack_a2(s, sol, s.alpha()),
    }
    .expect("greedy attacks cannot fail on a feasible solution");
    *evals += result.evals;
    result.residual
}

/// Local search: first-improvement over single-trajectory swaps, scanning
/// robots in ascending id order and each robot's trajectories in ascending
/// id order, restarting from the top after every accepted swap. Accepted
/// estimates strictly increase, which bounds the search.
pub fn solve_ls(s: &Scenario, attack: LsAttack, init: LsInit) -> SolveReport {
    let start = Instant::now();
    let init_report = match init {
        LsInit::Obg => solve_obg(s),
        LsInit::OrgUnionIncreasing => {
            solve_org(s, SortCriteria::Union, SortOrder::Increasing, 0)
        }
    };
    let mut solution = init_report.solution;
    let mut f_evals = init_report.f_evals;
    let mut ls_iterations = 0;
    let mut accepted = Vec::new();

    let mut estimate = ls_estimate(s, &solution, attack, &mut f_evals);
    'scan: loop {
        for r in s.robots() {
            let current = solution.get(r.id).expect("solution assigns every robot");
            for &p in &r.trajectories {
                if p == current {
                    continue;
                }
                let mut candidate = solution.clone();
                candidate.insert(r.id, p);
                let cand_estimate = ls_estimate(s, &candidate, attack, &mut f_evals);
                if cand_estimate > estimate {
                    solution = candidate;
                    estimate = cand_estimate;
                    ls_iterations += 1;
                    accepted.push(cand_estimate);
                    continue 'scan;
                }
            }
        }
        break;
    }
    SolveReport {
        solution,
        f_evals,
        ls_iterations,
        wall_time: start.elapsed(),
        marginals: accepted,
    }
}

/// Two-phase greedy: fix the `alpha` robots with the best individual
/// trajectories as bait, then cover with a global greedy over the rest,
/// measuring marginal gains against phase-two picks only.
pub fn solve_tpg(s: &Scenario) -> SolveReport {
    let start = Instant::now();
    let n_robots = s.robots().len();
    let mut f_evals = s.trajectories().len();
    let best: Vec<(f64, TrajId)> = (0..n_robots).map(|r| best_individual(s, r)).collect();

    // bait: the alpha robots with the largest individual values, id on ties
    let mut by_value: Vec<RobotId> = (0..n_robots).collect();
    by_value.sort_by(|&a, &b| {
        best[b].0.partial_cmp(&best[a].0).expect("weights are finite").then(a.cmp(&b))
    });
    let mut solution = FeasibleSolution::new();
    let mut unassigned = vec![true; n_robots];
    for &r in by_value.iter().take(s.alpha()) {
        solution.insert(r, best[r].1);
        unassigned[r] = false;
    }

    // global greedy over the remaining robots, blind to the bait picks
    let mut chosen = CoverageCounter::new(s);
    let mut marginals = Vec::new();
    let mut remaining = n_robots - s.alpha();
    while remaining > 0 {
        let mut pick: Option<(f64, RobotId, TrajId)> = None;
        for r in s.robots() {
            if !unassigned[r.id] {
                continue;
            }
            for &p in &r.trajectories {
                let gain = chosen.marginal_gain(p).expect("validated trajectory ids");
                f_evals += 1;
                // strict > yields the globally lowest trajectory id on ties
                if pick.map_or(true, |(g, _, _)| gain > g) {
                    pick = Some((gain, r.id, p));
                }
            }
        }
        let (gain, r, p) = pick.expect("an unassigned robot always has candidates");
        chosen.add(p).expect("validated trajectory ids");
        solution.insert(r, p);
        unassigned[r] = false;
        marginals.push(gain);
        remaining -= 1;
    }
    SolveReport { solution, f_evals, ls_iterations: 0, wall_time: start.elapsed(), marginals }
}
