//! Exhaustive search for the true optimum on small instances.
//!
//! Every feasible assignment (the Cartesian product of the robots'
//! trajectory lists) is scored by its exhaustive-attack residual, so the
//! result is the exact maximin solution. Cost is `Π_r |P_r| · C(R, alpha)`
//! coverage evaluations, guarded by an explicit budget.

use crate::attack::SubsetAttackEngine;
use crate::model::{FeasibleSolution, Scenario, TrajId};

/// Evaluation count above which [`solve_bruteforce`] refuses to run.
pub const DEFAULT_EXACT_BUDGET: u128 = 100_000_000;

/// The exact optimum and how much work it took.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    /// The lexicographically first optimal assignment (robot-id-major order
    /// of chosen trajectory ids).
    pub solution: FeasibleSolution,
    /// Its coverage after the worst attack of size `alpha`.
    pub residual: f64,
    /// Feasible assignments examined.
    pub enumerated: u64,
}

/// Why the exhaustive search was refused.
#[derive(Debug, thiserror::Error)]
pub enum ExactError {
    #[error(
        "exhaustive search would cost {cost} coverage evaluations \
         (solutions x attack subsets), over the budget of {budget}"
    )]
    BudgetExceeded { cost: u128, budget: u128 },
}

/// Exhaustive maximin search with [`DEFAULT_EXACT_BUDGET`].
pub fn solve_bruteforce(s: &Scenario) -> Result<ExactResult, ExactError> {
    solve_bruteforce_budgeted(s, DEFAULT_EXACT_BUDGET)
}

/// Exhaustive maximin search with an explicit budget on
/// `solutions × attack subsets`.
///
/// Assignments are enumerated in lexicographic order (robots ascending,
/// each robot's trajectories ascending) and only a strictly better residual
/// displaces the incumbent, so ties resolve to the lexicographically first
/// optimum.
pub fn solve_bruteforce_budgeted(s: &Scenario, budget: u128) -> Result<ExactResult, ExactError> {
    let robots = s.robots();
    let mut solutions: u128 = 1;
    for r in robots {
        solutions = solutions.saturating_mul(r.trajectories.len() as u128);
    }
    let subsets = binomial(robots.len(), s.alpha());
    let cost = solutions.saturating_mul(subsets);
    if cost > budget {
        return Err(ExactError::BudgetExceeded { cost, budget });
    }

    let mut engine = SubsetAttackEngine::new(s);
    // odometer over per-robot trajectory indices
    let mut pick = vec![0usize; robots.len()];
    let mut ids: Vec<TrajId> = robots.iter().map(|r| r.trajectories[0]).collect();
    let mut best: Option<(f64, Vec<TrajId>)> = None;
    let mut enumerated: u64 = 0;
    loop {
        let (_, residual, _) = engine.optimal(&ids, s.alpha());
        enumerated += 1;
        if best.as_ref().map_or(true, |(b, _)| residual > *b) {
            best = Some((residual, ids.clone()));
        }

        // advance the odometer, least significant digit last
        let mut i = robots.len();
        loop {
            if i == 0 {
                let (residual, ids) = best.expect("at least one assignment was examined");
                let solution =
                    ids.iter().enumerate().map(|(r, &p)| (r, p)).collect();
                return Ok(ExactResult { solution, residual, enumerated });
            }
            i -= 1;
            pick[i] += 1;
            if pick[i] < robots[i].trajectories.len() {
                ids[i] = robots[i].trajectories[pick[i]];
                break;
            }
            pick[i] = 0;
            ids[i] = robots[i].trajectories[0];
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    c
}
