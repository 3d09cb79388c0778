//! Shared helpers for the integration suites.

// compiled once per test target, and not every target uses every helper
#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rcm::{
    greedy_attack_a1, greedy_attack_a2, optimal_attack, FeasibleSolution, Scenario,
};

/// A random scenario with dyadic target weights (multiples of 1/8), so every
/// coverage value is an exact f64 sum and results can be compared with `==`.
pub fn random_scenario(
    seed: u64,
    n_robots: usize,
    n_traj: usize,
    n_targets: usize,
    alpha: usize,
) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> =
        (0..n_targets).map(|_| rng.gen_range(1..=16) as f64 / 8.0).collect();
    let robots: Vec<Vec<Vec<usize>>> = (0..n_robots)
        .map(|_| {
            (0..n_traj)
                .map(|_| {
                    let k = rng.gen_range(0..=n_targets.min(6));
                    let mut covers: Vec<usize> =
                        (0..k).map(|_| rng.gen_range(0..n_targets)).collect();
                    covers.sort_unstable();
                    covers.dedup();
                    covers
                })
                .collect()
        })
        .collect();
    Scenario::build(alpha, weights, robots).expect("parameters are in range")
}

/// One uniformly random trajectory per robot.
pub fn random_solution(s: &Scenario, seed: u64) -> FeasibleSolution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    s.robots()
        .iter()
        .map(|r| {
            (r.id, *r.trajectories.choose(&mut rng).expect("every robot has a trajectory"))
        })
        .collect()
}

/// Counts of disagreements between the incremental attacks and their
/// from-scratch references over `n` random `(scenario, solution, k)` triples,
/// plus the worst observed ratio of A2 marginal queries to the `k * robots`
/// bound. Exact comparisons: the dyadic weights make float sums reproducible.
pub struct DifferentialAudit {
    pub triples: usize,
    pub a1_mismatches: usize,
    pub a2_mismatches: usize,
    pub optimal_mismatches: usize,
    pub worst_a2_query_ratio: f64,
}

pub fn differential_audit(n: usize, base_seed: u64) -> DifferentialAudit {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    let mut audit = DifferentialAudit {
        triples: n,
        a1_mismatches: 0,
        a2_mismatches: 0,
        optimal_mismatches: 0,
        worst_a2_query_ratio: 0.0,
    };
    for i in 0..n {
        let n_robots = rng.gen_range(1..=7);
        let s = random_scenario(
            base_seed ^ (i as u64).wrapping_mul(0x9e37_79b9),
            n_robots,
            rng.gen_range(1..=4),
            rng.gen_range(1..=25),
            0,
        );
        let sol = random_solution(&s, base_seed + i as u64);
        let k = rng.gen_range(0..=n_robots + 1); // deliberately allows k > robots
        let fast_a1 = greedy_attack_a1(&s, &sol, k).unwrap();
        let ref_a1 = rcm::attack::reference::greedy_attack_a1(&s, &sol, k).unwrap();
        if fast_a1.removed != ref_a1.removed || fast_a1.residual != ref_a1.residual {
            audit.a1_mismatches += 1;
        }
        let fast_a2 = greedy_attack_a2(&s, &sol, k).unwrap();
        let ref_a2 = rcm::attack::reference::greedy_attack_a2(&s, &sol, k).unwrap();
        if fast_a2.removed != ref_a2.removed || fast_a2.residual != ref_a2.residual {
            audit.a2_mismatches += 1;
        }
        let bound = k.min(n_robots) * n_robots;
        if bound > 0 {
            let ratio = fast_a2.evals as f64 / bound as f64;
            if ratio > audit.worst_a2_query_ratio {
                audit.worst_a2_query_ratio = ratio;
            }
        }
        let fast_opt = optimal_attack(&s, &sol, k).unwrap();
        let ref_opt =
            rcm::attack::reference::optimal_attack(&s, &sol, k, u128::MAX).unwrap();
        if fast_opt.removed != ref_opt.removed || fast_opt.residual != ref_opt.residual {
            audit.optimal_mismatches += 1;
        }
    }
    audit
}
