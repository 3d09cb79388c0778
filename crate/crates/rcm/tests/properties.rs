//! Randomized invariants of the coverage function, the attacks, and the
//! solvers, over small scenarios with dyadic weights (where every coverage
//! sum is exact in f64, so the assertions below compare with `==`).

mod common;

use common::{random_scenario, random_solution};
use proptest::prelude::*;
use rand::{seq::SliceRandom as _, Rng as _, SeedableRng as _};
use rand_chacha::ChaCha8Rng;
use rcm::{
    coverage_value, greedy_attack_a1, greedy_attack_a2, optimal_attack, residual_coverage,
    solve, validate_solution, AttackModel, CoverageCounter, Scenario, SolverSpec,
};

/// Draws a random subset of all trajectory ids.
fn random_ids(s: &Scenario, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..s.trajectories().len()).filter(|_| rng.gen_bool(0.5)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn coverage_is_monotone(seed: u64, robots in 1usize..=6, traj in 1usize..=4,
                            targets in 1usize..=30) {
        let s = random_scenario(seed, robots, traj, targets, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ffee);
        let sup = random_ids(&s, &mut rng);
        let sub: Vec<usize> = sup.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        let f_sub = coverage_value(&s, sub).unwrap();
        let f_sup = coverage_value(&s, sup).unwrap();
        prop_assert!(f_sub <= f_sup);
        prop_assert!(f_sub >= 0.0);
    }

    #[test]
    fn coverage_is_submodular(seed: u64, robots in 1usize..=6, traj in 1usize..=4,
                              targets in 1usize..=30) {
        let s = random_scenario(seed, robots, traj, targets, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbeef);
        let y = random_ids(&s, &mut rng);
        let x: Vec<usize> = y.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        let outside: Vec<usize> =
            (0..s.trajectories().len()).filter(|p| !y.contains(p)).collect();
        prop_assume!(!outside.is_empty());
        let p = *outside.choose(&mut rng).unwrap();
        let f = |ids: &[usize], extra: Option<usize>| {
            coverage_value(&s, ids.iter().copied().chain(extra)).unwrap()
        };
        let gain_at_x = f(&x, Some(p)) - f(&x, None);
        let gain_at_y = f(&y, Some(p)) - f(&y, None);
        prop_assert!(gain_at_x >= gain_at_y, "diminishing returns: {gain_at_x} < {gain_at_y}");
    }

    #[test]
    fn counter_tracks_scratch_recomputation_exactly(
        seed: u64, robots in 1usize..=6, traj in 1usize..=4, targets in 1usize..=30,
        walk in 1usize..=25,
    ) {
        let s = random_scenario(seed, robots, traj, targets, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdead);
        let mut counter = CoverageCounter::new(&s);
        let mut held: Vec<usize> = Vec::new();
        for _ in 0..walk {
            let p = rng.gen_range(0..s.trajectories().len());
            if let Some(i) = held.iter().position(|&q| q == p) {
                held.swap_remove(i);
                counter.remove(p).unwrap();
            } else {
                let before = counter.value();
                prop_assert_eq!(
                    counter.marginal_gain(p).unwrap(),
                    coverage_value(&s, held.iter().copied().chain([p])).unwrap() - before
                );
                held.push(p);
                counter.add(p).unwrap();
            }
            prop_assert_eq!(counter.value(), coverage_value(&s, held.iter().copied()).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_solver_returns_a_feasible_deterministic_assignment(
        seed: u64, robots in 1usize..=5, traj in 1usize..=4, targets in 1usize..=25,
    ) {
        let alpha = seed as usize % (robots + 1);
        let s = random_scenario(seed, robots, traj, targets, alpha);
        for spec in SolverSpec::all(seed) {
            let first = solve(&s, &spec);
            prop_assert!(validate_solution(&s, &first.solution), "{}", spec.name());
            let second = solve(&s, &spec);
            prop_assert_eq!(first.solution, second.solution, "rerun of {}", spec.name());
        }
    }

    #[test]
    fn local_search_never_falls_below_its_initialization(
        seed: u64, robots in 1usize..=5, traj in 1usize..=4, targets in 1usize..=25,
    ) {
        let alpha = 1 + seed as usize % robots;
        let s = random_scenario(seed, robots, traj, targets, alpha);
        for (ls, init, model) in [
            ("ls-a1-i1", "obg", AttackModel::A1),
            ("ls-a1-i2", "org-u-i", AttackModel::A1),
            ("ls-a2-i1", "obg", AttackModel::A2),
            ("ls-a2-i2", "org-u-i", AttackModel::A2),
        ] {
            let refined = solve(&s, &SolverSpec::from_name(ls, seed).unwrap());
            let start = solve(&s, &SolverSpec::from_name(init, seed).unwrap());
            let estimate = |sol| residual_coverage(&s, sol, model, alpha).unwrap().residual;
            let refined_est = estimate(&refined.solution);
            let start_est = estimate(&start.solution);
            prop_assert!(refined_est >= start_est, "{ls}: {refined_est} < {start_est}");
            if refined.ls_iterations == 0 {
                prop_assert_eq!(&refined.solution, &start.solution, "{}", ls);
            } else {
                prop_assert!(refined_est > start_est, "{ls} accepted only strict gains");
            }
        }
    }

    #[test]
    fn no_same_size_removal_beats_the_exhaustive_attack(
        seed: u64, robots in 1usize..=6, traj in 1usize..=4, targets in 1usize..=25,
        k in 0usize..=6,
    ) {
        let s = random_scenario(seed, robots, traj, targets, 0);
        let sol = random_solution(&s, seed ^ 1);
        let worst = optimal_attack(&s, &sol, k).unwrap();
        for greedy in [greedy_attack_a1(&s, &sol, k), greedy_attack_a2(&s, &sol, k)] {
            prop_assert!(worst.residual <= greedy.unwrap().residual);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let mut chosen = sol.trajectory_ids();
        chosen.shuffle(&mut rng);
        let survivors = chosen.split_off(k.min(robots));
        prop_assert!(worst.residual <= coverage_value(&s, survivors).unwrap());
        prop_assert_eq!(worst.removed.len(), k.min(robots));
    }

    #[test]
    fn scenarios_survive_a_json_round_trip_bit_for_bit(
        seed: u64, robots in 1usize..=5, traj in 1usize..=4, targets in 1usize..=25,
    ) {
        let s = random_scenario(seed, robots, traj, targets, seed as usize % (robots + 1));
        let text = s.to_json();
        let back = Scenario::from_json(&text).unwrap();
        prop_assert_eq!(&back.to_json(), &text);
        // and the reload is operationally identical, not just textually
        let spec = SolverSpec::from_name("2pg", seed).unwrap();
        prop_assert_eq!(solve(&s, &spec).solution, solve(&back, &spec).solution);
    }

    #[test]
    fn randomized_order_greedy_is_a_function_of_its_seed(
        seed: u64, robots in 1usize..=5, traj in 1usize..=4, targets in 1usize..=25,
    ) {
        let s = random_scenario(seed, robots, traj, targets, 0);
        let a = solve(&s, &SolverSpec::from_name("org-r", seed).unwrap());
        let b = solve(&s, &SolverSpec::from_name("org-r", seed).unwrap());
        prop_assert_eq!(a.solution, b.solution);
        prop_assert_eq!(a.marginals, b.marginals);
    }

    #[test]
    fn oversized_attacks_remove_the_whole_solution(
        seed: u64, robots in 1usize..=5, traj in 1usize..=4, targets in 1usize..=25,
        extra in 0usize..=3,
    ) {
        let s = random_scenario(seed, robots, traj, targets, 0);
        let sol = random_solution(&s, seed ^ 3);
        for model in [AttackModel::Optimal, AttackModel::A1, AttackModel::A2] {
            let hit = residual_coverage(&s, &sol, model, robots + extra).unwrap();
            prop_assert_eq!(&hit.removed, &sol.trajectory_ids());
            prop_assert_eq!(hit.residual, 0.0);
        }
    }
}
