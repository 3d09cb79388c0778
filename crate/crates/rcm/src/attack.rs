//! Attack models: which chosen trajectories does an adversary remove?
//!
//! Given a solution `S`, an attack of size `k` removes a subset `A` of `S`'s
//! trajectories; the attacker's aim is to minimize the residual coverage
//! `F(S \ A)`. [`optimal_attack`] enumerates exhaustively; the two greedy
//! attacks approximate it from opposite directions — A1 grows the removed
//! set by maximum coverage gain (and inherits the 1−1/e max-coverage
//! guarantee), A2 shrinks the survivor set by maximum coverage loss.
//!
//! The greedy attacks come in two equivalent implementations: the
//! counter-accelerated ones here (marginal queries cost one cover list, not
//! one full recount) and the from-scratch versions in [`reference`], which
//! exist as differential-testing oracles and must never be folded into the
//! fast path.

use crate::coverage::{coverage_value, CoverageCounter, CoverageError};
use crate::model::{FeasibleSolution, Scenario, TrajId};

/// Subset count above which [`optimal_attack`] refuses to enumerate.
pub const DEFAULT_ATTACK_BUDGET: u128 = 10_000_000;

/// Outcome of one attack on one solution.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackResult {
    /// Removed trajectory ids, ascending.
    pub removed: Vec<TrajId>,
    /// Coverage of the surviving trajectories.
    pub residual: f64,
    /// Coverage-oracle work: full evaluations for the exhaustive and
    /// reference attacks, per-trajectory marginal queries for the
    /// accelerated greedy attacks.
    pub evals: usize,
}

/// Why an attack could not be carried out.
#[derive(Debug, thiserror::Error)]
pub enum AttackError {
    #[error("exhaustive attack would enumerate {subsets} subsets, over the budget of {budget}")]
    BudgetExceeded { subsets: u128, budget: u128 },
    #[error(transparent)]
    Coverage(#[from] CoverageError),
}

/// How removals are chosen when evaluating a solution under attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackModel {
    /// Exhaustive minimization over all size-`k` subsets.
    Optimal,
    /// Greedy: grow the removed set by maximum marginal coverage.
    A1,
    /// Greedy: shrink the survivor set by maximum marginal loss.
    A2,
}

impl std::str::FromStr for AttackModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "optimal" => Ok(AttackModel::Optimal),
            "a1" => Ok(AttackModel::A1),
            "a2" => Ok(AttackModel::A2),
            other => Err(format!("unknown attack model '{other}' (expected optimal, a1 or a2)")),
        }
    }
}

impl std::fmt::Display for AttackModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AttackModel::Optimal => "optimal",
            AttackModel::A1 => "a1",
            AttackModel::A2 => "a2",
        })
    }
}

/// Residual coverage of `sol` under the given attack model with `k`
/// removals. Greedy models use the accelerated implementations.
pub fn residual_coverage(
    s: &Scenario,
    sol: &FeasibleSolution,
    model: AttackModel,
    k: usize,
) -> Result<AttackResult, AttackError> {
    match model {
        AttackModel::Optimal => optimal_attack(s, sol, k),
        AttackModel::A1 => greedy_attack_a1(s, sol, k),
        AttackModel::A2 => greedy_attack_a2(s, sol, k),
    }
}

fn checked_ids(s: &Scenario, sol: &FeasibleSolution) -> Result<Vec<TrajId>, AttackError> {
    let ids = sol.trajectory_ids();
    for &p in &ids {
        if p >= s.trajectories().len() {
            return Err(CoverageError::UnknownTrajectory {
                trajectory: p,
                total: s.trajectories().len(),
            }
            .into());
        }
    }
    Ok(ids)
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

/// The worst attack of size `min(k, |sol|)`: the subset of chosen
/// trajectories whose removal leaves the least coverage, found by exhaustive
/// enumeration with [`DEFAULT_ATTACK_BUDGET`].
///
/// Because coverage is monotone, restricting the search to subsets of size
/// exactly `min(k, |sol|)` loses nothing. Subsets are scanned in
/// lexicographic id order and only a strictly smaller residual displaces the
/// incumbent, so ties resolve to the lexicographically smallest removed set.
pub fn optimal_attack(
    s: &Scenario,
    sol: &FeasibleSolution,
    k: usize,
) -> Result<AttackResult, AttackError> {
    optimal_attack_budgeted(s, sol, k, DEFAULT_ATTACK_BUDGET)
}

/// [`optimal_attack`] with an explicit enumeration budget (subset count).
pub fn optimal_attack_budgeted(
    s: &Scenario,
    sol: &FeasibleSolution,
    k: usize,
    budget: u128,
) -> Result<AttackResult, AttackError> {
    let ids = checked_ids(s, sol)?;
    let n = ids.len();
    let k = k.min(n);
    let subsets = binomial(n, k);
    if subsets > budget {
        return Err(AttackError::BudgetExceeded { subsets, budget });
    }

    let mut engine = SubsetAttackEngine::new(s);
    let (removed, residual, evals) = engine.optimal(&ids, k);
    debug_assert_eq!(evals as u128, subsets);
    Ok(AttackResult { removed, residual, evals })
}

/// Bitset-backed exhaustive subset search, reusable across many solutions of
/// the same scenario (the exhaustive solver scores every candidate solution
/// with it). Covers are packed into `words` 64-bit words per trajectory and
/// all scratch space is retained between calls.
pub(crate) struct SubsetAttackEngine {
    words: usize,
    weights: Vec<f64>,
    bits: Vec<u64>, // trajectory p's cover set at bits[p*words..][..words]
    // scratch, grown on demand: acc[d] = union of covers kept among the
    // first `d` positions; suffix[i] = union of covers of positions i..
    acc: Vec<u64>,
    suffix: Vec<u64>,
    tmp: Vec<u64>,
    removed: Vec<usize>,
    best_removed: Vec<usize>,
    best: f64,
    leaves: usize,
    n: usize,
    k: usize,
}

impl SubsetAttackEngine {
    pub(crate) fn new(s: &Scenario) -> Self {
        let words = s.targets().len().div_ceil(64).max(1);
        let mut bits = vec![0u64; s.trajectories().len() * words];
        for p in s.trajectories() {
            for &t in &p.covers {
                bits[p.id * words + t / 64] |= 1 << (t % 64);
            }
        }
        SubsetAttackEngine {
            words,
            weights: s.targets().iter().map(|t| t.weight).collect(),
            bits,
            acc: Vec::new(),
            suffix: Vec::new(),
            tmp: vec![0; words],
            removed: Vec::new(),
            best_removed: Vec::new(),
            best: f64::INFINITY,
            leaves: 0,
            n: 0,
            k: 0,
        }
    }

    /// Minimizes survivor coverage over all subsets of exactly `min(k, n)`
    /// of the given trajectories (`ids` ascending). Returns the removed ids,
    /// the residual, and the number of subsets evaluated. Ties go to the
    /// lexicographically smallest removed set because subsets are visited in
    /// lexicographic order and only strict improvements displace the
    /// incumbent.
    pub(crate) fn optimal(&mut self, ids: &[TrajId], k: usize) -> (Vec<TrajId>, f64, usize) {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        let w = self.words;
        self.n = ids.len();
        self.k = k.min(self.n);
        self.acc.clear();
        self.acc.resize((self.n + 2) * w, 0);
        self.suffix.clear();
        self.suffix.resize((self.n + 1) * w, 0);
        for (i, &p) in ids.iter().enumerate().rev() {
            for j in 0..w {
                self.suffix[i * w + j] = self.suffix[(i + 1) * w + j] | self.bits[p * w + j];
            }
        }
        // map search positions to trajectory bit offsets
        self.removed.clear();
        self.best_removed.clear();
        self.best = f64::INFINITY;
        self.leaves = 0;
        self.walk(0, ids);
        let removed = self.best_removed.iter().map(|&i| ids[i]).collect();
        (removed, self.best, self.leaves)
    }

    fn weight_sum(&self) -> f64 {
        let mut v = 0.0;
        for (wi, &word) in self.tmp.iter().enumerate() {
            let mut rest = word;
            while rest != 0 {
                v += self.weights[wi * 64 + rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
        }
        v
    }

    // Scores the survivor set currently in `tmp`.
    fn leaf(&mut self) {
        self.leaves += 1;
        let value = self.weight_sum();
        if self.leaves == 1 || value < self.best {
            self.best = value;
            self.best_removed.clear();
            self.best_removed.extend_from_slice(&self.removed);
        }
    }

    // Visits removed sets in lexicographic order: at each position the
    // "remove" branch precedes the "keep" branch.
    fn walk(&mut self, pos: usize, ids: &[TrajId]) {
        let w = self.words;
        if self.removed.len() == self.k {
            for j in 0..w {
                self.tmp[j] = self.acc[pos * w + j] | self.suffix[pos * w + j];
            }
            self.leaf();
            return;
        }
        if self.n - pos == self.k - self.removed.len() {
            for i in pos..self.n {
                self.removed.push(i);
            }
            for j in 0..w {
                self.tmp[j] = self.acc[pos * w + j];
            }
            self.leaf();
            self.removed.truncate(self.removed.len() - (self.n - pos));
            return;
        }
        // remove position `pos`: kept set is unchanged
        self.removed.push(pos);
        for j in 0..w {
            self.acc[(pos + 1) * w + j] = self.acc[pos * w + j];
        }
        self.walk(pos + 1, ids);
        self.removed.pop();
        // keep position `pos`
        let p = ids[pos];
        for j in 0..w {
            self.acc[(pos + 1) * w + j] = self.acc[pos * w + j] | self.bits[p * w + j];
        }
        self.walk(pos + 1, ids);
    }
}

/// Greedy attack A1: starting from an empty removal set `X`, repeatedly add
/// the surviving chosen trajectory with the largest marginal coverage gain
/// to `F(X)` (lowest id on ties). Inherits the (1 − 1/e) guarantee of greedy
/// max-coverage: `F(X)` is at least that fraction of the best size-`k`
/// subset's coverage.
pub fn greedy_attack_a1(
    s: &Scenario,
    sol: &FeasibleSolution,
    k: usize,
) -> Result<AttackResult, AttackError> {
    let ids = checked_ids(s, sol)?;
    let k = k.min(ids.len());
    let mut taken = vec![false; ids.len()];
    let mut counter = CoverageCounter::new(s);
    let mut evals = 0;
    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for (i, &p) in ids.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let gain = counter.marginal_gain(p)?;
            evals += 1;
            // strict > keeps the lowest id on ties (scan is ascending)
            if best.map_or(true, |(g, _)| gain > g) {
                best = Some((gain, i));
            }
        }
        let (_, i) = best.expect("k is clamped to the solution size");
        taken[i] = true;
        counter.add(ids[i])?;
    }
    let removed: Vec<TrajId> =
        ids.iter().zip(&taken).filter(|(_, &t)| t).map(|(&p, _)| p).collect();
    let survivors = ids.iter().zip(&taken).filter(|(_, &t)| !t).map(|(&p, _)| p);
    let residual = coverage_value(s, survivors)?;
    Ok(AttackResult { removed, residual, evals })
}

/// Greedy attack A2: starting from the full survivor set `X = sol`,
/// repeatedly remove the trajectory whose loss to `F(X)` is largest (lowest
/// id on ties); the attack is what was removed.
pub fn greedy_attack_a2(
    s: &Scenario,
    sol: &FeasibleSolution,
    k: usize,
) -> Result<AttackResult, AttackError> {
    let ids = checked_ids(s, sol)?;
    let k = k.min(ids.len());
    let mut gone = vec![false; ids.len()];
    let mut counter = CoverageCounter::new(s);
    for &p in &ids {
        counter.add(p)?;
    }
    let mut evals = 0;
    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for (i, &p) in ids.iter().enumerate() {
            if gone[i] {
                continue;
            }
            let loss = counter.marginal_loss(p)?;
            evals += 1;
            if best.map_or(true, |(l, _)| loss > l) {
                best = Some((loss, i));
            }
        }
        let (_, i) = best.expect("k is clamped to the solution size");
        gone[i] = true;
        counter.remove(ids[i])?;
    }
    let removed: Vec<TrajId> =
        ids.iter().zip(&gone).filter(|(_, &g)| g).map(|(&p, _)| p).collect();
    Ok(AttackResult { removed, residual: counter.value(), evals })
}

/// From-scratch implementations kept as differential-testing oracles for the
/// accelerated attacks above. Every coverage query is a full recount, so
/// `evals` counts full evaluations of `F`.
pub mod reference {
    use super::*;

    /// Exhaustive attack via plain combination enumeration and from-scratch
    /// coverage, same tie-break as [`super::optimal_attack`].
    pub fn optimal_attack(
        s: &Scenario,
        sol: &FeasibleSolution,
        k: usize,
        budget: u128,
    ) -> Result<AttackResult, AttackError> {
        let ids = checked_ids(s, sol)?;
        let n = ids.len();
        let k = k.min(n);
        let subsets = binomial(n, k);
        if subsets > budget {
            return Err(AttackError::BudgetExceeded { subsets, budget });
        }

        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut evals = 0;
        // lexicographic enumeration of k-combinations of 0..n
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let survivors = (0..n).filter(|i| !combo.contains(i)).map(|i| ids[i]);
            let residual = coverage_value(s, survivors)?;
            evals += 1;
            if best.as_ref().map_or(true, |(b, _)| residual < *b) {
                best = Some((residual, combo.clone()));
            }
            // advance to the next combination
            let mut i = k;
            loop {
                if i == 0 {
                    let (residual, positions) = best.expect("at least one subset is evaluated");
                    return Ok(AttackResult {
                        removed: positions.into_iter().map(|i| ids[i]).collect(),
                        residual,
                        evals,
                    });
                }
                i -= 1;
                if combo[i] != i + n - k {
                    combo[i] += 1;
                    for j in i + 1..k {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// A1 with every marginal computed as `F(X ∪ {p}) − F(X)` from scratch.
    pub fn greedy_attack_a1(
        s: &Scenario,
        sol: &FeasibleSolution,
        k: usize,
    ) -> Result<AttackResult, AttackError> {
        let ids = checked_ids(s, sol)?;
        let k = k.min(ids.len());
        let mut removed: Vec<TrajId> = Vec::new();
        let mut evals = 0;
        for _ in 0..k {
            let base = coverage_value(s, removed.iter().copied())?;
            evals += 1;
            let mut best: Option<(f64, TrajId)> = None;
            for &p in ids.iter().filter(|p| !removed.contains(p)) {
                let gain =
                    coverage_value(s, removed.iter().copied().chain([p]))? - base;
                evals += 1;
                if best.map_or(true, |(g, _)| gain > g) {
                    best = Some((gain, p));
                }
            }
            removed.push(best.expect("k is clamped to the solution size").1);
        }
        removed.sort_unstable();
        let residual = coverage_value(s, ids.iter().copied().filter(|p| !removed.contains(p)))?;
        evals += 1;
        Ok(AttackResult { removed, residual, evals })
    }

    /// A2 with every survivor set re-evaluated from scratch.
    pub fn greedy_attack_a2(
        s: &Scenario,
        sol: &FeasibleSolution,
        k: usize,
    ) -> Result<AttackResult, AttackError> {
        let ids = checked_ids(s, sol)?;
        let k = k.min(ids.len());
        let mut survivors = ids.clone();
        let mut removed: Vec<TrajId> = Vec::new();
        let mut evals = 0;
        for _ in 0..k {
            let full = coverage_value(s, survivors.iter().copied())?;
            evals += 1;
            let mut best: Option<(f64, usize)> = None;
            for (i, &p) in survivors.iter().enumerate() {
                let rest = survivors.iter().copied().filter(|&q| q != p);
                let drop = full - coverage_value(s, rest)?;
                evals += 1;
                if best.map_or(true, |(d, _)| drop > d) {
                    best = Some((drop, i));
                }
            }
            let (_, i) = best.expect("k is clamped to the solution size");
            removed.push(survivors.remove(i));
        }
        removed.sort_unstable();
        let residual = coverage_value(s, survivors.iter().copied())?;
        evals += 1;
        Ok(AttackResult { removed, residual, evals })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scenario;

    fn tiny_sol() -> FeasibleSolution {
        [(0, 0), (1, 2), (2, 4)].into_iter().collect()
    }

    #[test]
    fn optimal_attack_of_size_zero_keeps_everything() {
        let s = Scenario::tiny();
        let r = optimal_attack(&s, &tiny_sol(), 0).unwrap();
        assert_eq!(r.removed, Vec::<usize>::new());
        assert_eq!(r.residual, 6.0);
        assert_eq!(r.evals, 1);
    }

    #[test]
    fn optimal_attack_breaks_ties_toward_lowest_ids() {
        let s = Scenario::tiny();
        // removing p0 and p4 both leave 4.0; p0 wins lexicographically
        let r = optimal_attack(&s, &tiny_sol(), 1).unwrap();
        assert_eq!(r.removed, vec![0]);
        assert_eq!(r.residual, 4.0);
        assert_eq!(r.evals, 3);
    }

    #[test]
    fn optimal_attack_clamps_oversized_requests() {
        let s = Scenario::tiny();
        let all = optimal_attack(&s, &tiny_sol(), 3).unwrap();
        assert_eq!(all.removed, vec![0, 2, 4]);
        assert_eq!(all.residual, 0.0);
        assert_eq!(all.evals, 1);
        assert_eq!(optimal_attack(&s, &tiny_sol(), 5).unwrap(), all);
    }

    #[test]
    fn optimal_attack_respects_weights() {
        let s = Scenario::build(
            1,
            (1..=6).map(f64::from).collect(),
            vec![
                vec![vec![0, 1, 2], vec![0]],
                vec![vec![2, 3], vec![3, 4]],
                vec![vec![4, 5], vec![5]],
            ],
        )
        .unwrap();
        let r = optimal_attack(&s, &tiny_sol(), 1).unwrap();
        assert_eq!(r.removed, vec![4]);
        assert_eq!(r.residual, 10.0);
    }

    #[test]
    fn optimal_attack_refuses_over_budget() {
        let s = Scenario::tiny();
        match optimal_attack_budgeted(&s, &tiny_sol(), 1, 2) {
            Err(AttackError::BudgetExceeded { subsets: 3, budget: 2 }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn a1_grows_removal_set_by_marginal_gain() {
        let s = Scenario::tiny();
        let r = greedy_attack_a1(&s, &tiny_sol(), 1).unwrap();
        assert_eq!(r.removed, vec![0]);
        assert_eq!(r.residual, 4.0);

        let r2 = greedy_attack_a1(&s, &tiny_sol(), 2).unwrap();
        assert_eq!(r2.removed, vec![0, 4]);
        assert_eq!(r2.residual, 2.0);
    }

    #[test]
    fn a2_shrinks_survivors_by_marginal_loss() {
        let s = Scenario::tiny();
        let r = greedy_attack_a2(&s, &tiny_sol(), 1).unwrap();
        assert_eq!(r.removed, vec![0]); // p0 and p4 tie at loss 2.0
        assert_eq!(r.residual, 4.0);
        assert_eq!(r.evals, 3);

        let r2 = greedy_attack_a2(&s, &tiny_sol(), 2).unwrap();
        assert_eq!(r2.removed, vec![0, 2]);
        assert_eq!(r2.residual, 2.0);
        assert_eq!(r2.evals, 5); // 3 + 2 marginal queries
    }

    #[test]
    fn greedy_attacks_clamp_and_handle_empty() {
        let s = Scenario::tiny();
        let r = greedy_attack_a1(&s, &tiny_sol(), 9).unwrap();
        assert_eq!(r.removed, vec![0, 2, 4]);
        assert_eq!(r.residual, 0.0);
        let r = greedy_attack_a2(&s, &FeasibleSolution::new(), 2).unwrap();
        assert_eq!(r.removed, Vec::<usize>::new());
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let s = Scenario::tiny();
        let sol = tiny_sol();
        assert_eq!(
            residual_coverage(&s, &sol, AttackModel::Optimal, 1).unwrap(),
            optimal_attack(&s, &sol, 1).unwrap()
        );
        assert_eq!(
            residual_coverage(&s, &sol, AttackModel::A1, 2).unwrap(),
            greedy_attack_a1(&s, &sol, 2).unwrap()
        );
        assert_eq!(
            residual_coverage(&s, &sol, AttackModel::A2, 2).unwrap(),
            greedy_attack_a2(&s, &sol, 2).unwrap()
        );
    }

    #[test]
    fn reference_attacks_agree_on_the_bundled_fixture() {
        let s = Scenario::tiny();
        let sol = tiny_sol();
        for k in 0..=3 {
            let opt = optimal_attack(&s, &sol, k).unwrap();
            let opt_ref = reference::optimal_attack(&s, &sol, k, DEFAULT_ATTACK_BUDGET).unwrap();
            assert_eq!(opt.removed, opt_ref.removed, "optimal k={k}");
            assert_eq!(opt.residual, opt_ref.residual, "optimal k={k}");

            let a1 = greedy_attack_a1(&s, &sol, k).unwrap();
            let a1_ref = reference::greedy_attack_a1(&s, &sol, k).unwrap();
            assert_eq!((a1.removed, a1.residual), (a1_ref.removed, a1_ref.residual), "a1 k={k}");

            let a2 = greedy_attack_a2(&s, &sol, k).unwrap();
            let a2_ref = reference::greedy_attack_a2(&s, &sol, k).unwrap();
            assert_eq!((a2.removed, a2.residual), (a2_ref.removed, a2_ref.residual), "a2 k={k}");
        }
    }

    #[test]
    fn attack_model_names_round_trip() {
        for (name, model) in
            [("optimal", AttackModel::Optimal), ("a1", AttackModel::A1), ("a2", AttackModel::A2)]
        {
            assert_eq!(name.parse::<AttackModel>().unwrap(), model);
            assert_eq!(model.to_string(), name);
        }
        assert!("a3".parse::<AttackModel>().is_err());
    }
}
