//! The coverage objective and its incremental form.
//!
//! `F(X)` is the total weight of targets covered by at least one trajectory
//! in `X`; it is monotone and submodular in `X`. [`coverage_value`] computes
//! it from scratch; [`CoverageCounter`] maintains per-target multiplicities
//! so that adding or removing one trajectory, or querying its marginal
//! effect, costs only the size of that trajectory's cover list instead of a
//! full recount.

use crate::model::{Scenario, TrajId};

/// Why a coverage query was rejected.
#[derive(Debug, thiserror::Error)]
pub enum CoverageError {
    #[error("unknown trajectory id {trajectory} (scenario has {total} trajectories)")]
    UnknownTrajectory { trajectory: TrajId, total: usize },
    #[error(
        "cannot remove trajectory {trajectory}: target {target} has multiplicity 0 in the counter"
    )]
    RemoveUnderflow { trajectory: TrajId, target: usize },
}

/// Total weight of the targets covered by at least one of `trajs`.
/// Repeated ids are counted once. The sum is accumulated in ascending target
/// order, so the result does not depend on iteration order.
pub fn coverage_value(
    s: &Scenario,
    trajs: impl IntoIterator<Item = TrajId>,
) -> Result<f64, CoverageError> {
    let mut seen = vec![false; s.targets().len()];
    for p in trajs {
        if p >= s.trajectories().len() {
            return Err(CoverageError::UnknownTrajectory {
                trajectory: p,
                total: s.trajectories().len(),
            });
        }
        for &t in &s.trajectory(p).covers {
            seen[t] = true;
        }
    }
    let mut value = 0.0;
    for t in s.targets() {
        if seen[t.id] {
            value += t.weight;
        }
    }
    Ok(value)
}

/// Per-target multiplicity counts for a multiset of trajectories, with the
/// covered weight cached.
///
/// The counter is a multiset: the same trajectory may be added more than
/// once, and removal only uncovers a target when its multiplicity drops to
/// zero. This one structure therefore serves both directions of greedy
/// attack — growing a removal set and shrinking a survivor set.
#[derive(Debug, Clone)]
pub struct CoverageCounter<'a> {
    scenario: &'a Scenario,
    counts: Vec<u32>,
    value: f64,
}

impl<'a> CoverageCounter<'a> {
    /// An empty counter: all multiplicities zero, value 0.
    pub fn new(scenario: &'a Scenario) -> Self {
        CoverageCounter { scenario, counts: vec![0; scenario.targets().len()], value: 0.0 }
    }

    /// Cached covered weight; equals `coverage_value` of the multiset's
    /// support at all times.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// Per-target multiplicities, indexed by target id.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    fn check(&self, p: TrajId) -> Result<(), CoverageError> {
        if p >= self.scenario.trajectories().len() {
            return Err(CoverageError::UnknownTrajectory {
                trajectory: p,
                total: self.scenario.trajectories().len(),
            });
        }
        Ok(())
    }

    /// Adds one occurrence of `p`; returns the marginal increase in covered
    /// weight (the weight of targets whose multiplicity became 1).
    pub fn add(&mut self, p: TrajId) -> Result<f64, CoverageError> {
        self.check(p)?;
        let mut gain = 0.0;
        for &t in &self.scenario.trajectory(p).covers {
            if self.counts[t] == 0 {
                gain += self.scenario.weight(t);
            }
            self.counts[t] += 1;
        }
        self.value += gain;
        Ok(gain)
    }

    /// Removes one occurrence of `p`; returns the marginal decrease in
    /// covered weight. Fails without modifying the counter if any covered
    /// target already has multiplicity 0.
    pub fn remove(&mut self, p: TrajId) -> Result<f64, CoverageError> {
        self.check(p)?;
        for &t in &self.scenario.trajectory(p).covers {
            if self.counts[t] == 0 {
                return Err(CoverageError::RemoveUnderflow { trajectory: p, target: t });
            }
        }
        let mut loss = 0.0;
        for &t in &self.scenario.trajectory(p).covers {
            self.counts[t] -= 1;
            if self.counts[t] == 0 {
                loss += self.scenario.weight(t);
            }
        }
        self.value -= loss;
        Ok(loss)
    }

    /// What [`CoverageCounter::add`] would return, without mutating.
    pub fn marginal_gain(&self, p: TrajId) -> Result<f64, CoverageError> {
        self.check(p)?;
        let mut gain = 0.0;
        for &t in &self.scenario.trajectory(p).covers {
            if self.counts[t] == 0 {
                gain += self.scenario.weight(t);
            }
        }
        Ok(gain)
    }

    /// What [`CoverageCounter::remove`] would return, without mutating.
    /// Meaningful only when `p` is currently in the multiset.
    pub fn marginal_loss(&self, p: TrajId) -> Result<f64, CoverageError> {
        self.check(p)?;
        let mut loss = 0.0;
        for &t in &self.scenario.trajectory(p).covers {
            if self.counts[t] == 1 {
                loss += self.scenario.weight(t);
            }
        }
        Ok(loss)
    }
}
