//! Problem instances: targets, robots, candidate trajectories, and solutions.
//!
//! A [`Scenario`] is immutable once constructed and every constructor
//! validates the same invariants, so downstream code (coverage, attacks,
//! solvers) can index freely without re-checking. Ids of targets, robots and
//! trajectories are dense `0..n` indices assigned in document order;
//! trajectory ids are global across the scenario, not per robot.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a target within a scenario.
pub type TargetId = usize;
/// Global index of a candidate trajectory within a scenario.
pub type TrajId = usize;
/// Index of a robot within a scenario.
pub type RobotId = usize;

/// A point of interest with a non-negative coverage weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub id: TargetId,
    pub weight: f64,
}

/// One candidate trajectory of one robot, reduced to the set of targets it
/// covers. `covers` is sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub id: TrajId,
    pub robot: RobotId,
    pub covers: Vec<TargetId>,
}

/// A robot and the ids of its candidate trajectories (at least one).
#[derive(Debug, Clone, PartialEq)]
pub struct Robot {
    pub id: RobotId,
    pub trajectories: Vec<TrajId>,
}

/// An immutable problem instance: who can cover what, and how many chosen
/// trajectories an attack may remove.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    alpha: usize,
    targets: Vec<Target>,
    robots: Vec<Robot>,
    trajectories: Vec<Trajectory>,
}

/// Why a scenario document was rejected.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario is not valid JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("attack size alpha = {alpha} exceeds the number of robots ({robots})")]
    AlphaExceedsRobots { alpha: usize, robots: usize },
    #[error("robot {robot} has an empty trajectory list")]
    EmptyTrajectoryList { robot: RobotId },
    #[error("trajectory {trajectory} covers unknown target {target}")]
    UnknownTarget { trajectory: TrajId, target: TargetId },
    #[error("target {target} has invalid weight {weight} (must be finite and >= 0)")]
    BadWeight { target: TargetId, weight: f64 },
    #[error("target at position {position} has id {found}, expected dense id {expected}")]
    NonDenseTargetId { position: usize, found: usize, expected: usize },
    #[error("robot at position {position} has id {found}, expected dense id {expected}")]
    NonDenseRobotId { position: usize, found: usize, expected: usize },
    #[error(
        "trajectory at document position {position} has id {found}, expected dense id {expected}"
    )]
    NonDenseTrajectoryId { position: usize, found: usize, expected: usize },
}

// On-disk document shape. Trajectories are nested under their robot; the
// in-memory form flattens them and records the owner.
#[derive(Serialize, Deserialize)]
struct ScenarioDoc {
    alpha: usize,
    targets: Vec<TargetDoc>,
    robots: Vec<RobotDoc>,
}

#[derive(Serialize, Deserialize)]
struct TargetDoc {
    id: usize,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct RobotDoc {
    id: usize,
    trajectories: Vec<TrajectoryDoc>,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryDoc {
    id: usize,
    covers: Vec<usize>,
}

impl Scenario {
    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let doc: ScenarioDoc = serde_json::from_str(text)?;

        for (position, t) in doc.targets.iter().enumerate() {
            if t.id != position {
                return Err(ScenarioError::NonDenseTargetId {
                    position,
                    found: t.id,
                    expected: position,
                });
            }
        }
        for (position, r) in doc.robots.iter().enumerate() {
            if r.id != position {
                return Err(ScenarioError::NonDenseRobotId {
                    position,
                    found: r.id,
                    expected: position,
                });
            }
        }
        let mut position = 0;
        for r in &doc.robots {
            for p in &r.trajectories {
                if p.id != position {
                    return Err(ScenarioError::NonDenseTrajectoryId {
                        position,
                        found: p.id,
                        expected: position,
                    });
                }
                position += 1;
            }
        }

        let weights = doc.targets.iter().map(|t| t.weight).collect();
        let robots = doc
            .robots
            .into_iter()
            .map(|r| r.trajectories.into_iter().map(|p| p.covers).collect())
            .collect();
        Self::build(doc.alpha, weights, robots)
    }

    /// Builds a scenario from target weights and per-robot cover lists,
    /// assigning dense ids in the order given. `robots[r][i]` is the list of
    /// targets covered by robot `r`'s `i`-th trajectory.
    pub fn build(
        alpha: usize,
        weights: Vec<f64>,
        robots: Vec<Vec<Vec<TargetId>>>,
    ) -> Result<Self, ScenarioError> {
        if alpha > robots.len() {
            return Err(ScenarioError::AlphaExceedsRobots { alpha, robots: robots.len() });
        }
        let targets: Vec<Target> = weights
            .into_iter()
            .enumerate()
            .map(|(id, weight)| Target { id, weight })
            .collect();
        for t in &targets {
            if !t.weight.is_finite() || t.weight < 0.0 {
                return Err(ScenarioError::BadWeight { target: t.id, weight: t.weight });
            }
        }

        let mut out_robots = Vec::with_capacity(robots.len());
        let mut trajectories = Vec::new();
        for (robot_id, trajs) in robots.into_iter().enumerate() {
            if trajs.is_empty() {
                return Err(ScenarioError::EmptyTrajectoryList { robot: robot_id });
            }
            let mut ids = Vec::with_capacity(trajs.len());
            for mut covers in trajs {
                let id = trajectories.len();
                covers.sort_unstable();
                covers.dedup();
                for &t in &covers {
                    if t >= targets.len() {
                        return Err(ScenarioError::UnknownTarget { trajectory: id, target: t });
                    }
                }
                ids.push(id);
                trajectories.push(Trajectory { id, robot: robot_id, covers });
            }
            out_robots.push(Robot { id: robot_id, trajectories: ids });
        }

        Ok(Scenario { alpha, targets, robots: out_robots, trajectories })
    }

    /// Serializes back to the document format accepted by [`Scenario::from_json`].
    pub fn to_json(&self) -> String {
        let doc = ScenarioDoc {
            alpha: self.alpha,
            targets: self
                .targets
                .iter()
                .map(|t| TargetDoc { id: t.id, weight: t.weight })
                .collect(),
            robots: self
                .robots
                .iter()
                .map(|r| RobotDoc {
                    id: r.id,
                    trajectories: r
                        .trajectories
                        .iter()
                        .map(|&p| TrajectoryDoc {
                            id: p,
                            covers: self.trajectories[p].covers.clone(),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("scenario serialization cannot fail")
    }

    /// The canonical six-target, three-robot example used throughout the test
    /// suite and the documentation.
    pub fn tiny() -> Self {
        Self::from_json(include_str!("../fixtures/tiny.json")).expect("bundled fixture is valid")
    }

    /// Maximum number of chosen trajectories an attack may remove.
    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// A copy of this scenario under a different attack size.
    pub fn with_alpha(&self, alpha: usize) -> Result<Scenario, ScenarioError> {
        if alpha > self.robots.len() {
            return Err(ScenarioError::AlphaExceedsRobots { alpha, robots: self.robots.len() });
        }
        let mut s = self.clone();
        s.alpha = alpha;
        Ok(s)
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn trajectory(&self, p: TrajId) -> &Trajectory {
        &self.trajectories[p]
    }

    pub fn robot(&self, r: RobotId) -> &Robot {
        &self.robots[r]
    }

    pub fn weight(&self, t: TargetId) -> f64 {
        self.targets[t].weight
    }
}

/// One chosen trajectory per robot, keyed by robot id.
///
/// The carrier itself is unvalidated so that partially built or malformed
/// assignments can be represented (and rejected by [`validate_solution`]);
/// every solver in this crate returns a validated one.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeasibleSolution {
    chosen: BTreeMap<RobotId, TrajId>,
}

impl FeasibleSolution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, robot: RobotId, trajectory: TrajId) {
        self.chosen.insert(robot, trajectory);
    }

    pub fn get(&self, robot: RobotId) -> Option<TrajId> {
        self.chosen.get(&robot).copied()
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    /// Pairs `(robot, trajectory)` in ascending robot order.
    pub fn iter(&self) -> impl Iterator<Item = (RobotId, TrajId)> + '_ {
        self.chosen.iter().map(|(&r, &p)| (r, p))
    }

    /// The chosen trajectory ids, sorted ascending.
    pub fn trajectory_ids(&self) -> Vec<TrajId> {
        let mut ids: Vec<TrajId> = self.chosen.values().copied().collect();
        ids.sort_unstable();
        ids
    }
}

impl FromIterator<(RobotId, TrajId)> for FeasibleSolution {
    fn from_iter<I: IntoIterator<Item = (RobotId, TrajId)>>(iter: I) -> Self {
        FeasibleSolution { chosen: iter.into_iter().collect() }
    }
}

impl fmt::Display for FeasibleSolution {
    /// Renders as `{p0,p2,p4}` (chosen trajectory ids, ascending).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.trajectory_ids().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "p{p}")?;
        }
        write!(f, "}}")
    }
}

/// True iff `sol` assigns to every robot of `s` exactly one trajectory that
/// the robot owns, and mentions no unknown robots.
pub fn validate_solution(s: &Scenario, sol: &FeasibleSolution) -> bool {
    if sol.len() != s.robots().len() {
        return false;
    }
    sol.iter().all(|(r, p)| {
        r < s.robots().len() && p < s.trajectories().len() && s.trajectory(p).robot == r
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_fixture_loads() {
        let s = Scenario::tiny();
        assert_eq!(s.alpha(), 1);
        assert_eq!(s.targets().len(), 6);
        assert_eq!(s.robots().len(), 3);
        assert_eq!(s.trajectories().len(), 6);
        assert_eq!(s.trajectory(2).covers, vec![2, 3]);
        assert_eq!(s.trajectory(2).robot, 1);
        assert_eq!(s.robot(2).trajectories, vec![4, 5]);
    }

    #[test]
    fn round_trip_preserves_scenario() {
        let s = Scenario::tiny();
        let again = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn alpha_larger_than_fleet_is_rejected() {
        let text = Scenario::tiny().to_json().replace("\"alpha\":1", "\"alpha\":4");
        match Scenario::from_json(&text) {
            Err(ScenarioError::AlphaExceedsRobots { alpha: 4, robots: 3 }) => {}
            other => panic!("expected alpha error, got {other:?}"),
        }
    }

    #[test]
    fn with_alpha_rekeys_the_attack_size_only() {
        let s = Scenario::tiny();
        let harder = s.with_alpha(3).unwrap();
        assert_eq!(harder.alpha(), 3);
        assert_eq!(s.alpha(), 1, "the original is untouched");
        assert_eq!(harder.to_json(), s.to_json().replace("\"alpha\":1", "\"alpha\":3"));
        match s.with_alpha(4) {
            Err(ScenarioError::AlphaExceedsRobots { alpha: 4, robots: 3 }) => {}
            other => panic!("expected alpha error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_target_reference_names_the_trajectory() {
        let text = Scenario::tiny().to_json().replace("[3,4]", "[3,9]");
        match Scenario::from_json(&text) {
            Err(e @ ScenarioError::UnknownTarget { trajectory: 3, target: 9 }) => {
                let msg = e.to_string();
                assert!(msg.contains("trajectory 3") && msg.contains("target 9"), "{msg}");
            }
            other => panic!("expected unknown-target error, got {other:?}"),
        }
    }

    #[test]
    fn empty_trajectory_list_names_the_robot() {
        let err = Scenario::build(0, vec![1.0], vec![vec![vec![0]], vec![]]).unwrap_err();
        match err {
            ScenarioError::EmptyTrajectoryList { robot: 1 } => {}
            other => panic!("expected empty-list error, got {other:?}"),
        }
    }

    #[test]
    fn negative_weight_names_the_target() {
        let err = Scenario::build(0, vec![1.0, -0.5], vec![vec![vec![0]]]).unwrap_err();
        match err {
            ScenarioError::BadWeight { target: 1, .. } => {}
            other => panic!("expected weight error, got {other:?}"),
        }
    }

    #[test]
    fn non_dense_ids_are_rejected() {
        let gap_target = r#"{"alpha":0,"targets":[{"id":1,"weight":1.0}],"robots":[]}"#;
        assert!(matches!(
            Scenario::from_json(gap_target),
            Err(ScenarioError::NonDenseTargetId { .. })
        ));

        let gap_traj = r#"{"alpha":0,"targets":[{"id":0,"weight":1.0}],
            "robots":[{"id":0,"trajectories":[{"id":1,"covers":[0]}]}]}"#;
        assert!(matches!(
            Scenario::from_json(gap_traj),
            Err(ScenarioError::NonDenseTrajectoryId { .. })
        ));
    }

    #[test]
    fn covers_are_sorted_and_deduplicated() {
        let s = Scenario::build(0, vec![1.0, 1.0, 1.0], vec![vec![vec![2, 0, 2, 1]]]).unwrap();
        assert_eq!(s.trajectory(0).covers, vec![0, 1, 2]);
    }

    #[test]
    fn validate_solution_accepts_exactly_one_owned_trajectory_per_robot() {
        let s = Scenario::tiny();
        let good: FeasibleSolution = [(0, 0), (1, 2), (2, 4)].into_iter().collect();
        assert!(validate_solution(&s, &good));

        let missing: FeasibleSolution = [(0, 0), (1, 2)].into_iter().collect();
        assert!(!validate_solution(&s, &missing));

        let foreign: FeasibleSolution = [(0, 2), (1, 0), (2, 4)].into_iter().collect();
        assert!(!validate_solution(&s, &foreign));

        let unknown_robot: FeasibleSolution = [(0, 0), (1, 2), (7, 4)].into_iter().collect();
        assert!(!validate_solution(&s, &unknown_robot));

        let unknown_traj: FeasibleSolution = [(0, 0), (1, 2), (2, 9)].into_iter().collect();
        assert!(!validate_solution(&s, &unknown_traj));
    }

    #[test]
    fn solution_displays_as_trajectory_set() {
        let sol: FeasibleSolution = [(0, 0), (1, 2), (2, 4)].into_iter().collect();
        assert_eq!(sol.to_string(), "{p0,p2,p4}");
        assert_eq!(FeasibleSolution::new().to_string(), "{}");
    }

    #[test]
    fn solution_json_uses_robot_keyed_object() {
        let sol: FeasibleSolution = [(0, 0), (1, 2), (2, 4)].into_iter().collect();
        let text = serde_json::to_string(&sol).unwrap();
        assert_eq!(text, r#"{"0":0,"1":2,"2":4}"#);
        let back: FeasibleSolution = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sol);
    }
}
