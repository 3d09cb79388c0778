//! Grid-world persistent-monitoring simulation.
//!
//! A square cell grid carries rectangular obstacles and a per-cell *latency*:
//! the number of rounds since the cell was last seen, capped at `l_max`.
//! Robots have 360° vision out to `vis_range` cell lengths, occluded by
//! obstacles. Each round every robot proposes four straight candidate paths
//! (north, east, south, west, truncated at obstacles and the boundary); a
//! solver picks one path per robot to maximize the worst-case latency
//! reduction, a failure model knocks out some chosen paths, survivors move
//! and reset the latency of everything they saw on the way, and every other
//! free cell ages by one.
//!
//! The per-round planning problem compiles to an ordinary [`Scenario`]:
//! targets are the free cells with positive latency (weight = latency),
//! trajectories are the candidate paths, and a path covers every target
//! visible from any of its cells. Grid `y` grows downward, matching the
//! row-major PGM snapshots.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attack::{greedy_attack_a2, optimal_attack, AttackError};
use crate::coverage::coverage_value;
use crate::model::Scenario;
use crate::solver::{solve, SolverSpec};

/// World construction parameters. All fields have defaults (200×200 grid,
/// 100 obstacles at 13–17% area, 64 robots, range 15, `l_max` 100, paths of
/// 5 cells) and may be omitted in JSON configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RpmConfig {
    pub width: usize,
    pub height: usize,
    pub n_obstacles: usize,
    /// Accepted band for the obstructed area fraction; placement resamples
    /// until it lands inside (skipped when `n_obstacles` is 0).
    pub min_obstacle_fraction: f64,
    pub max_obstacle_fraction: f64,
    pub n_robots: usize,
    /// Visibility range in cell lengths (Euclidean, center to center).
    pub vis_range: f64,
    /// Latency cap.
    pub l_max: u32,
    /// Maximum candidate path length in cells per round.
    pub path_len: usize,
    /// When set, a failed robot stays dead in later rounds instead of
    /// rejoining the next one.
    pub permanent_failures: bool,
    pub seed: u64,
}

impl Default for RpmConfig {
    fn default() -> Self {
        RpmConfig {
            width: 200,
            height: 200,
            n_obstacles: 100,
            min_obstacle_fraction: 0.13,
            max_obstacle_fraction: 0.17,
            n_robots: 64,
            vis_range: 15.0,
            l_max: 100,
            path_len: 5,
            permanent_failures: false,
            seed: 0,
        }
    }
}

/// Cardinal heading; also the candidate path directions, in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Heading {
    North,
    East,
    South,
    West,
}

impl Heading {
    pub const ALL: [Heading; 4] = [Heading::North, Heading::East, Heading::South, Heading::West];

    /// Unit step, with `y` growing downward.
    fn delta(self) -> (i64, i64) {
        match self {
            Heading::North => (0, -1),
            Heading::East => (1, 0),
            Heading::South => (0, 1),
            Heading::West => (-1, 0),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridRobot {
    pub pos: (usize, usize),
    pub heading: Heading,
}

/// How chosen paths fail after planning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FailModel {
    /// Nobody fails.
    None,
    /// Greedy worst-case estimate picks the victims.
    A2,
    /// Exhaustive worst case picks the victims.
    Optimal,
}

impl std::str::FromStr for FailModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(FailModel::None),
            "a2" => Ok(FailModel::A2),
            "optimal" => Ok(FailModel::Optimal),
            other => Err(format!("unknown failure model `{other}` (none, a2, optimal)")),
        }
    }
}

impl fmt::Display for FailModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailModel::None => "none",
            FailModel::A2 => "a2",
            FailModel::Optimal => "optimal",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RpmError {
    #[error("{name} is out of range")]
    BadConfig { name: &'static str },
    #[error("could not place the world within {attempts} attempts")]
    PlacementFailed { attempts: usize },
}

#[derive(Debug, thiserror::Error)]
pub enum StepError {
    #[error("failure attack failed: {0}")]
    Attack(#[from] AttackError),
}

/// One executed round.
#[derive(Debug, Clone, Serialize)]
pub struct RoundReport {
    /// Index of the round this report describes (0-based).
    pub round: u64,
    pub solver: String,
    pub alpha: usize,
    pub fail_size: usize,
    /// Coverage weight of the solution as planned, before failures.
    pub planned: f64,
    /// Total latency actually reset by the surviving robots.
    pub realized: f64,
    pub survivors: usize,
    /// Mean free-cell latency after the update.
    pub mean_latency: f64,
}

impl RoundReport {
    pub fn csv_header() -> &'static str {
        "round,solver,alpha,fail_size,planned,realized,mean_latency"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.round,
            self.solver,
            self.alpha,
            self.fail_size,
            self.planned,
            self.realized,
            self.mean_latency
        )
    }
}

/// The monitored world: obstacle mask, latency field, robots, round counter.
#[derive(Debug, Clone)]
pub struct GridWorld {
    width: usize,
    height: usize,
    obstacle: Vec<bool>,
    latency: Vec<u32>,
    robots: Vec<GridRobot>,
    alive: Vec<bool>,
    vis_range: f64,
    l_max: u32,
    path_len: usize,
    permanent_failures: bool,
    round: u64,
    seed: u64,
}

impl GridWorld {
    /// Builds a world: seeded rectangular obstacles (resampled until the
    /// obstructed fraction lands in the configured band) and robots on
    /// distinct free cells. All latencies start at 0.
    pub fn new(cfg: &RpmConfig) -> Result<GridWorld, RpmError> {
        if cfg.width == 0 || cfg.height == 0 {
            return Err(RpmError::BadConfig { name: "width/height" });
        }
        if !(cfg.min_obstacle_fraction > 0.0
            && cfg.max_obstacle_fraction < 1.0
            && cfg.min_obstacle_fraction <= cfg.max_obstacle_fraction)
        {
            return Err(RpmError::BadConfig { name: "obstacle fraction band" });
        }
        if !(cfg.vis_range > 0.0) {
            return Err(RpmError::BadConfig { name: "vis_range" });
        }
        if cfg.l_max == 0 {
            return Err(RpmError::BadConfig { name: "l_max" });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let cells = cfg.width * cfg.height;

        const ATTEMPTS: usize = 1000;
        let mut obstacle = vec![false; cells];
        if cfg.n_obstacles > 0 {
            let mut placed = false;
            for _ in 0..ATTEMPTS {
                obstacle.iter_mut().for_each(|c| *c = false);
                for _ in 0..cfg.n_obstacles {
                    let w = rng.gen_range(2..=14usize).min(cfg.width);
                    let h = rng.gen_range(2..=14usize).min(cfg.height);
                    let x0 = rng.gen_range(0..=cfg.width - w);
                    let y0 = rng.gen_range(0..=cfg.height - h);
                    for y in y0..y0 + h {
                        for x in x0..x0 + w {
                            obstacle[y * cfg.width + x] = true;
                        }
                    }
                }
                let frac =
                    obstacle.iter().filter(|&&c| c).count() as f64 / cells as f64;
                if (cfg.min_obstacle_fraction..=cfg.max_obstacle_fraction).contains(&frac) {
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(RpmError::PlacementFailed { attempts: ATTEMPTS });
            }
        }

        let mut occupied = vec![false; cells];
        let mut robots = Vec::with_capacity(cfg.n_robots);
        for _ in 0..cfg.n_robots {
            let mut found = false;
            for _ in 0..ATTEMPTS {
                let x = rng.gen_range(0..cfg.width);
                let y = rng.gen_range(0..cfg.height);
                let idx = y * cfg.width + x;
                if !obstacle[idx] && !occupied[idx] {
                    occupied[idx] = true;
                    let heading = Heading::ALL[rng.gen_range(0..4)];
                    robots.push(GridRobot { pos: (x, y), heading });
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(RpmError::PlacementFailed { attempts: ATTEMPTS });
            }
        }

        Ok(GridWorld {
            width: cfg.width,
            height: cfg.height,
            obstacle,
            latency: vec![0; cells],
            alive: vec![true; cfg.n_robots],
            robots,
            vis_range: cfg.vis_range,
            l_max: cfg.l_max,
            path_len: cfg.path_len,
            permanent_failures: cfg.permanent_failures,
            round: 0,
            seed: cfg.seed,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn robots(&self) -> &[GridRobot] {
        &self.robots
    }

    pub fn is_obstacle(&self, pos: (usize, usize)) -> bool {
        self.obstacle[pos.1 * self.width + pos.0]
    }

    pub fn latency(&self, pos: (usize, usize)) -> u32 {
        self.latency[pos.1 * self.width + pos.0]
    }

    pub fn obstacle_fraction(&self) -> f64 {
        self.obstacle.iter().filter(|&&c| c).count() as f64 / (self.width * self.height) as f64
    }

    pub fn mean_latency(&self) -> f64 {
        let mut sum = 0u64;
        let mut free = 0u64;
        for (idx, &obs) in self.obstacle.iter().enumerate() {
            if !obs {
                sum += self.latency[idx] as u64;
                free += 1;
            }
        }
        sum as f64 / free as f64
    }

    /// Every cell with line of sight from `pos`: Euclidean center distance
    /// at most `vis_range` and no obstacle on the supercover line between
    /// the centers (the endpoints themselves never block).
    pub fn visible_cells(&self, pos: (usize, usize)) -> Vec<(usize, usize)> {
        let (px, py) = (pos.0 as i64, pos.1 as i64);
        let r = self.vis_range;
        let ri = r.floor() as i64;
        let mut out = Vec::new();
        for y in (py - ri).max(0)..=(py + ri).min(self.height as i64 - 1) {
            for x in (px - ri).max(0)..=(px + ri).min(self.width as i64 - 1) {
                let (dx, dy) = ((x - px) as f64, (y - py) as f64);
                if dx * dx + dy * dy > r * r {
                    continue;
                }
                let line = supercover_line((px, py), (x, y));
                let blocked = line.len() > 2
                    && line[1..line.len() - 1]
                        .iter()
                        .any(|&(cx, cy)| self.obstacle[cy as usize * self.width + cx as usize]);
                if !blocked {
                    out.push((x as usize, y as usize));
                }
            }
        }
        out
    }

    /// The four candidate paths of one robot, starting cell included, each
    /// truncated at the first obstacle or the boundary. A fully blocked
    /// direction degenerates to the one-cell stay-in-place path.
    fn candidate_paths(&self, robot: usize) -> [Vec<(usize, usize)>; 4] {
        Heading::ALL.map(|dir| {
            let (dx, dy) = dir.delta();
            let (mut x, mut y) = (self.robots[robot].pos.0 as i64, self.robots[robot].pos.1 as i64);
            let mut path = vec![(x as usize, y as usize)];
            for _ in 0..self.path_len {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0
                    || ny < 0
                    || nx >= self.width as i64
                    || ny >= self.height as i64
                    || self.obstacle[ny as usize * self.width + nx as usize]
                {
                    break;
                }
                path.push((nx as usize, ny as usize));
                x = nx;
                y = ny;
            }
            path
        })
    }

    fn alive_robots(&self) -> Vec<usize> {
        (0..self.robots.len()).filter(|&r| self.alive[r]).collect()
    }

    /// Compiles the current round into a coverage scenario: targets are the
    /// free cells with positive latency (weight = latency, ids dense in
    /// row-major cell order), and each living robot contributes its four
    /// candidate paths, covering every target visible from any path cell.
    pub fn build_round_scenario(&self, alpha: usize) -> Scenario {
        let mut target_of_cell = vec![usize::MAX; self.width * self.height];
        let mut weights = Vec::new();
        for (idx, &obs) in self.obstacle.iter().enumerate() {
            if !obs && self.latency[idx] > 0 {
                target_of_cell[idx] = weights.len();
                weights.push(self.latency[idx] as f64);
            }
        }

        let mut seen_cache: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        let mut robots: Vec<Vec<Vec<usize>>> = Vec::new();
        for r in self.alive_robots() {
            let mut candidates = Vec::with_capacity(4);
            for path in self.candidate_paths(r) {
                let mut covers: Vec<usize> = Vec::new();
                for &cell in &path {
                    let seen = seen_cache.entry(cell).or_insert_with(|| {
                        self.visible_cells(cell)
                            .into_iter()
                            .map(|(x, y)| target_of_cell[y * self.width + x])
                            .filter(|&t| t != usize::MAX)
                            .collect()
                    });
                    covers.extend_from_slice(seen);
                }
                covers.sort_unstable();
                covers.dedup();
                candidates.push(covers);
            }
            robots.push(candidates);
        }

        Scenario::build(alpha, weights, robots).expect("round scenario is valid by construction")
    }

    /// Plans one round with `solver` at attack budget `alpha`, applies the
    /// failure model to the chosen paths, moves the survivors, resets the
    /// latency of everything they saw, and ages every other free cell.
    ///
    /// # Panics
    ///
    /// If `fail_size` exceeds the number of living robots.
    pub fn step(
        &mut self,
        solver: &SolverSpec,
        alpha: usize,
        fail_model: FailModel,
        fail_size: usize,
    ) -> Result<RoundReport, StepError> {
        let alive = self.alive_robots();
        assert!(fail_size <= alive.len(), "fail_size exceeds living robots");

        let scenario = self.build_round_scenario(alpha);
        let report = solve(&scenario, solver);
        let chosen: Vec<usize> = report.solution.trajectory_ids();
        let planned = coverage_value(&scenario, chosen.iter().copied())
            .expect("solver output is feasible");

        let failed_traj: Vec<usize> = match fail_model {
            FailModel::None => Vec::new(),
            FailModel::A2 => greedy_attack_a2(&scenario, &report.solution, fail_size)?.removed,
            FailModel::Optimal => optimal_attack(&scenario, &report.solution, fail_size)?.removed,
        };
        // trajectory ids are dense per scenario robot, four per robot
        let failed_scenario_robots: Vec<usize> =
            failed_traj.iter().map(|p| scenario.trajectory(*p).robot).collect();

        let mut seen = vec![false; self.width * self.height];
        let mut survivors = 0usize;
        for (scenario_robot, &world_robot) in alive.iter().enumerate() {
            if failed_scenario_robots.contains(&scenario_robot) {
                if self.permanent_failures {
                    self.alive[world_robot] = false;
                }
                continue;
            }
            survivors += 1;
            let traj = report.solution.get(scenario_robot).expect("feasible solution");
            let dir = traj - scenario_robot * 4;
            let path = &self.candidate_paths(world_robot)[dir];
            for &cell in path {
                for (x, y) in self.visible_cells(cell) {
                    seen[y * self.width + x] = true;
                }
            }
            self.robots[world_robot].pos = *path.last().expect("paths include the start cell");
        }

        let mut realized = 0.0;
        for idx in 0..self.latency.len() {
            if self.obstacle[idx] {
                continue;
            }
            if seen[idx] {
                realized += self.latency[idx] as f64;
                self.latency[idx] = 0;
            } else {
                self.latency[idx] = (self.latency[idx] + 1).min(self.l_max);
            }
        }

        let round = self.round;
        self.round += 1;
        Ok(RoundReport {
            round,
            solver: solver.name().to_string(),
            alpha,
            fail_size,
            planned,
            realized,
            survivors,
            mean_latency: self.mean_latency(),
        })
    }

    /// Renders the latency field as a binary (P5) PGM image: obstacles are
    /// 255, free cells scale latency onto 0..254.
    pub fn latency_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.obstacle.iter().zip(&self.latency).map(|(&obs, &l)| {
            if obs {
                255u8
            } else {
                ((l as u64 * 254) / self.l_max as u64) as u8
            }
        }));
        out
    }
}

/// All cells the ideal segment between the two cell centers touches,
/// endpoints included. When the segment passes exactly through a lattice
/// corner, both side cells are included.
fn supercover_line(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    let (mut x, mut y) = a;
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let (sx, sy) = (dx.signum(), dy.signum());
    let (adx, ady) = (dx.abs(), dy.abs());
    let mut out = vec![(x, y)];
    let (mut ix, mut iy) = (0i64, 0i64);
    while ix < adx || iy < ady {
        // compare the next vertical and horizontal grid-line crossings
        let decision = (1 + 2 * ix) * ady - (1 + 2 * iy) * adx;
        if decision == 0 {
            // through a corner: the segment grazes both side cells
            out.push((x + sx, y));
            out.push((x, y + sy));
            x += sx;
            y += sy;
            ix += 1;
            iy += 1;
        } else if decision < 0 {
            x += sx;
            ix += 1;
        } else {
            y += sy;
            iy += 1;
        }
        out.push((x, y));
    }
    out
}
