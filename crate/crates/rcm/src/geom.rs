//! Synthetic geometric scenario generation.
//!
//! Robots and targets are placed uniformly at random in a square region.
//! Each robot gets a fan of candidate trajectories: half-ellipse arcs whose
//! major axes point along headings offset by equally spaced angles within
//! `±fan_half_angle_deg` of the robot's own heading. Every arc starts at the
//! robot (one end of the major axis), is scaled so its arc length equals
//! `traj_len_lt`, and is discretized into `arc_samples` points. A trajectory
//! covers a target iff the target lies within `sense_dist_ls` of the sampled
//! polyline, after clipping the polyline to the region (parts of an arc
//! outside the region sense nothing, but the arc keeps its nominal length).
//!
//! Everything is a pure function of the config: the same [`GeoConfig`]
//! always yields the same [`Scenario`], byte for byte. The draw order is
//! fixed — per robot `x`, `y`, `heading`, then per target `x`, `y` — and
//! covered by golden-file tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::Scenario;

/// Parameters for [`generate`]. The three trailing fields have defaults
/// (60 degrees, 64 samples, aspect 0.5) and may be omitted in JSON configs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GeoConfig {
    /// Side of the square region, meters.
    pub region_side: f64,
    pub n_robots: usize,
    pub n_targets: usize,
    /// Candidate trajectories per robot.
    pub n_traj_per_robot: usize,
    /// Arc length of every candidate trajectory, meters.
    pub traj_len_lt: f64,
    /// Sensing distance: a target within this of the arc is covered.
    pub sense_dist_ls: f64,
    /// Attack size carried into the scenario.
    pub alpha: usize,
    pub seed: u64,
    /// Half-opening of the heading fan, degrees.
    #[serde(default = "default_fan_half_angle")]
    pub fan_half_angle_deg: f64,
    /// Sample points per arc used for distance tests.
    #[serde(default = "default_arc_samples")]
    pub arc_samples: usize,
    /// Minor/major semi-axis ratio of the half-ellipse arcs.
    #[serde(default = "default_ellipse_aspect")]
    pub ellipse_aspect: f64,
}

fn default_fan_half_angle() -> f64 {
    60.0
}

fn default_arc_samples() -> usize {
    64
}

fn default_ellipse_aspect() -> f64 {
    0.5
}

/// Why a [`GeoConfig`] is unusable.
#[derive(Debug, thiserror::Error)]
pub enum GeoConfigError {
    #[error("{name} must be positive")]
    NonPositive { name: &'static str },
    #[error("n_traj_per_robot must be at least 1")]
    NoTrajectories,
    #[error("arc_samples must be at least 2")]
    TooFewSamples,
    #[error("alpha ({alpha}) exceeds the robot count ({robots})")]
    AlphaExceedsRobots { alpha: usize, robots: usize },
}

impl GeoConfig {
    /// Checks the invariants [`generate`] asserts.
    pub fn validate(&self) -> Result<(), GeoConfigError> {
        let dims = [
            ("region_side", self.region_side),
            ("traj_len_lt", self.traj_len_lt),
            ("sense_dist_ls", self.sense_dist_ls),
            ("fan_half_angle_deg", self.fan_half_angle_deg),
            ("ellipse_aspect", self.ellipse_aspect),
        ];
        for (name, v) in dims {
            if !(v > 0.0) {
                return Err(GeoConfigError::NonPositive { name });
            }
        }
        for (name, v) in [("n_robots", self.n_robots), ("n_targets", self.n_targets)] {
            if v == 0 {
                return Err(GeoConfigError::NonPositive { name });
            }
        }
        if self.n_traj_per_robot == 0 {
            return Err(GeoConfigError::NoTrajectories);
        }
        if self.arc_samples < 2 {
            return Err(GeoConfigError::TooFewSamples);
        }
        if self.alpha > self.n_robots {
            return Err(GeoConfigError::AlphaExceedsRobots {
                alpha: self.alpha,
                robots: self.n_robots,
            });
        }
        Ok(())
    }
}

/// Plotting companion to a generated scenario: raw positions and arcs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryDoc {
    pub robots: Vec<RobotGeometry>,
    /// Target positions, indexed by target id.
    pub targets: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobotGeometry {
    pub pos: [f64; 2],
    /// Heading in radians, in `[0, 2π)`.
    pub heading: f64,
    /// One sampled polyline per candidate trajectory, nominal (unclipped).
    pub arcs: Vec<Vec<[f64; 2]>>,
}

impl GeometryDoc {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("geometry serialization cannot fail")
    }
}

/// Generates a scenario from the config.
///
/// # Panics
///
/// If the config violates [`GeoConfig::validate`].
pub fn generate(cfg: &GeoConfig) -> Scenario {
    generate_with_geometry(cfg).0
}

/// Like [`generate`], also returning the underlying geometry for plotting.
pub fn generate_with_geometry(cfg: &GeoConfig) -> (Scenario, GeometryDoc) {
    cfg.validate().expect("invalid generator config");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut robots = Vec::with_capacity(cfg.n_robots);
    for _ in 0..cfg.n_robots {
        let pos = [
            rng.gen_range(0.0..cfg.region_side),
            rng.gen_range(0.0..cfg.region_side),
        ];
        let heading = rng.gen_range(0.0..std::f64::consts::TAU);
        robots.push(RobotGeometry { pos, heading, arcs: Vec::new() });
    }
    let targets: Vec<[f64; 2]> = (0..cfg.n_targets)
        .map(|_| {
            [
                rng.gen_range(0.0..cfg.region_side),
                rng.gen_range(0.0..cfg.region_side),
            ]
        })
        .collect();

    let offsets = fan_offsets(cfg.n_traj_per_robot, cfg.fan_half_angle_deg.to_radians());
    // arc length scales linearly with the semi-major axis, so one unit-size
    // length fixes the scaling for every arc
    let semi_major = cfg.traj_len_lt / unit_half_ellipse_length(cfg.ellipse_aspect);
    for robot in &mut robots {
        robot.arcs = offsets
            .iter()
            .map(|&off| {
                half_ellipse_arc(
                    robot.pos,
                    robot.heading + off,
                    semi_major,
                    cfg.ellipse_aspect,
                    cfg.arc_samples,
                )
            })
            .collect();
    }

    let covers: Vec<Vec<Vec<usize>>> = robots
        .iter()
        .map(|robot| {
            robot
                .arcs
                .iter()
                .map(|arc| {
                    targets
                        .iter()
                        .enumerate()
                        .filter(|(_, &t)| {
                            min_dist_to_clipped_arc(arc, cfg.region_side, t) <= cfg.sense_dist_ls
                        })
                        .map(|(id, _)| id)
                        .collect()
                })
                .collect()
        })
        .collect();

    let scenario = Scenario::build(cfg.alpha, vec![1.0; cfg.n_targets], covers)
        .expect("generated scenario is valid by construction");
    (scenario, GeometryDoc { robots, targets })
}

/// Equally spaced heading offsets in `[-fan, +fan]`, symmetric around 0.
/// A single trajectory gets offset 0.
fn fan_offsets(n: usize, fan: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| -fan + 2.0 * fan * i as f64 / (n - 1) as f64)
        .collect()
}

/// Arc length of half an ellipse with semi-axes `1` and `aspect`, measured
/// on a dense inscribed polyline (no closed form exists).
fn unit_half_ellipse_length(aspect: f64) -> f64 {
    const SEGMENTS: usize = 4096;
    let mut len = 0.0;
    let mut prev = [0.0, 0.0]; // the theta = pi end, where the robot sits
    for i in 1..=SEGMENTS {
        let theta = std::f64::consts::PI * (1.0 - i as f64 / SEGMENTS as f64);
        let p = [1.0 + theta.cos(), aspect * theta.sin()];
        len += dist(prev, p);
        prev = p;
    }
    len
}

/// Samples the half-ellipse arc leaving `start` along `angle`: the robot
/// sits at one end of the major axis and the arc ends `2a` ahead, bulging to
/// the left of the direction of travel.
fn half_ellipse_arc(start: [f64; 2], angle: f64, a: f64, aspect: f64, samples: usize) -> Vec<[f64; 2]> {
    let (sin, cos) = angle.sin_cos();
    let b = aspect * a;
    (0..samples)
        .map(|i| {
            let theta = std::f64::consts::PI * (1.0 - i as f64 / (samples - 1) as f64);
            let local = [a + a * theta.cos(), b * theta.sin()];
            [
                start[0] + cos * local[0] - sin * local[1],
                start[1] + sin * local[0] + cos * local[1],
            ]
        })
        .collect()
}

/// Minimum distance from `point` to the parts of the polyline inside the
/// `[0, side]²` region. Segments fully outside are ignored; segments
/// crossing the boundary are cut at it. Returns infinity if nothing of the
/// polyline lies inside.
fn min_dist_to_clipped_arc(arc: &[[f64; 2]], side: f64, point: [f64; 2]) -> f64 {
    let mut best = f64::INFINITY;
    for seg in arc.windows(2) {
        if let Some((p, q)) = clip_segment(seg[0], seg[1], side) {
            best = best.min(point_segment_distance(point, p, q));
        }
    }
    best
}

/// Liang–Barsky clipping of segment `p..q` against `[0, side]²`.
fn clip_segment(p: [f64; 2], q: [f64; 2], side: f64) -> Option<([f64; 2], [f64; 2])> {
    let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (num, den) in [
        (p[0], -dx),          // left: x >= 0
        (side - p[0], dx),    // right: x <= side
        (p[1], -dy),          // bottom: y >= 0
        (side - p[1], dy),    // top: y <= side
    ] {
        if den == 0.0 {
            if num < 0.0 {
                return None; // parallel and outside
            }
        } else {
            let t = num / den;
            if den < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    Some((
        [p[0] + t0 * dx, p[1] + t0 * dy],
        [p[0] + t1 * dx, p[1] + t1 * dy],
    ))
}

fn point_segment_distance(pt: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (abx, aby) = (b[0] - a[0], b[1] - a[1]);
    let (apx, apy) = (pt[0] - a[0], pt[1] - a[1]);
    let len2 = abx * abx + aby * aby;
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0)
    };
    dist(pt, [a[0] + t * abx, a[1] + t * aby])
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
