//! Synthetic crowd scenarios: deterministic generators used by the test
//! oracles, the benchmark harness, and the `simulate` subcommand.

use crate::datasets::{CrowdFrame, PedId, Track};
use crate::geom::Vec2;
use crate::rvo::{step_crowd, MotionModel, Obstacle, PedestrianState, SimError};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::collections::BTreeMap;

/// A fully specified crowd: initial states plus per-agent models and goals.
#[derive(Debug, Clone)]
pub struct CrowdSetup {
    pub frame: CrowdFrame,
    pub models: BTreeMap<PedId, MotionModel>,
    pub goals: BTreeMap<PedId, Vec2>,
    pub obstacles: Vec<Obstacle>,
}

impl CrowdSetup {
    /// Advance the crowd `steps` times, returning every frame including the
    /// initial one.
    pub fn rollout(&self, dt: f64, steps: usize) -> Result<Vec<CrowdFrame>, SimError> {
        let mut frames = Vec::with_capacity(steps + 1);
        frames.push(self.frame.clone());
        let mut cur = self.frame.clone();
        for _ in 0..steps {
            cur = step_crowd(&cur, &self.models, &self.goals, &self.obstacles, dt)?;
            frames.push(cur.clone());
        }
        Ok(frames)
    }
}

/// Per-pedestrian tracks from a frame sequence. Pedestrians must be present
/// in a contiguous frame range.
pub fn tracks_from_frames(frames: &[CrowdFrame], dt: f64) -> Vec<Track> {
    let mut per_ped: BTreeMap<PedId, (f64, Vec<Vec2>)> = BTreeMap::new();
    for f in frames {
        for (&id, s) in &f.states {
            per_ped
                .entry(id)
                .or_insert_with(|| (f.time, Vec::new()))
                .1
                .push(s.p);
        }
    }
    per_ped
        .into_iter()
        .map(|(ped, (t0, positions))| Track {
            ped,
            t0,
            dt,
            positions,
        })
        .collect()
}

/// `n` agents evenly spaced on a circle, each heading for the antipodal
/// point.
pub fn circle(n: usize, circle_radius: f64, model: MotionModel) -> CrowdSetup {
    let mut states = BTreeMap::new();
    let mut models = BTreeMap::new();
    let mut goals = BTreeMap::new();
    for i in 0..n {
        let id = PedId(i as i64 + 1);
        let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let p = Vec2::from_angle(theta) * circle_radius;
        states.insert(id, PedestrianState::at_rest(p));
        models.insert(id, model);
        goals.insert(id, -p);
    }
    CrowdSetup {
        frame: CrowdFrame { time: 0.0, states },
        models,
        goals,
        obstacles: Vec::new(),
    }
}

/// Agents moving in straight lines: `(start, goal, pref_speed)` per agent.
pub fn free_agents(specs: &[(Vec2, Vec2, f64)]) -> CrowdSetup {
    let mut states = BTreeMap::new();
    let mut models = BTreeMap::new();
    let mut goals = BTreeMap::new();
    for (i, &(start, goal, speed)) in specs.iter().enumerate() {
        let id = PedId(i as i64 + 1);
        states.insert(id, PedestrianState::at_rest(start));
        models.insert(
            id,
            MotionModel {
                pref_speed: speed,
                ..Default::default()
            },
        );
        goals.insert(id, goal);
    }
    CrowdSetup {
        frame: CrowdFrame { time: 0.0, states },
        models,
        goals,
        obstacles: Vec::new(),
    }
}

/// Two pedestrian streams crossing at right angles in a square arena.
///
/// Stream A walks +x, stream B walks +y; start offsets are staggered
/// deterministically and jittered from `seed` so repeated scenarios differ.
pub fn crossing(n: usize, seed: u64) -> CrowdSetup {
    let mut rng = crate::seeded_rng(seed, b"crossing");
    let mut states = BTreeMap::new();
    let mut models = BTreeMap::new();
    let mut goals = BTreeMap::new();
    let half = n / 2;
    let jitter = |rng: &mut ChaCha8Rng| rng.random_range(-0.3..0.3);
    for i in 0..n {
        let id = PedId(i as i64 + 1);
        let k = (i % half) as f64;
        let lane = k - (half as f64 - 1.0) / 2.0;
        let (start, goal) = if i < half {
            (
                Vec2::new(-8.0 - 1.1 * k + jitter(&mut rng), lane * 1.2 + jitter(&mut rng)),
                Vec2::new(14.0, lane * 1.2),
            )
        } else {
            (
                Vec2::new(lane * 1.2 + jitter(&mut rng), -8.0 - 1.1 * k + jitter(&mut rng)),
                Vec2::new(lane * 1.2, 14.0),
            )
        };
        states.insert(id, PedestrianState::at_rest(start));
        models.insert(
            id,
            MotionModel {
                radius: 0.3,
                planning_horizon: 4.0,
                neighbor_dist: 8.0,
                pref_speed: rng.random_range(1.1..1.6),
                ..Default::default()
            },
        );
        goals.insert(id, goal);
    }
    CrowdSetup {
        frame: CrowdFrame { time: 0.0, states },
        models,
        goals,
        obstacles: Vec::new(),
    }
}

/// An oncoming pedestrian stream ("busy sidewalk"): `lanes` vertical lanes
/// spaced `lane_gap` apart and centered on x = 0, each carrying `per_lane`
/// pedestrians walking -y with staggered starts. A robot heading +y through
/// the stream meets everyone head-on.
pub fn counterflow_stream(
    lanes: usize,
    per_lane: usize,
    lane_gap: f64,
    spacing: f64,
    seed: u64,
) -> CrowdSetup {
    let mut rng = crate::seeded_rng(seed, b"counterflow");
    let mut states = BTreeMap::new();
    let mut models = BTreeMap::new();
    let mut goals = BTreeMap::new();
    let mut id = 0i64;
    for lane in 0..lanes {
        let x = (lane as f64 - (lanes as f64 - 1.0) / 2.0) * lane_gap;
        for k in 0..per_lane {
            id += 1;
            let y = 3.0 + spacing * k as f64 + rng.random_range(-0.8..0.8);
            let start = Vec2::new(x + rng.random_range(-0.15..0.15), y);
            states.insert(PedId(id), PedestrianState::at_rest(start));
            models.insert(
                PedId(id),
                MotionModel {
                    radius: 0.3,
                    planning_horizon: 4.0,
                    neighbor_dist: 8.0,
                    pref_speed: rng.random_range(1.0..1.25),
                    ..Default::default()
                },
            );
            goals.insert(PedId(id), Vec2::new(x, -60.0));
        }
    }
    CrowdSetup {
        frame: CrowdFrame { time: 0.0, states },
        models,
        goals,
        obstacles: Vec::new(),
    }
}

/// Add independent Gaussian observation noise to every track sample.
pub fn add_observation_noise(tracks: &[Track], sigma: f64, seed: u64) -> Vec<Track> {
    let mut rng = crate::seeded_rng(seed, b"obs-noise");
    let normal = Normal::new(0.0, sigma).expect("sigma must be finite and non-negative");
    tracks
        .iter()
        .map(|t| Track {
            positions: t
                .positions
                .iter()
                .map(|p| *p + Vec2::new(normal.sample(&mut rng), normal.sample(&mut rng)))
                .collect(),
            ..t.clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_ten_agents_never_collide() {
        let model = MotionModel {
            radius: 0.3,
            planning_horizon: 5.0,
            neighbor_dist: 15.0,
            max_neighbors: 10.0,
            pref_speed: 1.4,
        };
        let setup = circle(10, 6.0, model);
        let frames = setup.rollout(0.1, 400).unwrap();
        let mut min_dist = f64::INFINITY;
        for f in &frames {
            let states: Vec<_> = f.states.values().collect();
            for i in 0..states.len() {
                for j in i + 1..states.len() {
                    min_dist = min_dist.min(states[i].p.dist(states[j].p));
                }
            }
        }
        assert!(
            min_dist >= 2.0 * model.radius - 1e-6,
            "min pairwise distance {min_dist}"
        );
        // Everyone should get (close to) across.
        let last = frames.last().unwrap();
        for (id, s) in &last.states {
            let goal = setup.goals[id];
            assert!(
                s.p.dist(goal) < 1.5,
                "agent {id} stuck at {:?}, goal {goal:?}",
                s.p
            );
        }
    }

    #[test]
    fn rollout_is_deterministic() {
        let setup = crossing(8, 42);
        let a = setup.rollout(0.1, 50).unwrap();
        let b = setup.rollout(0.1, 50).unwrap();
        assert_eq!(a.len(), b.len());
        for (fa, fb) in a.iter().zip(&b) {
            for (sa, sb) in fa.states.values().zip(fb.states.values()) {
                assert_eq!(sa.p.x.to_bits(), sb.p.x.to_bits());
                assert_eq!(sa.p.y.to_bits(), sb.p.y.to_bits());
            }
        }
    }

    #[test]
    fn tracks_from_frames_cover_all_agents() {
        let setup = free_agents(&[
            (Vec2::ZERO, Vec2::new(10.0, 0.0), 1.3),
            (Vec2::new(0.0, 3.0), Vec2::new(10.0, 3.0), 1.1),
        ]);
        let frames = setup.rollout(0.1, 20).unwrap();
        let tracks = tracks_from_frames(&frames, 0.1);
        assert_eq!(tracks.len(), 2);
        for t in &tracks {
            assert_eq!(t.positions.len(), 21);
        }
    }
}
