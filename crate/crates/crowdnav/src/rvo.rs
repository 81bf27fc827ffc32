//! Reciprocal-velocity-obstacle crowd stepping.
//!
//! Each agent samples candidate velocities over its admissible disc and picks
//! the one that best trades off staying close to its preferred velocity
//! against time to collision with nearby agents and segment obstacles. Agents
//! share avoidance responsibility equally (reciprocity factor 0.5), so the
//! collision test for a candidate `v` uses the extrapolated velocity
//! `2v - v_current`.

use crate::datasets::{CrowdFrame, PedId};
use crate::geom::{dist_point_segment, Vec2};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Kinematic state of one pedestrian at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PedestrianState {
    /// Position (m).
    pub p: Vec2,
    /// Current velocity (m/s).
    pub v_c: Vec2,
    /// Preferred velocity: what the agent would do absent everyone else (m/s).
    pub v_pref: Vec2,
}

impl PedestrianState {
    pub fn at_rest(p: Vec2) -> Self {
        PedestrianState {
            p,
            v_c: Vec2::ZERO,
            v_pref: Vec2::ZERO,
        }
    }
}

/// Hard cap on plausible pedestrian speed (m/s).
pub const MAX_SPEED: f64 = 5.0;

/// The five per-pedestrian motion parameters.
///
/// `max_neighbors` is kept as a real number so it can sit in a filter state;
/// [`MotionModel::neighbor_cap`] rounds it at the point of use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionModel {
    /// Radius within which other agents are considered (m).
    pub neighbor_dist: f64,
    /// How many nearest agents to react to.
    pub max_neighbors: f64,
    /// Collisions further away than this are ignored (s).
    pub planning_horizon: f64,
    /// Body radius (m).
    pub radius: f64,
    /// Speed the agent tries to keep toward its goal (m/s).
    pub pref_speed: f64,
}

impl MotionModel {
    /// Reference parameter values; also the defaults assumed for agents whose
    /// parameters have not been estimated.
    pub const CENTERS: [f64; 5] = [15.0, 10.0, 30.0, 0.8, 1.4];

    pub fn from_array(a: [f64; 5]) -> Self {
        MotionModel {
            neighbor_dist: a[0],
            max_neighbors: a[1],
            planning_horizon: a[2],
            radius: a[3],
            pref_speed: a[4],
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [
            self.neighbor_dist,
            self.max_neighbors,
            self.planning_horizon,
            self.radius,
            self.pref_speed,
        ]
    }

    /// Number of neighbors actually used: `max_neighbors` rounded, at least 1.
    pub fn neighbor_cap(&self) -> usize {
        self.max_neighbors.round().max(1.0) as usize
    }

    /// Every component floored to keep the model physically meaningful.
    pub fn floored(self) -> Self {
        let mut a = self.to_array();
        for v in &mut a {
            *v = v.max(1e-3);
        }
        MotionModel::from_array(a)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

impl Default for MotionModel {
    fn default() -> Self {
        MotionModel::from_array(Self::CENTERS)
    }
}

/// A static line-segment obstacle with zero thickness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub a: Vec2,
    pub b: Vec2,
}

impl Obstacle {
    pub fn new(a: Vec2, b: Vec2) -> Self {
        Obstacle { a, b }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("no motion model for pedestrian {0}")]
    MissingModel(PedId),
    #[error("no goal for pedestrian {0}")]
    MissingGoal(PedId),
}

/// Arrival radius below which the preferred velocity drops to zero (m).
pub const GOAL_EPS: f64 = 0.1;

/// Unit vector toward `goal` scaled by `pref_speed`; zero when already there.
pub fn preferred_velocity(state: &PedestrianState, goal: Vec2, model: &MotionModel) -> Vec2 {
    let to_goal = goal - state.p;
    if to_goal.norm() < GOAL_EPS {
        return Vec2::ZERO;
    }
    to_goal.normalized() * model.pref_speed
}

/// Candidate velocities sampled per agent per step (a Vogel spiral over the
/// admissible disc, plus the preferred velocity and zero).
const N_SPIRAL: usize = 256;
const GOLDEN_ANGLE: f64 = 2.399963229728653; // pi * (3 - sqrt(5))

/// Penalty weight on 1/time-to-collision.
const TTC_WEIGHT: f64 = 1.0;

struct Constraint {
    /// Neighbor position relative to self (m).
    p_rel: Vec2,
    /// Neighbor velocity (m/s); zero for obstacles.
    v_other: Vec2,
    /// Combined clearance radius (m).
    radius: f64,
    /// Reciprocal avoidance (true for agents, false for obstacles).
    reciprocal: bool,
    /// Segment obstacles keep their geometry for exact tests.
    segment: Option<(Vec2, Vec2)>,
}

/// Earliest `t >= 0` with `|p_rel - t*v_rel| = radius`; `0.0` when already
/// overlapping, `+inf` when the paths never meet.
fn time_to_collision(p_rel: Vec2, v_rel: Vec2, radius: f64) -> f64 {
    let c = p_rel.norm_sq() - radius * radius;
    if c <= 0.0 {
        return 0.0;
    }
    let a = v_rel.norm_sq();
    if a < 1e-12 {
        return f64::INFINITY;
    }
    let b = p_rel.dot(v_rel);
    let disc = b * b - a * c;
    if disc <= 0.0 {
        return f64::INFINITY;
    }
    let t = (b - disc.sqrt()) / a;
    if t >= 0.0 {
        t
    } else {
        f64::INFINITY
    }
}

/// Earliest `t >= 0` at which a point moving at `v` from `p` comes within
/// `radius` of segment `[a, b]`.
fn time_to_collision_segment(p: Vec2, v: Vec2, radius: f64, a: Vec2, b: Vec2) -> f64 {
    if dist_point_segment(p, a, b) <= radius {
        return 0.0;
    }
    let mut best = time_to_collision(a - p, v, radius).min(time_to_collision(b - p, v, radius));
    // Crossing the inflated band around the segment interior: solve
    // s0 + t*rate = +-radius and keep hits whose foot lies on the segment.
    let d = b - a;
    let len = d.norm();
    if len > 1e-12 {
        let n = d.perp() * (1.0 / len);
        let s0 = (p - a).dot(n);
        let rate = v.dot(n);
        if rate.abs() > 1e-12 {
            let target = if s0 > 0.0 { radius } else { -radius };
            let t = (target - s0) / rate;
            if t >= 0.0 {
                let hit = p + v * t;
                let u = (hit - a).dot(d) / (len * len);
                if (0.0..=1.0).contains(&u) {
                    best = best.min(t);
                }
            }
        }
    }
    best
}

fn candidate_set(v_pref: Vec2, v_current: Vec2, v_max: f64) -> Vec<Vec2> {
    let mut cands = Vec::with_capacity(N_SPIRAL + 2);
    cands.push(v_pref.clamped_norm(v_max));
    cands.push(Vec2::ZERO);
    // Anchor the spiral to the agent's own frame so the whole computation is
    // rotation-equivariant.
    let base = if v_pref.norm() > 1e-12 {
        v_pref.angle()
    } else if v_current.norm() > 1e-12 {
        v_current.angle()
    } else {
        0.0
    };
    for j in 0..N_SPIRAL {
        let r = v_max * (((j as f64) + 0.5) / N_SPIRAL as f64).sqrt();
        let theta = base + (j as f64) * GOLDEN_ANGLE;
        cands.push(Vec2::from_angle(theta) * r);
    }
    cands
}

/// Collision-avoiding velocity for one agent.
///
/// `neighbors` must exclude the agent itself; order acts as the tiebreak for
/// equidistant neighbors, so callers pass them sorted by id. Returns the
/// sampled velocity closest to the preferred one among those that are
/// collision-free over the planning horizon; if every sample collides, falls
/// back to the sample minimizing the worst next-step penetration.
pub fn compute_new_velocity(
    state: &PedestrianState,
    model: &MotionModel,
    neighbors: &[(PedestrianState, MotionModel)],
    obstacles: &[Obstacle],
    dt: f64,
) -> Vec2 {
    let v_max = 1.5 * model.pref_speed;
    if neighbors.is_empty() && obstacles.is_empty() {
        return state.v_pref.clamped_norm(v_max);
    }

    // Nearest neighbors within range, stable order on ties.
    let mut nearby: Vec<(f64, usize)> = neighbors
        .iter()
        .enumerate()
        .filter_map(|(i, (n, _))| {
            let d = state.p.dist(n.p);
            (d <= model.neighbor_dist).then_some((d, i))
        })
        .collect();
    nearby.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    nearby.truncate(model.neighbor_cap());

    let mut constraints: Vec<Constraint> = nearby
        .iter()
        .map(|&(_, i)| {
            let (n, nm) = &neighbors[i];
            Constraint {
                p_rel: n.p - state.p,
                v_other: n.v_c,
                radius: model.radius + nm.radius,
                reciprocal: true,
                segment: None,
            }
        })
        .collect();
    for ob in obstacles {
        constraints.push(Constraint {
            p_rel: Vec2::ZERO,
            v_other: Vec2::ZERO,
            radius: model.radius,
            reciprocal: false,
            segment: Some((ob.a, ob.b)),
        });
    }
    if constraints.is_empty() {
        return state.v_pref.clamped_norm(v_max);
    }

    let cands = candidate_set(state.v_pref, state.v_c, v_max);
    let mut best_feasible: Option<(f64, Vec2)> = None;
    let mut best_fallback: Option<(f64, f64, Vec2)> = None;

    for cand in cands {
        let mut min_ttc = f64::INFINITY;
        let mut feasible = true;
        let mut worst_pen = f64::NEG_INFINITY;
        for c in &constraints {
            let (ttc, pen) = match c.segment {
                Some((a, b)) => {
                    let ttc = time_to_collision_segment(state.p, cand, c.radius, a, b);
                    let next = state.p + cand * dt;
                    let pen = c.radius - dist_point_segment(next, a, b);
                    (ttc, pen)
                }
                None => {
                    // The reciprocity shift: expect the neighbor to take half
                    // the avoidance effort.
                    let v_test = if c.reciprocal {
                        cand * 2.0 - state.v_c - c.v_other
                    } else {
                        cand - c.v_other
                    };
                    let ttc = time_to_collision(c.p_rel, v_test, c.radius);
                    let rel_next = c.p_rel + (c.v_other - cand) * dt;
                    let pen = c.radius - rel_next.norm();
                    (ttc, pen)
                }
            };
            if ttc <= 0.0 || pen > 0.0 {
                feasible = false;
            }
            if ttc <= model.planning_horizon {
                min_ttc = min_ttc.min(ttc);
            }
            worst_pen = worst_pen.max(pen);
        }
        let dist_pref = (state.v_pref - cand).norm();
        if feasible {
            let penalty = if min_ttc.is_finite() {
                dist_pref + TTC_WEIGHT / min_ttc
            } else {
                dist_pref
            };
            if best_feasible.map_or(true, |(p, _)| penalty < p) {
                best_feasible = Some((penalty, cand));
            }
        }
        if best_fallback.map_or(true, |(p, d, _)| worst_pen < p || (worst_pen == p && dist_pref < d))
        {
            best_fallback = Some((worst_pen, dist_pref, cand));
        }
    }

    match best_feasible {
        Some((_, v)) => v,
        None => best_fallback.map(|(_, _, v)| v).unwrap_or(Vec2::ZERO),
    }
}

/// Advance the whole crowd by one synchronous step.
///
/// All new velocities are computed against the old frame, then positions move
/// by `v * dt`. Missing entries in `models` or `goals` are an error.
pub fn step_crowd(
    frame: &CrowdFrame,
    models: &BTreeMap<PedId, MotionModel>,
    goals: &BTreeMap<PedId, Vec2>,
    obstacles: &[Obstacle],
    dt: f64,
) -> Result<CrowdFrame, SimError> {
    let mut out = CrowdFrame {
        time: frame.time + dt,
        states: BTreeMap::new(),
    };
    for (&id, state) in &frame.states {
        let model = models.get(&id).ok_or(SimError::MissingModel(id))?;
        let goal = *goals.get(&id).ok_or(SimError::MissingGoal(id))?;
        let mut me = *state;
        me.v_pref = preferred_velocity(&me, goal, model);
        let neighbors: Vec<(PedestrianState, MotionModel)> = frame
            .states
            .iter()
            .filter(|(&oid, _)| oid != id)
            .map(|(oid, s)| (*s, models.get(oid).copied().unwrap_or_default()))
            .collect();
        let v_new = compute_new_velocity(&me, model, &neighbors, obstacles, dt);
        out.states.insert(
            id,
            PedestrianState {
                p: me.p + v_new * dt,
                v_c: v_new,
                v_pref: me.v_pref,
            },
        );
    }
    Ok(out)
}
