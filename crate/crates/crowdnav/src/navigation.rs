//! Socially-aware robot navigation.
//!
//! Global route: shortest path on a visibility graph over obstacle endpoints
//! inflated by the robot radius. Local step: sample the robot's admissible
//! control set, forward-simulate unicycle dynamics against the predicted
//! pedestrian polylines, discard controls that enter the hard zone (personal
//! distance when social mode is on, physical radii otherwise), and pick the
//! survivor that best trades goal progress against soft social-space
//! penalties. Pedestrians never yield to the robot: it carries the full
//! avoidance responsibility.

use crate::datasets::{PedId, Track};
use crate::estimation::{estimate_motion_model, EstimationConfig, PedEstimate};
use crate::geom::{dist_point_segment, Vec2};
use crate::personality::traits_from_params;
use crate::prediction::PredictedTrack;
use crate::proxemics::{profile_from_traits, ProxemicProfile};
use crate::rvo::Obstacle;
use crate::synthetic::{tracks_from_frames, CrowdSetup};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Robot pose and commanded rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub p: Vec2,
    pub heading: f64,
    /// Linear speed (m/s).
    pub v: f64,
    /// Angular rate (rad/s).
    pub omega: f64,
}

impl RobotState {
    pub fn at(p: Vec2, heading: f64) -> Self {
        RobotState {
            p,
            heading,
            v: 0.0,
            omega: 0.0,
        }
    }

    /// One explicit-Euler unicycle step under control `(v, omega)`.
    pub fn stepped(&self, v: f64, omega: f64, dt: f64) -> RobotState {
        RobotState {
            p: self.p + Vec2::from_angle(self.heading) * (v * dt),
            heading: self.heading + omega * dt,
            v,
            omega,
        }
    }
}

/// Robot shape and actuation limits.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RobotParams {
    pub start: Vec2,
    pub goal: Vec2,
    pub v_max: f64,
    pub omega_max: f64,
    pub radius: f64,
}

impl RobotParams {
    pub fn limits_valid(&self) -> bool {
        self.v_max > 0.0 && self.omega_max > 0.0 && self.radius > 0.0
    }
}

/// Where the pedestrians come from.
#[derive(Debug, Clone)]
pub enum PedSource {
    /// Recorded tracks replayed verbatim; predictions are exact.
    Replay(Vec<Track>),
    /// A live crowd simulation (pedestrians avoid each other, ignore the
    /// robot); predictions come from the estimated-parameter rollout.
    Simulate { setup: CrowdSetup, duration: f64 },
}

/// A complete navigation problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub source: PedSource,
    pub robot: RobotParams,
    pub obstacles: Vec<Obstacle>,
    pub social_mode: bool,
    pub seed: u64,
    pub timeout: f64,
}

/// Tunables of the closed loop.
#[derive(Debug, Clone)]
pub struct NavConfig {
    pub dt: f64,
    /// Lookahead of the local controller (s).
    pub control_horizon: f64,
    /// Control-set resolution (per axis).
    pub grid_v: usize,
    pub grid_omega: usize,
    /// Model/prediction refresh cadence (s).
    pub refresh_interval: f64,
    /// History window used when re-estimating models (s).
    pub estimation_window: f64,
    pub estimation: EstimationConfig,
    /// Trait-bound width used for clamping refreshed models (percent).
    pub y: f64,
    pub goal_tolerance: f64,
    pub waypoint_tolerance: f64,
    /// Assumed body radius of pedestrians (m).
    pub ped_radius: f64,
}

impl Default for NavConfig {
    fn default() -> Self {
        NavConfig {
            dt: 0.1,
            control_horizon: 2.0,
            grid_v: 15,
            grid_omega: 15,
            refresh_interval: 1.0,
            estimation_window: 2.5,
            estimation: EstimationConfig::default(),
            y: 5.0,
            goal_tolerance: 0.3,
            waypoint_tolerance: 0.5,
            ped_radius: 0.3,
        }
    }
}

/// A timestamped pose plus the control that produced it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TimedPose {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub v: f64,
    pub omega: f64,
}

/// Outcome of one navigation run.
#[derive(Debug, Clone, Serialize)]
pub struct NavResult {
    pub path: Vec<TimedPose>,
    pub travel_time: f64,
    pub personal_intrusions: usize,
    pub social_intrusions: usize,
    /// Minimum robot-center to pedestrian-center distance seen (m).
    pub min_clearance: f64,
    pub reached_goal: bool,
    /// Steps where no collision-free control existed.
    pub emergency_steps: usize,
}

/// Wall-clock measurements, kept out of [`NavResult`] so result files stay
/// byte-identical across runs.
#[derive(Debug, Clone, Default)]
pub struct NavStats {
    /// Total wall time spent computing proxemic constraints (s).
    pub proxemic_wall_time: f64,
    pub steps: usize,
}

#[derive(Debug, Error)]
pub enum NavError {
    #[error("no collision-free path from start to goal")]
    NoPath,
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

// ---------------------------------------------------------------------------
// Global planner
// ---------------------------------------------------------------------------

const RING_POINTS: usize = 16;

fn edge_clear(a: Vec2, b: Vec2, obstacles: &[Obstacle], radius: f64) -> bool {
    obstacles
        .iter()
        .all(|o| crate::geom::dist_segment_segment(a, b, o.a, o.b) >= radius * (1.0 - 1e-9))
}

/// Shortest path on a visibility graph whose nodes ring the obstacle
/// endpoints at a clearance slightly above the robot radius.
pub fn plan_global(
    start: Vec2,
    goal: Vec2,
    obstacles: &[Obstacle],
    robot_radius: f64,
) -> Result<Vec<Vec2>, NavError> {
    if edge_clear(start, goal, obstacles, robot_radius) {
        return Ok(vec![start, goal]);
    }
    let ring_r = robot_radius * 1.02 / (std::f64::consts::PI / RING_POINTS as f64).cos();
    let mut nodes = vec![start, goal];
    for o in obstacles {
        for &end in &[o.a, o.b] {
            for k in 0..RING_POINTS {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / RING_POINTS as f64;
                let p = end + Vec2::from_angle(theta) * ring_r;
                if obstacles
                    .iter()
                    .all(|ob| dist_point_segment(p, ob.a, ob.b) >= robot_radius)
                {
                    nodes.push(p);
                }
            }
        }
    }

    let n = nodes.len();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if edge_clear(nodes[i], nodes[j], obstacles, robot_radius) {
                let w = nodes[i].dist(nodes[j]);
                adj[i].push((j, w));
                adj[j].push((i, w));
            }
        }
    }

    // Dijkstra from node 0 (start) to node 1 (goal).
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut visited = vec![false; n];
    dist[0] = 0.0;
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut heap: BinaryHeap<(Reverse<u64>, usize)> = BinaryHeap::new();
    heap.push((Reverse(0), 0));
    while let Some((_, u)) = heap.pop() {
        if visited[u] {
            continue;
        }
        visited[u] = true;
        if u == 1 {
            break;
        }
        for &(v, w) in &adj[u] {
            let cand = dist[u] + w;
            if cand < dist[v] {
                dist[v] = cand;
                prev[v] = u;
                heap.push((Reverse(cand.to_bits()), v));
            }
        }
    }
    if !dist[1].is_finite() {
        return Err(NavError::NoPath);
    }
    let mut path = vec![1usize];
    while *path.last().unwrap() != 0 {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    Ok(path.into_iter().map(|i| nodes[i]).collect())
}

// ---------------------------------------------------------------------------
// Local controller
// ---------------------------------------------------------------------------

/// Chosen control and lookahead diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct GvoOutcome {
    pub control: (f64, f64),
    pub next: RobotState,
    /// No admissible control existed; the least-penetrating one was used.
    pub emergency: bool,
    /// Worst predicted pedestrian clearance along the chosen control (m,
    /// center to center).
    pub min_clearance: f64,
}

/// Weight of the soft social cost: a full-horizon traversal of someone's
/// social space costs as much as this much goal progress (m).
const SOCIAL_TRAVERSAL_COST_M: f64 = 2.0;
/// Small heading-alignment term so ties prefer facing the waypoint.
const HEADING_WEIGHT: f64 = 0.05;
/// Time penalty (m/s) inside the goal-progress term: reaching a point near
/// the waypoint earlier beats hovering toward it at reduced speed.
const TIME_WEIGHT: f64 = 0.8;

/// One local planning step: sample controls, roll them against the predicted
/// pedestrian positions, pick the best admissible one.
#[allow(clippy::too_many_arguments)]
pub fn gvo_step(
    robot: &RobotState,
    params: &RobotParams,
    predicted: &BTreeMap<PedId, PredictedTrack>,
    profiles: &BTreeMap<PedId, ProxemicProfile>,
    waypoint: Vec2,
    obstacles: &[Obstacle],
    dt: f64,
    social_mode: bool,
    cfg: &NavConfig,
) -> GvoOutcome {
    let steps = (cfg.control_horizon / dt).round().max(1.0) as usize;
    let physical = params.radius + cfg.ped_radius;

    struct Scored {
        cost: f64,
        margin: f64,
        clearance: f64,
        control: (f64, f64),
    }
    let mut best_ok: Option<Scored> = None;
    let mut best_any: Option<Scored> = None;

    for iv in 0..cfg.grid_v {
        let v = params.v_max * iv as f64 / (cfg.grid_v - 1) as f64;
        for iw in 0..cfg.grid_omega {
            let omega =
                -params.omega_max + 2.0 * params.omega_max * iw as f64 / (cfg.grid_omega - 1) as f64;
            let mut sim = *robot;
            let mut feasible = true;
            let mut margin = f64::INFINITY;
            let mut clearance = f64::INFINITY;
            let mut social_cost = 0.0;
            let mut progress = f64::INFINITY;
            let mut heading_at_best = 0.0;
            for k in 1..=steps {
                sim = sim.stepped(v, omega, dt);
                for ob in obstacles {
                    let d = dist_point_segment(sim.p, ob.a, ob.b);
                    margin = margin.min(d - params.radius);
                    if d < params.radius {
                        feasible = false;
                    }
                }
                for (id, pred) in predicted {
                    let Some(pp) = pred.position_at_step(k) else {
                        continue;
                    };
                    let d = sim.p.dist(pp);
                    clearance = clearance.min(d);
                    let profile = profiles.get(id);
                    // Pedestrians not yet classified get the widest personal
                    // distance, so any later classification is already
                    // satisfied retroactively.
                    let hard = if social_mode {
                        profile.map_or(
                            (crate::proxemics::PERSONAL_EXTROVERT_CM / 100.0).max(physical),
                            |pr| pr.d_p_m().max(physical),
                        )
                    } else {
                        physical
                    };
                    margin = margin.min(d - hard);
                    if d < hard {
                        feasible = false;
                    }
                    if social_mode {
                        if let Some(pr) = profile {
                            let (dp, ds) = (pr.d_p_m(), pr.d_s_m());
                            if d < ds {
                                let q = ((ds - d) / (ds - dp)).clamp(0.0, 1.0);
                                social_cost +=
                                    SOCIAL_TRAVERSAL_COST_M * q * q * dt / cfg.control_horizon;
                            }
                        }
                    }
                }
                // Goal progress: closest approach to the waypoint, with a
                // time penalty so early arrival beats slow hovering.
                let to_wp = waypoint - sim.p;
                let score = to_wp.norm() + TIME_WEIGHT * (k as f64 * dt);
                if score < progress {
                    progress = score;
                    heading_at_best = if to_wp.norm() > 0.1 {
                        let mut e = to_wp.angle() - sim.heading;
                        while e > std::f64::consts::PI {
                            e -= 2.0 * std::f64::consts::PI;
                        }
                        while e < -std::f64::consts::PI {
                            e += 2.0 * std::f64::consts::PI;
                        }
                        e.abs()
                    } else {
                        0.0
                    };
                }
            }
            let cost = progress + HEADING_WEIGHT * heading_at_best + social_cost;
            let scored = Scored {
                cost,
                margin,
                clearance,
                control: (v, omega),
            };
            if feasible && best_ok.as_ref().map_or(true, |b| scored.cost < b.cost) {
                best_ok = Some(Scored { ..scored });
            }
            if best_any.as_ref().map_or(true, |b| scored.margin > b.margin) {
                best_any = Some(scored);
            }
        }
    }

    let (chosen, emergency) = match best_ok {
        Some(s) => (s, false),
        None => (best_any.expect("control grid is non-empty"), true),
    };
    GvoOutcome {
        control: chosen.control,
        next: robot.stepped(chosen.control.0, chosen.control.1, dt),
        emergency,
        min_clearance: chosen.clearance,
    }
}

// ---------------------------------------------------------------------------
// Closed loop
// ---------------------------------------------------------------------------

fn replay_prediction(track: &Track, t: f64, horizon: f64, dt: f64) -> Option<PredictedTrack> {
    if !track.covers(t) {
        return None;
    }
    let steps = (horizon / dt).round() as usize;
    let mut positions = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let tk = t + k as f64 * dt;
        if !track.covers(tk) {
            break;
        }
        positions.push(track.position_at(tk));
    }
    Some(PredictedTrack {
        ped: track.ped,
        start_time: t,
        dt,
        positions,
    })
}

/// Estimate models and proxemic profiles from the recent history of every
/// pedestrian present at time `t`.
#[allow(clippy::type_complexity)]
fn refresh_estimates(
    tracks: &[Track],
    t: f64,
    cfg: &NavConfig,
    seed: u64,
    estimates: &mut BTreeMap<PedId, PedEstimate>,
    profiles: &mut BTreeMap<PedId, ProxemicProfile>,
) {
    let window_start = t - cfg.estimation_window;
    let history: Vec<Track> = tracks
        .iter()
        .filter(|tr| tr.covers(t))
        .map(|tr| {
            let tr = tr.truncated_at(t);
            // Keep only the recent window.
            let skip = if tr.t0 < window_start {
                ((window_start - tr.t0) / tr.dt).ceil() as usize
            } else {
                0
            };
            Track {
                ped: tr.ped,
                t0: tr.t0 + skip as f64 * tr.dt,
                dt: tr.dt,
                positions: tr.positions[skip.min(tr.positions.len())..].to_vec(),
            }
        })
        .filter(|tr| tr.positions.len() >= 5 && tr.duration() >= 1.0)
        .collect();
    if history.is_empty() {
        return;
    }
    let env = crate::datasets::frames(&history, cfg.dt);
    for tr in &history {
        let ped_seed = crate::track_seed(seed, tr);
        if let Ok(est) = estimate_motion_model(tr, &env, &[], &cfg.estimation, ped_seed) {
            // The proxemic profile freezes at the first classification so the
            // hard constraint enforced online is exactly the one intrusions
            // are counted against afterwards.
            profiles.entry(tr.ped).or_insert_with(|| {
                profile_from_traits(&traits_from_params(&est.model))
            });
            estimates.insert(tr.ped, est);
        }
    }
}

/// Run the full closed loop for one scenario.
pub fn run_navigation(scenario: &Scenario, cfg: &NavConfig) -> Result<(NavResult, NavStats), NavError> {
    if scenario.robot.start.dist(scenario.robot.goal) < 1e-9 {
        return Err(NavError::InvalidScenario(
            "robot start equals goal".to_string(),
        ));
    }
    if !scenario.robot.limits_valid() {
        return Err(NavError::InvalidScenario(
            "robot limits must be positive".to_string(),
        ));
    }

    // Pedestrians ignore the robot in both modes, so a simulated crowd can be
    // rolled out up front and then replayed.
    let tracks: Vec<Track> = match &scenario.source {
        PedSource::Replay(tracks) => tracks.clone(),
        PedSource::Simulate { setup, duration } => {
            let steps = (duration / cfg.dt).round() as usize;
            let frames = setup
                .rollout(cfg.dt, steps)
                .map_err(|e| NavError::InvalidScenario(e.to_string()))?;
            tracks_from_frames(&frames, cfg.dt)
        }
    };
    let exact_predictions = matches!(scenario.source, PedSource::Replay(_));

    let waypoints = plan_global(
        scenario.robot.start,
        scenario.robot.goal,
        &scenario.obstacles,
        scenario.robot.radius,
    )?;

    let mut robot = RobotState::at(
        scenario.robot.start,
        (waypoints[1] - waypoints[0]).angle(),
    );
    let mut estimates: BTreeMap<PedId, PedEstimate> = BTreeMap::new();
    let mut profiles: BTreeMap<PedId, ProxemicProfile> = BTreeMap::new();
    let mut bounds = BTreeMap::new();
    let mut predictions: BTreeMap<PedId, PredictedTrack> = BTreeMap::new();
    let mut stats = NavStats::default();

    let mut path = vec![TimedPose {
        t: 0.0,
        x: robot.p.x,
        y: robot.p.y,
        heading: robot.heading,
        v: 0.0,
        omega: 0.0,
    }];
    let mut wp_index = 1usize;
    let mut min_clearance = f64::INFINITY;
    let mut emergency_steps = 0usize;
    let mut reached_goal = false;
    let mut t = 0.0;
    let refresh_every = (cfg.refresh_interval / cfg.dt).round().max(1.0) as usize;
    let mut step = 0usize;

    while t < scenario.timeout - 1e-9 {
        if step % refresh_every == 0 {
            let wall = std::time::Instant::now();
            refresh_estimates(&tracks, t, cfg, scenario.seed, &mut estimates, &mut profiles);
            for (id, est) in &estimates {
                bounds.entry(*id).or_insert_with(|| {
                    crate::personality::compute_bounds(&traits_from_params(&est.model), cfg.y)
                });
            }
            stats.proxemic_wall_time += wall.elapsed().as_secs_f64();
        }

        // Predictions over the control horizon.
        predictions.clear();
        if exact_predictions {
            for tr in &tracks {
                if let Some(p) = replay_prediction(tr, t, cfg.control_horizon, cfg.dt) {
                    predictions.insert(tr.ped, p);
                }
            }
        } else {
            // Simulated crowds: rollout with the estimated, clamped models.
            let present: Vec<&Track> = tracks.iter().filter(|tr| tr.covers(t)).collect();
            let mut states = BTreeMap::new();
            let mut models = BTreeMap::new();
            let mut bnds = BTreeMap::new();
            let mut goals = BTreeMap::new();
            for tr in &present {
                let id = tr.ped;
                let i = ((t - tr.t0) / tr.dt).round() as usize;
                let i = i.min(tr.positions.len() - 1);
                let v = tr.velocity_at(i);
                states.insert(
                    id,
                    crate::rvo::PedestrianState {
                        p: tr.positions[i],
                        v_c: v,
                        v_pref: v,
                    },
                );
                let est_model = estimates
                    .get(&id)
                    .map(|e| e.model)
                    .unwrap_or_default();
                models.insert(id, est_model);
                bnds.insert(
                    id,
                    bounds
                        .get(&id)
                        .copied()
                        .unwrap_or_else(crate::personality::ParamBounds::unbounded),
                );
                let goal = if v.norm() > 0.05 {
                    tr.positions[i] + v.normalized() * 2.0
                } else {
                    tr.positions[i]
                };
                goals.insert(id, goal);
            }
            let frame = crate::datasets::CrowdFrame { time: t, states };
            let pcfg = crate::prediction::PredictionConfig {
                horizon: cfg.control_horizon,
                dt: cfg.dt,
                resample_interval: cfg.refresh_interval,
                y: cfg.y,
            };
            if let Ok(preds) = crate::prediction::predict(
                std::slice::from_ref(&frame),
                &models,
                &bnds,
                &goals,
                &scenario.obstacles,
                &pcfg,
            ) {
                predictions = preds;
            }
        }

        // Advance the waypoint when close enough.
        while wp_index + 1 < waypoints.len()
            && robot.p.dist(waypoints[wp_index]) < cfg.waypoint_tolerance
        {
            wp_index += 1;
        }
        let waypoint = waypoints[wp_index];

        let outcome = gvo_step(
            &robot,
            &scenario.robot,
            &predictions,
            &profiles,
            waypoint,
            &scenario.obstacles,
            cfg.dt,
            scenario.social_mode,
            cfg,
        );
        if outcome.emergency {
            emergency_steps += 1;
        }
        robot = outcome.next;
        t += cfg.dt;
        step += 1;
        stats.steps = step;
        path.push(TimedPose {
            t,
            x: robot.p.x,
            y: robot.p.y,
            heading: robot.heading,
            v: robot.v,
            omega: robot.omega,
        });

        // Actual clearance against the replayed pedestrians.
        for tr in &tracks {
            if tr.covers(t) {
                min_clearance = min_clearance.min(robot.p.dist(tr.position_at(t)));
            }
        }

        if robot.p.dist(scenario.robot.goal) <= cfg.goal_tolerance {
            reached_goal = true;
            break;
        }
    }

    let robot_path: Vec<(f64, Vec2)> = path.iter().map(|p| (p.t, Vec2::new(p.x, p.y))).collect();
    let (personal, social) = count_intrusions(&robot_path, &tracks, &profiles);

    Ok((
        NavResult {
            path,
            travel_time: t,
            personal_intrusions: personal,
            social_intrusions: social,
            min_clearance,
            reached_goal,
            emergency_steps,
        },
        stats,
    ))
}

/// Count intrusion events: maximal contiguous intervals during which the
/// robot center stays inside a pedestrian's personal (or social) disc. Each
/// interval counts once per pedestrian.
pub fn count_intrusions(
    path: &[(f64, Vec2)],
    tracks: &[Track],
    profiles: &BTreeMap<PedId, ProxemicProfile>,
) -> (usize, usize) {
    let mut personal = 0usize;
    let mut social = 0usize;
    for tr in tracks {
        let Some(profile) = profiles.get(&tr.ped) else {
            continue;
        };
        let (dp, ds) = (profile.d_p_m(), profile.d_s_m());
        let mut in_p = false;
        let mut in_s = false;
        for &(t, p) in path {
            if !tr.covers(t) {
                in_p = false;
                in_s = false;
                continue;
            }
            let d = p.dist(tr.position_at(t));
            let now_p = d < dp;
            let now_s = d < ds;
            if now_p && !in_p {
                personal += 1;
            }
            if now_s && !in_s {
                social += 1;
            }
            in_p = now_p;
            in_s = now_s;
        }
    }
    (personal, social)
}

// ---------------------------------------------------------------------------
// Scenario file (JSON) and result export
// ---------------------------------------------------------------------------

/// On-disk scenario description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    /// Path to the trajectory TSV, relative to the scenario file.
    pub dataset: String,
    pub fps: f64,
    pub robot: RobotParams,
    /// Obstacle segments as `[[x1, y1], [x2, y2]]`.
    #[serde(default)]
    pub obstacles: Vec<[[f64; 2]; 2]>,
    pub social_mode: bool,
    pub seed: u64,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    /// Optional estimation overrides.
    #[serde(default)]
    pub ensemble_size: Option<usize>,
    #[serde(default)]
    pub em_iterations: Option<usize>,
}

fn default_timeout() -> f64 {
    120.0
}

/// Parse a scenario JSON document. Never panics on malformed input.
pub fn parse_scenario(bytes: &[u8]) -> Result<ScenarioFile, serde_json::Error> {
    serde_json::from_slice(bytes)
}

impl ScenarioFile {
    pub fn obstacle_segments(&self) -> Vec<Obstacle> {
        self.obstacles
            .iter()
            .map(|s| Obstacle::new(Vec2::new(s[0][0], s[0][1]), Vec2::new(s[1][0], s[1][1])))
            .collect()
    }
}

impl NavResult {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("nav result serialize");
        s.push('\n');
        s
    }

    /// Timestamped robot path as TSV for plotting.
    pub fn path_tsv(&self) -> String {
        let mut out = String::from("# t\tx\ty\theading\tv\tomega\n");
        for p in &self.path {
            out.push_str(&format!(
                "{:.3}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\n",
                p.t, p.x, p.y, p.heading, p.v, p.omega
            ));
        }
        out
    }
}
