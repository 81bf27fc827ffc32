//! Long-horizon pedestrian path prediction and the benchmark harness.
//!
//! The predictor clamps each pedestrian's estimated parameters into their
//! trait-derived bounds and rolls the whole crowd forward with the collision
//! avoidance engine, re-extrapolating goals from the rolled headings at a
//! fixed cadence. Accuracy follows the stride-length criterion: a pedestrian
//! counts as successfully predicted when the mean position error inside the
//! scoring window stays below 0.8 m.

use crate::datasets::{frames, CrowdFrame, PedId, Track};
use crate::estimation::{estimate_motion_model, EstimationConfig, PedEstimate};
use crate::geom::Vec2;
use crate::personality::{clamp_params, compute_bounds, traits_from_params, ParamBounds};
use crate::rvo::{step_crowd, MotionModel, Obstacle, PedestrianState};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Mean-error threshold for a successful prediction (m): average human
/// stride length.
pub const ACCURACY_THRESHOLD_M: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionConfig {
    /// How far ahead to predict (s).
    pub horizon: f64,
    /// Simulation step (s).
    pub dt: f64,
    /// Cadence at which goals are re-extrapolated from the rolled state (s).
    pub resample_interval: f64,
    /// Trait-bound width in percent.
    pub y: f64,
}

impl Default for PredictionConfig {
    fn default() -> Self {
        PredictionConfig {
            horizon: 5.0,
            dt: 0.1,
            resample_interval: 1.0,
            y: 5.0,
        }
    }
}

/// Predicted polyline for one pedestrian, including the anchor position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedTrack {
    pub ped: PedId,
    pub start_time: f64,
    pub dt: f64,
    pub positions: Vec<Vec2>,
}

impl PredictedTrack {
    pub fn position_at_step(&self, k: usize) -> Option<Vec2> {
        self.positions.get(k).copied()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PredictionError {
    #[error("no motion model for pedestrian {0}")]
    MissingModel(PedId),
    #[error("no parameter bounds for pedestrian {0}")]
    MissingBounds(PedId),
    #[error("no goal for pedestrian {0}")]
    MissingGoal(PedId),
    #[error("no pedestrian had ground truth covering the scoring window")]
    NoEvaluablePedestrians,
    #[error("dataset too short for a fit/predict/score split")]
    DatasetTooShort,
}

/// Goal assumed ahead of a moving state: 2 m along the heading.
fn extrapolate_goal(state: &PedestrianState, previous: Vec2) -> Vec2 {
    if state.v_c.norm() < 0.05 {
        previous
    } else {
        state.p + state.v_c.normalized() * 2.0
    }
}

/// Roll every pedestrian in the latest history frame forward by the
/// prediction horizon, with parameters clamped into their bounds.
pub fn predict(
    history: &[CrowdFrame],
    models: &BTreeMap<PedId, MotionModel>,
    bounds: &BTreeMap<PedId, ParamBounds>,
    goals: &BTreeMap<PedId, Vec2>,
    obstacles: &[Obstacle],
    cfg: &PredictionConfig,
) -> Result<BTreeMap<PedId, PredictedTrack>, PredictionError> {
    let start = match history.last() {
        Some(f) => f,
        None => return Ok(BTreeMap::new()),
    };
    let mut clamped = BTreeMap::new();
    let mut cur_goals = BTreeMap::new();
    for &id in start.states.keys() {
        let m = models.get(&id).ok_or(PredictionError::MissingModel(id))?;
        let b = bounds.get(&id).ok_or(PredictionError::MissingBounds(id))?;
        let g = goals.get(&id).ok_or(PredictionError::MissingGoal(id))?;
        clamped.insert(id, clamp_params(m, b));
        cur_goals.insert(id, *g);
    }

    let steps = (cfg.horizon / cfg.dt).round().max(0.0) as usize;
    let mut tracks: BTreeMap<PedId, PredictedTrack> = start
        .states
        .iter()
        .map(|(&id, s)| {
            (
                id,
                PredictedTrack {
                    ped: id,
                    start_time: start.time,
                    dt: cfg.dt,
                    positions: vec![s.p],
                },
            )
        })
        .collect();

    let resample_every = if cfg.resample_interval > 0.0 {
        (cfg.resample_interval / cfg.dt).round().max(1.0) as usize
    } else {
        usize::MAX
    };
    let mut frame = start.clone();
    for k in 1..=steps {
        frame = step_crowd(&frame, &clamped, &cur_goals, obstacles, cfg.dt)
            .expect("models and goals cover the frame");
        for (&id, s) in &frame.states {
            tracks.get_mut(&id).unwrap().positions.push(s.p);
        }
        if k % resample_every == 0 {
            for (&id, s) in &frame.states {
                let g = cur_goals.get_mut(&id).unwrap();
                *g = extrapolate_goal(s, *g);
            }
        }
    }
    Ok(tracks)
}

/// Ratio of pedestrians whose mean prediction error within the window stays
/// below `threshold`. Pedestrians whose ground truth does not cover the full
/// window are excluded from the denominator.
pub fn accuracy(
    predicted: &BTreeMap<PedId, PredictedTrack>,
    truth: &[Track],
    window: f64,
    threshold: f64,
) -> Result<f64, PredictionError> {
    let by_id: BTreeMap<PedId, &Track> = truth.iter().map(|t| (t.ped, t)).collect();
    let mut evaluated = 0usize;
    let mut successes = 0usize;
    for (id, pred) in predicted {
        let Some(track) = by_id.get(id) else {
            continue;
        };
        let steps = (window / pred.dt).round() as usize;
        if steps == 0 || pred.positions.len() <= steps {
            continue;
        }
        let t_end = pred.start_time + steps as f64 * pred.dt;
        if !(track.covers(pred.start_time) && track.covers(t_end)) {
            continue;
        }
        let mut err_sum = 0.0;
        for k in 1..=steps {
            let t = pred.start_time + k as f64 * pred.dt;
            err_sum += pred.positions[k].dist(track.position_at(t));
        }
        let mean_err = err_sum / steps as f64;
        evaluated += 1;
        if mean_err < threshold {
            successes += 1;
        }
    }
    if evaluated == 0 {
        return Err(PredictionError::NoEvaluablePedestrians);
    }
    Ok(successes as f64 / evaluated as f64)
}

/// Prediction methods compared by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    /// Linear extrapolation of the last observed velocity.
    ConstVelocity,
    /// Constant-velocity Kalman filter, linear extrapolation of its state.
    Kalman,
    /// Crowd rollout with estimated parameters, no trait clamping.
    Rollout,
    /// Full method: trait-clamped parameters, crowd rollout.
    Personality,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::ConstVelocity,
        Method::Kalman,
        Method::Rollout,
        Method::Personality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::ConstVelocity => "constvel",
            Method::Kalman => "kalman",
            Method::Rollout => "rollout",
            Method::Personality => "personality",
        }
    }

    pub fn from_name(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub prediction: PredictionConfig,
    pub estimation: EstimationConfig,
    pub methods: Vec<Method>,
    /// Scoring windows (s).
    pub windows: Vec<f64>,
    /// Spacing between evaluation times (s).
    pub eval_interval: f64,
    /// History required before the first evaluation (s).
    pub min_history: f64,
    /// Mean-error success threshold (m).
    pub threshold: f64,
    pub seed: u64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            prediction: PredictionConfig::default(),
            estimation: EstimationConfig::default(),
            methods: Method::ALL.to_vec(),
            windows: vec![1.0, 5.0],
            eval_interval: 1.0,
            min_history: 1.5,
            threshold: ACCURACY_THRESHOLD_M,
            seed: 0,
        }
    }
}

/// Pooled accuracy for one method at one window.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkRow {
    pub method: Method,
    pub window: f64,
    pub accuracy: f64,
    pub n_pedestrians: usize,
}

/// One evaluation-time sample for the plot output.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesPoint {
    pub time: f64,
    pub method: Method,
    pub window: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    pub series: Vec<SeriesPoint>,
}

impl BenchmarkReport {
    pub fn accuracy_of(&self, method: Method, window: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && (r.window - window).abs() < 1e-9)
            .map(|r| r.accuracy)
    }

    /// CSV in the layout `method,window_s,accuracy,n_pedestrians`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,window_s,accuracy,n_pedestrians\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.6},{}\n",
                r.method.name(),
                r.window,
                r.accuracy,
                r.n_pedestrians
            ));
        }
        out
    }

    /// Wide TSV for plotting: time, then one accuracy column per
    /// method/window pair.
    pub fn to_plot_tsv(&self) -> String {
        let mut keys: Vec<(Method, f64)> = self
            .series
            .iter()
            .map(|p| (p.method, p.window))
            .collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        keys.dedup_by(|a, b| a.0 == b.0 && (a.1 - b.1).abs() < 1e-9);
        let mut times: Vec<f64> = self.series.iter().map(|p| p.time).collect();
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let mut out = String::from("time");
        for (m, w) in &keys {
            out.push_str(&format!("\t{}_{}s", m.name(), w));
        }
        out.push('\n');
        for t in &times {
            out.push_str(&format!("{t}"));
            for (m, w) in &keys {
                let v = self
                    .series
                    .iter()
                    .find(|p| {
                        p.method == *m
                            && (p.window - w).abs() < 1e-9
                            && (p.time - t).abs() < 1e-9
                    })
                    .map(|p| format!("{:.6}", p.accuracy))
                    .unwrap_or_else(|| "nan".to_string());
                out.push_str(&format!("\t{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Scalar constant-velocity Kalman filter used by the baseline (independent
/// x/y axes, state = position and velocity).
struct CvKalman {
    p: f64,
    v: f64,
    cov: [[f64; 2]; 2],
}

impl CvKalman {
    fn new(p0: f64) -> Self {
        CvKalman {
            p: p0,
            v: 0.0,
            cov: [[0.25, 0.0], [0.0, 1.0]],
        }
    }

    fn step(&mut self, z: f64, dt: f64) {
        // Predict.
        let q_a = 0.5; // accel noise (m/s^2)
        let p_pred = self.p + self.v * dt;
        let v_pred = self.v;
        let (c00, c01, c11) = (self.cov[0][0], self.cov[0][1], self.cov[1][1]);
        let mut n00 = c00 + 2.0 * dt * c01 + dt * dt * c11;
        let mut n01 = c01 + dt * c11;
        let mut n11 = c11;
        n00 += 0.25 * q_a * q_a * dt.powi(4);
        n01 += 0.5 * q_a * q_a * dt.powi(3);
        n11 += q_a * q_a * dt * dt;
        // Update on position.
        let r = 0.05 * 0.05;
        let s = n00 + r;
        let k0 = n00 / s;
        let k1 = n01 / s;
        let innov = z - p_pred;
        self.p = p_pred + k0 * innov;
        self.v = v_pred + k1 * innov;
        self.cov[0][0] = (1.0 - k0) * n00;
        self.cov[0][1] = (1.0 - k0) * n01;
        self.cov[1][0] = self.cov[0][1];
        self.cov[1][1] = n11 - k1 * n01;
    }
}

fn kalman_predicted(track: &Track, horizon: f64, dt: f64) -> PredictedTrack {
    let mut kx = CvKalman::new(track.positions[0].x);
    let mut ky = CvKalman::new(track.positions[0].y);
    for p in &track.positions[1..] {
        kx.step(p.x, track.dt);
        ky.step(p.y, track.dt);
    }
    let steps = (horizon / dt).round() as usize;
    let start = Vec2::new(kx.p, ky.p);
    let v = Vec2::new(kx.v, ky.v);
    PredictedTrack {
        ped: track.ped,
        start_time: track.end_time(),
        dt,
        positions: (0..=steps).map(|k| start + v * (k as f64 * dt)).collect(),
    }
}

fn constvel_predicted(track: &Track, horizon: f64, dt: f64) -> PredictedTrack {
    let last = track.positions.len() - 1;
    let p0 = track.positions[last];
    let v = track.velocity_at(last);
    let steps = (horizon / dt).round() as usize;
    PredictedTrack {
        ped: track.ped,
        start_time: track.end_time(),
        dt,
        positions: (0..=steps).map(|k| p0 + v * (k as f64 * dt)).collect(),
    }
}

/// Sliding-window benchmark: at every evaluation time, fit on the history,
/// predict ahead, and score each window against the held-out future.
pub fn benchmark(
    dataset: &[Track],
    obstacles: &[Obstacle],
    cfg: &BenchmarkConfig,
) -> Result<BenchmarkReport, PredictionError> {
    if dataset.is_empty() {
        return Err(PredictionError::DatasetTooShort);
    }
    let dt = dataset[0].dt;
    let t_min = dataset.iter().map(|t| t.t0).fold(f64::INFINITY, f64::min);
    let t_max = dataset
        .iter()
        .map(|t| t.end_time())
        .fold(f64::NEG_INFINITY, f64::max);
    let max_window = cfg.windows.iter().cloned().fold(0.0, f64::max);
    let mut eval_times = Vec::new();
    let mut t_e = t_min + cfg.min_history;
    while t_e + max_window <= t_max + 1e-9 {
        // Snap onto the sample grid.
        let snapped = t_min + ((t_e - t_min) / dt).round() * dt;
        eval_times.push(snapped);
        t_e += cfg.eval_interval;
    }
    if eval_times.is_empty() {
        return Err(PredictionError::DatasetTooShort);
    }

    // Trait bounds anchor at each pedestrian's first fitted estimate.
    let mut anchored_bounds: BTreeMap<PedId, ParamBounds> = BTreeMap::new();
    let mut counts: BTreeMap<(Method, u64), (usize, usize)> = BTreeMap::new();
    let mut series = Vec::new();
    let win_key = |w: f64| (w * 1000.0).round() as u64;

    for &t_e in &eval_times {
        let history: Vec<Track> = dataset
            .iter()
            .map(|t| t.truncated_at(t_e))
            .filter(|t| t.positions.len() >= 2 && (t.end_time() - t_e).abs() < dt / 2.0)
            .collect();
        let eligible: Vec<&Track> = history
            .iter()
            .filter(|t| t.duration() >= cfg.min_history.min(1.0) && t.positions.len() >= 5)
            .collect();
        if eligible.is_empty() {
            continue;
        }
        let env = frames(&history, dt);

        // Fit (shared by the rollout methods).
        let mut estimates: BTreeMap<PedId, PedEstimate> = BTreeMap::new();
        for track in &eligible {
            let seed = crate::track_seed(cfg.seed, track);
            if let Ok(est) =
                estimate_motion_model(track, &env, obstacles, &cfg.estimation, seed)
            {
                estimates.insert(track.ped, est);
            }
        }
        for (id, est) in &estimates {
            anchored_bounds.entry(*id).or_insert_with(|| {
                compute_bounds(&traits_from_params(&est.model), cfg.prediction.y)
            });
        }

        // Start frame and goals from the filtered states.
        let mut start_states = BTreeMap::new();
        let mut goals = BTreeMap::new();
        let mut models = BTreeMap::new();
        let mut wide = BTreeMap::new();
        for (id, est) in &estimates {
            start_states.insert(*id, est.state);
            let heading = if est.state.v_pref.norm() > 0.05 {
                est.state.v_pref
            } else {
                est.state.v_c
            };
            let goal = if heading.norm() > 0.05 {
                est.state.p + heading.normalized() * 2.0
            } else {
                est.state.p
            };
            goals.insert(*id, goal);
            models.insert(*id, est.model);
            wide.insert(*id, ParamBounds::unbounded());
        }
        let start_frame = CrowdFrame {
            time: t_e,
            states: start_states,
        };

        for &method in &cfg.methods {
            let predicted: BTreeMap<PedId, PredictedTrack> = match method {
                Method::ConstVelocity => eligible
                    .iter()
                    .map(|t| (t.ped, constvel_predicted(t, cfg.prediction.horizon, dt)))
                    .collect(),
                Method::Kalman => eligible
                    .iter()
                    .map(|t| (t.ped, kalman_predicted(t, cfg.prediction.horizon, dt)))
                    .collect(),
                Method::Rollout => predict(
                    std::slice::from_ref(&start_frame),
                    &models,
                    &wide,
                    &goals,
                    obstacles,
                    &cfg.prediction,
                )?,
                Method::Personality => predict(
                    std::slice::from_ref(&start_frame),
                    &models,
                    &anchored_bounds,
                    &goals,
                    obstacles,
                    &cfg.prediction,
                )?,
            };
            for &w in &cfg.windows {
                let steps = (w / dt).round() as usize;
                let mut evaluated = 0usize;
                let mut successes = 0usize;
                let by_id: BTreeMap<PedId, &Track> =
                    dataset.iter().map(|t| (t.ped, t)).collect();
                for (id, pred) in &predicted {
                    let Some(track) = by_id.get(id) else { continue };
                    let t_end = t_e + w;
                    if !(track.covers(t_e) && track.covers(t_end)) || pred.positions.len() <= steps
                    {
                        continue;
                    }
                    let mut err = 0.0;
                    for k in 1..=steps {
                        let t = t_e + k as f64 * dt;
                        err += pred.positions[k].dist(track.position_at(t));
                    }
                    evaluated += 1;
                    if err / (steps as f64) < cfg.threshold {
                        successes += 1;
                    }
                }
                if evaluated > 0 {
                    let entry = counts.entry((method, win_key(w))).or_insert((0, 0));
                    entry.0 += successes;
                    entry.1 += evaluated;
                    series.push(SeriesPoint {
                        time: t_e,
                        method,
                        window: w,
                        accuracy: successes as f64 / evaluated as f64,
                    });
                }
            }
        }
    }

    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for &w in &cfg.windows {
            if let Some(&(s, n)) = counts.get(&(method, win_key(w))) {
                rows.push(BenchmarkRow {
                    method,
                    window: w,
                    accuracy: s as f64 / n as f64,
                    n_pedestrians: n,
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(PredictionError::NoEvaluablePedestrians);
    }
    Ok(BenchmarkReport { rows, series })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    fn linear_tracks(n: usize, steps: usize) -> Vec<Track> {
        (0..n)
            .map(|i| {
                let v = Vec2::new(1.0 + 0.1 * i as f64, 0.2 * i as f64).clamped_norm(1.5);
                Track {
                    ped: PedId(i as i64 + 1),
                    t0: 0.0,
                    dt: 0.1,
                    positions: (0..=steps)
                        .map(|k| Vec2::new(0.0, 2.0 * i as f64) + v * (k as f64 * 0.1))
                        .collect(),
                }
            })
            .collect()
    }

    #[test]
    fn free_space_prediction_travels_pref_speed() {
        let id = PedId(1);
        let mut states = BTreeMap::new();
        states.insert(
            id,
            PedestrianState {
                p: Vec2::ZERO,
                v_c: Vec2::new(1.4, 0.0),
                v_pref: Vec2::new(1.4, 0.0),
            },
        );
        let frame = CrowdFrame { time: 0.0, states };
        let mut models = BTreeMap::new();
        models.insert(
            id,
            MotionModel {
                pref_speed: 1.4,
                ..Default::default()
            },
        );
        let mut bounds = BTreeMap::new();
        bounds.insert(id, ParamBounds::unbounded());
        let mut goals = BTreeMap::new();
        goals.insert(id, Vec2::new(100.0, 0.0));
        let cfg = PredictionConfig {
            resample_interval: 10.0,
            ..Default::default()
        };
        let out = predict(&[frame], &models, &bounds, &goals, &[], &cfg).unwrap();
        let track = &out[&id];
        assert_eq!(track.positions.len(), 51);
        let last = *track.positions.last().unwrap();
        assert!((last.x - 7.0).abs() < 1e-9, "final x = {}", last.x);
        assert!(last.y.abs() < 1e-9);
    }

    #[test]
    fn zero_horizon_returns_anchor_only() {
        let id = PedId(1);
        let mut states = BTreeMap::new();
        states.insert(id, PedestrianState::at_rest(Vec2::new(3.0, 4.0)));
        let frame = CrowdFrame { time: 2.0, states };
        let mut models = BTreeMap::new();
        models.insert(id, MotionModel::default());
        let mut bounds = BTreeMap::new();
        bounds.insert(id, ParamBounds::unbounded());
        let mut goals = BTreeMap::new();
        goals.insert(id, Vec2::new(5.0, 4.0));
        let cfg = PredictionConfig {
            horizon: 0.0,
            ..Default::default()
        };
        let out = predict(&[frame], &models, &bounds, &goals, &[], &cfg).unwrap();
        assert_eq!(out[&id].positions, vec![Vec2::new(3.0, 4.0)]);
    }

    #[test]
    fn missing_bounds_reported() {
        let id = PedId(1);
        let mut states = BTreeMap::new();
        states.insert(id, PedestrianState::at_rest(Vec2::ZERO));
        let frame = CrowdFrame { time: 0.0, states };
        let mut models = BTreeMap::new();
        models.insert(id, MotionModel::default());
        let mut goals = BTreeMap::new();
        goals.insert(id, Vec2::ZERO);
        let err = predict(
            &[frame],
            &models,
            &BTreeMap::new(),
            &goals,
            &[],
            &PredictionConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err, PredictionError::MissingBounds(id));
    }

    #[test]
    fn self_prediction_is_bit_exact() {
        // Generate a two-pedestrian crossing with the engine, then predict
        // with the same models, goals, and no clamping: the prediction must
        // equal the generator's continuation bit for bit.
        let setup = synthetic::free_agents(&[
            (Vec2::new(-5.0, 0.05), Vec2::new(20.0, 0.0), 1.4),
            (Vec2::new(0.0, -5.0), Vec2::new(0.0, 20.0), 1.2),
        ]);
        let all = setup.rollout(0.1, 100).unwrap();
        let history = &all[..51];
        let future = &all[50..];
        let wide: BTreeMap<PedId, ParamBounds> = setup
            .models
            .keys()
            .map(|&id| (id, ParamBounds::unbounded()))
            .collect();
        let cfg = PredictionConfig {
            horizon: 5.0,
            dt: 0.1,
            resample_interval: f64::INFINITY,
            y: 5.0,
        };
        let predicted = predict(
            history,
            &setup.models,
            &wide,
            &setup.goals,
            &setup.obstacles,
            &cfg,
        )
        .unwrap();
        for (id, pred) in &predicted {
            for (k, p) in pred.positions.iter().enumerate() {
                let truth = future[k].states[id].p;
                assert_eq!(p.x.to_bits(), truth.x.to_bits(), "ped {id} step {k}");
                assert_eq!(p.y.to_bits(), truth.y.to_bits());
            }
        }
    }

    #[test]
    fn accuracy_counting_rules() {
        let dt = 0.1;
        let mk_track = |ped: i64, offset: f64| Track {
            ped: PedId(ped),
            t0: 0.0,
            dt,
            positions: (0..=60)
                .map(|k| Vec2::new(k as f64 * dt, offset))
                .collect(),
        };
        let truth: Vec<Track> = (1..=4).map(|i| mk_track(i, 0.0)).collect();
        // Predictions offset by constant errors {0.1, 0.5, 0.79, 0.9}.
        let errs = [0.1, 0.5, 0.79, 0.9];
        let predicted: BTreeMap<PedId, PredictedTrack> = (1..=4)
            .map(|i| {
                (
                    PedId(i),
                    PredictedTrack {
                        ped: PedId(i),
                        start_time: 0.0,
                        dt,
                        positions: (0..=50)
                            .map(|k| Vec2::new(k as f64 * dt, errs[(i - 1) as usize]))
                            .collect(),
                    },
                )
            })
            .collect();
        let acc = accuracy(&predicted, &truth, 5.0, 0.8).unwrap();
        assert!((acc - 0.75).abs() < 1e-12);

        // Identical predictions score 1.0.
        let exact: BTreeMap<PedId, PredictedTrack> = truth
            .iter()
            .map(|t| {
                (
                    t.ped,
                    PredictedTrack {
                        ped: t.ped,
                        start_time: 0.0,
                        dt,
                        positions: t.positions[..=50].to_vec(),
                    },
                )
            })
            .collect();
        assert_eq!(accuracy(&exact, &truth, 5.0, 0.8).unwrap(), 1.0);

        // A constant 1.0 m offset fails everywhere.
        let off: BTreeMap<PedId, PredictedTrack> = truth
            .iter()
            .map(|t| {
                (
                    t.ped,
                    PredictedTrack {
                        ped: t.ped,
                        start_time: 0.0,
                        dt,
                        positions: t.positions[..=50]
                            .iter()
                            .map(|p| *p + Vec2::new(0.0, 1.0))
                            .collect(),
                    },
                )
            })
            .collect();
        assert_eq!(accuracy(&off, &truth, 5.0, 0.8).unwrap(), 0.0);
    }

    #[test]
    fn accuracy_requires_overlap() {
        let predicted: BTreeMap<PedId, PredictedTrack> = BTreeMap::new();
        let err = accuracy(&predicted, &[], 1.0, 0.8).unwrap_err();
        assert_eq!(err, PredictionError::NoEvaluablePedestrians);
    }

    #[test]
    fn accuracy_rigid_transform_invariant() {
        let dt = 0.1;
        let truth: Vec<Track> = linear_tracks(3, 80);
        let predicted: BTreeMap<PedId, PredictedTrack> = truth
            .iter()
            .map(|t| {
                (
                    t.ped,
                    PredictedTrack {
                        ped: t.ped,
                        start_time: 1.0,
                        dt,
                        positions: (10..=60)
                            .map(|k| t.positions[k] + Vec2::new(0.05, -0.4 * (k as f64 / 60.0)))
                            .collect(),
                    },
                )
            })
            .collect();
        let base = accuracy(&predicted, &truth, 5.0, 0.8).unwrap();
        let theta = 0.83;
        let shift = Vec2::new(-3.0, 11.0);
        let xf = |p: Vec2| p.rotated(theta) + shift;
        let truth2: Vec<Track> = truth
            .iter()
            .map(|t| Track {
                positions: t.positions.iter().map(|&p| xf(p)).collect(),
                ..t.clone()
            })
            .collect();
        let predicted2: BTreeMap<PedId, PredictedTrack> = predicted
            .iter()
            .map(|(id, p)| {
                (
                    *id,
                    PredictedTrack {
                        positions: p.positions.iter().map(|&q| xf(q)).collect(),
                        ..p.clone()
                    },
                )
            })
            .collect();
        let moved = accuracy(&predicted2, &truth2, 5.0, 0.8).unwrap();
        assert_eq!(base, moved);
    }

    #[test]
    fn benchmark_constvel_perfect_on_linear_tracks() {
        let tracks = linear_tracks(4, 90);
        let cfg = BenchmarkConfig {
            methods: vec![Method::ConstVelocity],
            ..Default::default()
        };
        let report = benchmark(&tracks, &[], &cfg).unwrap();
        for w in [1.0, 5.0] {
            let acc = report.accuracy_of(Method::ConstVelocity, w).unwrap();
            assert_eq!(acc, 1.0, "window {w}");
        }
    }

    #[test]
    fn benchmark_window_flag_shapes_output() {
        let tracks = linear_tracks(3, 90);
        let cfg = BenchmarkConfig {
            methods: vec![Method::ConstVelocity, Method::Kalman],
            ..Default::default()
        };
        let report = benchmark(&tracks, &[], &cfg).unwrap();
        assert_eq!(report.rows.len(), 4);
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("method,window_s,accuracy,n_pedestrians\n"));
    }

    #[test]
    fn benchmark_invariant_under_id_relabeling() {
        let mut tracks = linear_tracks(4, 90);
        let cfg = BenchmarkConfig {
            methods: vec![Method::ConstVelocity, Method::Kalman],
            seed: 7,
            ..Default::default()
        };
        let base = benchmark(&tracks, &[], &cfg).unwrap();
        for t in &mut tracks {
            t.ped = PedId(1000 - t.ped.0);
        }
        tracks.reverse();
        let relabeled = benchmark(&tracks, &[], &cfg).unwrap();
        for (a, b) in base.rows.iter().zip(&relabeled.rows) {
            assert_eq!(a.method, b.method);
            assert_eq!(a.accuracy, b.accuracy);
            assert_eq!(a.n_pedestrians, b.n_pedestrians);
        }
    }
}
