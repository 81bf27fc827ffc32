//! Per-pedestrian state and motion-model estimation.
//!
//! The filter state augments the kinematic state with the five motion
//! parameters (11 dimensions total); parameters have no dynamics of their own
//! and move only through process noise. An Ensemble Kalman Filter assimilates
//! position observations, and an outer EM loop re-estimates the process-noise
//! covariance from prediction residuals.

use crate::datasets::{CrowdFrame, PedId, Track};
use crate::geom::Vec2;
use crate::rvo::{
    compute_new_velocity, preferred_velocity, MotionModel, Obstacle, PedestrianState, MAX_SPEED,
};
use nalgebra::{Cholesky, Matrix2, SMatrix, SVector, Vector2};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Augmented state dimension: position, velocity, preferred velocity, and
/// the five motion parameters.
pub const STATE_DIM: usize = 11;

/// Floor applied to every motion-parameter component after a filter update.
pub const PARAM_FLOOR: f64 = 1e-3;

/// Floor applied to process-noise diagonal entries.
pub const SIGMA_Q_FLOOR: f64 = 1e-12;

type StateVector = SVector<f64, STATE_DIM>;

/// Kinematic state plus the motion model being estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentedState {
    pub state: PedestrianState,
    pub model: MotionModel,
}

impl AugmentedState {
    pub fn to_vector(&self) -> StateVector {
        let m = self.model.to_array();
        StateVector::from_column_slice(&[
            self.state.p.x,
            self.state.p.y,
            self.state.v_c.x,
            self.state.v_c.y,
            self.state.v_pref.x,
            self.state.v_pref.y,
            m[0],
            m[1],
            m[2],
            m[3],
            m[4],
        ])
    }

    pub fn from_vector(v: &StateVector) -> Self {
        AugmentedState {
            state: PedestrianState {
                p: Vec2::new(v[0], v[1]),
                v_c: Vec2::new(v[2], v[3]),
                v_pref: Vec2::new(v[4], v[5]),
            },
            model: MotionModel::from_array([v[6], v[7], v[8], v[9], v[10]]),
        }
    }

    /// Re-impose the state invariants: positive parameters, bounded speeds.
    fn clamped(mut self) -> Self {
        self.model = self.model.floored();
        self.state.v_c = self.state.v_c.clamped_norm(MAX_SPEED);
        self.state.v_pref = self.state.v_pref.clamped_norm(MAX_SPEED);
        self
    }
}

/// A Monte-Carlo set of augmented states sharing one timestamp.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub members: Vec<AugmentedState>,
    pub time: f64,
}

impl Ensemble {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn mean_vector(&self) -> StateVector {
        let mut sum = StateVector::zeros();
        for m in &self.members {
            sum += m.to_vector();
        }
        sum / self.members.len() as f64
    }

    pub fn mean(&self) -> AugmentedState {
        AugmentedState::from_vector(&self.mean_vector()).clamped()
    }

    /// Sample covariance of member positions.
    pub fn position_covariance(&self) -> Matrix2<f64> {
        let mean = self.mean_vector();
        let mut cov = Matrix2::zeros();
        for m in &self.members {
            let v = m.to_vector();
            let d = Vector2::new(v[0] - mean[0], v[1] - mean[1]);
            cov += d * d.transpose();
        }
        cov / (self.members.len().max(2) - 1) as f64
    }
}

/// Observation and process noise configuration.
#[derive(Debug, Clone)]
pub struct NoiseConfig {
    /// 2x2 observation covariance (m^2), positive definite.
    pub sigma_r: Matrix2<f64>,
    /// Diagonal process covariance over the augmented state.
    pub sigma_q: StateVector,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        let sigma_obs: f64 = 0.05;
        // Small initial process noise; the EM loop re-estimates it anyway.
        // Parameters rely on the initial ensemble spread for exploration and
        // get only a faint per-step random walk.
        let q = [
            4e-4, 4e-4, // position
            1e-4, 1e-4, // velocity
            1e-4, 1e-4, // preferred velocity
            5e-5, 5e-5, 5e-5, 5e-5, 5e-5, // parameters
        ];
        NoiseConfig {
            sigma_r: Matrix2::identity() * sigma_obs * sigma_obs,
            sigma_q: StateVector::from_column_slice(&q),
        }
    }
}

/// Knobs for the full estimation pipeline.
#[derive(Debug, Clone)]
pub struct EstimationConfig {
    pub noise: NoiseConfig,
    pub ensemble_size: usize,
    pub em_iterations: usize,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            noise: NoiseConfig::default(),
            ensemble_size: 100,
            em_iterations: 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("track covers {got:.2} s, need at least {need:.2} s")]
    TrackTooShort { need: f64, got: f64 },
    #[error("track has {got} samples, need at least {need}")]
    TooFewSteps { need: usize, got: usize },
    #[error("ensemble is degenerate and observation noise is singular")]
    DegenerateEnsemble,
}

/// Relative spread of the initial parameter ensemble around the reference
/// centers.
pub const INIT_PARAM_SPREAD: f64 = 0.2;

/// Build the initial ensemble at the first track sample.
pub fn initial_ensemble(
    track: &Track,
    noise: &NoiseConfig,
    ensemble_size: usize,
    rng: &mut ChaCha8Rng,
) -> Ensemble {
    let z0 = track.positions[0];
    let v0 = track.velocity_at(0);
    let chol_r = cholesky_or_diag(&noise.sigma_r);
    let mut members = Vec::with_capacity(ensemble_size);
    for _ in 0..ensemble_size {
        let pn = chol_r * Vector2::new(normal(rng), normal(rng));
        let p = z0 + Vec2::new(pn[0], pn[1]);
        let v = v0 + Vec2::new(normal(rng), normal(rng)) * 0.1;
        let vp = v0 + Vec2::new(normal(rng), normal(rng)) * 0.1;
        let mut params = [0.0; 5];
        for (i, c) in MotionModel::CENTERS.iter().enumerate() {
            params[i] = c * (1.0 + INIT_PARAM_SPREAD * normal(rng));
        }
        members.push(
            AugmentedState {
                state: PedestrianState {
                    p,
                    v_c: v,
                    v_pref: vp,
                },
                model: MotionModel::from_array(params),
            }
            .clamped(),
        );
    }
    Ensemble {
        members,
        time: track.t0,
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    use rand_distr::StandardNormal;
    rng.sample(StandardNormal)
}

fn cholesky_or_diag(m: &Matrix2<f64>) -> Matrix2<f64> {
    match Cholesky::new(*m) {
        Some(c) => c.l(),
        None => Matrix2::new(m[(0, 0)].max(0.0).sqrt(), 0.0, 0.0, m[(1, 1)].max(0.0).sqrt()),
    }
}

/// Deterministic part of the transition: advance one member through the
/// crowd model using its own parameters against the environment's point
/// estimates.
fn advance_member(
    member: &AugmentedState,
    neighbors: &[(PedestrianState, MotionModel)],
    obstacles: &[Obstacle],
    goal: Vec2,
    dt: f64,
) -> AugmentedState {
    let mut st = member.state;
    st.v_pref = preferred_velocity(&st, goal, &member.model);
    let v = compute_new_velocity(&st, &member.model, neighbors, obstacles, dt);
    AugmentedState {
        state: PedestrianState {
            p: st.p + v * dt,
            v_c: v,
            v_pref: st.v_pref,
        },
        model: member.model,
    }
}

/// Neighbor list for pedestrian `ped` from an environment frame. Other
/// pedestrians appear at their point estimates with reference parameters.
fn env_neighbors(env: &CrowdFrame, ped: PedId) -> Vec<(PedestrianState, MotionModel)> {
    env.states
        .iter()
        .filter(|(&id, _)| id != ped)
        .map(|(_, s)| (*s, MotionModel::default()))
        .collect()
}

/// EnKF forecast step: every member advances through the transition model
/// with its own parameters, then receives independent process noise.
pub fn enkf_predict(
    ens: &Ensemble,
    ped: PedId,
    env: &CrowdFrame,
    obstacles: &[Obstacle],
    goal: Vec2,
    dt: f64,
    sigma_q: &StateVector,
    rng: &mut ChaCha8Rng,
) -> Ensemble {
    let neighbors = env_neighbors(env, ped);
    let std: Vec<f64> = sigma_q.iter().map(|v| v.max(0.0).sqrt()).collect();
    let members = ens
        .members
        .iter()
        .map(|m| {
            let det = advance_member(m, &neighbors, obstacles, goal, dt);
            let mut v = det.to_vector();
            for (d, s) in std.iter().enumerate() {
                v[d] += s * normal(rng);
            }
            AugmentedState::from_vector(&v).clamped()
        })
        .collect();
    Ensemble {
        members,
        time: ens.time + dt,
    }
}

/// Stochastic EnKF analysis step with per-member perturbed observations.
pub fn enkf_update(
    ens: &Ensemble,
    z: Vec2,
    sigma_r: &Matrix2<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<Ensemble, EstimationError> {
    let e = ens.size();
    if e < 2 {
        return Err(EstimationError::DegenerateEnsemble);
    }
    let mean = ens.mean_vector();
    let zbar = Vector2::new(mean[0], mean[1]);
    let mut c_zz = Matrix2::zeros();
    let mut c_xz = SMatrix::<f64, STATE_DIM, 2>::zeros();
    let mut var_x = StateVector::zeros();
    for m in &ens.members {
        let x = m.to_vector();
        let dz = Vector2::new(x[0] - zbar[0], x[1] - zbar[1]);
        c_zz += dz * dz.transpose();
        c_xz += (x - mean) * dz.transpose();
        for d in 0..STATE_DIM {
            var_x[d] += (x[d] - mean[d]) * (x[d] - mean[d]);
        }
    }
    let denom = (e - 1) as f64;
    c_zz /= denom;
    c_xz /= denom;
    var_x /= denom;

    // Shrink cross-covariances toward zero relative to the 2/sqrt(E)
    // sampling-noise level; without this, spurious correlations between
    // wide-prior parameter dimensions and the observed position random-walk
    // the parameters on long tracks.
    // The observed block (position rows) is left untouched: its
    // cross-covariance equals the observation covariance by construction.
    let rho_min = 2.0 / (e as f64).sqrt();
    for d in 2..STATE_DIM {
        for j in 0..2 {
            let scale = (var_x[d] * c_zz[(j, j)]).sqrt();
            if scale <= 1e-300 {
                c_xz[(d, j)] = 0.0;
                continue;
            }
            let rho = (c_xz[(d, j)] / scale).abs();
            let factor = ((rho - rho_min) / (1.0 - rho_min)).clamp(0.0, 1.0);
            c_xz[(d, j)] *= factor;
        }
    }

    let s = c_zz + sigma_r;
    let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
    let scale = s[(0, 0)].abs().max(s[(1, 1)].abs());
    if !det.is_finite() || det.abs() < (1e-18 * scale * scale).max(1e-300) {
        return Err(EstimationError::DegenerateEnsemble);
    }
    let s_inv = Matrix2::new(s[(1, 1)], -s[(0, 1)], -s[(1, 0)], s[(0, 0)]) / det;
    let gain = c_xz * s_inv;

    let chol_r = cholesky_or_diag(sigma_r);
    let members = ens
        .members
        .iter()
        .map(|m| {
            let x = m.to_vector();
            let pert = chol_r * Vector2::new(normal(rng), normal(rng));
            let innov = Vector2::new(z.x + pert[0] - x[0], z.y + pert[1] - x[1]);
            AugmentedState::from_vector(&(x + gain * innov)).clamped()
        })
        .collect();
    Ok(Ensemble {
        members,
        time: ens.time,
    })
}

/// Output of the EM loop.
#[derive(Debug, Clone)]
pub struct EmResult {
    /// Final process-noise diagonal.
    pub sigma_q: StateVector,
    /// Analysis ensembles of the final filter pass, one per track sample.
    pub ensembles: Vec<Ensemble>,
    /// Expected log-likelihood (quadratic form) per EM iteration.
    pub log_likelihood: Vec<f64>,
    /// True when a process-noise component had to be floored.
    pub floored: bool,
}

fn find_frame<'a>(env: &'a [CrowdFrame], t: f64) -> Option<&'a CrowdFrame> {
    env.iter().find(|f| (f.time - t).abs() < 1e-6)
}

/// Goal assumed for an observed pedestrian: last observed position extended
/// 2 m along the final heading.
pub fn goal_from_track(track: &Track) -> Vec2 {
    let last = *track.positions.last().unwrap();
    let v = track.velocity_at(track.positions.len() - 1);
    if v.norm() < 0.05 {
        last
    } else {
        last + v.normalized() * 2.0
    }
}

/// Alternate EnKF passes over a track (E-step) with re-estimation of the
/// process-noise diagonal from prediction residuals (M-step).
pub fn em_estimate_sigma_q(
    track: &Track,
    env: &[CrowdFrame],
    obstacles: &[Obstacle],
    init: &NoiseConfig,
    ensemble_size: usize,
    iterations: usize,
    rng_seed: u64,
) -> Result<EmResult, EstimationError> {
    let n = track.positions.len();
    if n < 5 {
        return Err(EstimationError::TooFewSteps { need: 5, got: n });
    }
    assert!(iterations >= 1, "EM needs at least one iteration");
    let goal = goal_from_track(track);
    let mut rng = crate::seeded_rng(rng_seed, b"em");

    let mut sigma_q = init.sigma_q;
    let mut log_likelihood = Vec::with_capacity(iterations);
    let mut floored = false;
    let mut final_ensembles = Vec::new();

    for _pass in 0..iterations {
        let mut ens = initial_ensemble(track, init, ensemble_size, &mut rng);
        let mut ensembles = Vec::with_capacity(n);
        ensembles.push(ens.clone());
        // Sum of squared residuals per state dimension.
        let mut sq_sum = StateVector::zeros();
        for k in 1..n {
            let t_prev = track.time_at(k - 1);
            let empty = CrowdFrame {
                time: t_prev,
                states: BTreeMap::new(),
            };
            let frame = find_frame(env, t_prev).unwrap_or(&empty);
            let forecast = enkf_predict(
                &ens,
                track.ped,
                frame,
                obstacles,
                goal,
                track.dt,
                &sigma_q,
                &mut rng,
            );
            let analysis = enkf_update(&forecast, track.positions[k], &init.sigma_r, &mut rng)?;
            // Residual: how far the data moved the ensemble-mean forecast.
            // (Per-member residuals fold the filter's own injected noise
            // back into the estimate and diverge across EM iterations.)
            let r = analysis.mean_vector() - forecast.mean_vector();
            for d in 0..STATE_DIM {
                sq_sum[d] += r[d] * r[d];
            }
            ens = analysis;
            ensembles.push(ens.clone());
        }

        let samples = (n - 1) as f64;
        let mut new_sigma = StateVector::zeros();
        for d in 0..STATE_DIM {
            let v = sq_sum[d] / samples;
            if v < SIGMA_Q_FLOOR {
                floored = true;
                new_sigma[d] = SIGMA_Q_FLOOR;
            } else {
                new_sigma[d] = v;
            }
        }
        sigma_q = new_sigma;

        // Quadratic-form objective at this iterate, estimated from the same
        // pass's residuals.
        let mut ll = 0.0;
        for d in 0..STATE_DIM {
            ll -= sq_sum[d] / sigma_q[d];
        }
        log_likelihood.push(ll);
        final_ensembles = ensembles;
    }

    Ok(EmResult {
        sigma_q,
        ensembles: final_ensembles,
        log_likelihood,
        floored,
    })
}

/// Estimated parameters and state for one pedestrian, as exported to JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PedEstimate {
    pub model: MotionModel,
    pub state: PedestrianState,
    /// Final process-noise diagonal (11 entries).
    pub sigma_q: Vec<f64>,
    pub seed: u64,
}

/// Full estimation for one pedestrian: EM loop, then the ensemble mean at
/// the final timestep.
pub fn estimate_motion_model(
    track: &Track,
    env: &[CrowdFrame],
    obstacles: &[Obstacle],
    config: &EstimationConfig,
    rng_seed: u64,
) -> Result<PedEstimate, EstimationError> {
    let dur = track.duration();
    if dur < 1.0 - 1e-9 {
        return Err(EstimationError::TrackTooShort {
            need: 1.0,
            got: dur,
        });
    }
    let em = em_estimate_sigma_q(
        track,
        env,
        obstacles,
        &config.noise,
        config.ensemble_size,
        config.em_iterations,
        rng_seed,
    )?;
    let mean = em.ensembles.last().unwrap().mean();
    Ok(PedEstimate {
        model: mean.model.floored(),
        state: mean.state,
        sigma_q: em.sigma_q.iter().copied().collect(),
        seed: rng_seed,
    })
}

/// Estimate every track; per-pedestrian seeds derive from track content so
/// the result is invariant under id relabeling.
pub fn estimate_all(
    tracks: &[Track],
    env: &[CrowdFrame],
    obstacles: &[Obstacle],
    config: &EstimationConfig,
    master_seed: u64,
) -> BTreeMap<PedId, PedEstimate> {
    let mut out = BTreeMap::new();
    for track in tracks {
        let seed = crate::track_seed(master_seed, track);
        match estimate_motion_model(track, env, obstacles, config, seed) {
            Ok(est) => {
                out.insert(track.ped, est);
            }
            Err(_) => continue,
        }
    }
    out
}

/// Parse the parameter-export JSON (map of pedestrian id to estimate).
pub fn parse_params(bytes: &[u8]) -> Result<BTreeMap<i64, PedEstimate>, serde_json::Error> {
    serde_json::from_slice(bytes)
}

pub fn write_params(params: &BTreeMap<i64, PedEstimate>) -> String {
    let mut s = serde_json::to_string_pretty(params).expect("params serialize");
    s.push('\n');
    s
}
