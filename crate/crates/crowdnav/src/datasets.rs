//! Loading, validation, and resampling of frame-indexed trajectory data.
//!
//! Input is the trajectory TSV format: one observation per row,
//! `frame_id<TAB>ped_id<TAB>x<TAB>y`, optionally preceded by `#` header
//! lines. The frame rate is always supplied by the caller, never inferred.

use crate::geom::Vec2;
use crate::rvo::{PedestrianState, MAX_SPEED};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Pedestrian identifier as it appears in the source data.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct PedId(pub i64);

impl fmt::Display for PedId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One raw observation row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub frame: i64,
    pub ped: PedId,
    pub x: f64,
    pub y: f64,
}

/// Parsed trajectory file: unordered observations plus the source frame rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTrajectoryFile {
    pub rows: Vec<Observation>,
    pub fps: f64,
}

/// A uniformly-timed per-pedestrian position track.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub ped: PedId,
    /// Time of the first sample (s).
    pub t0: f64,
    /// Sample spacing (s).
    pub dt: f64,
    pub positions: Vec<Vec2>,
}

impl Track {
    pub fn time_at(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    pub fn end_time(&self) -> f64 {
        self.time_at(self.positions.len().saturating_sub(1))
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.positions.len().saturating_sub(1)) as f64
    }

    pub fn covers(&self, t: f64) -> bool {
        t >= self.t0 - 1e-9 && t <= self.end_time() + 1e-9
    }

    /// Linearly interpolated position at time `t` (must be covered).
    pub fn position_at(&self, t: f64) -> Vec2 {
        let s = ((t - self.t0) / self.dt).clamp(0.0, (self.positions.len() - 1) as f64);
        let i = s.floor() as usize;
        if i + 1 >= self.positions.len() {
            return self.positions[self.positions.len() - 1];
        }
        let frac = s - i as f64;
        self.positions[i] + (self.positions[i + 1] - self.positions[i]) * frac
    }

    /// Central finite-difference velocity at sample `i`, one-sided at ends.
    pub fn velocity_at(&self, i: usize) -> Vec2 {
        let n = self.positions.len();
        if n < 2 {
            return Vec2::ZERO;
        }
        if i == 0 {
            (self.positions[1] - self.positions[0]) * (1.0 / self.dt)
        } else if i + 1 >= n {
            (self.positions[n - 1] - self.positions[n - 2]) * (1.0 / self.dt)
        } else {
            (self.positions[i + 1] - self.positions[i - 1]) * (1.0 / (2.0 * self.dt))
        }
    }

    /// Prefix of the track ending at the last sample with time <= `t`.
    pub fn truncated_at(&self, t: f64) -> Track {
        let n = if t < self.t0 {
            0
        } else {
            (((t - self.t0) / self.dt + 1e-9).floor() as usize + 1).min(self.positions.len())
        };
        Track {
            ped: self.ped,
            t0: self.t0,
            dt: self.dt,
            positions: self.positions[..n].to_vec(),
        }
    }
}

/// All pedestrians present at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct CrowdFrame {
    pub time: f64,
    pub states: BTreeMap<PedId, PedestrianState>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate observation for pedestrian {ped} at frame {frame}")]
    DuplicateObservation { frame: i64, ped: PedId },
    #[error("file contains no observations")]
    EmptyFile,
    #[error("fps must be positive, got {0}")]
    InvalidFps(f64),
    #[error("timestep must be positive, got {0}")]
    InvalidTimestep(f64),
    #[error(
        "pedestrian {ped} implies speed {speed:.2} m/s between consecutive samples (max {max})"
    )]
    SpeedImplausible { ped: PedId, speed: f64, max: f64 },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Parse trajectory TSV content. Never panics on malformed input.
pub fn parse_trajectories(data: &[u8], fps: f64) -> Result<RawTrajectoryFile, DatasetError> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(DatasetError::InvalidFps(fps));
    }
    let text = std::str::from_utf8(data).map_err(|e| DatasetError::Parse {
        line: 0,
        msg: format!("invalid utf-8: {e}"),
    })?;
    let mut rows = Vec::new();
    let mut seen: BTreeSet<(i64, PedId)> = BTreeSet::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(DatasetError::Parse {
                line: line_no,
                msg: format!("expected 4 tab-separated fields, got {}", fields.len()),
            });
        }
        let frame: i64 = fields[0].parse().map_err(|_| DatasetError::Parse {
            line: line_no,
            msg: format!("bad frame id {:?}", fields[0]),
        })?;
        let ped: i64 = fields[1].parse().map_err(|_| DatasetError::Parse {
            line: line_no,
            msg: format!("bad pedestrian id {:?}", fields[1]),
        })?;
        let ped = PedId(ped);
        let x: f64 = fields[2].parse().map_err(|_| DatasetError::Parse {
            line: line_no,
            msg: format!("bad x coordinate {:?}", fields[2]),
        })?;
        let y: f64 = fields[3].parse().map_err(|_| DatasetError::Parse {
            line: line_no,
            msg: format!("bad y coordinate {:?}", fields[3]),
        })?;
        if !(x.is_finite() && y.is_finite()) {
            return Err(DatasetError::Parse {
                line: line_no,
                msg: "non-finite coordinate".to_string(),
            });
        }
        if !seen.insert((frame, ped)) {
            return Err(DatasetError::DuplicateObservation { frame, ped });
        }
        rows.push(Observation { frame, ped, x, y });
    }
    if rows.is_empty() {
        return Err(DatasetError::EmptyFile);
    }
    Ok(RawTrajectoryFile { rows, fps })
}

pub fn load_trajectories(path: &Path, fps: f64) -> Result<RawTrajectoryFile, DatasetError> {
    let data = std::fs::read(path)?;
    parse_trajectories(&data, fps)
}

/// Serialize observations back to the TSV format, sorted by (frame, ped).
pub fn write_trajectories(raw: &RawTrajectoryFile) -> String {
    let mut rows = raw.rows.clone();
    rows.sort_by_key(|r| (r.frame, r.ped));
    let mut out = String::from("# frame_id\tped_id\tx\ty\n");
    for r in &rows {
        out.push_str(&format!("{}\t{}\t{:?}\t{:?}\n", r.frame, r.ped, r.x, r.y));
    }
    out
}

/// Rebuild a raw file from uniformly-sampled tracks at `fps = 1/dt`, with
/// frame ids counted from the earliest track start. Lossless for tracks that
/// share one grid.
pub fn raw_from_tracks(tracks: &[Track]) -> Option<RawTrajectoryFile> {
    let dt = tracks.first()?.dt;
    let t_min = tracks.iter().map(|t| t.t0).fold(f64::INFINITY, f64::min);
    let mut rows = Vec::new();
    for tr in tracks {
        for (i, p) in tr.positions.iter().enumerate() {
            let frame = ((tr.time_at(i) - t_min) / dt).round() as i64;
            rows.push(Observation {
                frame,
                ped: tr.ped,
                x: p.x,
                y: p.y,
            });
        }
    }
    Some(RawTrajectoryFile {
        rows,
        fps: 1.0 / dt,
    })
}

/// Result of [`resample`]: usable tracks plus the pedestrians that had to be
/// dropped for having fewer than two usable samples.
#[derive(Debug, Clone)]
pub struct ResampleOutcome {
    pub tracks: Vec<Track>,
    pub dropped: Vec<PedId>,
}

/// Linearly interpolate every pedestrian onto a uniform grid of spacing `dt`.
///
/// The grid is anchored at the earliest observation time in the file, so all
/// returned tracks share one timeline. Each track spans only its pedestrian's
/// observed interval. Pedestrians with fewer than two observations (or whose
/// interval contains fewer than two grid points) are dropped and reported.
pub fn resample(raw: &RawTrajectoryFile, dt: f64) -> Result<ResampleOutcome, DatasetError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DatasetError::InvalidTimestep(dt));
    }
    let mut per_ped: BTreeMap<PedId, Vec<(f64, Vec2)>> = BTreeMap::new();
    for r in &raw.rows {
        per_ped
            .entry(r.ped)
            .or_default()
            .push((r.frame as f64 / raw.fps, Vec2::new(r.x, r.y)));
    }
    let t_min = raw
        .rows
        .iter()
        .map(|r| r.frame as f64 / raw.fps)
        .fold(f64::INFINITY, f64::min);

    let mut tracks = Vec::new();
    let mut dropped = Vec::new();
    for (ped, mut obs) in per_ped {
        if obs.len() < 2 {
            dropped.push(ped);
            continue;
        }
        obs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let t_first = obs[0].0;
        let t_last = obs[obs.len() - 1].0;
        let k0 = ((t_first - t_min) / dt - 1e-9).ceil().max(0.0) as i64;
        let k1 = ((t_last - t_min) / dt + 1e-9).floor() as i64;
        if k1 - k0 < 1 {
            dropped.push(ped);
            continue;
        }
        let mut positions = Vec::with_capacity((k1 - k0 + 1) as usize);
        let mut j = 0usize;
        for k in k0..=k1 {
            let t = t_min + k as f64 * dt;
            while j + 2 < obs.len() && obs[j + 1].0 < t {
                j += 1;
            }
            let (ta, pa) = obs[j];
            let (tb, pb) = obs[j + 1];
            let frac = if tb > ta {
                ((t - ta) / (tb - ta)).clamp(0.0, 1.0)
            } else {
                0.0
            };
            positions.push(pa + (pb - pa) * frac);
        }
        let track = Track {
            ped,
            t0: t_min + k0 as f64 * dt,
            dt,
            positions,
        };
        for w in track.positions.windows(2) {
            let speed = (w[1] - w[0]).norm() / dt;
            if speed > MAX_SPEED {
                return Err(DatasetError::SpeedImplausible {
                    ped,
                    speed,
                    max: MAX_SPEED,
                });
            }
        }
        tracks.push(track);
    }
    Ok(ResampleOutcome { tracks, dropped })
}

/// Assemble per-timestep crowd frames from tracks sharing one grid.
///
/// Velocities are central finite differences (one-sided at the ends of each
/// pedestrian's presence); the preferred velocity starts out equal to the
/// current one and is refined later by estimation.
pub fn frames(tracks: &[Track], dt: f64) -> Vec<CrowdFrame> {
    if tracks.is_empty() {
        return Vec::new();
    }
    let t_min = tracks.iter().map(|t| t.t0).fold(f64::INFINITY, f64::min);
    let t_max = tracks
        .iter()
        .map(|t| t.end_time())
        .fold(f64::NEG_INFINITY, f64::max);
    let n = ((t_max - t_min) / dt + 1e-9).floor() as usize + 1;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let t = t_min + k as f64 * dt;
        let mut states = BTreeMap::new();
        for tr in tracks {
            let rel = (t - tr.t0) / dt;
            let i = rel.round();
            if i < -0.5 || (i as usize) >= tr.positions.len() || (rel - i).abs() > 1e-6 {
                continue;
            }
            let i = i as usize;
            let v = tr.velocity_at(i);
            states.insert(
                tr.ped,
                PedestrianState {
                    p: tr.positions[i],
                    v_c: v,
                    v_pref: v,
                },
            );
        }
        out.push(CrowdFrame { time: t, states });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tsv(body: &str) -> Vec<u8> {
        body.as_bytes().to_vec()
    }

    #[test]
    fn minimal_well_formed_input() {
        let raw = parse_trajectories(&tsv("0\t1\t0.0\t0.0\n1\t1\t0.4\t0.0\n"), 2.5).unwrap();
        assert_eq!(raw.rows.len(), 2);
        let peds: BTreeSet<PedId> = raw.rows.iter().map(|r| r.ped).collect();
        assert_eq!(peds.len(), 1);
    }

    #[test]
    fn duplicate_observation_rejected() {
        let err = parse_trajectories(&tsv("0\t1\t0.0\t0.0\n0\t1\t1.0\t1.0\n"), 2.5).unwrap_err();
        assert!(matches!(err, DatasetError::DuplicateObservation { .. }));
    }

    #[test]
    fn empty_and_header_only_files() {
        assert!(matches!(
            parse_trajectories(b"", 2.5),
            Err(DatasetError::EmptyFile)
        ));
        assert!(matches!(
            parse_trajectories(b"# frame\tped\tx\ty\n", 2.5),
            Err(DatasetError::EmptyFile)
        ));
    }

    #[test]
    fn malformed_rows_rejected() {
        assert!(matches!(
            parse_trajectories(&tsv("0\t1\tnope\t0.0\n"), 2.5),
            Err(DatasetError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_trajectories(&tsv("0\t1\t0.0\n"), 2.5),
            Err(DatasetError::Parse { .. })
        ));
        assert!(matches!(
            parse_trajectories(&tsv("0\t1\tinf\t0.0\n"), 2.5),
            Err(DatasetError::Parse { .. })
        ));
    }

    #[test]
    fn invalid_fps_rejected() {
        assert!(matches!(
            parse_trajectories(&tsv("0\t1\t0\t0\n"), 0.0),
            Err(DatasetError::InvalidFps(_))
        ));
    }

    #[test]
    fn write_then_read_round_trip() {
        let raw = RawTrajectoryFile {
            rows: vec![
                Observation {
                    frame: 0,
                    ped: PedId(1),
                    x: 0.125,
                    y: -3.5,
                },
                Observation {
                    frame: 1,
                    ped: PedId(1),
                    x: 0.3333333333333333,
                    y: 2.0,
                },
                Observation {
                    frame: 0,
                    ped: PedId(2),
                    x: 1e-17,
                    y: 9.75,
                },
            ],
            fps: 10.0,
        };
        let text = write_trajectories(&raw);
        let back = parse_trajectories(text.as_bytes(), 10.0).unwrap();
        assert_eq!(back.rows, {
            let mut rows = raw.rows.clone();
            rows.sort_by_key(|r| (r.frame, r.ped));
            rows
        });
    }

    #[test]
    fn resample_midpoint() {
        let raw = parse_trajectories(&tsv("0\t1\t0.0\t0.0\n1\t1\t1.0\t0.0\n"), 1.0).unwrap();
        let out = resample(&raw, 0.5).unwrap();
        assert_eq!(out.tracks.len(), 1);
        let t = &out.tracks[0];
        assert_eq!(t.positions.len(), 3);
        assert!((t.positions[1].x - 0.5).abs() < 1e-12);
        assert!((t.positions[2].x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resample_identity_when_dt_matches() {
        let raw =
            parse_trajectories(&tsv("0\t1\t0.0\t0.0\n1\t1\t0.3\t0.1\n2\t1\t0.5\t0.3\n"), 2.0)
                .unwrap();
        let out = resample(&raw, 0.5).unwrap();
        let t = &out.tracks[0];
        assert_eq!(t.positions.len(), 3);
        assert!((t.positions[1].x - 0.3).abs() < 1e-12);
        assert!((t.positions[1].y - 0.1).abs() < 1e-12);
    }

    #[test]
    fn resample_sinusoid_close_to_analytic() {
        // Source samples at 10 Hz, resample to 0.1 s, compare on the grid
        // against the closed form.
        let fps = 10.0;
        let mut rows = Vec::new();
        for f in 0..50 {
            let t = f as f64 / fps;
            rows.push(Observation {
                frame: f,
                ped: PedId(1),
                x: t,
                y: (t * 2.0).sin(),
            });
        }
        let raw = RawTrajectoryFile { rows, fps };
        let out = resample(&raw, 0.1).unwrap();
        let mut max_dev: f64 = 0.0;
        let tr = &out.tracks[0];
        for (i, p) in tr.positions.iter().enumerate() {
            let t = tr.time_at(i);
            let truth = Vec2::new(t, (t * 2.0).sin());
            max_dev = max_dev.max(truth.dist(*p));
        }
        assert!(max_dev < 0.02, "max deviation {max_dev}");
    }

    #[test]
    fn short_tracks_dropped_not_fatal() {
        let raw = parse_trajectories(
            &tsv("0\t1\t0.0\t0.0\n1\t1\t0.2\t0.0\n0\t2\t5.0\t5.0\n"),
            1.0,
        )
        .unwrap();
        let out = resample(&raw, 0.5).unwrap();
        assert_eq!(out.tracks.len(), 1);
        assert_eq!(out.dropped, vec![PedId(2)]);
    }

    #[test]
    fn implausible_speed_rejected() {
        let raw = parse_trajectories(&tsv("0\t1\t0.0\t0.0\n1\t1\t10.0\t0.0\n"), 1.0).unwrap();
        let err = resample(&raw, 0.5).unwrap_err();
        assert!(matches!(err, DatasetError::SpeedImplausible { .. }));
    }

    #[test]
    fn resample_is_idempotent() {
        let raw = parse_trajectories(
            &tsv("0\t1\t0.0\t0.0\n1\t1\t0.9\t0.2\n2\t1\t1.5\t0.9\n3\t1\t2.0\t1.4\n"),
            2.5,
        )
        .unwrap();
        let once = resample(&raw, 0.1).unwrap().tracks;
        let again = resample(&raw_from_tracks(&once).unwrap(), 0.1).unwrap().tracks;
        assert_eq!(once.len(), again.len());
        for (a, b) in once.iter().zip(&again) {
            assert_eq!(a.positions.len(), b.positions.len());
            for (pa, pb) in a.positions.iter().zip(&b.positions) {
                assert!(pa.dist(*pb) < 1e-12);
            }
        }
    }

    #[test]
    fn frames_static_pedestrian_zero_velocity() {
        let tr = Track {
            ped: PedId(1),
            t0: 0.0,
            dt: 0.1,
            positions: vec![Vec2::new(1.0, 2.0); 10],
        };
        for f in frames(&[tr], 0.1) {
            let s = f.states[&PedId(1)];
            assert_eq!(s.v_c, Vec2::ZERO);
        }
    }

    #[test]
    fn frames_constant_velocity_exact() {
        let positions: Vec<Vec2> = (0..20).map(|i| Vec2::new(i as f64 * 0.1, 0.0)).collect();
        let tr = Track {
            ped: PedId(3),
            t0: 0.0,
            dt: 0.1,
            positions,
        };
        let fs = frames(&[tr], 0.1);
        for f in &fs[1..fs.len() - 1] {
            let v = f.states[&PedId(3)].v_c;
            assert!((v.x - 1.0).abs() < 1e-9, "v={v:?}");
            assert!(v.y.abs() < 1e-9);
        }
    }

    #[test]
    fn frames_disjoint_tracks_never_coexist() {
        let a = Track {
            ped: PedId(1),
            t0: 0.0,
            dt: 0.1,
            positions: vec![Vec2::ZERO; 5],
        };
        let b = Track {
            ped: PedId(2),
            t0: 1.0,
            dt: 0.1,
            positions: vec![Vec2::new(1.0, 1.0); 5],
        };
        for f in frames(&[a, b], 0.1) {
            assert!(
                !(f.states.contains_key(&PedId(1)) && f.states.contains_key(&PedId(2))),
                "both present at t={}",
                f.time
            );
        }
    }

    #[test]
    fn frames_sample_count_preserved() {
        let a = Track {
            ped: PedId(1),
            t0: 0.0,
            dt: 0.1,
            positions: vec![Vec2::ZERO; 7],
        };
        let b = Track {
            ped: PedId(2),
            t0: 0.3,
            dt: 0.1,
            positions: vec![Vec2::new(1.0, 1.0); 4],
        };
        let total: usize = frames(&[a.clone(), b.clone()], 0.1)
            .iter()
            .map(|f| f.states.len())
            .sum();
        assert_eq!(total, a.positions.len() + b.positions.len());
    }
}
