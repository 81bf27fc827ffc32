use crowdnav::estimation::EstimationConfig;
use crowdnav::geom::Vec2;
use crowdnav::navigation::*;
use crowdnav::synthetic;

fn scen(seed: u64, social: bool) -> Scenario {
    let setup = synthetic::counterflow_stream(4, 5, 0.9, 4.0, seed);
    let frames = setup.rollout(0.1, 300).unwrap();
    let tracks = synthetic::tracks_from_frames(&frames, 0.1);
    Scenario {
        source: PedSource::Replay(tracks),
        robot: RobotParams {
            start: Vec2::new(0.0, -9.0),
            goal: Vec2::new(0.0, 9.0),
            v_max: 1.5,
            omega_max: 1.5,
            radius: 0.3,
        },
        obstacles: vec![],
        social_mode: social,
        seed,
        timeout: 60.0,
    }
}

#[test]
fn tune_crossing() {
    let cfg = NavConfig {
        estimation: EstimationConfig {
            ensemble_size: 30,
            em_iterations: 1,
            ..Default::default()
        },
        ..Default::default()
    };
    for seed in [1u64, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12] {
        let (on, _) = run_navigation(&scen(seed, true), &cfg).unwrap();
        let (off, _) = run_navigation(&scen(seed, false), &cfg).unwrap();
        let overhead = (on.travel_time - off.travel_time) / off.travel_time * 100.0;
        println!(
            "seed {seed}: on intr={} t={:.1} r={} e={} minc={:.2} | off intr={} t={:.1} r={} | ovh={:.0}%",
            on.personal_intrusions, on.travel_time, on.reached_goal, on.emergency_steps, on.min_clearance,
            off.personal_intrusions, off.travel_time, off.reached_goal, overhead,
        );
    }
}
