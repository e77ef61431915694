//! Runnable versions of every code snippet shown in the book (book/src).
//! Chapters include these by anchor, so `cargo test` keeps the book and
//! the library in sync.

use std::sync::Arc;

use lumenav::env::{Action, Episode, EpisodeConfig};
use lumenav::geometry::{generate_environment, CenterlineSpline, ProfileTag, TubeEnvironment, Vec3};
use lumenav::metrics::{evaluate, scripted_oracle, PathPenaltyMode};
use lumenav::perception::{
    degrade_depth, extract_navigation_point, DegradationProfile, LevelOrdering,
};
use lumenav::render::{render_depth, CameraIntrinsics, Pose, RenderOptions};

#[test]
fn build_a_tube() {
    // ANCHOR: build_a_tube
    // Four control points and per-point lumen radii define a tube; the
    // centerline is an interpolating C1 spline, all units millimetres.
    let points: Vec<Vec3> = (0..4).map(|i| Vec3::new(0.0, 0.0, 50.0 * i as f64)).collect();
    let spline = CenterlineSpline::build(&points, &[20.0, 19.0, 18.0, 17.0]).unwrap();
    let env = TubeEnvironment::new(spline, 7, ProfileTag::Simple, 300.0).unwrap();

    assert!((env.centerline.total_length() - 150.0).abs() < 0.1);
    // Positive clearance inside the lumen, zero at the wall.
    assert!(env.wall_distance(Vec3::new(0.0, 0.0, 75.0)) > 17.0);
    // ANCHOR_END: build_a_tube
}

#[test]
fn generate_and_query() {
    // ANCHOR: generate_and_query
    // Procedural environments are pure functions of (profile, seed).
    let env = generate_environment(ProfileTag::Simple, 42).unwrap();
    let same = generate_environment(ProfileTag::Simple, 42).unwrap();
    assert_eq!(
        env.centerline.control_points(),
        same.centerline.control_points()
    );

    // Nearest-point queries drive collision checks and metrics.
    let probe = env.centerline.point_at(100.0).unwrap() + Vec3::new(2.0, 0.0, 0.0);
    let nearest = env.nearest_on_centerline(probe);
    assert!(nearest.distance <= 2.0 + 1e-6);
    // ANCHOR_END: generate_and_query
}

#[test]
fn render_a_depth_map() {
    // ANCHOR: render_a_depth_map
    let env = generate_environment(ProfileTag::Simple, 42).unwrap();
    let start = env.centerline.point_at(5.0).unwrap();
    let forward = env.centerline.tangent_at(5.0).unwrap();
    let pose = Pose::look_along(start, forward, Vec3::new(0.0, 1.0, 0.0));
    let cam = CameraIntrinsics::new(64, 64, 120.0, 300.0).unwrap();

    let depth = render_depth(&env, &pose, &cam, &RenderOptions::default()).unwrap();
    // Valid pixels carry range along the ray in millimetres.
    assert!(depth.valid_count() > 1000);
    for (_, _, d) in depth.valid_pixels() {
        assert!(d > 0.0 && d <= 300.0);
    }
    // ANCHOR_END: render_a_depth_map
}

#[test]
fn degrade_and_extract() {
    // ANCHOR: degrade_and_extract
    let env = generate_environment(ProfileTag::Simple, 42).unwrap();
    let pose = Pose::look_along(
        env.centerline.point_at(5.0).unwrap(),
        env.centerline.tangent_at(5.0).unwrap(),
        Vec3::new(0.0, 1.0, 0.0),
    );
    let cam = CameraIntrinsics::new(64, 64, 120.0, 300.0).unwrap();
    let gt = render_depth(&env, &pose, &cam, &RenderOptions::default()).unwrap();

    // The surrogate estimator: seeded noise, blur, and outlier patches.
    let profile = DegradationProfile {
        sigma_mult: 0.2,
        blur_radius_px: 0.8,
        dropout_rate: 0.04,
        outlier_scale: 10.0,
        ..DegradationProfile::zero_noise()
    };
    let estimated = degrade_depth(&gt, &profile, /*frame_seed=*/ 0, env.far_clip);

    // The navigation point: centroid of the largest connected component
    // of one depth-quantile band (here the default 8th of 20 levels).
    let target = extract_navigation_point(&estimated, 8, 20).unwrap();
    assert!(target.valid);
    assert!(target.t_x > 0.0 && target.t_x < 64.0);
    // ANCHOR_END: degrade_and_extract
}

#[test]
fn run_an_episode() {
    // ANCHOR: run_an_episode
    let env = Arc::new(generate_environment(ProfileTag::Simple, 42).unwrap());
    let config = EpisodeConfig {
        camera: CameraIntrinsics::new(48, 48, 120.0, 300.0).unwrap(),
        extraction_level: 2,
        extraction_levels: 5,
        extraction_ordering: LevelOrdering::FarFirst,
        horizon: 50,
        ..Default::default()
    };
    config.validate().unwrap();

    let profile = DegradationProfile::zero_noise();
    let (mut episode, first_obs) = Episode::reset(env, profile, config, 3).unwrap();
    assert!(first_obs.x_norm.abs() <= 1.0);

    let mut total_reward = 0.0;
    loop {
        // Steer toward the observed offset, always request forward motion.
        let obs = episode.current_observation();
        let action = Action::new(3.0 * obs.dx_norm, 3.0 * obs.dy_norm, 1.0);
        let out = episode.step(action).unwrap();
        total_reward += out.reward.total;
        // Eq. 4 as an exact identity on every step:
        let r = out.reward;
        assert_eq!(r.total, r.r_dis + r.r_dir + r.r_succ + r.r_step + r.r_penalty);
        if out.done {
            break;
        }
    }
    assert!(total_reward.is_finite());
    // ANCHOR_END: run_an_episode
}

#[test]
fn score_a_trajectory() {
    // ANCHOR: score_a_trajectory
    let env = Arc::new(generate_environment(ProfileTag::Simple, 42).unwrap());
    let config = EpisodeConfig {
        camera: CameraIntrinsics::new(48, 48, 120.0, 300.0).unwrap(),
        extraction_level: 2,
        extraction_levels: 5,
        extraction_ordering: LevelOrdering::FarFirst,
        horizon: 2500,
        ..Default::default()
    };
    // The privileged oracle reads the true centerline; its log is the
    // reference every controller is scored against.
    let log = scripted_oracle(
        env.clone(),
        DegradationProfile::zero_noise(),
        config,
        0,
        "book",
    )
    .unwrap();
    let report = evaluate(&log, &env, PathPenaltyMode::Excess).unwrap();
    assert_eq!(report.n_collisions, 0);
    assert!(report.completion_fraction > 0.97);
    assert!(report.s_nav > 0.95);
    // ANCHOR_END: score_a_trajectory
}
