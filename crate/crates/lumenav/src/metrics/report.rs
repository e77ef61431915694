//! Geometry-aware trajectory metrics: D_geo, S_nav, and the jerk index.

use serde::{Deserialize, Serialize};

use super::log::TrajectoryLog;
use crate::error::MetricsError;
use crate::geometry::{TubeEnvironment, Vec3};

/// How the path-length term of S_nav is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathPenaltyMode {
    /// Penalize only path length in excess of the centerline distance
    /// actually covered: max(0, D_p - L_c * completion).
    #[default]
    Excess,
    /// The printed form: D_p / L_c with the raw path length.
    Literal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub d_geo: f64,
    pub s_nav: f64,
    pub jerk_index: f64,
    pub n_collisions: usize,
    pub n_steps: usize,
    pub path_length_mm: f64,
    pub centerline_length_mm: f64,
    pub completion_fraction: f64,
}

/// Mean geometry-aware lumen distance (Table-style D_geo): the 2-D
/// centering error scaled by the 3-D centerline deviation factor.
pub fn d_geo(log: &TrajectoryLog, env: &TubeEnvironment) -> Result<f64, MetricsError> {
    if log.steps.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    let (w, h) = (log.header.width as f64, log.header.height as f64);
    let d_max = ((w * 0.5).powi(2) + (h * 0.5).powi(2)).sqrt();
    let mut acc = 0.0;
    for s in &log.steps {
        let dx = s.u * w * 0.5;
        let dy = s.v * h * 0.5;
        let d_i = (dx * dx + dy * dy).sqrt();
        let p = Vec3::new(s.tip_position[0], s.tip_position[1], s.tip_position[2]);
        let nearest = env.nearest_on_centerline(p);
        acc += (d_i / d_max) * (1.0 + 0.5 * nearest.distance / nearest.radius_at);
    }
    Ok(acc / log.steps.len() as f64)
}

/// Navigation safety score: 1 - (0.6 * collision rate + 0.4 * path
/// penalty).
pub fn s_nav(
    log: &TrajectoryLog,
    env: &TubeEnvironment,
    mode: PathPenaltyMode,
) -> Result<f64, MetricsError> {
    if log.steps.is_empty() {
        return Err(MetricsError::EmptyLog);
    }
    let n_steps = log.steps.len();
    let n_col = log.steps.iter().filter(|s| s.collision).count();
    let l_c = env.centerline.total_length();
    let path = path_length(log);
    let completion = completion_fraction(log, env);
    let path_term = match mode {
        PathPenaltyMode::Excess => (path - l_c * completion).max(0.0) / l_c,
        PathPenaltyMode::Literal => path / l_c,
    };
    Ok(1.0 - (0.6 * n_col as f64 / n_steps as f64 + 0.4 * path_term))
}

/// Polyline length of the tip positions, mm.
pub fn path_length(log: &TrajectoryLog) -> f64 {
    log.steps
        .windows(2)
        .map(|w| {
            let a = w[0].tip_position;
            let b = w[1].tip_position;
            ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2)).sqrt()
        })
        .sum()
}

/// Largest centerline arclength reached, over the total length.
pub fn completion_fraction(log: &TrajectoryLog, env: &TubeEnvironment) -> f64 {
    let mut max_s: f64 = 0.0;
    for s in &log.steps {
        let p = Vec3::new(s.tip_position[0], s.tip_position[1], s.tip_position[2]);
        max_s = max_s.max(env.nearest_on_centerline(p).s_star);
    }
    (max_s / env.centerline.total_length()).clamp(0.0, 1.0)
}

/// Mean magnitude of the third finite difference of tip position over the
/// uniform step grid: J = (1/T) * sum ||d^3x/dt^3|| dt. Exact for cubic
/// paths; zero for linear and quadratic ones.
pub fn jerk_index(log: &TrajectoryLog) -> Result<f64, MetricsError> {
    let n = log.steps.len();
    if n < 4 {
        return Err(MetricsError::TooFewSamples(n));
    }
    let dt = log.header.step_period_s;
    let dt3 = dt * dt * dt;
    let p = |i: usize| {
        let t = log.steps[i].tip_position;
        Vec3::new(t[0], t[1], t[2])
    };
    let mut acc = 0.0;
    for k in 0..n - 3 {
        let j = (p(k + 3) - p(k + 2) * 3.0 + p(k + 1) * 3.0 - p(k)) / dt3;
        acc += j.norm();
    }
    Ok(acc / (n - 3) as f64)
}

/// All metrics for one episode log.
pub fn evaluate(
    log: &TrajectoryLog,
    env: &TubeEnvironment,
    mode: PathPenaltyMode,
) -> Result<MetricsReport, MetricsError> {
    Ok(MetricsReport {
        d_geo: d_geo(log, env)?,
        s_nav: s_nav(log, env, mode)?,
        jerk_index: jerk_index(log)?,
        n_collisions: log.steps.iter().filter(|s| s.collision).count(),
        n_steps: log.steps.len(),
        path_length_mm: path_length(log),
        centerline_length_mm: env.centerline.total_length(),
        completion_fraction: completion_fraction(log, env),
    })
}

/// Mean and standard deviation of each metric over several episodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub episodes: usize,
    pub d_geo_mean: f64,
    pub d_geo_std: f64,
    pub s_nav_mean: f64,
    pub s_nav_std: f64,
    pub jerk_mean: f64,
    pub jerk_std: f64,
    pub completion_mean: f64,
    pub completion_std: f64,
    pub collision_rate_mean: f64,
}

pub fn aggregate(reports: &[MetricsReport]) -> Result<MetricsSummary, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::NoLogs);
    }
    let n = reports.len() as f64;
    let stat = |f: &dyn Fn(&MetricsReport) -> f64| {
        let mean = reports.iter().map(f).sum::<f64>() / n;
        let var = reports.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    };
    let (d_geo_mean, d_geo_std) = stat(&|r| r.d_geo);
    let (s_nav_mean, s_nav_std) = stat(&|r| r.s_nav);
    let (jerk_mean, jerk_std) = stat(&|r| r.jerk_index);
    let (completion_mean, completion_std) = stat(&|r| r.completion_fraction);
    let (collision_rate_mean, _) = stat(&|r| r.n_collisions as f64 / r.n_steps.max(1) as f64);
    Ok(MetricsSummary {
        episodes: reports.len(),
        d_geo_mean,
        d_geo_std,
        s_nav_mean,
        s_nav_std,
        jerk_mean,
        jerk_std,
        completion_mean,
        completion_std,
        collision_rate_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::RewardBreakdown;
    use crate::geometry::{CenterlineSpline, ProfileTag, TubeEnvironmentFile};
    use crate::metrics::{LogHeader, StepRecord};

    fn straight_env() -> TubeEnvironment {
        let pts: Vec<crate::geometry::Vec3> = (0..6)
            .map(|i| crate::geometry::Vec3::new(0.0, 0.0, 50.0 * i as f64))
            .collect();
        let spline = CenterlineSpline::build(&pts, &[20.0; 6]).unwrap();
        TubeEnvironment::new(spline, 0, ProfileTag::Simple, 300.0).unwrap()
    }

    fn zero_reward() -> RewardBreakdown {
        RewardBreakdown {
            r_dis: 0.0,
            r_dir: 0.0,
            r_succ: 0.0,
            r_step: 0.0,
            r_penalty: 0.0,
            total: 0.0,
            u_t: 0.0,
            v_t: 0.0,
        }
    }

    fn make_log(positions: &[[f64; 3]], us: &[f64], collisions: &[bool], dt: f64) -> TrajectoryLog {
        let env = straight_env();
        let steps = positions
            .iter()
            .enumerate()
            .map(|(i, p)| StepRecord {
                t: (i + 1) as f64 * dt,
                tip_position: *p,
                quaternion_wxyz: [1.0, 0.0, 0.0, 0.0],
                action: [0.0, 0.0, 1.0],
                reward: zero_reward(),
                u: us.get(i).copied().unwrap_or(0.0),
                v: 0.0,
                rho: 0.0,
                clearance: 19.0,
                gated: true,
                collision: collisions.get(i).copied().unwrap_or(false),
                done_reason: None,
            })
            .collect();
        TrajectoryLog {
            header: LogHeader {
                width: 64,
                height: 64,
                step_period_s: dt,
                seed: 0,
                config_hash: String::new(),
                env: env.to_file(),
            },
            steps,
        }
    }

    #[test]
    fn d_geo_zero_when_centered_on_centerline() {
        let env = straight_env();
        let positions: Vec<[f64; 3]> = (0..20).map(|i| [0.0, 0.0, 3.0 + i as f64]).collect();
        let log = make_log(&positions, &vec![0.0; 20], &vec![false; 20], 1.0);
        assert!(d_geo(&log, &env).unwrap().abs() < 1e-12);
    }

    #[test]
    fn d_geo_single_step_values() {
        let env = straight_env();
        // d = d_max, tip on centerline -> exactly 1.0.
        let log = make_log(&[[0.0, 0.0, 50.0]], &[2.0_f64.sqrt()], &[false], 1.0);
        // u  = sqrt(2) => dx = sqrt(2) * W/2, dy = 0 => d_i = d_max only if
        // v were matched; use u = sqrt(2) so that d_i = sqrt(2)*W/2 = d_max
        // for the square camera.
        assert!((d_geo(&log, &env).unwrap() - 1.0).abs() < 1e-9);
        // d = d_max/2, deviation = r_i -> 0.5 * 1.5 = 0.75.
        let log = make_log(&[[20.0, 0.0, 50.0]], &[2.0_f64.sqrt() / 2.0], &[false], 1.0);
        let got = d_geo(&log, &env).unwrap();
        assert!((got - 0.75).abs() < 1e-3, "{got}");
    }

    #[test]
    fn s_nav_perfect_run_is_one() {
        let env = straight_env();
        let positions: Vec<[f64; 3]> = (0..100).map(|i| [0.0, 0.0, 2.0 + i as f64]).collect();
        let log = make_log(&positions, &vec![0.0; 100], &vec![false; 100], 1.0);
        let s = s_nav(&log, &env, PathPenaltyMode::Excess).unwrap();
        assert!((s - 1.0).abs() < 1e-12, "{s}");
    }

    #[test]
    fn s_nav_all_collisions_is_point_four() {
        let env = straight_env();
        let positions: Vec<[f64; 3]> = (0..50).map(|i| [0.0, 0.0, 2.0 + i as f64]).collect();
        let log = make_log(&positions, &vec![0.0; 50], &vec![true; 50], 1.0);
        let s = s_nav(&log, &env, PathPenaltyMode::Excess).unwrap();
        assert!((s - 0.4).abs() < 1e-12, "{s}");
    }

    #[test]
    fn s_nav_monotone_in_collisions() {
        let env = straight_env();
        let positions: Vec<[f64; 3]> = (0..50).map(|i| [0.0, 0.0, 2.0 + i as f64]).collect();
        let mut prev = f64::INFINITY;
        for k in [0usize, 5, 20, 50] {
            let mut cols = vec![false; 50];
            cols.iter_mut().take(k).for_each(|c| *c = true);
            let log = make_log(&positions, &vec![0.0; 50], &cols, 1.0);
            let s = s_nav(&log, &env, PathPenaltyMode::Excess).unwrap();
            assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn literal_mode_counts_full_path() {
        let env = straight_env();
        let positions: Vec<[f64; 3]> = (0..100).map(|i| [0.0, 0.0, 2.0 + i as f64]).collect();
        let log = make_log(&positions, &vec![0.0; 100], &vec![false; 100], 1.0);
        let lit = s_nav(&log, &env, PathPenaltyMode::Literal).unwrap();
        let exc = s_nav(&log, &env, PathPenaltyMode::Excess).unwrap();
        assert!(lit < exc);
        let expected = 1.0 - 0.4 * 99.0 / env.centerline.total_length();
        assert!((lit - expected).abs() < 1e-9);
    }

    #[test]
    fn jerk_zero_for_linear_and_quadratic() {
        let positions: Vec<[f64; 3]> = (0..30).map(|i| [0.0, 0.0, 2.0 + 1.5 * i as f64]).collect();
        let log = make_log(&positions, &vec![0.0; 30], &vec![false; 30], 0.5);
        assert!(jerk_index(&log).unwrap().abs() < 1e-9);
        let positions: Vec<[f64; 3]> = (0..30)
            .map(|i| {
                let t = i as f64 * 0.5;
                [0.0, 0.1 * t * t, 2.0 + t]
            })
            .collect();
        let log = make_log(&positions, &vec![0.0; 30], &vec![false; 30], 0.5);
        assert!(jerk_index(&log).unwrap().abs() < 1e-9);
    }

    #[test]
    fn jerk_exact_for_cubic() {
        // x(t) = t^3 along one axis, dt = 0.1: third derivative = 6.
        let positions: Vec<[f64; 3]> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.1;
                [t * t * t, 0.0, 10.0]
            })
            .collect();
        let log = make_log(&positions, &vec![0.0; 50], &vec![false; 50], 0.1);
        let j = jerk_index(&log).unwrap();
        assert!((j - 6.0).abs() < 1e-6, "{j}");
    }

    #[test]
    fn jerk_needs_four_samples() {
        let log = make_log(&[[0.0, 0.0, 1.0]; 3], &[0.0; 3], &[false; 3], 1.0);
        assert!(matches!(
            jerk_index(&log),
            Err(MetricsError::TooFewSamples(3))
        ));
    }

    #[test]
    fn jerk_scales_linearly_with_positions() {
        let positions: Vec<[f64; 3]> = (0..40)
            .map(|i| {
                let t = i as f64 * 0.2;
                [(1.3 * t).sin() * 5.0, (0.9 * t).cos() * 3.0, t * 2.0]
            })
            .collect();
        let log = make_log(&positions, &vec![0.0; 40], &vec![false; 40], 0.2);
        let j1 = jerk_index(&log).unwrap();
        let scaled: Vec<[f64; 3]> = positions
            .iter()
            .map(|p| [p[0] * 3.0, p[1] * 3.0, p[2] * 3.0])
            .collect();
        let log3 = make_log(&scaled, &vec![0.0; 40], &vec![false; 40], 0.2);
        let j3 = jerk_index(&log3).unwrap();
        assert!((j3 - 3.0 * j1).abs() < 1e-9 * j1.max(1.0));
    }

    #[test]
    fn aggregate_identical_logs_has_zero_std() {
        let env = straight_env();
        let positions: Vec<[f64; 3]> = (0..30).map(|i| [0.0, 0.0, 2.0 + i as f64]).collect();
        let log = make_log(&positions, &vec![0.1; 30], &vec![false; 30], 1.0);
        let r = evaluate(&log, &env, PathPenaltyMode::Excess).unwrap();
        let summary = aggregate(&[r.clone(), r.clone(), r]).unwrap();
        assert_eq!(summary.episodes, 3);
        assert!(summary.d_geo_std.abs() < 1e-15);
        assert!(summary.jerk_std.abs() < 1e-15);
    }

    #[test]
    fn aggregate_empty_errors() {
        assert!(matches!(aggregate(&[]), Err(MetricsError::NoLogs)));
    }

    #[test]
    fn metrics_rigid_motion_invariant() {
        use nalgebra::UnitQuaternion;
        let env = straight_env();
        let positions: Vec<[f64; 3]> = (0..40)
            .map(|i| {
                let t = i as f64;
                [(0.2 * t).sin() * 4.0, (0.13 * t).cos() * 3.0, 2.0 + t]
            })
            .collect();
        let us: Vec<f64> = (0..40).map(|i| (i as f64 * 0.3).sin() * 0.5).collect();
        let log = make_log(&positions, &us, &vec![false; 40], 1.0);
        let r1 = evaluate(&log, &env, PathPenaltyMode::Excess).unwrap();

        // Rigidly transform environment control points and log positions.
        let q = UnitQuaternion::from_euler_angles(0.4, -0.8, 1.2);
        let shift = crate::geometry::Vec3::new(100.0, -50.0, 30.0);
        let moved_pts: Vec<crate::geometry::Vec3> = (0..6)
            .map(|i| q * crate::geometry::Vec3::new(0.0, 0.0, 50.0 * i as f64) + shift)
            .collect();
        let spline = CenterlineSpline::build(&moved_pts, &[20.0; 6]).unwrap();
        let env2 = TubeEnvironment::new(spline, 0, ProfileTag::Simple, 300.0).unwrap();
        let moved_positions: Vec<[f64; 3]> = positions
            .iter()
            .map(|p| {
                let v = q * crate::geometry::Vec3::new(p[0], p[1], p[2]) + shift;
                [v.x, v.y, v.z]
            })
            .collect();
        let mut log2 = make_log(&moved_positions, &us, &vec![false; 40], 1.0);
        log2.header.env = TubeEnvironmentFile {
            control_points: moved_pts.iter().map(|p| [p.x, p.y, p.z]).collect(),
            radii: vec![20.0; 6],
            profile_tag: ProfileTag::Simple,
            texture_seed: 0,
            far_clip: 300.0,
        };
        let r2 = evaluate(&log2, &env2, PathPenaltyMode::Excess).unwrap();
        assert!((r1.d_geo - r2.d_geo).abs() < 1e-9, "{} {}", r1.d_geo, r2.d_geo);
        assert!((r1.jerk_index - r2.jerk_index).abs() < 1e-9);
        assert!((r1.s_nav - r2.s_nav).abs() < 1e-9);
    }
}
