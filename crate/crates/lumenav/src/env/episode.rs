//! The navigation MDP: gated tip kinematics, follow-the-leader body,
//! per-step perception, the five-term reward, termination, and logging.
//!
//! Rewards follow the MDP convention r_t = R(s_t, a_t): the offsets (u, v)
//! entering the reward are those of the observation the policy acted on,
//! and the gating test uses the same pre-step target.

use std::collections::VecDeque;
use std::sync::Arc;

use nalgebra::UnitQuaternion;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::action::Action;
use super::ftl::{ftl_body, ftl_body_with_tip, TipTrace};
use super::reward::{RewardBreakdown, RewardParams, RewardTerms};
use crate::error::EnvError;
use crate::geometry::{TubeEnvironment, Vec3};
use crate::metrics::{LogHeader, StepRecord, TrajectoryLog};
use crate::perception::{
    degrade_depth, encode_observation, extract_navigation_point_ordered, DegradationProfile,
    LevelOrdering, NavigationTarget, Observation, ObservationEncoding, DEFAULT_LEVEL,
    DEFAULT_N_LEVELS,
};
use crate::render::{render_depth, CameraIntrinsics, Pose, RenderOptions};
use crate::util::mix_seeds;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpisodeConfig {
    /// Maximum steps per episode.
    pub horizon: usize,
    /// Success tolerance on |u| and |v| (normalized units).
    pub tau: f64,
    /// Wall clearance below which a step counts as a collision, mm.
    pub clearance_min: f64,
    /// Angular step per unit command, degrees.
    pub yaw_pitch_scale_deg: f64,
    /// Axial translation per step when the gate is open, mm.
    pub forward_speed: f64,
    /// Gate: translate only when rho < gate_ratio.
    pub gate_ratio: f64,
    pub stability_window: usize,
    pub stability_count: usize,
    pub epsilon: f64,
    pub camera: CameraIntrinsics,
    pub texture: RenderOptions,
    /// Quantile level tracked as the navigation target.
    pub extraction_level: usize,
    pub extraction_levels: usize,
    pub extraction_ordering: LevelOrdering,
    pub encoding: ObservationEncoding,
    pub reward_terms: RewardTerms,
    /// Reset placement: lateral offset up to this fraction of the local
    /// radius, viewing axis within `reset_tilt_deg` of the tangent.
    pub reset_offset_frac: f64,
    pub reset_tilt_deg: f64,
    /// Episode ends after this many consecutive invalid targets.
    pub target_lost_limit: usize,
    /// Whether hitting the success condition ends the episode.
    pub success_terminates: bool,
    pub forward_mode: ForwardMode,
    /// Whether negative axial commands move the tip backwards
    /// (Commanded mode only).
    pub allow_backward: bool,
    pub terminate_on_collision: bool,
    /// Fraction of centerline arclength that counts as reaching the goal.
    pub goal_fraction: f64,
    /// Body segment spacing along the trace, mm.
    pub segment_spacing: f64,
    pub n_body_segments: usize,
    /// Seconds of robot time per step (1 mm/s at the default speed).
    pub step_period_s: f64,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            horizon: 3000,
            tau: 0.1,
            clearance_min: 1.0,
            yaw_pitch_scale_deg: 3.0,
            forward_speed: 1.0,
            gate_ratio: 0.35,
            stability_window: 10,
            stability_count: 5,
            epsilon: 1e-6,
            camera: CameraIntrinsics::default(),
            texture: RenderOptions::default(),
            extraction_level: DEFAULT_LEVEL,
            extraction_levels: DEFAULT_N_LEVELS,
            extraction_ordering: LevelOrdering::default(),
            encoding: ObservationEncoding::Centered,
            reward_terms: RewardTerms::default(),
            reset_offset_frac: 0.2,
            reset_tilt_deg: 10.0,
            target_lost_limit: 25,
            success_terminates: false,
            forward_mode: ForwardMode::default(),
            allow_backward: false,
            terminate_on_collision: true,
            goal_fraction: 0.98,
            segment_spacing: 10.0,
            n_body_segments: 6,
            step_period_s: 1.0,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.horizon < 1 {
            return Err(EnvError::BadConfig("horizon must be >= 1".into()));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(EnvError::BadConfig(format!(
                "tau {} outside (0, 1)",
                self.tau
            )));
        }
        if !(self.gate_ratio > 0.0 && self.gate_ratio < 1.0) {
            return Err(EnvError::BadConfig(format!(
                "gate_ratio {} outside (0, 1)",
                self.gate_ratio
            )));
        }
        if self.extraction_level < 1 || self.extraction_level > self.extraction_levels {
            return Err(EnvError::BadConfig(format!(
                "extraction level {}/{} invalid",
                self.extraction_level, self.extraction_levels
            )));
        }
        self.camera.validate().map_err(EnvError::Render)?;
        Ok(())
    }
}

/// How the gated axial translation responds to the policy's `fw` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForwardMode {
    /// Constant forward speed whenever the gate is open; the axial
    /// command is ignored. Matches "a constant forward velocity of
    /// 1 mm/s is applied" and removes the stand-still optimum.
    #[default]
    Constant,
    /// Translation scales with max(fw, 0) (or fw when backward motion is
    /// allowed).
    Commanded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoneReason {
    Collision,
    Horizon,
    GoalReached,
    TargetLost,
    /// Only with `success_terminates`.
    Success,
}

impl std::fmt::Display for DoneReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DoneReason::Collision => "collision",
            DoneReason::Horizon => "horizon",
            DoneReason::GoalReached => "goal_reached",
            DoneReason::TargetLost => "target_lost",
            DoneReason::Success => "success",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub wall_clearance: f64,
    pub rho: f64,
    pub gated_open: bool,
    pub collision: bool,
    pub tip_arclength: f64,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: RewardBreakdown,
    pub done: bool,
    pub done_reason: Option<DoneReason>,
    pub info: StepInfo,
}

/// One running episode; owns its RNG, trace, and log.
pub struct Episode {
    env: Arc<TubeEnvironment>,
    config: EpisodeConfig,
    profile: DegradationProfile,
    seed: u64,
    pose: Pose,
    trace: TipTrace,
    step_index: usize,
    observation: Observation,
    target: NavigationTarget,
    consecutive_invalid: usize,
    reward_history: VecDeque<f64>,
    done: Option<DoneReason>,
    tip_hint: f64,
    steps_log: Vec<StepRecord>,
    init_clearance: f64,
}

impl Episode {
    /// Places the tip near the tube entrance and returns the first
    /// observation. Deterministic in `seed`.
    pub fn reset(
        env: Arc<TubeEnvironment>,
        profile: DegradationProfile,
        config: EpisodeConfig,
        seed: u64,
    ) -> Result<(Episode, Observation), EnvError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seeds(seed, 0xE5E7));

        let s0 = 2.0_f64.min(env.centerline.total_length() * 0.01);
        let center = env.centerline.point_at(s0).expect("s0 in range");
        let tangent = env.centerline.tangent_at(s0).expect("s0 in range");
        let radius = env.centerline.radius_at(s0).expect("s0 in range");
        let (n1, n2) = perpendicular_basis(tangent);

        let position = if config.reset_offset_frac > 0.0 {
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let mag = rng.gen::<f64>().sqrt() * config.reset_offset_frac * radius;
            center + (n1 * phi.cos() + n2 * phi.sin()) * mag
        } else {
            center
        };
        let forward = if config.reset_tilt_deg > 0.0 {
            let tilt = rng.gen_range(0.0..config.reset_tilt_deg.to_radians());
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let axis = n1 * phi.cos() + n2 * phi.sin();
            rotate_about(tangent, axis, tilt)
        } else {
            tangent
        };
        let pose = Pose::look_along(position, forward, -n1);

        let init_clearance = env.wall_distance(position);
        let mut episode = Episode {
            env,
            config,
            profile,
            seed,
            pose,
            trace: TipTrace::new(position),
            step_index: 0,
            observation: Observation::zeros(),
            target: NavigationTarget::invalid(),
            consecutive_invalid: 0,
            reward_history: VecDeque::new(),
            done: None,
            tip_hint: s0,
            steps_log: Vec::new(),
            init_clearance,
        };
        episode.perceive(0)?;
        let obs = episode.observation;
        Ok((episode, obs))
    }

    /// Wall clearance at the initial pose, mm.
    pub fn initial_clearance(&self) -> f64 {
        self.init_clearance
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn trace(&self) -> &TipTrace {
        &self.trace
    }

    pub fn current_observation(&self) -> Observation {
        self.observation
    }

    pub fn current_target(&self) -> NavigationTarget {
        self.target
    }

    pub fn is_done(&self) -> bool {
        self.done.is_some()
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }

    pub fn environment(&self) -> &TubeEnvironment {
        &self.env
    }

    /// Normalized target-center distance of the current target.
    pub fn rho(&self) -> f64 {
        if !self.target.valid {
            return f64::INFINITY;
        }
        let (cx, cy) = self.config.camera.center();
        let dx = self.target.t_x - cx;
        let dy = self.target.t_y - cy;
        (dx * dx + dy * dy).sqrt() / self.config.camera.half_diagonal()
    }

    /// Renders, degrades, extracts, and encodes at the current pose. On an
    /// invalid target the previous observation is held.
    fn perceive(&mut self, frame_index: usize) -> Result<(), EnvError> {
        let depth = render_depth(&self.env, &self.pose, &self.config.camera, &self.config.texture)?;
        let degraded = degrade_depth(
            &depth,
            &self.profile,
            mix_seeds(self.seed, frame_index as u64),
            self.env.far_clip,
        );
        let target = extract_navigation_point_ordered(
            &degraded,
            self.config.extraction_level,
            self.config.extraction_levels,
            self.config.extraction_ordering,
        )
        .unwrap_or(NavigationTarget::invalid());
        if target.valid {
            self.target = target;
            self.observation = encode_observation(&target, &self.config.camera, self.config.encoding)
                .expect("valid target encodes");
            self.consecutive_invalid = 0;
        } else {
            self.target.valid = false;
            self.consecutive_invalid += 1;
        }
        Ok(())
    }

    /// Advances one step. Rotation always applies; translation only when
    /// the pre-step target is valid and centered within the gate ratio.
    pub fn step(&mut self, action: Action) -> Result<StepOutcome, EnvError> {
        if let Some(reason) = self.done {
            return Err(EnvError::EpisodeOver {
                reason: reason.to_string(),
            });
        }
        let action = action.clamped();
        let cfg = self.config.clone();

        // Gate and reward both read the pre-step state.
        let rho = self.rho();
        let gated_open = self.target.valid && rho < cfg.gate_ratio;
        let (u, v) = (self.observation.dx_norm, self.observation.dy_norm);

        let params = RewardParams {
            tau: cfg.tau,
            epsilon: cfg.epsilon,
            stability_window: cfg.stability_window,
            stability_count: cfg.stability_count,
            terms: cfg.reward_terms,
        };
        let history: Vec<f64> = self.reward_history.iter().copied().collect();
        let reward = RewardBreakdown::compute(u, v, action.lr, action.ud, &history, &params);
        let success = super::reward::is_success(u, v, cfg.tau);

        // Rotate about local axes: positive lr turns the view toward
        // image-right, positive ud toward image-down.
        let scale = cfg.yaw_pitch_scale_deg.to_radians();
        let yaw = UnitQuaternion::from_axis_angle(
            &nalgebra::Unit::new_normalize(Vec3::new(0.0, 1.0, 0.0)),
            action.lr * scale,
        );
        let pitch = UnitQuaternion::from_axis_angle(
            &nalgebra::Unit::new_normalize(Vec3::new(-1.0, 0.0, 0.0)),
            action.ud * scale,
        );
        self.pose.orientation = self.pose.orientation * yaw * pitch;

        // Gated axial translation.
        let axial = if gated_open {
            match cfg.forward_mode {
                ForwardMode::Constant => cfg.forward_speed,
                ForwardMode::Commanded if cfg.allow_backward => cfg.forward_speed * action.fw,
                ForwardMode::Commanded => cfg.forward_speed * action.fw.max(0.0),
            }
        } else {
            0.0
        };
        let old_position = self.pose.position;
        if axial != 0.0 {
            self.pose.position += self.pose.forward() * axial;
        }

        // Clearance over tip and FTL body.
        let (tip_clearance, s_tip) =
            self.env
                .wall_distance_hinted(self.pose.position, self.tip_hint, axial.abs() + 15.0);
        self.tip_hint = s_tip;
        let mut clearance = tip_clearance;
        let pending_trace_tip = self.pose.position;
        for p in ftl_body_with_tip(
            &self.trace,
            pending_trace_tip,
            cfg.segment_spacing,
            cfg.n_body_segments,
        ) {
            let (c, _) = self.env.wall_distance_hinted(p, s_tip, 80.0);
            clearance = clearance.min(c);
        }
        let collision = clearance < cfg.clearance_min;

        if collision && !cfg.terminate_on_collision {
            // Contact without termination: the wall stops the advance.
            self.pose.position = old_position;
        } else if axial != 0.0 {
            self.trace.push(pending_trace_tip);
        }

        self.step_index += 1;

        // Termination checks.
        let mut done_reason = None;
        if collision && cfg.terminate_on_collision {
            done_reason = Some(DoneReason::Collision);
        } else if s_tip >= cfg.goal_fraction * self.env.centerline.total_length() {
            done_reason = Some(DoneReason::GoalReached);
        } else if success && cfg.success_terminates {
            done_reason = Some(DoneReason::Success);
        } else if self.step_index >= cfg.horizon {
            done_reason = Some(DoneReason::Horizon);
        }

        // Perception at the new pose feeds s_{t+1} (skipped once the
        // episode is over).
        if done_reason.is_none() {
            self.perceive(self.step_index)?;
            if self.consecutive_invalid >= cfg.target_lost_limit {
                done_reason = Some(DoneReason::TargetLost);
            }
        }

        self.reward_history.push_back(reward.total);
        while self.reward_history.len() > cfg.stability_window {
            self.reward_history.pop_front();
        }
        self.done = done_reason;

        let q = self.pose.orientation.quaternion();
        self.steps_log.push(StepRecord {
            t: self.step_index as f64 * cfg.step_period_s,
            tip_position: [self.pose.position.x, self.pose.position.y, self.pose.position.z],
            quaternion_wxyz: [q.w, q.i, q.j, q.k],
            action: action.as_array(),
            reward,
            u,
            v,
            rho: if rho.is_finite() { rho } else { -1.0 },
            clearance,
            gated: gated_open,
            collision,
            done_reason: done_reason.map(|r| r.to_string()),
        });

        Ok(StepOutcome {
            observation: self.observation,
            reward,
            done: done_reason.is_some(),
            done_reason,
            info: StepInfo {
                wall_clearance: clearance,
                rho,
                gated_open,
                collision,
                tip_arclength: s_tip,
            },
        })
    }

    /// The trajectory log recorded so far. `config_hash` is stamped by the
    /// caller that knows the full run configuration.
    pub fn trajectory_log(&self, config_hash: &str) -> TrajectoryLog {
        TrajectoryLog {
            header: LogHeader {
                width: self.config.camera.width,
                height: self.config.camera.height,
                step_period_s: self.config.step_period_s,
                seed: self.seed,
                config_hash: config_hash.to_string(),
                env: self.env.to_file(),
            },
            steps: self.steps_log.clone(),
        }
    }

    /// Positions of the trailing body segments.
    pub fn body_points(&self) -> Vec<Vec3> {
        ftl_body(
            &self.trace,
            self.config.segment_spacing,
            self.config.n_body_segments,
        )
    }
}

fn perpendicular_basis(t: Vec3) -> (Vec3, Vec3) {
    let helper = if t.x.abs() < 0.9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    let n1 = t.cross(&helper).normalize();
    let n2 = t.cross(&n1);
    (n1, n2)
}

fn rotate_about(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    v * c + axis.cross(&v) * s + axis * axis.dot(&v) * (1.0 - c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CenterlineSpline, ProfileTag};

    fn straight_env() -> Arc<TubeEnvironment> {
        let pts: Vec<Vec3> = (0..8)
            .map(|i| Vec3::new(0.0, 0.0, 60.0 * i as f64))
            .collect();
        let spline = CenterlineSpline::build(&pts, &[20.0; 8]).unwrap();
        Arc::new(TubeEnvironment::new(spline, 3, ProfileTag::Simple, 300.0).unwrap())
    }

    fn test_config() -> EpisodeConfig {
        EpisodeConfig {
            camera: CameraIntrinsics::new(48, 48, 120.0, 300.0).unwrap(),
            extraction_level: 2,
            extraction_levels: 5,
            extraction_ordering: LevelOrdering::FarFirst,
            texture: RenderOptions::no_texture(),
            ..Default::default()
        }
    }

    #[test]
    fn reset_is_deterministic() {
        let env = straight_env();
        let profile = DegradationProfile::zero_noise();
        let (_, a) = Episode::reset(env.clone(), profile, test_config(), 5).unwrap();
        let (_, b) = Episode::reset(env, profile, test_config(), 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reset_clearance_exceeds_minimum() {
        let env = straight_env();
        for seed in 0..10 {
            let (ep, _) =
                Episode::reset(env.clone(), DegradationProfile::zero_noise(), test_config(), seed)
                    .unwrap();
            assert!(ep.initial_clearance() > 1.0);
        }
    }

    #[test]
    fn centered_reset_gives_zero_observation() {
        let env = straight_env();
        let config = EpisodeConfig {
            reset_offset_frac: 0.0,
            reset_tilt_deg: 0.0,
            ..test_config()
        };
        let (_, obs) =
            Episode::reset(env, DegradationProfile::zero_noise(), config, 3).unwrap();
        // Rotationally symmetric view: target lands exactly at the center.
        assert!(obs.x_norm.abs() < 1e-9, "{obs:?}");
        assert!(obs.y_norm.abs() < 1e-9);
        assert_eq!(obs.dx_norm, obs.x_norm);
        assert_eq!(obs.dy_norm, obs.y_norm);
    }

    #[test]
    fn gate_blocks_translation_when_target_far() {
        let env = straight_env();
        // Tilt the camera so the target sits far off-center.
        let config = EpisodeConfig {
            reset_offset_frac: 0.0,
            reset_tilt_deg: 0.0,
            gate_ratio: 0.05,
            ..test_config()
        };
        let (mut ep, _) =
            Episode::reset(env, DegradationProfile::zero_noise(), config, 3).unwrap();
        // Rotate hard first so rho grows past the tiny gate.
        for _ in 0..6 {
            ep.step(Action::new(1.0, 0.0, 0.0)).unwrap();
        }
        let before = ep.pose().position;
        let out = ep.step(Action::new(0.0, 0.0, 1.0)).unwrap();
        assert!(!out.info.gated_open);
        assert!((ep.pose().position - before).norm() < 1e-12);
    }

    #[test]
    fn open_gate_advances_forward_speed() {
        let env = straight_env();
        let config = EpisodeConfig {
            reset_offset_frac: 0.0,
            reset_tilt_deg: 0.0,
            ..test_config()
        };
        let (mut ep, _) =
            Episode::reset(env, DegradationProfile::zero_noise(), config, 3).unwrap();
        let before = ep.pose().position;
        let out = ep.step(Action::new(0.0, 0.0, 1.0)).unwrap();
        assert!(out.info.gated_open, "rho {}", out.info.rho);
        let moved = (ep.pose().position - before).norm();
        assert!((moved - 1.0).abs() < 1e-9, "moved {moved}");
    }

    #[test]
    fn backward_command_is_suppressed() {
        let env = straight_env();
        let config = EpisodeConfig {
            reset_offset_frac: 0.0,
            reset_tilt_deg: 0.0,
            forward_mode: ForwardMode::Commanded,
            ..test_config()
        };
        let (mut ep, _) =
            Episode::reset(env, DegradationProfile::zero_noise(), config, 3).unwrap();
        let before = ep.pose().position;
        ep.step(Action::new(0.0, 0.0, -1.0)).unwrap();
        assert!((ep.pose().position - before).norm() < 1e-12);
    }

    #[test]
    fn steering_reduces_offset() {
        let env = straight_env();
        let config = EpisodeConfig {
            reset_offset_frac: 0.0,
            reset_tilt_deg: 0.0,
            ..test_config()
        };
        let (mut ep, _) =
            Episode::reset(env.clone(), DegradationProfile::zero_noise(), config, 3).unwrap();
        // Build up a rightward offset, then steer back toward it.
        for _ in 0..4 {
            ep.step(Action::new(-1.0, 0.0, 0.0)).unwrap();
        }
        let u_before = ep.current_observation().dx_norm;
        assert!(u_before.abs() > 0.05, "setup failed: u {u_before}");
        let cmd = u_before.signum();
        ep.step(Action::new(cmd, 0.0, 0.0)).unwrap();
        let u_after = ep.current_observation().dx_norm;
        assert!(
            u_after.abs() < u_before.abs(),
            "steering toward the target must reduce |u|: {u_before} -> {u_after}"
        );
    }

    #[test]
    fn horizon_terminates() {
        let env = straight_env();
        let config = EpisodeConfig {
            horizon: 3,
            ..test_config()
        };
        let (mut ep, _) =
            Episode::reset(env, DegradationProfile::zero_noise(), config, 3).unwrap();
        ep.step(Action::new(0.0, 0.0, 0.0)).unwrap();
        ep.step(Action::new(0.0, 0.0, 0.0)).unwrap();
        let out = ep.step(Action::new(0.0, 0.0, 0.0)).unwrap();
        assert!(out.done);
        assert_eq!(out.done_reason, Some(DoneReason::Horizon));
        assert!(ep.step(Action::new(0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn episode_is_deterministic() {
        let env = straight_env();
        let profile = DegradationProfile {
            sigma_mult: 0.1,
            dropout_rate: 0.03,
            outlier_scale: 5.0,
            blur_radius_px: 1.0,
            ..DegradationProfile::zero_noise()
        };
        let run = || {
            let (mut ep, _) =
                Episode::reset(straight_env(), profile, test_config(), 11).unwrap();
            let mut sum = 0.0;
            for i in 0..40 {
                let a = Action::new((i as f64 * 0.37).sin(), (i as f64 * 0.21).cos(), 1.0);
                let out = ep.step(a).unwrap();
                sum += out.reward.total;
                if out.done {
                    break;
                }
            }
            (sum, ep.pose().position)
        };
        let (s1, p1) = run();
        let (s2, p2) = run();
        assert_eq!(s1, s2);
        assert_eq!(p1, p2);
        drop(env);
    }

    #[test]
    fn reward_total_identity_on_every_logged_step() {
        let env = straight_env();
        let (mut ep, _) =
            Episode::reset(env, DegradationProfile::zero_noise(), test_config(), 3).unwrap();
        for i in 0..30 {
            let a = Action::new((i as f64 * 0.31).sin(), 0.2, 1.0);
            if ep.step(a).unwrap().done {
                break;
            }
        }
        let log = ep.trajectory_log("test");
        assert!(!log.steps.is_empty());
        for s in &log.steps {
            let r = &s.reward;
            assert_eq!(r.total, r.r_dis + r.r_dir + r.r_succ + r.r_step + r.r_penalty);
        }
    }

    #[test]
    fn goal_reached_on_full_traverse() {
        // Short tube so the traverse fits in a quick test.
        let pts: Vec<Vec3> = (0..4)
            .map(|i| Vec3::new(0.0, 0.0, 30.0 * i as f64))
            .collect();
        let spline = CenterlineSpline::build(&pts, &[20.0; 4]).unwrap();
        let env = Arc::new(TubeEnvironment::new(spline, 3, ProfileTag::Simple, 300.0).unwrap());
        let config = EpisodeConfig {
            reset_offset_frac: 0.0,
            reset_tilt_deg: 0.0,
            ..test_config()
        };
        let (mut ep, _) =
            Episode::reset(env, DegradationProfile::zero_noise(), config, 3).unwrap();
        let mut reason = None;
        for _ in 0..200 {
            let out = ep.step(Action::new(0.0, 0.0, 1.0)).unwrap();
            if out.done {
                reason = out.done_reason;
                break;
            }
        }
        assert_eq!(reason, Some(DoneReason::GoalReached));
    }

    #[test]
    fn collision_terminates_episode() {
        let env = straight_env();
        // Aim at the wall and drive forward; clearance must eventually
        // breach the minimum and end the episode.
        let config = EpisodeConfig {
            reset_offset_frac: 0.0,
            reset_tilt_deg: 0.0,
            gate_ratio: 0.99, // keep the gate open while turning
            ..test_config()
        };
        let (mut ep, _) =
            Episode::reset(env, DegradationProfile::zero_noise(), config, 3).unwrap();
        let mut reason = None;
        for i in 0..400 {
            let a = if i < 25 {
                Action::new(1.0, 0.0, 1.0)
            } else {
                Action::new(0.0, 0.0, 1.0)
            };
            let out = ep.step(a).unwrap();
            if out.done {
                reason = out.done_reason;
                assert!(out.info.wall_clearance < 1.0);
                break;
            }
        }
        assert_eq!(reason, Some(DoneReason::Collision));
    }

    #[test]
    fn persistent_invalid_target_ends_with_target_lost() {
        let env = straight_env();
        // A 16x16 camera with 20 quantile levels: bins carry ~12 pixels,
        // fragment below the 10-pixel component floor, and every frame is
        // invalid.
        let config = EpisodeConfig {
            camera: CameraIntrinsics::new(16, 16, 120.0, 300.0).unwrap(),
            extraction_level: 8,
            extraction_levels: 20,
            extraction_ordering: LevelOrdering::NearFirst,
            reset_offset_frac: 0.0,
            reset_tilt_deg: 0.0,
            texture: RenderOptions::no_texture(),
            ..test_config()
        };
        let (mut ep, _) =
            Episode::reset(env, DegradationProfile::zero_noise(), config, 3).unwrap();
        let start = ep.pose().position;
        let mut reason = None;
        for _ in 0..100 {
            let out = ep.step(Action::new(0.0, 0.0, 1.0)).unwrap();
            assert!(!out.info.gated_open, "gate must stay shut without a target");
            if out.done {
                reason = out.done_reason;
                break;
            }
        }
        assert_eq!(reason, Some(DoneReason::TargetLost));
        // 25 consecutive invalid frames: the reset frame plus 24 steps.
        assert_eq!(ep.step_index(), 24);
        assert!((ep.pose().position - start).norm() < 1e-12);
    }

    #[test]
    fn ftl_body_points_stay_on_trace() {
        let env = straight_env();
        let (mut ep, _) =
            Episode::reset(env, DegradationProfile::zero_noise(), test_config(), 9).unwrap();
        for i in 0..60 {
            let a = Action::new(0.3 * (i as f64 * 0.2).sin(), 0.0, 1.0);
            if ep.step(a).unwrap().done {
                break;
            }
        }
        for p in ep.body_points() {
            assert!(ep.trace().distance_to(p) <= 0.5);
        }
    }
}
