//! Adapters between the navigation [`Episode`] and the trainer's
//! [`RolloutEnv`] interface, plus a deterministic policy evaluation runner.

use std::sync::Arc;

use super::policy::PolicyNetwork;
use super::train::{EnvStep, EpisodeEnd, RolloutEnv};
use crate::env::{Action, DoneReason, Episode, EpisodeConfig};
use crate::error::EnvError;
use crate::geometry::TubeEnvironment;
use crate::metrics::TrajectoryLog;
use crate::perception::DegradationProfile;
use crate::util::mix_seeds;

/// Rollout environment over a pool of tube environments; successive
/// episodes cycle through the pool deterministically.
pub struct SimEnv {
    pool: Vec<Arc<TubeEnvironment>>,
    profile: DegradationProfile,
    config: EpisodeConfig,
    base_seed: u64,
    episode: Option<Episode>,
}

impl SimEnv {
    pub fn new(
        pool: Vec<Arc<TubeEnvironment>>,
        profile: DegradationProfile,
        config: EpisodeConfig,
        base_seed: u64,
    ) -> Self {
        assert!(!pool.is_empty(), "SimEnv needs at least one environment");
        SimEnv {
            pool,
            profile,
            config,
            base_seed,
            episode: None,
        }
    }
}

impl RolloutEnv for SimEnv {
    fn obs_dim(&self) -> usize {
        4
    }

    fn act_dim(&self) -> usize {
        3
    }

    fn reset(&mut self, episode_seed: u64) -> Vec<f64> {
        let env = self.pool[(episode_seed as usize) % self.pool.len()].clone();
        let seed = mix_seeds(self.base_seed, episode_seed);
        let (episode, obs) = Episode::reset(env, self.profile, self.config.clone(), seed)
            .expect("validated config resets");
        self.episode = Some(episode);
        obs.as_array().to_vec()
    }

    fn step(&mut self, raw_action: &[f64]) -> EnvStep {
        let episode = self.episode.as_mut().expect("reset before step");
        let action = Action::new(raw_action[0], raw_action[1], raw_action[2]);
        let out = episode.step(action).expect("stepping an active episode");
        EnvStep {
            obs: out.observation.as_array().to_vec(),
            reward: out.reward.total,
            done: out.done,
            episode_end: out.done_reason.map(|r| match r {
                DoneReason::GoalReached => EpisodeEnd::Goal,
                DoneReason::Collision => EpisodeEnd::Collision,
                _ => EpisodeEnd::Other,
            }),
        }
    }
}

/// Runs one episode under the policy's mean action (deterministic) and
/// returns its trajectory log.
pub fn run_policy_episode(
    env: Arc<TubeEnvironment>,
    profile: DegradationProfile,
    config: EpisodeConfig,
    policy: &PolicyNetwork,
    seed: u64,
    config_hash: &str,
) -> Result<TrajectoryLog, EnvError> {
    let (mut episode, mut obs) = Episode::reset(env, profile, config, seed)?;
    while !episode.is_done() {
        let (mean, _) = policy.forward(&obs.as_array());
        let out = episode.step(Action::new(mean[0], mean[1], mean[2]))?;
        obs = out.observation;
    }
    Ok(episode.trajectory_log(config_hash))
}
