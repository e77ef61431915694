//! Rollout collection and the PPO training loop.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::buffer::{PpoConfig, RolloutBuffer, RolloutStream, Transition};
use super::policy::{sample_action, PolicyNetwork, ValueNetwork};
use super::ppo::{ppo_update, LossReport};
use crate::error::RlError;
use crate::util::mix_seeds;

/// How an episode ended, as seen by the trainer's statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpisodeEnd {
    Goal,
    Collision,
    Other,
}

/// One environment step as seen by the trainer.
pub struct EnvStep {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub done: bool,
    pub episode_end: Option<EpisodeEnd>,
}

/// Minimal environment interface for rollout collection. Implementations
/// own their state and reset themselves deterministically from seeds.
pub trait RolloutEnv: Send {
    fn obs_dim(&self) -> usize;
    fn act_dim(&self) -> usize;
    fn reset(&mut self, episode_seed: u64) -> Vec<f64>;
    fn step(&mut self, raw_action: &[f64]) -> EnvStep;
}

/// One row of the training curve CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvePoint {
    pub update: usize,
    pub steps: usize,
    pub mean_ep_reward: f64,
    pub mean_ep_len: f64,
    pub goal_rate: f64,
    pub collision_rate: f64,
    pub actor_loss: f64,
    pub critic_loss: f64,
}

pub struct TrainResult {
    pub policy: PolicyNetwork,
    pub value: ValueNetwork,
    pub optimizer: Adam,
    pub curve: Vec<CurvePoint>,
    pub steps_done: usize,
    pub updates_done: usize,
}

struct WorkerState {
    env: Box<dyn RolloutEnv>,
    rng: ChaCha8Rng,
    obs: Vec<f64>,
    episode_counter: u64,
    episode_reward: f64,
    episode_len: usize,
}

/// Collects `steps` transitions from one worker under the given policy
/// snapshot. Episode resets are seeded from (worker seed, episode index).
fn collect_stream(
    worker: &mut WorkerState,
    policy: &PolicyNetwork,
    value: &ValueNetwork,
    steps: usize,
    finished: &mut Vec<(f64, usize, EpisodeEnd)>,
) -> RolloutStream {
    let mut stream = RolloutStream::default();
    let log_std = policy.clamped_log_std();
    for _ in 0..steps {
        let (mean, _) = policy.forward(&worker.obs);
        let (raw, lp) = sample_action(&mean, &log_std, &mut worker.rng);
        let v = value.value(&worker.obs);
        let step = worker.env.step(&raw);
        worker.episode_reward += step.reward;
        worker.episode_len += 1;
        stream.transitions.push(Transition {
            obs: worker.obs.clone(),
            action: raw,
            log_prob: lp,
            reward: step.reward,
            value: v,
            done: step.done,
        });
        if step.done {
            finished.push((
                worker.episode_reward,
                worker.episode_len,
                step.episode_end.unwrap_or(EpisodeEnd::Other),
            ));
            worker.episode_reward = 0.0;
            worker.episode_len = 0;
            worker.episode_counter += 1;
            worker.obs = worker.env.reset(worker.episode_counter);
        } else {
            worker.obs = step.obs;
        }
    }
    stream.bootstrap_value = value.value(&worker.obs);
    stream
}

/// Trains PPO against environments built by `env_factory` (one call per
/// worker). Deterministic given `seed` and a fixed worker count.
pub fn train(
    env_factory: &(dyn Fn(usize) -> Box<dyn RolloutEnv> + Sync),
    ppo: &PpoConfig,
    seed: u64,
    mut on_update: impl FnMut(&CurvePoint, &LossReport),
) -> Result<TrainResult, RlError> {
    ppo.validate()?;
    let workers = ppo.workers.max(1);
    let mut init_rng = ChaCha8Rng::seed_from_u64(mix_seeds(seed, 0x1217));
    let probe_env = env_factory(0);
    let (obs_dim, act_dim) = (probe_env.obs_dim(), probe_env.act_dim());
    drop(probe_env);

    let mut policy = PolicyNetwork::new(obs_dim, act_dim, &mut init_rng);
    let mut value = ValueNetwork::new(obs_dim, &mut init_rng);
    let mut optimizer = Adam::new(
        policy.param_count() + value.net.param_count(),
        ppo.learning_rate,
    );
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(mix_seeds(seed, 0x5EFF));

    let mut states: Vec<WorkerState> = (0..workers)
        .map(|w| {
            let mut env = env_factory(w);
            let worker_seed = mix_seeds(seed, 0xA0 + w as u64);
            let obs = env.reset(0);
            WorkerState {
                env,
                rng: ChaCha8Rng::seed_from_u64(worker_seed),
                obs,
                episode_counter: 0,
                episode_reward: 0.0,
                episode_len: 0,
            }
        })
        .collect();

    let mut curve = Vec::new();
    let mut steps_done = 0usize;
    let mut update = 0usize;
    let steps_per_worker = ppo.steps_per_update.div_ceil(workers);

    while steps_done < ppo.total_steps {
        let mut finished: Vec<(f64, usize, EpisodeEnd)> = Vec::new();
        let streams: Vec<RolloutStream> = if workers == 1 {
            vec![collect_stream(
                &mut states[0],
                &policy,
                &value,
                steps_per_worker,
                &mut finished,
            )]
        } else {
            // Each worker owns its environment and RNG; parameter
            // snapshots are immutable borrows. Results keep worker order.
            let policy_ref = &policy;
            let value_ref = &value;
            type WorkerYield = (RolloutStream, Vec<(f64, usize, EpisodeEnd)>);
            let results: Vec<WorkerYield> = std::thread::scope(|scope| {
                    let handles: Vec<_> = states
                        .iter_mut()
                        .map(|ws| {
                            scope.spawn(move || {
                                let mut fin = Vec::new();
                                let stream = collect_stream(
                                    ws,
                                    policy_ref,
                                    value_ref,
                                    steps_per_worker,
                                    &mut fin,
                                );
                                (stream, fin)
                            })
                        })
                        .collect();
                    handles.into_iter().map(|h| h.join().unwrap()).collect()
                });
            let mut streams = Vec::with_capacity(workers);
            for (stream, fin) in results {
                streams.push(stream);
                finished.extend(fin);
            }
            streams
        };

        let collected: usize = streams.iter().map(|s| s.transitions.len()).sum();
        steps_done += collected;
        let buffer = RolloutBuffer::from_streams(&streams, ppo.gamma, ppo.gae_lambda)?;
        let report = ppo_update(
            &buffer,
            &mut policy,
            &mut value,
            &mut optimizer,
            ppo,
            &mut shuffle_rng,
            update,
        )?;
        update += 1;

        let n_ep = finished.len().max(1) as f64;
        let point = CurvePoint {
            update,
            steps: steps_done,
            mean_ep_reward: finished.iter().map(|e| e.0).sum::<f64>() / n_ep,
            mean_ep_len: finished.iter().map(|e| e.1 as f64).sum::<f64>() / n_ep,
            goal_rate: finished
                .iter()
                .filter(|e| e.2 == EpisodeEnd::Goal)
                .count() as f64
                / n_ep,
            collision_rate: finished
                .iter()
                .filter(|e| e.2 == EpisodeEnd::Collision)
                .count() as f64
                / n_ep,
            actor_loss: report.actor_loss,
            critic_loss: report.critic_loss,
        };
        on_update(&point, &report);
        curve.push(point);
    }

    Ok(TrainResult {
        policy,
        value,
        optimizer,
        curve,
        steps_done,
        updates_done: update,
    })
}

/// Writes the training curve as CSV.
pub fn write_curve_csv(path: &std::path::Path, curve: &[CurvePoint]) -> Result<(), RlError> {
    use std::io::Write;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        w,
        "update,steps,mean_ep_reward,mean_ep_len,goal_rate,collision_rate,actor_loss,critic_loss"
    )?;
    for p in curve {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            p.update,
            p.steps,
            p.mean_ep_reward,
            p.mean_ep_len,
            p.goal_rate,
            p.collision_rate,
            p.actor_loss,
            p.critic_loss
        )?;
    }
    w.flush()?;
    Ok(())
}
