//! Actor-critic networks with hand-rolled differentiation, GAE, the PPO
//! clipped-objective trainer, and checkpointing.

mod adam;
mod buffer;
mod checkpoint;
mod gae;
mod mlp;
mod policy;
mod ppo;
mod simenv;
mod train;

pub use adam::{clip_global_norm, Adam};
pub use buffer::{PpoConfig, RolloutBuffer, RolloutStream, Transition};
pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use gae::{compute_gae, normalize_advantages};
pub use mlp::{gradient_check, D2rlNet, ForwardCache, Linear, NetGrads, HIDDEN};
pub use policy::{
    log_prob, sample_action, PolicyGrads, PolicyNetwork, ValueNetwork, LOG_STD_MAX, LOG_STD_MIN,
};
pub use ppo::{minibatch_gradients, ppo_update, LossReport};
pub use simenv::{run_policy_episode, SimEnv};
pub use train::{
    train, write_curve_csv, CurvePoint, EnvStep, EpisodeEnd, RolloutEnv, TrainResult,
};
