//! Rollout storage for one PPO update.

use serde::{Deserialize, Serialize};

use super::gae::{compute_gae, normalize_advantages};
use crate::error::RlError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PpoConfig {
    pub gamma: f64,
    pub gae_lambda: f64,
    pub learning_rate: f64,
    pub minibatch_size: usize,
    pub clip_epsilon: f64,
    pub epochs_per_update: usize,
    pub steps_per_update: usize,
    pub total_steps: usize,
    pub entropy_coef: f64,
    pub value_coef: f64,
    pub max_grad_norm: f64,
    pub workers: usize,
}

impl Default for PpoConfig {
    fn default() -> Self {
        PpoConfig {
            gamma: 0.99,
            gae_lambda: 0.95,
            learning_rate: 3e-4,
            minibatch_size: 16,
            clip_epsilon: 0.2,
            epochs_per_update: 4,
            steps_per_update: 2048,
            total_steps: 100_000,
            entropy_coef: 0.0,
            value_coef: 0.5,
            max_grad_norm: 0.5,
            workers: 1,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<(), RlError> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(RlError::Checkpoint(format!(
                "gamma {} outside (0, 1]",
                self.gamma
            )));
        }
        if !(self.clip_epsilon > 0.0 && self.clip_epsilon < 1.0) {
            return Err(RlError::Checkpoint(format!(
                "clip_epsilon {} outside (0, 1)",
                self.clip_epsilon
            )));
        }
        Ok(())
    }
}

/// One transition as stored during collection.
#[derive(Debug, Clone)]
pub struct Transition {
    pub obs: Vec<f64>,
    /// Raw (pre-clamp) sampled action.
    pub action: Vec<f64>,
    pub log_prob: f64,
    pub reward: f64,
    pub value: f64,
    pub done: bool,
}

/// Transitions of one worker stream plus the bootstrap value of the final
/// state.
#[derive(Debug, Clone, Default)]
pub struct RolloutStream {
    pub transitions: Vec<Transition>,
    pub bootstrap_value: f64,
}

/// A finalized buffer: flat samples with advantages (normalized across the
/// whole update) and returns.
#[derive(Debug, Clone)]
pub struct RolloutBuffer {
    pub obs: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
    pub log_probs: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl RolloutBuffer {
    /// Computes per-stream GAE, concatenates streams, and normalizes
    /// advantages over the full update.
    pub fn from_streams(
        streams: &[RolloutStream],
        gamma: f64,
        lambda: f64,
    ) -> Result<RolloutBuffer, RlError> {
        let mut buffer = RolloutBuffer {
            obs: Vec::new(),
            actions: Vec::new(),
            log_probs: Vec::new(),
            advantages: Vec::new(),
            returns: Vec::new(),
        };
        for stream in streams {
            let n = stream.transitions.len();
            if n == 0 {
                continue;
            }
            let rewards: Vec<f64> = stream.transitions.iter().map(|t| t.reward).collect();
            let dones: Vec<bool> = stream.transitions.iter().map(|t| t.done).collect();
            let mut values: Vec<f64> = stream.transitions.iter().map(|t| t.value).collect();
            values.push(stream.bootstrap_value);
            let (adv, ret) = compute_gae(&rewards, &values, &dones, gamma, lambda)?;
            for (i, t) in stream.transitions.iter().enumerate() {
                buffer.obs.push(t.obs.clone());
                buffer.actions.push(t.action.clone());
                buffer.log_probs.push(t.log_prob);
                buffer.advantages.push(adv[i]);
                buffer.returns.push(ret[i]);
            }
        }
        if buffer.obs.is_empty() {
            return Err(RlError::BufferNotReady);
        }
        normalize_advantages(&mut buffer.advantages);
        Ok(buffer)
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_concatenate_and_normalize() {
        let make_stream = |offset: f64| RolloutStream {
            transitions: (0..5)
                .map(|i| Transition {
                    obs: vec![i as f64],
                    action: vec![0.0],
                    log_prob: -1.0,
                    reward: offset + i as f64,
                    value: 0.0,
                    done: i == 4,
                })
                .collect(),
            bootstrap_value: 0.0,
        };
        let buffer =
            RolloutBuffer::from_streams(&[make_stream(0.0), make_stream(1.0)], 0.99, 0.95)
                .unwrap();
        assert_eq!(buffer.len(), 10);
        let mean: f64 = buffer.advantages.iter().sum::<f64>() / 10.0;
        let std = (buffer.advantages.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / 10.0)
            .sqrt();
        assert!(mean.abs() < 1e-9);
        assert!((std - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_streams_rejected() {
        assert!(RolloutBuffer::from_streams(&[], 0.99, 0.95).is_err());
    }
}
