//! Gaussian actor and scalar critic on the D2RL backbone.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::mlp::{D2rlNet, ForwardCache, NetGrads};

pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 2.0;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// Diagonal-Gaussian policy: state-dependent mean, state-independent
/// learned log-std (clamped to [-5, 2]).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PolicyNetwork {
    pub net: D2rlNet,
    pub log_std: Vec<f64>,
}

impl PolicyNetwork {
    pub fn new(obs_dim: usize, act_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        PolicyNetwork {
            // Small head scale keeps early actions near zero mean.
            net: D2rlNet::new(obs_dim, act_dim, 0.01, rng),
            log_std: vec![-0.5; act_dim],
        }
    }

    pub fn act_dim(&self) -> usize {
        self.log_std.len()
    }

    /// Mean and clamped log-std for an observation.
    pub fn forward(&self, obs: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mean = self.net.infer(obs);
        let log_std = self.log_std.iter().map(|l| l.clamp(LOG_STD_MIN, LOG_STD_MAX)).collect();
        (mean, log_std)
    }

    pub(crate) fn forward_cached(&self, obs: &[f64], cache: &mut ForwardCache) -> Vec<f64> {
        let mut mean = Vec::new();
        self.net.forward(obs, &mut mean, cache);
        mean
    }

    pub fn clamped_log_std(&self) -> Vec<f64> {
        self.log_std
            .iter()
            .map(|l| l.clamp(LOG_STD_MIN, LOG_STD_MAX))
            .collect()
    }

    /// Entropy of the diagonal Gaussian.
    pub fn entropy(&self) -> f64 {
        self.clamped_log_std()
            .iter()
            .map(|l| l + 0.5 + HALF_LN_TWO_PI)
            .sum()
    }
}

/// Scalar state-value critic.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ValueNetwork {
    pub net: D2rlNet,
}

impl ValueNetwork {
    pub fn new(obs_dim: usize, rng: &mut ChaCha8Rng) -> Self {
        ValueNetwork {
            net: D2rlNet::new(obs_dim, 1, 1.0, rng),
        }
    }

    pub fn value(&self, obs: &[f64]) -> f64 {
        self.net.infer(obs)[0]
    }

    pub(crate) fn value_cached(&self, obs: &[f64], cache: &mut ForwardCache) -> f64 {
        let mut out = Vec::new();
        self.net.forward(obs, &mut out, cache);
        out[0]
    }
}

/// Log density of `action` under N(mean, exp(log_std)^2), diagonal.
pub fn log_prob(action: &[f64], mean: &[f64], log_std: &[f64]) -> f64 {
    let mut lp = 0.0;
    for i in 0..action.len() {
        let sigma = log_std[i].exp();
        let z = (action[i] - mean[i]) / sigma;
        lp += -0.5 * z * z - log_std[i] - HALF_LN_TWO_PI;
    }
    lp
}

/// Draws a raw (pre-clamp) sample and its log-probability. The action
/// applied to the environment is the clamp of this sample to [-1, 1].
pub fn sample_action(
    mean: &[f64],
    log_std: &[f64],
    rng: &mut ChaCha8Rng,
) -> (Vec<f64>, f64) {
    let raw: Vec<f64> = mean
        .iter()
        .zip(log_std)
        .map(|(m, l)| {
            let z: f64 = rng.sample(StandardNormal);
            m + l.exp() * z
        })
        .collect();
    let lp = log_prob(&raw, mean, log_std);
    (raw, lp)
}

/// d log_prob / d mean_i = (a_i - mu_i) / sigma_i^2.
pub fn dlogp_dmean(action: &[f64], mean: &[f64], log_std: &[f64], out: &mut [f64]) {
    for i in 0..action.len() {
        let sigma2 = (2.0 * log_std[i]).exp();
        out[i] = (action[i] - mean[i]) / sigma2;
    }
}

/// d log_prob / d log_std_i = z_i^2 - 1 (zero where the clamp is active).
pub fn dlogp_dlogstd(
    action: &[f64],
    mean: &[f64],
    log_std_raw: &[f64],
    out: &mut [f64],
) {
    for i in 0..action.len() {
        let clamped = log_std_raw[i].clamp(LOG_STD_MIN, LOG_STD_MAX);
        let sigma = clamped.exp();
        let z = (action[i] - mean[i]) / sigma;
        let inside = (LOG_STD_MIN..=LOG_STD_MAX).contains(&log_std_raw[i]);
        out[i] = if inside { z * z - 1.0 } else { 0.0 };
    }
}

/// Gradients of the policy: backbone plus log-std vector.
#[derive(Debug, Clone)]
pub struct PolicyGrads {
    pub net: NetGrads,
    pub log_std: Vec<f64>,
}

impl PolicyNetwork {
    pub fn zero_grads(&self) -> PolicyGrads {
        PolicyGrads {
            net: self.net.zero_grads(),
            log_std: vec![0.0; self.log_std.len()],
        }
    }

    pub fn param_count(&self) -> usize {
        self.net.param_count() + self.log_std.len()
    }

    pub fn flatten_params(&self, out: &mut Vec<f64>) {
        self.net.flatten_params(out);
        out.extend_from_slice(&self.log_std);
    }

    pub fn unflatten_params(&mut self, params: &[f64]) {
        let used = self.net.unflatten_params(params);
        let n = self.log_std.len();
        self.log_std.copy_from_slice(&params[used..used + n]);
    }

    pub fn flatten_grads(grads: &PolicyGrads, out: &mut Vec<f64>) {
        D2rlNet::flatten_grads(&grads.net, out);
        out.extend_from_slice(&grads.log_std);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;

    #[test]
    fn log_prob_at_mean() {
        // log p(mean) = -sum(log_std) - (d/2) ln(2 pi).
        let mean = [0.2, -0.4, 0.9];
        let log_std = [-0.5, -1.0, 0.3];
        let lp = log_prob(&mean, &mean, &log_std);
        let expected =
            -log_std.iter().sum::<f64>() - 1.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((lp - expected).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_reproducible() {
        let mean = [0.0, 0.5, -0.5];
        let log_std = [-0.5; 3];
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(
            sample_action(&mean, &log_std, &mut a),
            sample_action(&mean, &log_std, &mut b)
        );
    }

    #[test]
    fn degenerate_variance_collapses_to_mean() {
        let mean = [0.3, -0.7, 0.1];
        let log_std = [LOG_STD_MIN; 3];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (raw, _) = sample_action(&mean, &log_std, &mut rng);
        for (r, m) in raw.iter().zip(&mean) {
            assert!((r - m).abs() < 0.05, "{r} vs {m}");
        }
    }

    #[test]
    fn policy_forward_deterministic_and_clamped() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut policy = PolicyNetwork::new(4, 3, &mut rng);
        policy.log_std = vec![-9.0, 5.0, 0.0];
        let obs = [0.1, 0.2, 0.3, 0.4];
        let (m1, ls) = policy.forward(&obs);
        let (m2, _) = policy.forward(&obs);
        assert_eq!(m1, m2);
        assert_eq!(ls, vec![LOG_STD_MIN, LOG_STD_MAX, 0.0]);
    }
}
