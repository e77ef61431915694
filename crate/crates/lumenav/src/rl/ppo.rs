//! Clipped-surrogate PPO update over separate actor and critic networks.

use super::adam::{clip_global_norm, Adam};
use super::buffer::{PpoConfig, RolloutBuffer};
use super::mlp::ForwardCache;
use super::policy::{dlogp_dlogstd, dlogp_dmean, log_prob, PolicyNetwork, ValueNetwork};
use crate::error::RlError;

#[derive(Debug, Clone, Default)]
pub struct LossReport {
    pub actor_loss: f64,
    pub critic_loss: f64,
    pub entropy: f64,
    pub clip_fraction: f64,
    pub approx_kl: f64,
    pub grad_norm: f64,
}

/// One minibatch: mean losses and parameter gradients of
/// actor + value_coef * critic - entropy_coef * entropy.
#[allow(clippy::too_many_arguments)]
fn minibatch_backward(
    policy: &PolicyNetwork,
    value: &ValueNetwork,
    buffer: &RolloutBuffer,
    indices: &[usize],
    cfg: &PpoConfig,
    policy_grads: &mut Vec<f64>,
    value_grads: &mut Vec<f64>,
    report: &mut LossReport,
    samples_seen: &mut usize,
) {
    let m = indices.len() as f64;
    let act_dim = policy.act_dim();
    let log_std = policy.clamped_log_std();

    let mut pgrads = policy.zero_grads();
    let mut vgrads = value.net.zero_grads();
    let mut cache = ForwardCache::default();
    let mut vcache = ForwardCache::default();

    for &i in indices {
        let obs = &buffer.obs[i];
        let action = &buffer.actions[i];
        let advantage = buffer.advantages[i];

        // Actor: clipped surrogate.
        let mean = policy.forward_cached(obs, &mut cache);
        let lp_new = log_prob(action, &mean, &log_std);
        let ratio = (lp_new - buffer.log_probs[i]).exp();
        let clipped_ratio = ratio.clamp(1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
        let surr_unclipped = ratio * advantage;
        let surr_clipped = clipped_ratio * advantage;
        report.actor_loss += -surr_unclipped.min(surr_clipped) / m;
        report.approx_kl += (buffer.log_probs[i] - lp_new) / m;
        if (ratio - clipped_ratio).abs() > 1e-12 {
            report.clip_fraction += 1.0 / m;
        }

        // d(-min)/d(logp): active only on the unclipped branch.
        if surr_unclipped <= surr_clipped {
            let dlogp = -ratio * advantage / m;
            let mut dmean = vec![0.0; act_dim];
            dlogp_dmean(action, &mean, &log_std, &mut dmean);
            for d in dmean.iter_mut() {
                *d *= dlogp;
            }
            policy.net.backward(&cache, &dmean, &mut pgrads.net);
            let mut dls = vec![0.0; act_dim];
            dlogp_dlogstd(action, &mean, &policy.log_std, &mut dls);
            for (g, d) in pgrads.log_std.iter_mut().zip(&dls) {
                *g += dlogp * d;
            }
        }

        // Entropy bonus gradient (log-std only).
        if cfg.entropy_coef != 0.0 {
            for (k, g) in pgrads.log_std.iter_mut().enumerate() {
                let inside = (super::policy::LOG_STD_MIN..=super::policy::LOG_STD_MAX)
                    .contains(&policy.log_std[k]);
                if inside {
                    *g -= cfg.entropy_coef / m;
                }
            }
        }

        // Critic: squared error against returns.
        let v = value.value_cached(obs, &mut vcache);
        let err = v - buffer.returns[i];
        report.critic_loss += err * err / m;
        let dv = cfg.value_coef * 2.0 * err / m;
        value.net.backward(&vcache, &[dv], &mut vgrads);

        *samples_seen += 1;
    }
    report.entropy += policy.entropy();

    policy_grads.clear();
    PolicyNetwork::flatten_grads(&pgrads, policy_grads);
    value_grads.clear();
    super::mlp::D2rlNet::flatten_grads(&vgrads, value_grads);
}

/// Flat (policy, value) gradients of the minibatch loss over `indices`,
/// for external gradient verification.
pub fn minibatch_gradients(
    policy: &PolicyNetwork,
    value: &ValueNetwork,
    buffer: &RolloutBuffer,
    indices: &[usize],
    cfg: &PpoConfig,
) -> (Vec<f64>, Vec<f64>) {
    let mut policy_grads = Vec::new();
    let mut value_grads = Vec::new();
    let mut report = LossReport::default();
    let mut seen = 0;
    minibatch_backward(
        policy,
        value,
        buffer,
        indices,
        cfg,
        &mut policy_grads,
        &mut value_grads,
        &mut report,
        &mut seen,
    );
    (policy_grads, value_grads)
}

/// Runs `epochs_per_update` passes of shuffled minibatches over the
/// buffer, applying jointly clipped Adam steps. Aborts on non-finite
/// losses or parameters.
pub fn ppo_update(
    buffer: &RolloutBuffer,
    policy: &mut PolicyNetwork,
    value: &mut ValueNetwork,
    optimizer: &mut Adam,
    cfg: &PpoConfig,
    shuffle_rng: &mut rand_chacha::ChaCha8Rng,
    update_index: usize,
) -> Result<LossReport, RlError> {
    use rand::seq::SliceRandom;
    cfg.validate()?;

    let p_count = policy.param_count();
    let mut report = LossReport::default();
    let mut batches = 0usize;
    let mut samples_seen = 0usize;
    let mut policy_grads = Vec::with_capacity(p_count);
    let mut value_grads = Vec::with_capacity(value.net.param_count());

    let mut indices: Vec<usize> = (0..buffer.len()).collect();
    for _epoch in 0..cfg.epochs_per_update {
        indices.shuffle(shuffle_rng);
        for chunk in indices.chunks(cfg.minibatch_size.max(1)) {
            let mut batch_report = LossReport::default();
            minibatch_backward(
                policy,
                value,
                buffer,
                chunk,
                cfg,
                &mut policy_grads,
                &mut value_grads,
                &mut batch_report,
                &mut samples_seen,
            );
            if !batch_report.actor_loss.is_finite() || !batch_report.critic_loss.is_finite() {
                return Err(RlError::NonFinite {
                    quantity: "loss".into(),
                    update: update_index,
                });
            }

            // Joint global-norm clip over actor and critic gradients, one
            // optimizer over the concatenated parameter vector.
            let mut grads = Vec::with_capacity(p_count + value_grads.len());
            grads.extend_from_slice(&policy_grads);
            grads.extend_from_slice(&value_grads);
            let norm = clip_global_norm(&mut grads, cfg.max_grad_norm);

            let mut params = Vec::with_capacity(grads.len());
            policy.flatten_params(&mut params);
            value.net.flatten_params(&mut params);
            optimizer.step(&mut params, &grads);
            if params.iter().any(|p| !p.is_finite()) {
                return Err(RlError::NonFinite {
                    quantity: "parameters".into(),
                    update: update_index,
                });
            }
            policy.unflatten_params(&params[..p_count]);
            value.net.unflatten_params(&params[p_count..]);

            report.actor_loss += batch_report.actor_loss;
            report.critic_loss += batch_report.critic_loss;
            report.clip_fraction += batch_report.clip_fraction;
            report.approx_kl += batch_report.approx_kl;
            report.grad_norm += norm;
            batches += 1;
        }
    }
    let b = batches.max(1) as f64;
    report.actor_loss /= b;
    report.critic_loss /= b;
    report.clip_fraction /= b;
    report.approx_kl /= b;
    report.grad_norm /= b;
    report.entropy = policy.entropy();
    Ok(report)
}
