//! Generalized advantage estimation.

use crate::error::RlError;

/// Computes raw GAE advantages and returns.
///
/// `values` must hold one entry per step plus the bootstrap value of the
/// state after the last step (length = rewards.len() + 1). `dones[t]`
/// marks transitions into terminal states, which cut both the TD residual
/// and the advantage recursion:
///
/// delta_t = r_t + gamma * V(s_{t+1}) * (1 - done_t) - V(s_t)
/// A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
///
/// Returns are advantages + values.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    gamma: f64,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>), RlError> {
    let n = rewards.len();
    if values.len() != n + 1 || dones.len() != n {
        return Err(RlError::LengthMismatch {
            rewards: n,
            values: values.len(),
            dones: dones.len(),
        });
    }
    let mut advantages = vec![0.0; n];
    let mut next_adv = 0.0;
    for t in (0..n).rev() {
        let not_done = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * values[t + 1] * not_done - values[t];
        next_adv = delta + gamma * lambda * not_done * next_adv;
        advantages[t] = next_adv;
    }
    let returns = advantages
        .iter()
        .zip(values)
        .map(|(a, v)| a + v)
        .collect();
    Ok((advantages, returns))
}

/// Normalizes to zero mean and unit variance in place; a no-op for fewer
/// than two samples or zero variance.
pub fn normalize_advantages(advantages: &mut [f64]) {
    let n = advantages.len();
    if n < 2 {
        return;
    }
    let mean = advantages.iter().sum::<f64>() / n as f64;
    let var = advantages.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n as f64;
    if var <= 0.0 {
        return;
    }
    let inv_std = 1.0 / var.sqrt();
    for a in advantages.iter_mut() {
        *a = (*a - mean) * inv_std;
    }
}
