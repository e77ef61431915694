//! The five-term step reward.
//!
//! `u` and `v` are the normalized horizontal/vertical offsets of the
//! navigation target from the image center at the state the action was
//! taken in; the reward is a function of (state, action).

use serde::{Deserialize, Serialize};

/// Which reward terms are active; disabled terms contribute exactly 0.
/// Used by the reward-ablation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardTerms {
    pub dis: bool,
    pub dir: bool,
    pub succ: bool,
    pub step: bool,
    pub stability: bool,
}

impl Default for RewardTerms {
    fn default() -> Self {
        RewardTerms {
            dis: true,
            dir: true,
            succ: true,
            step: true,
            stability: true,
        }
    }
}

impl RewardTerms {
    /// The cumulative ablation ladder: {dis}, {dis,dir}, {dis,dir,succ},
    /// {dis,dir,succ,stability}, {all}.
    pub fn ablation_ladder() -> [(&'static str, RewardTerms); 5] {
        let none = RewardTerms {
            dis: false,
            dir: false,
            succ: false,
            step: false,
            stability: false,
        };
        [
            ("dis", RewardTerms { dis: true, ..none }),
            (
                "dis+dir",
                RewardTerms {
                    dis: true,
                    dir: true,
                    ..none
                },
            ),
            (
                "dis+dir+succ",
                RewardTerms {
                    dis: true,
                    dir: true,
                    succ: true,
                    ..none
                },
            ),
            (
                "dis+dir+succ+stability",
                RewardTerms {
                    dis: true,
                    dir: true,
                    succ: true,
                    stability: true,
                    ..none
                },
            ),
            ("full", RewardTerms::default()),
        ]
    }
}

/// Per-step reward decomposition; `total` is exactly the sum of the five
/// term fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r_dis: f64,
    pub r_dir: f64,
    pub r_succ: f64,
    pub r_step: f64,
    pub r_penalty: f64,
    pub total: f64,
    pub u_t: f64,
    pub v_t: f64,
}

/// Centering reward: 1 - sqrt(u^2 + v^2 + epsilon).
pub fn reward_distance(u: f64, v: f64, epsilon: f64) -> f64 {
    1.0 - (u * u + v * v + epsilon).sqrt()
}

/// Directional consistency: cosine-style alignment of the lateral command
/// with the target offset. Not bounded by 1 when the command norm exceeds 1.
pub fn reward_direction(a_lr: f64, a_ud: f64, u: f64, v: f64, epsilon: f64) -> f64 {
    (a_lr * u + a_ud * v) / (u * u + v * v + epsilon).sqrt()
}

/// Success condition: both offsets strictly inside the tolerance band.
pub fn is_success(u: f64, v: f64, tau: f64) -> bool {
    u.abs() < tau && v.abs() < tau
}

/// 300 on success, else 0.
pub fn reward_success(u: f64, v: f64, tau: f64) -> f64 {
    if is_success(u, v, tau) {
        300.0
    } else {
        0.0
    }
}

/// 0 on success, else -0.015.
pub fn reward_step(success: bool) -> f64 {
    if success {
        0.0
    } else {
        -0.015
    }
}

/// -0.5 when at least `count_threshold` of the last `window` total rewards
/// were non-positive, else 0. `history` holds past step totals, newest last.
pub fn reward_stability(history: &[f64], window: usize, count_threshold: usize) -> f64 {
    let start = history.len().saturating_sub(window);
    let non_positive = history[start..].iter().filter(|r| **r <= 0.0).count();
    if non_positive >= count_threshold {
        -0.5
    } else {
        0.0
    }
}

/// Parameters consumed by [`RewardBreakdown::compute`].
#[derive(Debug, Clone, Copy)]
pub struct RewardParams {
    pub tau: f64,
    pub epsilon: f64,
    pub stability_window: usize,
    pub stability_count: usize,
    pub terms: RewardTerms,
}

impl RewardBreakdown {
    /// Evaluates all five terms for offsets (u, v), lateral commands, and
    /// the trailing total-reward history. Disabled terms are zeroed before
    /// the total is formed, so `total` always equals the exact sum.
    pub fn compute(
        u: f64,
        v: f64,
        a_lr: f64,
        a_ud: f64,
        history: &[f64],
        p: &RewardParams,
    ) -> RewardBreakdown {
        let success = is_success(u, v, p.tau);
        let mask = |on: bool, x: f64| if on { x } else { 0.0 };
        let r_dis = mask(p.terms.dis, reward_distance(u, v, p.epsilon));
        let r_dir = mask(p.terms.dir, reward_direction(a_lr, a_ud, u, v, p.epsilon));
        let r_succ = mask(p.terms.succ, reward_success(u, v, p.tau));
        let r_step = mask(p.terms.step, reward_step(success));
        let r_penalty = mask(
            p.terms.stability,
            reward_stability(history, p.stability_window, p.stability_count),
        );
        RewardBreakdown {
            r_dis,
            r_dir,
            r_succ,
            r_step,
            r_penalty,
            total: r_dis + r_dir + r_succ + r_step + r_penalty,
            u_t: u,
            v_t: v,
        }
    }
}
